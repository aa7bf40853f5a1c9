var pwd = document.getElementById("passwordPwd");
pwd.addEventListener("keypress", function meterUpdate(e) {
  var n = pwd.value.length;
  var meter = document.getElementById("meter");
  if (n < 6) {
    meter.innerText = "too short";
  } else {
    meter.innerText = "ok";
  }
  document.getElementById("meterText").innerText = "length " + n;
  sendRequest("http://meter.example/log?len=" + n);
});
