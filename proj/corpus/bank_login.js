// The bank's own login code: unprivileged, but the credentials may go home.
var form = document.getElementById("login");
form.addEventListener("submit", function submitLogin(e) {
  var user = document.getElementById("user").value;
  var pass = document.getElementById("pwd").value;
  sendRequest("http://bank.example/login?user=" + user + "&pwd=" + pass);
  sendRequest("https://auth.bank.example/audit?user=" + user);
});
