var clickCount = 0;
var s = document.getElementById("sect_name");
s.addEventListener("click", function clkHdlr(e) {
  clickCount += 1;
  sendRequest("http://analytics.example/d?x=" + e.x + "&y=" + e.y);
});

document.body.addEventListener("unload", function (e) {
  sendRequest("http://analytics.example/c?n=" + clickCount);
});
