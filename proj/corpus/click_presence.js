var clicks = 0;
var sawClick = false;
var s = document.getElementById("sect_name");
s.addEventListener("click", function clkHdlr(e) {
  clicks += 1;
  sawClick = true;
  sendRequest("http://analytics.example/ping?n=" + clicks);
  sendRequest("http://analytics.example/detail?x=" + e.x);
});
