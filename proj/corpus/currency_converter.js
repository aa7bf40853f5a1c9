function currencyConverter() {
  var toCur = document.getElementById("to").value;
  fetch("http://currconv.com/conv.jsp?toCur=" + toCur, function (xh) {
    if (xh.readyState == 4) {
      var currencyRate = Number(xh.responseText);
      var aAmt = document.getElementById("amt").value;
      var convAmt = aAmt * currencyRate;
      document.getElementById("camt").innerText = convAmt;
      sendRequest("http://currconv.com/amount.jsp?atc=" + aAmt);
    }
  });
}

document.getElementById("to").addEventListener("change", currencyConverter);
