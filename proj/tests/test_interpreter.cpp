// Copyright 2026 The webpol-sim Authors
//
// Licensed under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "webpol/interpreter.hpp"
#include "webpol/parser.hpp"

#include <doctest.h>

#include <random>

using namespace webpol;

namespace {

SinkDomain const host = *SinkDomain::parse("h.example");
Label const H = Label::domain(host);
Label const O = Label::domain(*SinkDomain::parse("other.example"));
Label const P {};
Label const L = Label::local();

// Keeps parsed programs alive for as long as closures may refer to them.
struct Vm {
    explicit Vm(Mode mode = Mode::Upgrade, InterpreterOptions options = {})
        : interp(host, [&] {
            options.mode = mode;
            return options;
        }())
    {
    }

    void set(std::string name, Payload payload, Label label = {})
    {
        interp.globals().declare(std::move(name), make_value(std::move(payload), std::move(label)));
    }

    void run(std::string_view source, bool privileged = false)
    {
        programs.push_back(parse_source(source));
        interp.run_program(*programs.back(), privileged, host);
    }

    TaintedValue eval(std::string_view expression)
    {
        programs.push_back(parse_source(std::string(expression) + ";"));
        auto const& stmt = *programs.back()->stmts.front();
        return interp.evaluate(*std::get<ast::ExprStmt>(stmt.node).expr, interp.globals());
    }

    TaintedValue get(std::string_view name)
    {
        auto* slot = interp.globals().lookup(name);
        REQUIRE(slot);
        return *slot;
    }

    Interpreter interp;
    std::vector<std::shared_ptr<ast::Program const>> programs;
};

ErrorKind run_error(Vm& vm, std::string_view source)
{
    try {
        vm.run(source);
    } catch (Error const& e) {
        return e.kind();
    }
    FAIL("expected an error: " << source);
    return ErrorKind::IoError;
}

}

TEST_CASE("literals and arithmetic")
{
    Vm vm;
    auto v = vm.eval("1 + 2");
    CHECK(std::get<double>(v.payload) == 3);
    CHECK(v.label == P);
    CHECK(to_display_string(vm.eval("\"n=\" + 1.5").payload) == "n=1.5");
    CHECK(to_display_string(vm.eval("0.1 + 0.2").payload) == "0.30000000000000004");
    CHECK(to_display_string(vm.eval("\"100\" * \"0.92\"").payload) == "92");
    CHECK(to_display_string(vm.eval("7 % 4 - 10 / 4").payload) == "0.5");
    CHECK(std::get<bool>(vm.eval("\"1\" == 1").payload));
    CHECK(std::get<bool>(vm.eval("1 <= 1").payload));
    CHECK(std::get<bool>(vm.eval("null == null").payload));
    CHECK(std::get<bool>(vm.eval("\"b\" > \"a\"").payload));
}

TEST_CASE("string helpers")
{
    Vm vm;
    CHECK(to_display_string(vm.eval("\"Hello\".toUpperCase()").payload) == "HELLO");
    CHECK(to_display_string(vm.eval("\"Hello\".charAt(1)").payload) == "e");
    CHECK(to_display_string(vm.eval("\"Hello\".indexOf(\"l\")").payload) == "2");
    CHECK(to_display_string(vm.eval("\"Hello\".substring(1, 3)").payload) == "el");
    CHECK(to_display_string(vm.eval("\"Hello\".length").payload) == "5");
    vm.set("s", std::string("secret"), H);
    CHECK(vm.eval("s.length").label == H);
    CHECK(vm.eval("s.charAt(0)").label == H);
}

TEST_CASE("taint survives concatenation")
{
    Vm vm;
    vm.set("p", std::string("abc"), H);
    vm.set("score", std::string("weak"), P);
    auto v = vm.eval("p + score");
    CHECK(std::get<std::string>(v.payload) == "abcweak");
    CHECK(v.label == H);
}

TEST_CASE("identifier read joins pc")
{
    Vm vm;
    vm.set("x", 1.0);
    vm.interp.context().pc.push(H, FrameOrigin::Branch);
    CHECK(vm.eval("x").label == H);
    CHECK(vm.eval("3").label == H);
    vm.interp.context().pc.pop();
    CHECK(vm.eval("x").label == P);
}

TEST_CASE("short-circuit joins only evaluated operands")
{
    Vm vm;
    vm.set("sec", true, H);
    vm.set("osec", false, O);
    CHECK(vm.eval("false && sec").label == P);
    CHECK(vm.eval("true || sec").label == P);
    CHECK(vm.eval("sec && true").label == H);
    CHECK(vm.eval("osec || sec").label == L);
    CHECK(std::get<bool>(vm.eval("sec || osec").payload));
}

TEST_CASE("implicit flow: upgrade mode")
{
    SUBCASE("secret true")
    {
        Vm vm;
        vm.set("sec", true, H);
        vm.run("var pub = false; if (sec) pub = true;");
        auto pub = vm.get("pub");
        CHECK(std::get<bool>(pub.payload));
        CHECK(pub.label == H);
    }
    SUBCASE("secret false leaves the public write")
    {
        Vm vm;
        vm.set("sec", false, H);
        vm.run("var pub = false; if (sec) pub = true;");
        auto pub = vm.get("pub");
        CHECK_FALSE(std::get<bool>(pub.payload));
        CHECK(pub.label == P);
    }
}

TEST_CASE("implicit flow: nsu mode")
{
    Vm vm(Mode::Nsu);
    vm.set("sec", true, H);
    CHECK(run_error(vm, "var pub = false; if (sec) pub = true;") == ErrorKind::ImplicitFlowError);
    CHECK(std::get<bool>(vm.get("pub").payload) == false);

    Vm other(Mode::Nsu);
    other.set("sec", true, H);
    other.run("var pub = false; var hi = 0; hi = sec; if (sec) hi = 1;");
    CHECK(other.get("hi").label == H);
}

TEST_CASE("write_slot rules")
{
    SUBCASE("upgrade raises the slot")
    {
        Vm vm;
        TaintedValue slot = make_value(0.0);
        vm.interp.context().pc.push(H, FrameOrigin::Branch);
        vm.interp.write_slot(slot, make_value(5.0), {}, "slot");
        CHECK(slot.label == H);
    }
    SUBCASE("nsu allows a write into a higher slot")
    {
        Vm vm(Mode::Nsu);
        TaintedValue slot = make_value(0.0, L);
        vm.interp.context().pc.push(H, FrameOrigin::Branch);
        vm.interp.write_slot(slot, make_value(5.0), {}, "slot");
        CHECK(std::get<double>(slot.payload) == 5);
        CHECK(slot.label == H);
    }
    SUBCASE("nsu rejects a write into a public slot")
    {
        Vm vm(Mode::Nsu);
        TaintedValue slot = make_value(0.0);
        vm.interp.context().pc.push(H, FrameOrigin::Branch);
        CHECK_THROWS_AS(vm.interp.write_slot(slot, make_value(5.0), {}, "slot"), Error);
        CHECK(std::get<double>(slot.payload) == 0);
    }
    SUBCASE("extra context counts like pc")
    {
        Vm vm(Mode::Nsu);
        TaintedValue slot = make_value(0.0);
        CHECK_THROWS_AS(vm.interp.write_slot(slot, make_value(5.0), H, "slot"), Error);
    }
}

TEST_CASE("while loop labels and frames")
{
    Vm vm;
    vm.set("n", 3.0, H);
    vm.run("var i = 0; var c = 0; while (i < n) { i = i + 1; c = c + 2; }");
    CHECK(std::get<double>(vm.get("c").payload) == 6);
    CHECK(vm.get("c").label == H);
    CHECK(vm.interp.context().pc.empty());
}

TEST_CASE("closures")
{
    SUBCASE("identity")
    {
        Vm vm;
        vm.run("function id(x) { return x; } var r = id(7);");
        CHECK(std::get<double>(vm.get("r").payload) == 7);
        CHECK(vm.get("r").label == P);
    }
    SUBCASE("captured counter counts 1, 2, 3")
    {
        Vm vm;
        vm.run("var clickCount = 0; function clkHdlr() { clickCount = clickCount + 1; return clickCount; }");
        auto f = vm.get("clkHdlr");
        for (double expected : { 1.0, 2.0, 3.0 }) {
            auto r = vm.interp.call(f, {});
            CHECK(std::get<double>(r.payload) == expected);
        }
        CHECK(std::get<double>(vm.get("clickCount").payload) == 3);
    }
    SUBCASE("closure environment outlives its frame")
    {
        Vm vm;
        vm.run("function mk() { var c = 10; return function () { c = c + 1; return c; }; }"
               "var f = mk(); var g = mk(); f(); var a = f(); var b = g();");
        CHECK(std::get<double>(vm.get("a").payload) == 12);
        CHECK(std::get<double>(vm.get("b").payload) == 11);
    }
    SUBCASE("a closure created under a secret pc taints its result")
    {
        Vm vm;
        vm.interp.context().pc.push(H, FrameOrigin::Branch);
        vm.run("var f = function () { return 1; };");
        vm.interp.context().pc.pop();
        auto f = vm.get("f");
        CHECK(f.label == H);
        auto r = vm.interp.call(f, {});
        CHECK(std::get<double>(r.payload) == 1);
        CHECK(r.label == H);
    }
    SUBCASE("missing arguments are null")
    {
        Vm vm;
        vm.run("function two(a, b) { return b == null; } var r = two(1);");
        CHECK(std::get<bool>(vm.get("r").payload));
    }
    SUBCASE("return under a secret branch taints the result")
    {
        Vm vm;
        vm.set("sec", true, H);
        vm.run("function f() { if (sec) { return 1; } return 2; } var r = f();");
        CHECK(vm.get("r").label == H);
        Vm vm2;
        vm2.set("sec", false, H);
        vm2.run("function f() { if (sec) { return 1; } return 2; } var r = f();");
        CHECK(std::get<double>(vm2.get("r").payload) == 2);
        CHECK(vm2.get("r").label == H);
    }
    SUBCASE("closures keep the privilege of their creator")
    {
        Vm vm;
        bool seen = false;
        vm.interp.define_native("probe", [&](Interpreter& in, std::span<TaintedValue const>) {
            seen = in.context().privileged;
            return make_value(Null {});
        });
        vm.run("function p() { probe(); }", true);
        vm.run("p();", false);
        CHECK(seen);
        vm.run("function u() { probe(); }", false);
        vm.run("u();", true);
        CHECK_FALSE(seen);
    }
}

TEST_CASE("objects")
{
    Vm vm;
    vm.set("sec", std::string("s"), H);
    vm.run("var o = { a: 1, b: sec }; o.c = 3; o[\"d\"] = o.a + o.c; var x = o.b; var y = o.d;");
    CHECK(vm.get("x").label == H);
    CHECK(vm.get("y").label == P);
    CHECK(std::get<double>(vm.get("y").payload) == 4);
    CHECK(vm.eval("o.missing").is_null());

    Vm nsu(Mode::Nsu);
    nsu.set("sec", true, H);
    CHECK(run_error(nsu, "var o = { a: 1 }; if (sec) { o.b = 2; }") == ErrorKind::ImplicitFlowError);
}

TEST_CASE("runtime errors carry spans")
{
    Vm vm;
    try {
        vm.run("var x = 1;\nx();");
        FAIL("expected TypeError");
    } catch (Error const& e) {
        CHECK(e.kind() == ErrorKind::TypeError);
        CHECK(e.span().line == 2);
    }
    CHECK(run_error(vm, "y = 1;") == ErrorKind::UndefinedVariable);
    CHECK(run_error(vm, "var z = nope + 1;") == ErrorKind::UndefinedVariable);
    CHECK(run_error(vm, "var q = null; q.f = 1;") == ErrorKind::TypeError);
}

TEST_CASE("resource limits")
{
    InterpreterOptions options;
    options.step_budget = 10'000;
    Vm loop(Mode::Upgrade, options);
    CHECK(run_error(loop, "while (true) { }") == ErrorKind::ResourceLimit);

    Vm recursion;
    CHECK(run_error(recursion, "function f() { return f(); } f();") == ErrorKind::ResourceLimit);
}

TEST_CASE("plain mode never labels")
{
    InterpreterOptions options;
    options.track_labels = false;
    Vm vm(Mode::Nsu, options);
    vm.set("sec", true, H);
    vm.run("var pub = false; if (sec) pub = true; var s = sec;");
    CHECK(std::get<bool>(vm.get("pub").payload));
    CHECK(vm.get("pub").label == P);
}

namespace {

struct OperationChecker : ExecutionObserver {
    int operations = 0;
    int violations = 0;
    void on_operation(std::string_view, std::span<Label const> operands, Label const& result) override
    {
        ++operations;
        for (auto const& l : operands)
            violations += !leq(l, result);
    }
};

struct ExprGen {
    std::mt19937_64& rng;
    std::vector<std::string> const& vars;
    bool short_circuit;

    std::string gen(int depth)
    {
        if (depth == 0 || rng() % 4 == 0) {
            switch (rng() % 4) {
            case 0:
                return std::to_string(rng() % 10);
            case 1:
                return "\"s" + std::to_string(rng() % 3) + "\"";
            default:
                return vars[rng() % vars.size()];
            }
        }
        static char const* const strict_ops[] = { "+", "-", "*", "==", "!=", "<", ">=", "<=" };
        static char const* const lazy_ops[] = { "&&", "||" };
        switch (rng() % 5) {
        case 0:
            return "(!" + gen(depth - 1) + ")";
        case 1:
            return "(-" + gen(depth - 1) + ")";
        default:
            if (short_circuit && rng() % 3 == 0)
                return "(" + gen(depth - 1) + " " + lazy_ops[rng() % 2] + " " + gen(depth - 1) + ")";
            return "(" + gen(depth - 1) + " " + strict_ops[rng() % std::size(strict_ops)] + " " + gen(depth - 1) + ")";
        }
    }
};

}

TEST_CASE("property: every operation result dominates its operands")
{
    std::mt19937_64 rng(42);
    std::vector<std::string> vars { "a", "b", "c", "d" };
    std::vector<Label> pool { P, H, O, L };
    for (int round = 0; round < 300; ++round) {
        Vm vm;
        OperationChecker checker;
        vm.interp.set_observer(&checker);
        std::vector<Label> labels;
        for (auto const& v : vars) {
            labels.push_back(pool[rng() % pool.size()]);
            vm.set(v, static_cast<double>(rng() % 5), labels.back());
        }
        Label pc = pool[rng() % pool.size()];
        vm.interp.context().pc.push(pc, FrameOrigin::Branch);
        ExprGen gen { rng, vars, true };
        auto src = gen.gen(4);
        CAPTURE(src);
        auto result = vm.eval(src);
        CHECK(checker.violations == 0);
        CHECK(leq(pc, result.label));
    }
}

TEST_CASE("property: strict expressions are labeled by exactly the variables they mention")
{
    std::mt19937_64 rng(7);
    std::vector<std::string> vars { "a", "b", "c", "d" };
    std::vector<Label> pool { P, H, O, L };
    for (int round = 0; round < 300; ++round) {
        Vm vm;
        std::map<std::string, Label> labels;
        for (auto const& v : vars) {
            labels[v] = pool[rng() % pool.size()];
            vm.set(v, static_cast<double>(rng() % 5), labels[v]);
        }
        ExprGen gen { rng, vars, false };
        auto src = gen.gen(4);
        // Oracle: join of the labels of every variable named in the text.
        Label expected;
        for (auto const& [name, label] : labels) {
            if (src.find(name) != std::string::npos)
                expected = join(expected, label);
        }
        CAPTURE(src);
        CHECK(vm.eval(src).label == expected);
    }
}

namespace {

struct WriteChecker : ExecutionObserver {
    int writes = 0;
    int confinement_violations = 0;
    int unbalanced = 0;
    void on_write(std::string_view, Label const& context, Label const& stored, bool) override
    {
        ++writes;
        confinement_violations += !leq(context, stored);
    }
    void on_top_level_statement(PcStack const& pc) override
    {
        unbalanced += pc.count(FrameOrigin::Branch) + pc.count(FrameOrigin::Loop) != 0;
    }
};

std::string random_program(std::mt19937_64& rng, int statements)
{
    std::vector<std::string> vars { "s1", "s2", "x", "y" };
    ExprGen gen { rng, vars, true };
    std::string out = "var x = 0; var y = 0; function f(a) { if (a) { return x; } x = x + 1; return y; }\n";
    std::function<std::string(int)> stmt = [&](int depth) -> std::string {
        std::string target = rng() % 2 ? "x" : "y";
        switch (depth > 0 ? rng() % 5 : 0) {
        case 1:
            return "if (" + gen.gen(2) + ") { " + stmt(depth - 1) + " } else { " + stmt(depth - 1) + " }";
        case 2:
            return "var k = 0; while (k < 2 && " + gen.gen(1) + ") { k = k + 1; " + stmt(depth - 1) + " }";
        case 3:
            return target + " = f(" + gen.gen(1) + ");";
        default:
            return target + " = " + gen.gen(2) + ";";
        }
    };
    for (int i = 0; i < statements; ++i)
        out += stmt(2) + "\n";
    return out;
}

}

TEST_CASE("property: pc confinement and stack balance (upgrade)")
{
    std::mt19937_64 rng(99);
    int total_writes = 0;
    for (int round = 0; round < 200; ++round) {
        Vm vm;
        WriteChecker checker;
        vm.interp.set_observer(&checker);
        vm.set("s1", static_cast<bool>(rng() % 2), H);
        vm.set("s2", static_cast<double>(rng() % 3), O);
        auto src = random_program(rng, 6);
        CAPTURE(src);
        vm.run(src);
        CHECK(checker.confinement_violations == 0);
        CHECK(checker.unbalanced == 0);
        CHECK(vm.interp.context().pc.empty());
        total_writes += checker.writes;
    }
    CHECK(total_writes > 1000);
}

TEST_CASE("stack is restored after a failing statement")
{
    Vm vm(Mode::Nsu);
    vm.set("sec", true, H);
    CHECK(run_error(vm, "var pub = 0; while (sec) { if (sec) { pub = 1; } }") == ErrorKind::ImplicitFlowError);
    CHECK(vm.interp.context().pc.empty());
}
