// Copyright 2026 The webpol-sim Authors
//
// Licensed under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "webpol/harness.hpp"
#include "webpol/parser.hpp"

#include <doctest.h>

#include <random>

using namespace webpol;

namespace {

ErrorKind error_kind(std::string_view source)
{
    try {
        parse_source(source);
    } catch (Error const& e) {
        return e.kind();
    }
    FAIL("expected an error for: " << source);
    return ErrorKind::IoError;
}

std::vector<std::pair<std::string, std::string>> corpus_scripts()
{
    std::vector<std::pair<std::string, std::string>> out;
    for (auto const& f : bundled_corpus()) {
        std::string_view path = f.path;
        if (path.ends_with(".js") || path.ends_with(".policy"))
            out.emplace_back(f.path, f.contents);
    }
    return out;
}

}

TEST_CASE("tokenize: smallest program")
{
    auto tokens = tokenize("x = 1;");
    REQUIRE(tokens.size() == 4);
    CHECK(tokens[0].is(TokenKind::Identifier, "x"));
    CHECK(tokens[1].is(TokenKind::Operator, "="));
    CHECK(tokens[2].is(TokenKind::Number, "1"));
    CHECK(tokens[3].is(TokenKind::Punctuation, ";"));
    CHECK(tokens[2].span == SourceSpan { 1, 5 });
}

TEST_CASE("tokenize: listener registration is 14 tokens")
{
    auto tokens = tokenize(R"(p.addEventListener("click", function(e){});)");
    CHECK(tokens.size() == 14);
    CHECK(tokens[4].kind == TokenKind::String);
    CHECK(tokens[4].text == "click");
    CHECK(tokens[6].is(TokenKind::Keyword, "function"));
}

TEST_CASE("tokenize: positions, comments and escapes")
{
    auto tokens = tokenize("// comment\n  var s = \"a\\\"b\\n\" + 'c';");
    REQUIRE(tokens.size() == 7);
    CHECK(tokens[0].span == SourceSpan { 2, 3 });
    CHECK(tokens[3].text == "a\"b\n");
    CHECK(tokens[5].text == "c");
    for (auto const& t : tokens)
        CHECK_FALSE(t.lexeme.empty());
    CHECK(tokenize("\"\"")[0].lexeme == "\"\"");
}

TEST_CASE("tokenize: errors")
{
    CHECK(error_kind("\"un") == ErrorKind::LexError);
    CHECK(error_kind("\"broken\nstring\"") == ErrorKind::LexError);
    CHECK(error_kind("x = #;") == ErrorKind::LexError);
    CHECK(error_kind("x = \"\\q\";") == ErrorKind::LexError);
    CHECK(error_kind("x = 12abc;") == ErrorKind::LexError);
    try {
        tokenize("x = 1;\n  @");
    } catch (Error const& e) {
        CHECK(e.span() == SourceSpan { 2, 3 });
    }
}

TEST_CASE("parse: implicit-flow example")
{
    CHECK(dump(*parse_source("if (sec) pub = true;"))
        == "(program (if (ident sec) (block (assign (ident pub) (bool true)))))");
}

TEST_CASE("parse: strength check call")
{
    CHECK(dump(*parse_source("var score = checkPwdStrength(p.value);"))
        == "(program (var score (call (ident checkPwdStrength) (member (ident p) value))))");
}

TEST_CASE("parse: precedence and associativity")
{
    CHECK(dump(*parse_source("x = a || b && c == d < e + f * -g;"))
        == "(program (assign (ident x) (|| (ident a) (&& (ident b) (== (ident c) (< (ident d) (+ (ident e) (* (ident f) "
           "(neg (ident g))))))))))");
    CHECK(dump(*parse_source("x = a - b - c;")) == "(program (assign (ident x) (- (- (ident a) (ident b)) (ident c))))");
    CHECK(dump(*parse_source("x = !a.b(c)[d];"))
        == "(program (assign (ident x) (not (index (call (member (ident a) b) (ident c)) (ident d)))))");
}

TEST_CASE("parse: dangling else binds to the nearest if")
{
    CHECK(dump(*parse_source("if (a) if (b) x = 1; else x = 2;"))
        == "(program (if (ident a) (block (if (ident b) (block (assign (ident x) (num 1))) (block (assign (ident x) (num "
           "2)))))))");
}

TEST_CASE("parse: sugar and literals")
{
    CHECK(dump(*parse_source("n += 1;")) == "(program (assign (ident n) (+ (ident n) (num 1))))");
    CHECK(dump(*parse_source("var o = { a: 1, \"b c\": null };"))
        == "(program (var o (object (\"a\" (num 1)) (\"b c\" (null)))))");
    CHECK(dump(*parse_source("var f = function g(x, y) { return x; };"))
        == "(program (var f (function g (x y) (block (return (ident x))))))");
    CHECK(dump(*parse_source("var x;")) == "(program (var x (null)))");
}

TEST_CASE("parse: grammar rejects what the subset leaves out")
{
    for (char const* bad : {
             "1 + ;",
             "x = 1",
             "for (i = 0; i < 3; i = i + 1) { }",
             "var img = new Image();",
             "try { x = 1; } catch (e) { }",
             "return 1;",
             "a + b = c;",
             "f() = 1;",
             "var;",
             "if x { }",
             "function () { }",
             "{ a: 1 };",
             "x = { 1: 2 };",
             "while (true) { ",
         }) {
        CAPTURE(bad);
        auto kind = error_kind(bad);
        CHECK((kind == ErrorKind::ParseError || kind == ErrorKind::LexError));
    }
}

TEST_CASE("parse: error carries expected and found")
{
    try {
        parse_source("var x = (1 + 2;");
        FAIL("expected a parse error");
    } catch (Error const& e) {
        CHECK(e.kind() == ErrorKind::ParseError);
        CHECK(std::string(e.what()).find("expected") != std::string::npos);
        CHECK(e.span().line == 1);
    }
}

TEST_CASE("every corpus script parses and round-trips")
{
    auto scripts = corpus_scripts();
    CHECK(scripts.size() >= 10);
    for (auto const& [name, code] : scripts) {
        CAPTURE(name);
        auto program = parse_source(code);
        auto printed = to_source(*program);
        auto reparsed = parse_source(printed);
        CHECK(dump(*reparsed) == dump(*program));
        // Printing is a fixed point after the first pass.
        CHECK(to_source(*reparsed) == printed);
    }
}

TEST_CASE("round-trip of tricky expressions")
{
    for (char const* src : {
             "x = (1).toString;",
             "x = ({ a: 1 }).a;",
             "(function () { return 1; })();",
             "x = -(-1);",
             "x = !(!a);",
             "x = 1e21 + 0.1 + 5e-7;",
             "x = \"quote \\\" and \\\\ and \\n\";",
             "x = a[b][c](d)(e);",
         }) {
        CAPTURE(src);
        auto program = parse_source(src);
        CHECK(dump(*parse_source(to_source(*program))) == dump(*program));
    }
}

TEST_CASE("fuzz: token mutations yield an error or a well-formed AST")
{
    std::mt19937_64 rng(0x5eed);
    auto scripts = corpus_scripts();
    int rejected = 0;
    int accepted = 0;
    for (int round = 0; round < 2000; ++round) {
        auto const& code = scripts[rng() % scripts.size()].second;
        auto tokens = tokenize(code);
        for (int m = 0, n = 1 + static_cast<int>(rng() % 3); m < n && !tokens.empty(); ++m) {
            auto i = rng() % tokens.size();
            switch (rng() % 3) {
            case 0:
                tokens.erase(tokens.begin() + static_cast<long>(i));
                break;
            case 1:
                tokens.insert(tokens.begin() + static_cast<long>(i), tokens[rng() % tokens.size()]);
                break;
            default:
                std::swap(tokens[i], tokens[rng() % tokens.size()]);
                break;
            }
        }
        std::string source;
        for (auto const& t : tokens)
            source += t.lexeme + " ";
        try {
            auto program = parse_source(source);
            ++accepted;
            // Accepted programs must print and reparse to the same tree.
            CHECK(dump(*parse_source(to_source(*program))) == dump(*program));
        } catch (Error const& e) {
            ++rejected;
            CHECK((e.kind() == ErrorKind::ParseError || e.kind() == ErrorKind::LexError));
        }
    }
    CHECK(rejected > 0);
    CHECK(accepted + rejected == 2000);
}
