// Copyright 2026 The webpol-sim Authors
//
// Licensed under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

// Random small programs over boolean secrets, and a brute-force two-run
// noninterference check of their final public store.

#ifndef WEBPOL_TESTS_NSU_ORACLE_HPP
#define WEBPOL_TESTS_NSU_ORACLE_HPP

#include "webpol/interpreter.hpp"
#include "webpol/parser.hpp"

#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace webpol::testing {

inline SinkDomain const& oracle_host()
{
    static SinkDomain const host = *SinkDomain::parse("h.example");
    return host;
}

class ProgramGenerator {
public:
    explicit ProgramGenerator(std::uint64_t seed)
        : m_rng(seed)
    {
    }

    // At most `max_statements` statements, counting nested ones.
    std::string generate(int max_statements)
    {
        m_budget = 1 + static_cast<int>(m_rng() % static_cast<std::uint64_t>(max_statements));
        std::string body;
        while (m_budget > 0)
            body += statement(2) + "\n";
        return prelude() + body;
    }

    static std::string prelude()
    {
        return "var p1 = false; var p2 = 0; var p3 = true; var o = {};\n"
               "function f(a) { if (a) { return true; } return false; }\n";
    }

private:
    std::string pick(std::vector<std::string> const& items) { return items[m_rng() % items.size()]; }

    std::string expr(int depth)
    {
        if (depth == 0 || m_rng() % 3 == 0)
            return pick({ "s1", "s2", "p1", "p2", "p3", "true", "false", "0", "1", "o.k" });
        switch (m_rng() % 6) {
        case 0:
            return "!" + expr(depth - 1);
        case 1:
            return "(" + expr(depth - 1) + " && " + expr(depth - 1) + ")";
        case 2:
            return "(" + expr(depth - 1) + " || " + expr(depth - 1) + ")";
        case 3:
            return "(" + expr(depth - 1) + " == " + expr(depth - 1) + ")";
        case 4:
            return "f(" + expr(depth - 1) + ")";
        default:
            return "(" + expr(depth - 1) + " + " + expr(depth - 1) + ")";
        }
    }

    std::string statement(int depth)
    {
        --m_budget;
        std::string target = pick({ "p1", "p2", "p3" });
        switch (depth > 0 && m_budget > 0 ? m_rng() % 6 : m_rng() % 3) {
        case 0:
        case 1:
            return target + " = " + expr(2) + ";";
        case 2:
            return "o." + pick({ "k", "m" }) + " = " + expr(1) + ";";
        case 3:
        case 4: {
            std::string out = "if (" + expr(2) + ") { " + statement(depth - 1) + " }";
            if (m_budget > 0 && m_rng() % 2)
                out += " else { " + statement(depth - 1) + " }";
            return out;
        }
        default:
            return "if (" + expr(1) + ") { var " + target + " = " + expr(1) + "; " + (m_budget > 0 ? statement(depth - 1) : "")
                + " }";
        }
    }

    std::mt19937_64 m_rng;
    int m_budget = 0;
};

// What a public observer sees of the final store. nullopt if the run raised.
inline std::optional<std::map<std::string, std::string>> public_store(
    ast::Program const& program, Mode mode, bool s1, bool s2)
{
    InterpreterOptions options;
    options.mode = mode;
    Interpreter interp(oracle_host(), options);
    interp.globals().declare("s1", make_value(s1, Label::domain(oracle_host())));
    interp.globals().declare("s2", make_value(s2, Label::local()));
    try {
        interp.run_program(program, false, oracle_host());
    } catch (Error const&) {
        return std::nullopt;
    }
    std::map<std::string, std::string> view;
    for (auto const& [name, slot] : interp.globals().sorted_bindings()) {
        if (name == "s1" || name == "s2" || !slot->label.is_public())
            continue;
        if (auto const* obj = std::get_if<Object*>(&slot->payload)) {
            if ((*obj)->shape.is_public()) {
                std::string names;
                for (auto const& [field, _] : (*obj)->fields)
                    names += field + ",";
                view[name + "#fields"] = names;
            }
            for (auto const& [field, value] : (*obj)->fields) {
                if (value.label.is_public())
                    view[name + "." + field] = to_display_string(value.payload);
            }
            continue;
        }
        view[name] = to_display_string(slot->payload);
    }
    return view;
}

struct OracleResult {
    int programs = 0;
    int compared_pairs = 0;
    int counterexamples = 0;
    std::string first_counterexample;
};

// Runs every program under all four secret assignments and compares the
// public views of each pair of runs that finished.
inline OracleResult run_ni_oracle(std::vector<std::string> const& sources, Mode mode)
{
    OracleResult result;
    for (auto const& source : sources) {
        auto program = parse_source(source);
        ++result.programs;
        std::vector<std::map<std::string, std::string>> finished;
        for (int bits = 0; bits < 4; ++bits) {
            if (auto view = public_store(*program, mode, bits & 1, bits & 2))
                finished.push_back(std::move(*view));
        }
        for (std::size_t i = 0; i < finished.size(); ++i) {
            for (std::size_t j = i + 1; j < finished.size(); ++j) {
                ++result.compared_pairs;
                if (finished[i] != finished[j]) {
                    if (result.counterexamples++ == 0)
                        result.first_counterexample = source;
                }
            }
        }
    }
    return result;
}

inline std::vector<std::string> generate_programs(std::uint64_t seed, int count, int max_statements = 12)
{
    ProgramGenerator gen(seed);
    std::vector<std::string> out;
    for (int i = 0; i < count; ++i)
        out.push_back(gen.generate(max_statements));
    return out;
}

}

#endif
