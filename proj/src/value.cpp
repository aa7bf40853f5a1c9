// Copyright 2026 The webpol-sim Authors
//
// Licensed under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "webpol/environment.hpp"
#include "webpol/value.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <limits>

namespace webpol {

template<class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};

bool truthy(Payload const& p)
{
    return std::visit(Overloaded {
                          [](Null) { return false; },
                          [](double d) { return d != 0 && !std::isnan(d); },
                          [](std::string const& s) { return !s.empty(); },
                          [](bool b) { return b; },
                          [](auto const&) { return true; },
                      },
        p);
}

namespace {

double string_to_number(std::string_view s)
{
    auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; };
    while (!s.empty() && is_space(s.front()))
        s.remove_prefix(1);
    while (!s.empty() && is_space(s.back()))
        s.remove_suffix(1);
    if (s.empty())
        return 0;
    if (s == "Infinity" || s == "+Infinity")
        return std::numeric_limits<double>::infinity();
    if (s == "-Infinity")
        return -std::numeric_limits<double>::infinity();
    if (s.front() == '+')
        s.remove_prefix(1);
    double value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ptr != s.data() + s.size())
        return std::numeric_limits<double>::quiet_NaN();
    if (ec == std::errc::result_out_of_range)
        return std::strtod(std::string(s).c_str(), nullptr); // saturates to +-inf or 0
    if (ec != std::errc {})
        return std::numeric_limits<double>::quiet_NaN();
    return value;
}

}

double to_number(Payload const& p)
{
    return std::visit(Overloaded {
                          [](Null) { return 0.0; },
                          [](double d) { return d; },
                          [](std::string const& s) { return string_to_number(s); },
                          [](bool b) { return b ? 1.0 : 0.0; },
                          [](auto const&) { return std::numeric_limits<double>::quiet_NaN(); },
                      },
        p);
}

std::string format_number(double v)
{
    if (std::isnan(v))
        return "NaN";
    if (std::isinf(v))
        return v > 0 ? "Infinity" : "-Infinity";
    if (v == 0)
        return "0";
    if (v < 0)
        return "-" + format_number(-v);

    // Shortest round-trip digits, then the ECMAScript Number::toString layout.
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific);
    (void)ec;
    std::string_view sci(buf, static_cast<std::size_t>(ptr - buf));
    auto e_pos = sci.find('e');
    std::string digits;
    for (char c : sci.substr(0, e_pos)) {
        if (c != '.')
            digits += c;
    }
    int exponent = 0;
    auto exp_text = sci.substr(e_pos + 1);
    if (exp_text.front() == '+')
        exp_text.remove_prefix(1);
    std::from_chars(exp_text.data(), exp_text.data() + exp_text.size(), exponent);

    int k = static_cast<int>(digits.size());
    int n = exponent + 1;
    if (k <= n && n <= 21)
        return digits + std::string(static_cast<std::size_t>(n - k), '0');
    if (0 < n && n <= 21)
        return digits.substr(0, static_cast<std::size_t>(n)) + "." + digits.substr(static_cast<std::size_t>(n));
    if (-6 < n && n <= 0)
        return "0." + std::string(static_cast<std::size_t>(-n), '0') + digits;
    std::string mantissa = digits.substr(0, 1);
    if (k > 1)
        mantissa += "." + digits.substr(1);
    int e = n - 1;
    return mantissa + "e" + (e >= 0 ? "+" : "-") + std::to_string(std::abs(e));
}

std::string to_display_string(Payload const& p)
{
    return std::visit(Overloaded {
                          [](Null) { return std::string("null"); },
                          [](double d) { return format_number(d); },
                          [](std::string const& s) { return s; },
                          [](bool b) { return std::string(b ? "true" : "false"); },
                          [](Object*) { return std::string("[object Object]"); },
                          [](Closure* c) {
                              return "[function " + (c->fn->name.empty() ? std::string("anonymous") : c->fn->name) + "]";
                          },
                          [](NativeFunction* f) { return "[function " + f->name + "]"; },
                          [](HostObject* h) { return "[object " + std::string(h->class_name()) + "]"; },
                          [](BoundMethod const& m) { return "[function " + m.name + "]"; },
                      },
        p);
}

std::vector<std::pair<std::string, TaintedValue const*>> Environment::sorted_bindings() const
{
    std::vector<std::pair<std::string, TaintedValue const*>> out;
    out.reserve(m_bindings.size());
    for (auto const& [name, value] : m_bindings)
        out.emplace_back(name, &value);
    std::ranges::sort(out, {}, &std::pair<std::string, TaintedValue const*>::first);
    return out;
}

}
