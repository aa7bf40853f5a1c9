// Copyright 2026 The webpol-sim Authors
//
// Licensed under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "webpol/label.hpp"

#include "webpol/error.hpp"

#include <algorithm>

namespace webpol {

namespace {

bool is_name_char(char c)
{
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' || c == '_';
}

std::string to_lower(std::string_view text)
{
    std::string out(text);
    std::ranges::transform(out, out.begin(), [](unsigned char c) {
        return static_cast<char>((c >= 'A' && c <= 'Z') ? c - 'A' + 'a' : c);
    });
    return out;
}

}

bool is_valid_dns_name(std::string_view name)
{
    if (name.empty() || name.size() > 253)
        return false;
    std::size_t component = 0;
    for (char c : name) {
        if (c == '.') {
            if (component == 0)
                return false;
            component = 0;
            continue;
        }
        if (!is_name_char(c))
            return false;
        ++component;
    }
    return component != 0;
}

std::optional<SinkDomain> SinkDomain::parse(std::string_view text)
{
    auto lowered = to_lower(text);
    if (!is_valid_dns_name(lowered))
        return std::nullopt;
    return SinkDomain { std::move(lowered) };
}

std::string Label::to_string() const
{
    switch (m_kind) {
    case Kind::Public:
        return "public";
    case Kind::Local:
        return "local";
    case Kind::Domain:
        return m_domain;
    }
    return "public";
}

bool leq(Label const& a, Label const& b)
{
    if (a.is_public() || b.is_local())
        return true;
    if (a.is_domain() && b.is_domain())
        return a.domain_name() == b.domain_name();
    return false;
}

Label join(Label const& a, Label const& b)
{
    if (leq(a, b))
        return b;
    if (leq(b, a))
        return a;
    // Two distinct domains: local is the only upper bound.
    return Label::local();
}

bool flow_permitted(Label const& label, SinkDomain const& sink)
{
    switch (label.kind()) {
    case Label::Kind::Public:
        return true;
    case Label::Kind::Local:
        return false;
    case Label::Kind::Domain: {
        auto const& owner = label.domain_name();
        auto const& host = sink.name();
        if (host == owner)
            return true;
        return host.size() > owner.size() && host.ends_with(owner)
            && host[host.size() - owner.size() - 1] == '.';
    }
    }
    return false;
}

Label parse_label(std::string_view text, SinkDomain const& host)
{
    if (text == "public")
        return Label::public_label();
    if (text == "local")
        return Label::local();
    if (text == "HOST")
        return Label::domain(host);
    auto domain = SinkDomain::parse(text);
    // "Public" or "LOCAL" would print exactly like the keywords.
    if (domain && (domain->name() == "public" || domain->name() == "local"))
        domain.reset();
    if (!domain)
        throw Error(ErrorKind::MalformedLabel, "malformed label '" + std::string(text) + "'");
    return Label::domain(*domain);
}

}
