// Copyright 2026 The webpol-sim Authors
//
// Licensed under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#ifndef WEBPOL_LABEL_HPP
#define WEBPOL_LABEL_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace webpol {

// True for lowercase dot-separated DNS names: [a-z0-9_-] runs, no empty
// components, no scheme, port, path or whitespace.
bool is_valid_dns_name(std::string_view name);

/// A network destination: the host part of a URL.
class SinkDomain {
public:
    /// Lowercases `text` and validates it. Returns nullopt if it is not a DNS name.
    static std::optional<SinkDomain> parse(std::string_view text);

    std::string const& name() const { return m_name; }

    bool operator==(SinkDomain const&) const = default;

private:
    explicit SinkDomain(std::string name)
        : m_name(std::move(name))
    {
    }

    std::string m_name;
};

/// Confidentiality label. The order is public < domain(d) < local, with
/// distinct domains incomparable.
class Label {
public:
    enum class Kind : std::uint8_t {
        Public,
        Domain,
        Local,
    };

    Label() = default;

    static Label public_label() { return Label {}; }
    static Label local() { return Label { Kind::Local, {} }; }
    static Label domain(SinkDomain const& d) { return Label { Kind::Domain, d.name() }; }

    Kind kind() const { return m_kind; }
    bool is_public() const { return m_kind == Kind::Public; }
    bool is_local() const { return m_kind == Kind::Local; }
    bool is_domain() const { return m_kind == Kind::Domain; }

    // Empty unless kind() == Kind::Domain.
    std::string const& domain_name() const { return m_domain; }

    // "public", "local" or the bare domain name.
    std::string to_string() const;

    bool operator==(Label const&) const = default;

private:
    Label(Kind kind, std::string domain)
        : m_kind(kind)
        , m_domain(std::move(domain))
    {
    }

    Kind m_kind { Kind::Public };
    std::string m_domain;
};

bool leq(Label const& a, Label const& b);
Label join(Label const& a, Label const& b);

// The sink rule: public data goes anywhere, domain(d) data goes to d and
// its subdomains, local data goes nowhere.
bool flow_permitted(Label const& label, SinkDomain const& sink);

// Parses "public", "local", "HOST" (resolved to `host`) or a DNS name.
// Throws Error{MalformedLabel} on anything else.
Label parse_label(std::string_view text, SinkDomain const& host);

}

#endif
