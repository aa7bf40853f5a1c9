// Copyright 2026 The webpol-sim Authors
//
// Licensed under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "webpol/net.hpp"

#include <string>

#include "webpol/interpreter.hpp"

namespace webpol {

std::optional<ParsedUrl> parse_url(std::string_view url)
{
    auto sep = url.find("://");
    if (sep == std::string_view::npos || sep == 0)
        return std::nullopt;
    auto scheme = url.substr(0, sep);
    for (std::size_t i = 0; i < scheme.size(); ++i) {
        char c = scheme[i];
        bool alpha = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
        bool ok = alpha || (i > 0 && ((c >= '0' && c <= '9') || c == '+' || c == '-' || c == '.'));
        if (!ok)
            return std::nullopt;
    }

    auto after = url.substr(sep + 3);
    auto end = after.find_first_of("/?#");
    auto authority = after.substr(0, end);
    auto rest = end == std::string_view::npos ? std::string_view {} : after.substr(end);

    if (authority.find('@') != std::string_view::npos)
        return std::nullopt;
    if (auto colon = authority.find(':'); colon != std::string_view::npos) {
        auto port = authority.substr(colon + 1);
        if (port.empty() || port.size() > 5 || port.find_first_not_of("0123456789") != std::string_view::npos
            || std::stoul(std::string(port)) > 65535)
            return std::nullopt;
        authority = authority.substr(0, colon);
    }
    auto host = SinkDomain::parse(authority);
    if (!host)
        return std::nullopt;
    return ParsedUrl { std::string(scheme), std::move(*host), std::string(rest) };
}

NetworkRequest const& NetGate::send(Interpreter& interp, TaintedValue const& url)
{
    NetworkRequest request;
    request.url = to_display_string(url.payload);
    request.pc_at_send = interp.pc();
    request.effective_label = interp.lub(url.label, request.pc_at_send);
    request.seq = m_log.size();

    auto parsed = std::holds_alternative<std::string>(url.payload) ? parse_url(request.url) : std::nullopt;
    if (!parsed) {
        request.reason = "malformed";
    } else {
        request.sink = parsed->host;
        if (!flow_permitted(request.effective_label, *request.sink)) {
            request.reason = "label " + request.effective_label.to_string() + " does not flow to "
                + request.sink->name();
        } else if (m_force_block_all) {
            request.reason = "forced";
        } else {
            request.allowed = true;
            request.reason = "permitted";
        }
    }
    return m_log.emplace_back(std::move(request));
}

CannedResponse const* NetGate::match(std::string_view url) const
{
    CannedResponse const* best = nullptr;
    for (auto const& r : m_responses) {
        if (url.starts_with(r.url_prefix) && (!best || r.url_prefix.size() > best->url_prefix.size()))
            best = &r;
    }
    return best;
}

}
