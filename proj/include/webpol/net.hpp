// Copyright 2026 The webpol-sim Authors
//
// Licensed under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#ifndef WEBPOL_NET_HPP
#define WEBPOL_NET_HPP

#include "webpol/label.hpp"
#include "webpol/value.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace webpol {

class Interpreter;

struct ParsedUrl {
    std::string scheme;
    SinkDomain host;
    std::string rest; // path, query and fragment, verbatim
};

// Accepts `scheme://host[:port][/path][?query][#fragment]`. Only the host
// matters for permission checks.
std::optional<ParsedUrl> parse_url(std::string_view url);

struct NetworkRequest {
    std::string url;
    std::optional<SinkDomain> sink; // empty when the URL is malformed
    Label effective_label;
    Label pc_at_send;
    bool allowed = false;
    std::string reason;
    std::uint64_t seq = 0;
};

struct CannedResponse {
    std::string url_prefix;
    std::string body;
    std::string body_label_text = "public";
};

class NetGate {
public:
    explicit NetGate(std::vector<CannedResponse> responses = {}, bool force_block_all = false)
        : m_responses(std::move(responses))
        , m_force_block_all(force_block_all)
    {
    }

    // Logs and decides one outbound request. Never throws for bad URLs;
    // those are logged as blocked.
    NetworkRequest const& send(Interpreter& interp, TaintedValue const& url);

    // Longest urlPrefix that matches, if any.
    CannedResponse const* match(std::string_view url) const;

    std::vector<NetworkRequest> const& log() const { return m_log; }

private:
    std::vector<CannedResponse> m_responses;
    bool m_force_block_all;
    std::vector<NetworkRequest> m_log;
};

}

#endif
