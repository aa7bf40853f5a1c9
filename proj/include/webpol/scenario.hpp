// Copyright 2026 The webpol-sim Authors
//
// Licensed under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#ifndef WEBPOL_SCENARIO_HPP
#define WEBPOL_SCENARIO_HPP

#include "webpol/browser.hpp"

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace webpol {

struct DomNode {
    std::string tag;
    std::optional<std::string> id;
    std::map<std::string, std::string> attributes;
    std::optional<std::string> value;
    std::vector<DomNode> children;
};

struct ScriptSpec {
    std::string name;
    SinkDomain origin = *SinkDomain::parse("localhost");
    bool policy = false;
    std::string code;
};

// An event-data coordinate holding a secret, for the NI checker.
struct SecretSlot {
    std::size_t index = 0;
    std::string field;
    std::string label_text = "HOST"; // who may see it
};

struct RequestExpectation {
    std::string sink;
    bool allowed = false;
    std::optional<std::string> url_prefix;
};

struct ElementExpectation {
    std::string id;
    std::optional<std::string> value;
    std::optional<std::string> value_label;
    std::optional<std::string> element_label;
    std::optional<bool> is_protected;
};

struct GlobalExpectation {
    std::string name;
    std::optional<std::string> value;
    std::optional<std::string> label;
};

struct HandlerExpectation {
    std::uint64_t event_seq = 0;
    std::string handler;
    std::optional<bool> privileged;
    std::optional<std::string> pc_at_entry;
    std::optional<std::string> event_label;
    std::optional<std::string> context_label;
    std::optional<std::string> outcome;
};

// One assignment of values to secret slots, keyed "index.field".
using NiVariant = std::vector<std::pair<std::string, std::string>>;

struct NiExpectation {
    std::vector<NiVariant> variants;
    bool pass = true;
    std::optional<std::string> witness_sink;
};

struct ModeExpectation {
    std::optional<std::vector<RequestExpectation>> requests;
    std::vector<ElementExpectation> dom;
    std::vector<GlobalExpectation> globals;
    std::vector<HandlerExpectation> handlers;
    std::optional<std::vector<std::string>> errors;
    std::optional<NiExpectation> ni;
};

struct Scenario {
    std::string name;
    std::string description;
    SinkDomain host = *SinkDomain::parse("localhost");
    Mode mode = Mode::Upgrade;
    DomNode dom;
    std::vector<ScriptSpec> scripts;
    std::vector<CannedResponse> responses;
    std::vector<EventInput> events;
    std::vector<SecretSlot> secret_slots;
    std::map<Mode, ModeExpectation> expect;
};

// Resolves a script `file` reference to its contents; nullopt if missing.
using FileResolver = std::function<std::optional<std::string>(std::string const& path)>;

FileResolver disk_resolver(std::string base_dir);

// Errors: SchemaError (message starts with the JSON path), PolicyOriginError, IoError.
Scenario load_scenario(std::string_view json_text, FileResolver const& resolve, std::string default_name = {});
Scenario load_scenario_file(std::string const& path);

// Splits "3.key" into (3, "key"). Throws SchemaError.
std::pair<std::size_t, std::string> parse_slot_key(std::string_view key);

}

#endif
