// Copyright 2026 The webpol-sim Authors
//
// Licensed under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "webpol/scenario.hpp"

#include <json.hpp>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace webpol {

using Json = nlohmann::json;

namespace {

[[noreturn]] void schema_error(std::string const& path, std::string const& message)
{
    throw Error(ErrorKind::SchemaError, path + ": " + message);
}

char const* json_type(Json const& j)
{
    return j.type_name();
}

void check_keys(Json const& obj, std::string const& path, std::initializer_list<std::string_view> allowed)
{
    for (auto const& [key, _] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            schema_error(path + "." + key, "unknown field");
    }
}

Json const& require_object(Json const& j, std::string const& path)
{
    if (!j.is_object())
        schema_error(path, std::string("expected an object, found ") + json_type(j));
    return j;
}

Json const& require_array(Json const& j, std::string const& path)
{
    if (!j.is_array())
        schema_error(path, std::string("expected an array, found ") + json_type(j));
    return j;
}

Json const* field(Json const& obj, std::string_view key)
{
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

std::string get_string(Json const& j, std::string const& path)
{
    if (!j.is_string())
        schema_error(path, std::string("expected a string, found ") + json_type(j));
    return j.get<std::string>();
}

std::string require_string(Json const& obj, std::string_view key, std::string const& path)
{
    auto const* j = field(obj, key);
    if (!j)
        schema_error(path + "." + std::string(key), "missing required field");
    return get_string(*j, path + "." + std::string(key));
}

std::optional<std::string> optional_string(Json const& obj, std::string_view key, std::string const& path)
{
    auto const* j = field(obj, key);
    if (!j)
        return std::nullopt;
    return get_string(*j, path + "." + std::string(key));
}

std::optional<bool> optional_bool(Json const& obj, std::string_view key, std::string const& path)
{
    auto const* j = field(obj, key);
    if (!j)
        return std::nullopt;
    if (!j->is_boolean())
        schema_error(path + "." + std::string(key), std::string("expected a boolean, found ") + json_type(*j));
    return j->get<bool>();
}

std::uint64_t require_index(Json const& obj, std::string_view key, std::string const& path)
{
    auto const* j = field(obj, key);
    auto p = path + "." + std::string(key);
    if (!j)
        schema_error(p, "missing required field");
    if (!j->is_number_unsigned())
        schema_error(p, "expected a non-negative integer");
    return j->get<std::uint64_t>();
}

std::string index_path(std::string const& path, std::size_t i)
{
    return path + "[" + std::to_string(i) + "]";
}

SinkDomain require_domain(std::string const& text, std::string const& path)
{
    auto d = SinkDomain::parse(text);
    if (!d)
        schema_error(path, "'" + text + "' is not a valid domain name");
    return *d;
}

void check_label_text(std::string const& text, SinkDomain const& host, std::string const& path)
{
    try {
        (void)parse_label(text, host);
    } catch (Error const& e) {
        schema_error(path, e.what());
    }
}

DomNode load_dom(Json const& j, std::string const& path, std::set<std::string>& ids)
{
    require_object(j, path);
    check_keys(j, path, { "tag", "id", "attributes", "value", "children" });
    DomNode node;
    node.tag = require_string(j, "tag", path);
    node.id = optional_string(j, "id", path);
    if (node.id) {
        if (node.id->empty())
            schema_error(path + ".id", "empty id");
        if (!ids.insert(*node.id).second)
            schema_error(path + ".id", "duplicate id '" + *node.id + "'");
    }
    if (auto const* attrs = field(j, "attributes")) {
        require_object(*attrs, path + ".attributes");
        for (auto const& [key, value] : attrs->items())
            node.attributes.emplace(key, get_string(value, path + ".attributes." + key));
    }
    node.value = optional_string(j, "value", path);
    if (auto const* children = field(j, "children")) {
        require_array(*children, path + ".children");
        for (std::size_t i = 0; i < children->size(); ++i)
            node.children.push_back(load_dom((*children)[i], index_path(path + ".children", i), ids));
    }
    return node;
}

Payload event_datum(Json const& j, std::string const& path)
{
    if (j.is_string())
        return j.get<std::string>();
    if (j.is_number())
        return j.get<double>();
    if (j.is_boolean())
        return j.get<bool>();
    schema_error(path, std::string("expected a string, number or boolean, found ") + json_type(j));
}

std::optional<std::string> label_field(Json const& obj, std::string_view key, std::string const& path,
    SinkDomain const& host)
{
    auto text = optional_string(obj, key, path);
    if (text) {
        check_label_text(*text, host, path + "." + std::string(key));
        // Normalize to the serialized form so reports compare as strings.
        *text = parse_label(*text, host).to_string();
    }
    return text;
}

NiExpectation load_ni(Json const& j, std::string const& path, Scenario const& sc)
{
    require_object(j, path);
    check_keys(j, path, { "vary", "verdict", "witnessSink" });
    NiExpectation ni;
    auto verdict = require_string(j, "verdict", path);
    if (verdict != "pass" && verdict != "fail")
        schema_error(path + ".verdict", "expected \"pass\" or \"fail\"");
    ni.pass = verdict == "pass";
    ni.witness_sink = optional_string(j, "witnessSink", path);

    auto const* vary = field(j, "vary");
    if (!vary)
        schema_error(path + ".vary", "missing required field");
    require_object(*vary, path + ".vary");
    std::optional<std::size_t> count;
    for (auto const& [key, values] : vary->items()) {
        auto vpath = path + ".vary." + key;
        auto [index, name] = parse_slot_key(key);
        bool declared = std::any_of(sc.secret_slots.begin(), sc.secret_slots.end(),
            [&](SecretSlot const& s) { return s.index == index && s.field == name; });
        if (!declared)
            schema_error(vpath, "'" + key + "' is not a declared secret slot");
        require_array(values, vpath);
        if (count && *count != values.size())
            schema_error(vpath, "all value lists must have the same length");
        count = values.size();
        if (ni.variants.empty())
            ni.variants.resize(values.size());
        for (std::size_t i = 0; i < values.size(); ++i)
            ni.variants[i].emplace_back(key, get_string(values[i], index_path(vpath, i)));
    }
    if (!count || *count < 2)
        schema_error(path + ".vary", "need at least two variants");
    return ni;
}

ModeExpectation load_expectation(Json const& j, std::string const& path, Scenario const& sc)
{
    require_object(j, path);
    check_keys(j, path, { "requests", "dom", "globals", "handlers", "errors", "ni" });
    ModeExpectation e;
    if (auto const* reqs = field(j, "requests")) {
        require_array(*reqs, path + ".requests");
        e.requests.emplace();
        for (std::size_t i = 0; i < reqs->size(); ++i) {
            auto p = index_path(path + ".requests", i);
            auto const& r = require_object((*reqs)[i], p);
            check_keys(r, p, { "sink", "decision", "urlPrefix" });
            RequestExpectation req;
            req.sink = require_string(r, "sink", p);
            auto decision = require_string(r, "decision", p);
            if (decision != "allowed" && decision != "blocked")
                schema_error(p + ".decision", "expected \"allowed\" or \"blocked\"");
            req.allowed = decision == "allowed";
            req.url_prefix = optional_string(r, "urlPrefix", p);
            e.requests->push_back(std::move(req));
        }
    }
    if (auto const* dom = field(j, "dom")) {
        require_array(*dom, path + ".dom");
        for (std::size_t i = 0; i < dom->size(); ++i) {
            auto p = index_path(path + ".dom", i);
            auto const& d = require_object((*dom)[i], p);
            check_keys(d, p, { "id", "value", "valueLabel", "elementLabel", "protected" });
            ElementExpectation el;
            el.id = require_string(d, "id", p);
            el.value = optional_string(d, "value", p);
            el.value_label = label_field(d, "valueLabel", p, sc.host);
            el.element_label = label_field(d, "elementLabel", p, sc.host);
            el.is_protected = optional_bool(d, "protected", p);
            e.dom.push_back(std::move(el));
        }
    }
    if (auto const* globals = field(j, "globals")) {
        require_array(*globals, path + ".globals");
        for (std::size_t i = 0; i < globals->size(); ++i) {
            auto p = index_path(path + ".globals", i);
            auto const& g = require_object((*globals)[i], p);
            check_keys(g, p, { "name", "value", "label" });
            GlobalExpectation ge;
            ge.name = require_string(g, "name", p);
            ge.value = optional_string(g, "value", p);
            ge.label = label_field(g, "label", p, sc.host);
            e.globals.push_back(std::move(ge));
        }
    }
    if (auto const* handlers = field(j, "handlers")) {
        require_array(*handlers, path + ".handlers");
        for (std::size_t i = 0; i < handlers->size(); ++i) {
            auto p = index_path(path + ".handlers", i);
            auto const& h = require_object((*handlers)[i], p);
            check_keys(h, p, { "eventSeq", "handler", "privileged", "pcAtEntry", "eventLabel", "contextLabel", "outcome" });
            HandlerExpectation he;
            he.event_seq = require_index(h, "eventSeq", p);
            he.handler = require_string(h, "handler", p);
            he.privileged = optional_bool(h, "privileged", p);
            he.pc_at_entry = label_field(h, "pcAtEntry", p, sc.host);
            he.event_label = label_field(h, "eventLabel", p, sc.host);
            he.context_label = label_field(h, "contextLabel", p, sc.host);
            he.outcome = optional_string(h, "outcome", p);
            e.handlers.push_back(std::move(he));
        }
    }
    if (auto const* errors = field(j, "errors")) {
        require_array(*errors, path + ".errors");
        e.errors.emplace();
        for (std::size_t i = 0; i < errors->size(); ++i)
            e.errors->push_back(get_string((*errors)[i], index_path(path + ".errors", i)));
    }
    if (auto const* ni = field(j, "ni"))
        e.ni = load_ni(*ni, path + ".ni", sc);
    return e;
}

std::optional<std::string> read_file(std::filesystem::path const& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        return std::nullopt;
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

}

std::pair<std::size_t, std::string> parse_slot_key(std::string_view key)
{
    auto dot = key.find('.');
    std::size_t index = 0;
    if (dot == std::string_view::npos || dot == 0 || dot + 1 == key.size())
        throw Error(ErrorKind::SchemaError, "secret slot '" + std::string(key) + "' must look like <eventIndex>.<field>");
    auto [ptr, ec] = std::from_chars(key.data(), key.data() + dot, index);
    if (ec != std::errc {} || ptr != key.data() + dot)
        throw Error(ErrorKind::SchemaError, "secret slot '" + std::string(key) + "' must look like <eventIndex>.<field>");
    return { index, std::string(key.substr(dot + 1)) };
}

FileResolver disk_resolver(std::string base_dir)
{
    return [base = std::filesystem::path(std::move(base_dir))](std::string const& path) {
        std::filesystem::path p(path);
        return read_file(p.is_absolute() ? p : base / p);
    };
}

Scenario load_scenario(std::string_view json_text, FileResolver const& resolve, std::string default_name)
{
    Json root;
    try {
        root = Json::parse(json_text);
    } catch (Json::parse_error const& e) {
        throw Error(ErrorKind::SchemaError, std::string("$: invalid JSON: ") + e.what());
    }
    require_object(root, "$");
    check_keys(root, "$",
        { "name", "description", "hostDomain", "mode", "dom", "scripts", "responses", "events", "secretSlots", "expect" });

    Scenario sc;
    sc.name = optional_string(root, "name", "$").value_or(std::move(default_name));
    sc.description = optional_string(root, "description", "$").value_or("");
    sc.host = require_domain(require_string(root, "hostDomain", "$"), "$.hostDomain");
    if (auto mode = optional_string(root, "mode", "$")) {
        auto parsed = parse_mode(*mode);
        if (!parsed)
            schema_error("$.mode", "expected \"upgrade\" or \"nsu\"");
        sc.mode = *parsed;
    }

    std::set<std::string> ids;
    auto const* dom = field(root, "dom");
    if (!dom)
        schema_error("$.dom", "missing required field");
    sc.dom = load_dom(*dom, "$.dom", ids);

    if (auto const* scripts = field(root, "scripts")) {
        require_array(*scripts, "$.scripts");
        for (std::size_t i = 0; i < scripts->size(); ++i) {
            auto p = index_path("$.scripts", i);
            auto const& s = require_object((*scripts)[i], p);
            check_keys(s, p, { "name", "origin", "policy", "code", "file" });
            ScriptSpec spec;
            auto code = optional_string(s, "code", p);
            auto file = optional_string(s, "file", p);
            if (code.has_value() == file.has_value())
                schema_error(p, "exactly one of \"code\" and \"file\" is required");
            spec.policy = optional_bool(s, "policy", p).value_or(false);
            if (file) {
                auto text = resolve(*file);
                if (!text)
                    throw Error(ErrorKind::IoError, p + ".file: cannot read '" + *file + "'");
                spec.code = std::move(*text);
                if (file->ends_with(".policy"))
                    spec.policy = true;
            } else {
                spec.code = std::move(*code);
            }
            spec.name = optional_string(s, "name", p).value_or(file ? *file : "script" + std::to_string(i));
            auto origin = optional_string(s, "origin", p);
            spec.origin = origin ? require_domain(*origin, p + ".origin") : sc.host;
            if (spec.policy && !(spec.origin == sc.host)) {
                throw Error(ErrorKind::PolicyOriginError,
                    p + ": policy script '" + spec.name + "' has origin " + spec.origin.name() + ", not the host "
                        + sc.host.name());
            }
            sc.scripts.push_back(std::move(spec));
        }
    }

    if (auto const* responses = field(root, "responses")) {
        require_array(*responses, "$.responses");
        for (std::size_t i = 0; i < responses->size(); ++i) {
            auto p = index_path("$.responses", i);
            auto const& r = require_object((*responses)[i], p);
            check_keys(r, p, { "urlPrefix", "body", "bodyLabelText" });
            CannedResponse canned;
            canned.url_prefix = require_string(r, "urlPrefix", p);
            canned.body = require_string(r, "body", p);
            canned.body_label_text = optional_string(r, "bodyLabelText", p).value_or("public");
            check_label_text(canned.body_label_text, sc.host, p + ".bodyLabelText");
            sc.responses.push_back(std::move(canned));
        }
    }

    if (auto const* events = field(root, "events")) {
        require_array(*events, "$.events");
        for (std::size_t i = 0; i < events->size(); ++i) {
            auto p = index_path("$.events", i);
            auto const& e = require_object((*events)[i], p);
            check_keys(e, p, { "type", "targetId", "data" });
            EventInput input;
            input.type = require_string(e, "type", p);
            input.target_id = require_string(e, "targetId", p);
            if (!ids.contains(input.target_id))
                schema_error(p + ".targetId", "no element with id '" + input.target_id + "'");
            if (auto const* data = field(e, "data")) {
                require_object(*data, p + ".data");
                for (auto const& [key, value] : data->items())
                    input.data.emplace(key, event_datum(value, p + ".data." + key));
            }
            sc.events.push_back(std::move(input));
        }
    }

    if (auto const* slots = field(root, "secretSlots")) {
        require_array(*slots, "$.secretSlots");
        for (std::size_t i = 0; i < slots->size(); ++i) {
            auto p = index_path("$.secretSlots", i);
            auto const& s = require_object((*slots)[i], p);
            check_keys(s, p, { "index", "fieldName", "label" });
            SecretSlot slot;
            slot.index = require_index(s, "index", p);
            slot.field = require_string(s, "fieldName", p);
            slot.label_text = optional_string(s, "label", p).value_or("HOST");
            check_label_text(slot.label_text, sc.host, p + ".label");
            if (slot.index >= sc.events.size())
                schema_error(p + ".index", "no event with index " + std::to_string(slot.index));
            if (!sc.events[slot.index].data.contains(slot.field))
                schema_error(p + ".fieldName", "event " + std::to_string(slot.index) + " has no field '" + slot.field + "'");
            sc.secret_slots.push_back(std::move(slot));
        }
    }

    if (auto const* expect = field(root, "expect")) {
        require_object(*expect, "$.expect");
        for (auto const& [key, value] : expect->items()) {
            auto mode = parse_mode(key);
            if (!mode)
                schema_error("$.expect." + key, "expected a mode name (\"upgrade\" or \"nsu\")");
            sc.expect.emplace(*mode, load_expectation(value, "$.expect." + key, sc));
        }
    }
    return sc;
}

Scenario load_scenario_file(std::string const& path)
{
    auto text = read_file(path);
    if (!text)
        throw Error(ErrorKind::IoError, "cannot read '" + path + "'");
    std::filesystem::path p(path);
    return load_scenario(*text, disk_resolver(p.parent_path().string()), p.stem().string());
}

}
