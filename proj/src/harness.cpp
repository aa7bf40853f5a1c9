// Copyright 2026 The webpol-sim Authors
//
// Licensed under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "webpol/harness.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <future>
#include <sstream>

namespace webpol {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point from, Clock::time_point to)
{
    return std::chrono::duration<double, std::milli>(to - from).count();
}

Element& build_dom(Page& page, DomNode const& node)
{
    auto& el = page.create_element(node.tag, node.id);
    for (auto const& [name, text] : node.attributes)
        el.attributes.emplace(name, make_value(text));
    if (node.value)
        el.value = make_value(*node.value);
    for (auto const& child : node.children) {
        auto& c = build_dom(page, child);
        c.parent = &el;
        el.children.push_back(&c);
    }
    return el;
}

void dump_dom(Element const& el, std::vector<ElementDump>& out)
{
    if (el.hidden)
        return;
    ElementDump d;
    d.id = el.id;
    d.tag = el.tag;
    if (el.parent)
        d.parent_id = el.parent->id;
    d.value = el.value.is_null() ? std::string {} : to_display_string(el.value.payload);
    d.value_label = el.value.label;
    d.element_label = el.element_label;
    d.is_protected = el.is_protected;
    for (auto const& [name, value] : el.attributes)
        d.attributes.emplace_back(name, value);
    out.push_back(std::move(d));
    for (auto const* child : el.children)
        dump_dom(*child, out);
}

bool is_callable(Payload const& p)
{
    return std::holds_alternative<Closure*>(p) || std::holds_alternative<NativeFunction*>(p)
        || std::holds_alternative<BoundMethod>(p);
}

std::string span_text(SourceSpan span)
{
    return std::to_string(span.line) + ":" + std::to_string(span.column);
}

}

Report run_scenario(Scenario const& scenario, RunOptions const& options)
{
    auto start = Clock::now();
    Report report;
    report.scenario = scenario.name;
    report.mode = options.mode.value_or(scenario.mode);

    PageOptions page_options;
    page_options.mode = report.mode;
    page_options.track_labels = options.track_labels;
    page_options.force_block_all = options.force_block_all;
    Page page(scenario.host, page_options, scenario.responses);
    page.interpreter().set_observer(options.observer);
    page.set_root(build_dom(page, scenario.dom));

    // Policies always run before any other script.
    std::vector<ScriptSpec const*> order;
    for (auto const& s : scenario.scripts)
        order.push_back(&s);
    std::stable_partition(order.begin(), order.end(), [](ScriptSpec const* s) { return s->policy; });
    for (auto const* s : order)
        page.run_script(s->name, s->origin, s->policy, s->code);
    page.finish_loading();
    page.drain_responses();
    auto loaded = Clock::now();

    for (auto const& ev : scenario.events)
        page.replay(ev);
    auto done = Clock::now();

    report.requests = page.requests();
    report.handler_log = page.handler_log();
    report.errors = page.errors();
    report.script_log = page.script_log();
    if (page.root())
        dump_dom(*page.root(), report.dom_dump);
    for (auto const& [name, value] : page.interpreter().globals().sorted_bindings()) {
        if (page.is_builtin(name) || is_callable(value->payload))
            continue;
        report.globals.push_back({ name, to_display_string(value->payload), value->label });
    }
    report.timings = { elapsed_ms(start, loaded), elapsed_ms(loaded, done), elapsed_ms(start, done) };
    return report;
}

std::string report_to_json(Report const& report, bool include_timings)
{
    using Json = nlohmann::ordered_json;
    auto label = [](Label const& l) { return l.to_string(); };
    auto optional = [](std::optional<std::string> const& s) { return s ? Json(*s) : Json(nullptr); };

    Json j;
    j["scenario"] = report.scenario;
    j["mode"] = std::string(to_string(report.mode));

    auto& requests = j["requests"] = Json::array();
    for (auto const& r : report.requests) {
        requests.push_back({
            { "seq", r.seq },
            { "url", r.url },
            { "sink", r.sink ? Json(r.sink->name()) : Json(nullptr) },
            { "effectiveLabel", label(r.effective_label) },
            { "pcAtSend", label(r.pc_at_send) },
            { "decision", r.allowed ? "allowed" : "blocked" },
            { "reason", r.reason },
        });
    }

    auto& handlers = j["handlerLog"] = Json::array();
    for (auto const& h : report.handler_log) {
        handlers.push_back({
            { "eventSeq", h.event_seq },
            { "eventType", h.event_type },
            { "target", h.target },
            { "handler", h.handler },
            { "registrationSeq", h.registration_seq },
            { "privileged", h.privileged },
            { "pcAtEntry", label(h.pc_at_entry) },
            { "eventLabel", label(h.event_label) },
            { "contextLabel", label(h.context_label) },
            { "outcome", h.outcome },
        });
    }

    auto& dom = j["domDump"] = Json::array();
    for (auto const& d : report.dom_dump) {
        Json attrs = Json::object();
        for (auto const& [name, value] : d.attributes)
            attrs[name] = { { "value", to_display_string(value.payload) }, { "label", label(value.label) } };
        dom.push_back({
            { "id", optional(d.id) },
            { "tag", d.tag },
            { "parent", optional(d.parent_id) },
            { "value", d.value },
            { "valueLabel", label(d.value_label) },
            { "elementLabel", label(d.element_label) },
            { "protected", d.is_protected },
            { "attributes", std::move(attrs) },
        });
    }

    auto& errors = j["errors"] = Json::array();
    for (auto const& e : report.errors) {
        errors.push_back({
            { "kind", std::string(to_string(e.kind)) },
            { "where", e.where },
            { "span", { { "line", e.span.line }, { "column", e.span.column } } },
            { "message", e.message },
        });
    }

    auto& scripts = j["scriptLog"] = Json::array();
    for (auto const& s : report.script_log)
        scripts.push_back({ { "name", s.name }, { "origin", s.origin }, { "policy", s.policy }, { "outcome", s.outcome } });

    auto& globals = j["globals"] = Json::array();
    for (auto const& g : report.globals)
        globals.push_back({ { "name", g.name }, { "value", g.value }, { "label", label(g.label) } });

    if (include_timings) {
        j["timings"] = {
            { "loadMs", report.timings.load_ms },
            { "eventsMs", report.timings.events_ms },
            { "totalMs", report.timings.total_ms },
        };
    }
    return j.dump(2);
}

std::string report_trace(Report const& report)
{
    std::ostringstream out;
    for (auto const& s : report.script_log)
        out << "script " << s.name << " origin=" << s.origin << (s.policy ? " policy" : "") << " -> " << s.outcome << '\n';
    for (auto const& h : report.handler_log) {
        out << "event " << h.event_seq << ' ' << h.event_type << " on " << h.target << ": " << h.handler << '#'
            << h.registration_seq << (h.privileged ? " privileged" : "") << " pc=" << h.pc_at_entry.to_string()
            << " eventLabel=" << h.event_label.to_string() << " context=" << h.context_label.to_string() << " -> "
            << h.outcome << '\n';
    }
    for (auto const& r : report.requests) {
        out << "request " << r.seq << ' ' << (r.allowed ? "allowed" : "blocked") << " sink="
            << (r.sink ? r.sink->name() : "-") << " label=" << r.effective_label.to_string() << " url=" << r.url
            << " (" << r.reason << ")\n";
    }
    for (auto const& e : report.errors)
        out << "error " << to_string(e.kind) << " in " << e.where << " at " << span_text(e.span) << ": " << e.message << '\n';
    return out.str();
}

std::string NiWitness::describe() const
{
    auto show = [](std::optional<ObservedRequest> const& r) {
        return r ? r->sink + " " + r->url : std::string("(nothing)");
    };
    return "variant " + std::to_string(first_variant) + " vs " + std::to_string(second_variant) + ", observed request "
        + std::to_string(position) + ": " + show(first) + " | " + show(second);
}

NiVerdict check_ni(Scenario const& scenario, std::vector<NiVariant> const& variants, std::optional<Mode> mode)
{
    if (scenario.secret_slots.empty())
        throw Error(ErrorKind::SchemaError, "$.secretSlots: the scenario declares no secret slots");
    if (variants.size() < 2)
        throw Error(ErrorKind::SchemaError, "noninterference needs at least two variants");

    Label secret;
    for (auto const& slot : scenario.secret_slots)
        secret = join(secret, parse_label(slot.label_text, scenario.host));

    std::vector<Scenario> prepared;
    for (auto const& variant : variants) {
        auto copy = scenario;
        for (auto const& [key, text] : variant) {
            auto [index, name] = parse_slot_key(key);
            bool declared = std::any_of(scenario.secret_slots.begin(), scenario.secret_slots.end(),
                [&](SecretSlot const& s) { return s.index == index && s.field == name; });
            if (!declared)
                throw Error(ErrorKind::SchemaError, "'" + key + "' is not a declared secret slot");
            // A slot past the end of a truncated trace has nothing to vary.
            if (index >= copy.events.size())
                continue;
            auto& datum = copy.events[index].data[name];
            if (std::holds_alternative<double>(datum))
                datum = to_number(Payload { text });
            else if (std::holds_alternative<bool>(datum))
                datum = text == "true";
            else
                datum = text;
        }
        prepared.push_back(std::move(copy));
    }

    std::vector<std::future<std::vector<ObservedRequest>>> runs;
    for (auto const& sc : prepared) {
        runs.push_back(std::async(std::launch::async, [&sc, &secret, mode] {
            std::vector<ObservedRequest> observed;
            for (auto const& r : run_scenario(sc, { .mode = mode }).requests) {
                if (r.allowed && r.sink && !flow_permitted(secret, *r.sink))
                    observed.push_back({ r.sink->name(), r.url });
            }
            return observed;
        }));
    }

    NiVerdict verdict;
    for (auto& f : runs)
        verdict.projections.push_back(f.get());
    auto const& base = verdict.projections.front();
    for (std::size_t i = 1; i < verdict.projections.size() && verdict.passed; ++i) {
        auto const& other = verdict.projections[i];
        if (other == base)
            continue;
        verdict.passed = false;
        auto [a, b] = std::mismatch(base.begin(), base.end(), other.begin(), other.end());
        NiWitness w;
        w.first_variant = 0;
        w.second_variant = i;
        w.position = static_cast<std::size_t>(a - base.begin());
        if (a != base.end())
            w.first = *a;
        if (b != other.end())
            w.second = *b;
        verdict.witness = std::move(w);
    }
    return verdict;
}

std::vector<std::string> check_expectations(Scenario const& scenario, ModeExpectation const& expect, Report const& report)
{
    std::vector<std::string> failures;
    auto fail = [&](std::string message) { failures.push_back(std::move(message)); };

    if (expect.requests) {
        auto const& want = *expect.requests;
        if (want.size() != report.requests.size())
            fail("expected " + std::to_string(want.size()) + " requests, got " + std::to_string(report.requests.size()));
        for (std::size_t i = 0; i < std::min(want.size(), report.requests.size()); ++i) {
            auto const& w = want[i];
            auto const& r = report.requests[i];
            auto sink = r.sink ? r.sink->name() : std::string {};
            auto where = "request " + std::to_string(i);
            if (w.sink != sink)
                fail(where + ": expected sink " + w.sink + ", got " + sink);
            if (w.allowed != r.allowed)
                fail(where + " (" + r.url + "): expected " + (w.allowed ? "allowed" : "blocked"));
            if (w.url_prefix && !r.url.starts_with(*w.url_prefix))
                fail(where + ": url " + r.url + " does not start with " + *w.url_prefix);
        }
    }

    for (auto const& w : expect.dom) {
        auto it = std::find_if(report.dom_dump.begin(), report.dom_dump.end(),
            [&](ElementDump const& d) { return d.id == w.id; });
        if (it == report.dom_dump.end()) {
            fail("element #" + w.id + " is not in the document");
            continue;
        }
        if (w.value && *w.value != it->value)
            fail("#" + w.id + ".value: expected \"" + *w.value + "\", got \"" + it->value + "\"");
        if (w.value_label && *w.value_label != it->value_label.to_string())
            fail("#" + w.id + " value label: expected " + *w.value_label + ", got " + it->value_label.to_string());
        if (w.element_label && *w.element_label != it->element_label.to_string())
            fail("#" + w.id + " element label: expected " + *w.element_label + ", got " + it->element_label.to_string());
        if (w.is_protected && *w.is_protected != it->is_protected)
            fail("#" + w.id + ": expected protected=" + (*w.is_protected ? "true" : "false"));
    }

    for (auto const& w : expect.globals) {
        auto it = std::find_if(report.globals.begin(), report.globals.end(),
            [&](GlobalDump const& g) { return g.name == w.name; });
        if (it == report.globals.end()) {
            fail("global '" + w.name + "' is not defined");
            continue;
        }
        if (w.value && *w.value != it->value)
            fail("global " + w.name + ": expected " + *w.value + ", got " + it->value);
        if (w.label && *w.label != it->label.to_string())
            fail("global " + w.name + " label: expected " + *w.label + ", got " + it->label.to_string());
    }

    for (auto const& w : expect.handlers) {
        bool found = std::any_of(report.handler_log.begin(), report.handler_log.end(), [&](HandlerLogEntry const& h) {
            return h.event_seq == w.event_seq && h.handler == w.handler
                && (!w.privileged || *w.privileged == h.privileged)
                && (!w.pc_at_entry || *w.pc_at_entry == h.pc_at_entry.to_string())
                && (!w.event_label || *w.event_label == h.event_label.to_string())
                && (!w.context_label || *w.context_label == h.context_label.to_string())
                && (!w.outcome || *w.outcome == h.outcome);
        });
        if (!found)
            fail("no invocation of " + w.handler + " for event " + std::to_string(w.event_seq) + " matches");
    }

    if (expect.errors) {
        std::vector<std::string> kinds;
        for (auto const& e : report.errors)
            kinds.emplace_back(to_string(e.kind));
        if (kinds != *expect.errors) {
            std::string got;
            for (auto const& k : kinds)
                got += (got.empty() ? "" : ",") + k;
            fail("unexpected errors: [" + got + "]");
        }
    }

    if (expect.ni) {
        auto verdict = check_ni(scenario, expect.ni->variants, report.mode);
        if (verdict.passed != expect.ni->pass)
            fail(std::string("noninterference: expected ") + (expect.ni->pass ? "pass" : "fail")
                + (verdict.witness ? ", witness " + verdict.witness->describe() : std::string {}));
        if (!verdict.passed && expect.ni->witness_sink) {
            auto const& w = *verdict.witness;
            bool matches = (w.first && w.first->sink == *expect.ni->witness_sink)
                || (w.second && w.second->sink == *expect.ni->witness_sink);
            if (!matches)
                fail("noninterference witness does not involve " + *expect.ni->witness_sink + ": " + w.describe());
        }
    }
    return failures;
}

std::vector<std::string> check_invariants(Report const& report, bool decisions_follow_labels)
{
    std::vector<std::string> failures;
    auto const& log = report.handler_log;
    for (std::size_t i = 1; i < log.size(); ++i) {
        auto const& prev = log[i - 1];
        auto const& cur = log[i];
        if (prev.event_seq != cur.event_seq)
            continue;
        if (!prev.privileged && cur.privileged)
            failures.push_back("event " + std::to_string(cur.event_seq) + ": privileged handler ran after an ordinary one");
        if (!leq(prev.context_label, cur.context_label))
            failures.push_back("event " + std::to_string(cur.event_seq) + ": context label decreased");
    }
    for (auto const& h : log) {
        if (!leq(h.context_label, h.pc_at_entry))
            failures.push_back("event " + std::to_string(h.event_seq) + ": handler entered below its dispatch context");
    }
    for (auto const& r : report.requests) {
        bool permitted = r.sink && flow_permitted(r.effective_label, *r.sink);
        if (r.allowed && !permitted)
            failures.push_back("request " + std::to_string(r.seq) + " allowed against its label");
        if (decisions_follow_labels && !r.allowed && permitted)
            failures.push_back("request " + std::to_string(r.seq) + " blocked although permitted");
    }
    bool seen_ordinary = false;
    for (auto const& s : report.script_log) {
        if (s.policy && seen_ordinary)
            failures.push_back("policy script " + s.name + " ran after an ordinary script");
        seen_ordinary |= !s.policy;
    }
    return failures;
}

std::vector<std::string> bundled_scenario_names()
{
    std::vector<std::string> names;
    for (auto const& f : bundled_corpus()) {
        std::string_view path = f.path;
        if (path.ends_with(".json"))
            names.emplace_back(path.substr(0, path.size() - 5));
    }
    std::sort(names.begin(), names.end());
    return names;
}

Scenario load_bundled_scenario(std::string const& name)
{
    auto lookup = [](std::string const& path) -> std::optional<std::string> {
        for (auto const& f : bundled_corpus()) {
            if (path == f.path)
                return std::string(f.contents);
        }
        return std::nullopt;
    };
    auto text = lookup(name + ".json");
    if (!text)
        throw Error(ErrorKind::IoError, "no bundled scenario named '" + name + "'");
    return load_scenario(*text, lookup, name);
}

std::vector<CorpusResult> run_corpus(CorpusOptions const& options)
{
    std::vector<CorpusResult> results;
    for (auto const& name : bundled_scenario_names()) {
        CorpusResult result;
        result.name = name;
        try {
            auto scenario = load_bundled_scenario(name);
            result.mode = options.mode.value_or(scenario.mode);
            auto report = run_scenario(scenario, { .mode = result.mode });
            result.failures = check_invariants(report);
            if (auto it = scenario.expect.find(result.mode); it != scenario.expect.end()) {
                auto more = check_expectations(scenario, it->second, report);
                result.failures.insert(result.failures.end(), more.begin(), more.end());
            }
            int reps = std::max(1, options.timing_repetitions);
            for (int i = 0; i < reps; ++i) {
                result.taint_ms += run_scenario(scenario, { .mode = result.mode }).timings.total_ms;
                result.plain_ms += run_scenario(scenario, { .mode = result.mode, .track_labels = false }).timings.total_ms;
            }
            result.taint_ms /= reps;
            result.plain_ms /= reps;
        } catch (Error const& e) {
            result.failures.push_back(std::string(to_string(e.kind())) + ": " + e.what());
        }
        result.passed = result.failures.empty();
        results.push_back(std::move(result));
    }
    return results;
}

}
