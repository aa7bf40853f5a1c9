// Copyright 2026 The webpol-sim Authors
//
// Licensed under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "webpol/webpol.h"

#include "webpol/harness.hpp"

#include <filesystem>
#include <new>

using namespace webpol;

struct webpol_scenario {
    Scenario scenario;
};

struct webpol_report {
    Scenario const* scenario;
    Scenario scenario_copy; // reports outlive the scenario handle
    Report report;
    std::string json;
    std::string trace;
    std::string detail;
};

struct webpol_ni_result {
    NiVerdict verdict;
    std::string witness;
};

struct webpol_corpus {
    std::vector<CorpusResult> results;
    std::vector<std::string> details;
};

namespace {

thread_local std::string t_last_error;

webpol_status status_for(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::IoError:
        return WEBPOL_E_IO;
    case ErrorKind::PolicyOriginError:
        return WEBPOL_E_POLICY_ORIGIN;
    case ErrorKind::MalformedLabel:
        return WEBPOL_E_MALFORMED_LABEL;
    case ErrorKind::SchemaError:
    case ErrorKind::LexError:
    case ErrorKind::ParseError:
        return WEBPOL_E_SCHEMA;
    default:
        return WEBPOL_E_INTERNAL;
    }
}

webpol_status fail(webpol_status status, std::string message)
{
    t_last_error = std::move(message);
    return status;
}

template<class F>
webpol_status guarded(F&& f)
{
    try {
        t_last_error.clear();
        return f();
    } catch (Error const& e) {
        return fail(status_for(e.kind()), std::string(to_string(e.kind())) + ": " + e.what());
    } catch (std::bad_alloc const&) {
        return fail(WEBPOL_E_INTERNAL, "out of memory");
    } catch (std::exception const& e) {
        return fail(WEBPOL_E_INTERNAL, e.what());
    }
}

std::optional<Mode> to_mode(webpol_mode mode)
{
    switch (mode) {
    case WEBPOL_MODE_UPGRADE:
        return Mode::Upgrade;
    case WEBPOL_MODE_NSU:
        return Mode::Nsu;
    default:
        return std::nullopt;
    }
}

webpol_mode from_mode(Mode mode)
{
    return mode == Mode::Nsu ? WEBPOL_MODE_NSU : WEBPOL_MODE_UPGRADE;
}

webpol_status wrap(Scenario scenario, webpol_scenario** out)
{
    *out = new webpol_scenario { std::move(scenario) };
    return WEBPOL_OK;
}

std::string join_lines(std::vector<std::string> const& lines)
{
    std::string out;
    for (auto const& l : lines) {
        out += l;
        out += '\n';
    }
    return out;
}

}

extern "C" {

char const* webpol_version(void)
{
    return "0.1.0";
}

char const* webpol_last_error(void)
{
    return t_last_error.c_str();
}

webpol_status webpol_scenario_load_file(char const* path, webpol_scenario** out)
{
    if (!path || !out)
        return fail(WEBPOL_E_INVALID_ARGUMENT, "null argument");
    return guarded([&] { return wrap(load_scenario_file(path), out); });
}

webpol_status webpol_scenario_load_string(char const* json, char const* base_dir, webpol_scenario** out)
{
    if (!json || !out)
        return fail(WEBPOL_E_INVALID_ARGUMENT, "null argument");
    return guarded([&] { return wrap(load_scenario(json, disk_resolver(base_dir ? base_dir : "."), "scenario"), out); });
}

webpol_status webpol_scenario_load_bundled(char const* name, webpol_scenario** out)
{
    if (!name || !out)
        return fail(WEBPOL_E_INVALID_ARGUMENT, "null argument");
    return guarded([&] { return wrap(load_bundled_scenario(name), out); });
}

webpol_status webpol_scenario_set_mode(webpol_scenario* scenario, webpol_mode mode)
{
    auto m = to_mode(mode);
    if (!scenario || !m)
        return fail(WEBPOL_E_INVALID_ARGUMENT, "invalid scenario or mode");
    scenario->scenario.mode = *m;
    return WEBPOL_OK;
}

webpol_mode webpol_scenario_mode(webpol_scenario const* scenario)
{
    return scenario ? from_mode(scenario->scenario.mode) : WEBPOL_MODE_DEFAULT;
}

char const* webpol_scenario_name(webpol_scenario const* scenario)
{
    return scenario ? scenario->scenario.name.c_str() : "";
}

void webpol_scenario_free(webpol_scenario* scenario)
{
    delete scenario;
}

webpol_status webpol_run(webpol_scenario const* scenario, webpol_report** out)
{
    if (!scenario || !out)
        return fail(WEBPOL_E_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        auto* r = new webpol_report { nullptr, scenario->scenario, {}, {}, {}, {} };
        r->scenario = &r->scenario_copy;
        r->report = run_scenario(r->scenario_copy);
        *out = r;
        return WEBPOL_OK;
    });
}

char const* webpol_report_json(webpol_report* report, int include_timings)
{
    if (!report)
        return "";
    report->json = report_to_json(report->report, include_timings != 0);
    return report->json.c_str();
}

char const* webpol_report_trace(webpol_report* report)
{
    if (!report)
        return "";
    report->trace = report_trace(report->report);
    return report->trace.c_str();
}

size_t webpol_report_request_count(webpol_report const* report)
{
    return report ? report->report.requests.size() : 0;
}

size_t webpol_report_error_count(webpol_report const* report)
{
    return report ? report->report.errors.size() : 0;
}

int webpol_report_expectations_met(webpol_report* report, char const** detail)
{
    if (!report)
        return 0;
    std::vector<std::string> failures;
    try {
        failures = check_invariants(report->report);
        auto const& sc = *report->scenario;
        if (auto it = sc.expect.find(report->report.mode); it != sc.expect.end()) {
            auto more = check_expectations(sc, it->second, report->report);
            failures.insert(failures.end(), more.begin(), more.end());
        }
    } catch (std::exception const& e) {
        failures.push_back(e.what());
    }
    report->detail = join_lines(failures);
    if (detail)
        *detail = report->detail.c_str();
    return failures.empty() ? 1 : 0;
}

void webpol_report_free(webpol_report* report)
{
    delete report;
}

webpol_status webpol_check_ni(webpol_scenario const* scenario, char const* const* vary, size_t count,
    webpol_ni_result** out)
{
    if (!scenario || !out || (count > 0 && !vary))
        return fail(WEBPOL_E_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        std::vector<NiVariant> variants;
        std::optional<std::size_t> width;
        for (size_t i = 0; i < count; ++i) {
            std::string_view spec = vary[i] ? vary[i] : "";
            auto eq = spec.find('=');
            if (eq == std::string_view::npos)
                return fail(WEBPOL_E_INVALID_ARGUMENT, "--vary expects <index>.<field>=v1,v2: '" + std::string(spec) + "'");
            std::string key(spec.substr(0, eq));
            (void)parse_slot_key(key);
            std::vector<std::string> values;
            auto rest = spec.substr(eq + 1);
            for (std::size_t start = 0;;) {
                auto comma = rest.find(',', start);
                values.emplace_back(rest.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
                if (comma == std::string_view::npos)
                    break;
                start = comma + 1;
            }
            if (width && *width != values.size())
                return fail(WEBPOL_E_INVALID_ARGUMENT, "all --vary value lists must have the same length");
            width = values.size();
            variants.resize(values.size());
            for (std::size_t v = 0; v < values.size(); ++v)
                variants[v].emplace_back(key, values[v]);
        }
        if (variants.size() < 2)
            return fail(WEBPOL_E_INVALID_ARGUMENT, "need at least two variants");
        auto* r = new webpol_ni_result { check_ni(scenario->scenario, variants), {} };
        if (r->verdict.witness)
            r->witness = r->verdict.witness->describe();
        *out = r;
        return WEBPOL_OK;
    });
}

int webpol_ni_passed(webpol_ni_result const* result)
{
    return result && result->verdict.passed ? 1 : 0;
}

char const* webpol_ni_witness(webpol_ni_result const* result)
{
    return result ? result->witness.c_str() : "";
}

void webpol_ni_free(webpol_ni_result* result)
{
    delete result;
}

webpol_status webpol_corpus_run(webpol_mode mode, int timing_repetitions, webpol_corpus** out)
{
    if (!out)
        return fail(WEBPOL_E_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        auto* c = new webpol_corpus;
        c->results = run_corpus({ .mode = to_mode(mode), .timing_repetitions = timing_repetitions });
        for (auto const& r : c->results)
            c->details.push_back(join_lines(r.failures));
        *out = c;
        return WEBPOL_OK;
    });
}

size_t webpol_corpus_size(webpol_corpus const* corpus)
{
    return corpus ? corpus->results.size() : 0;
}

char const* webpol_corpus_name(webpol_corpus const* corpus, size_t index)
{
    return corpus && index < corpus->results.size() ? corpus->results[index].name.c_str() : "";
}

char const* webpol_corpus_mode(webpol_corpus const* corpus, size_t index)
{
    if (!corpus || index >= corpus->results.size())
        return "";
    return corpus->results[index].mode == Mode::Nsu ? "nsu" : "upgrade";
}

int webpol_corpus_passed(webpol_corpus const* corpus, size_t index)
{
    return corpus && index < corpus->results.size() && corpus->results[index].passed ? 1 : 0;
}

char const* webpol_corpus_detail(webpol_corpus const* corpus, size_t index)
{
    return corpus && index < corpus->details.size() ? corpus->details[index].c_str() : "";
}

double webpol_corpus_taint_ms(webpol_corpus const* corpus, size_t index)
{
    return corpus && index < corpus->results.size() ? corpus->results[index].taint_ms : 0;
}

double webpol_corpus_plain_ms(webpol_corpus const* corpus, size_t index)
{
    return corpus && index < corpus->results.size() ? corpus->results[index].plain_ms : 0;
}

void webpol_corpus_free(webpol_corpus* corpus)
{
    delete corpus;
}

webpol_status webpol_label_flow_permitted(char const* label, char const* host, char const* sink, int* out)
{
    if (!label || !host || !sink || !out)
        return fail(WEBPOL_E_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        auto h = SinkDomain::parse(host);
        auto s = SinkDomain::parse(sink);
        if (!h || !s)
            return fail(WEBPOL_E_INVALID_ARGUMENT, "host and sink must be domain names");
        *out = flow_permitted(parse_label(label, *h), *s) ? 1 : 0;
        return WEBPOL_OK;
    });
}

}
