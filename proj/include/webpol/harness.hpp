// Copyright 2026 The webpol-sim Authors
//
// Licensed under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#ifndef WEBPOL_HARNESS_HPP
#define WEBPOL_HARNESS_HPP

#include "webpol/scenario.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace webpol {

struct ElementDump {
    std::optional<std::string> id;
    std::string tag;
    std::optional<std::string> parent_id;
    std::string value;
    Label value_label;
    Label element_label;
    bool is_protected = false;
    std::vector<std::pair<std::string, TaintedValue>> attributes;
};

struct GlobalDump {
    std::string name;
    std::string value;
    Label label;
};

struct Timings {
    double load_ms = 0;
    double events_ms = 0;
    double total_ms = 0;
};

struct Report {
    std::string scenario;
    Mode mode = Mode::Upgrade;
    std::vector<NetworkRequest> requests;
    std::vector<HandlerLogEntry> handler_log;
    std::vector<ElementDump> dom_dump;
    std::vector<ErrorRecord> errors;
    std::vector<ScriptLogEntry> script_log;
    std::vector<GlobalDump> globals;
    Timings timings;
};

struct RunOptions {
    std::optional<Mode> mode; // overrides the scenario's mode
    bool track_labels = true;
    bool force_block_all = false;
    ExecutionObserver* observer = nullptr;
};

// Builds the page, runs policy scripts then the rest, replays the events.
// Script and handler errors end up in Report::errors; nothing is thrown.
Report run_scenario(Scenario const& scenario, RunOptions const& options = {});

std::string report_to_json(Report const& report, bool include_timings = true);

// One line per handler invocation and request, for --trace.
std::string report_trace(Report const& report);

struct ObservedRequest {
    std::string sink;
    std::string url;
    bool operator==(ObservedRequest const&) const = default;
};

struct NiWitness {
    std::size_t first_variant = 0;
    std::size_t second_variant = 0;
    std::size_t position = 0;
    std::optional<ObservedRequest> first;
    std::optional<ObservedRequest> second;

    std::string describe() const;
};

struct NiVerdict {
    bool passed = true;
    std::optional<NiWitness> witness;
    std::vector<std::vector<ObservedRequest>> projections;
};

// Substitutes each variant into the event trace and runs it in a fresh page
// (in parallel). The observer sees allowed requests to sinks that may not
// read the secret slots' joined label.
NiVerdict check_ni(Scenario const& scenario, std::vector<NiVariant> const& variants, std::optional<Mode> mode = {});

// Returns human-readable mismatches; empty when every expectation holds.
std::vector<std::string> check_expectations(Scenario const& scenario, ModeExpectation const& expect, Report const& report);

// Structural properties every run must satisfy.
std::vector<std::string> check_invariants(Report const& report, bool decisions_follow_labels = true);

struct CorpusFile {
    char const* path;
    char const* contents;
};

std::span<CorpusFile const> bundled_corpus();
std::vector<std::string> bundled_scenario_names();
Scenario load_bundled_scenario(std::string const& name);

struct CorpusResult {
    std::string name;
    Mode mode = Mode::Upgrade;
    bool passed = true;
    std::vector<std::string> failures;
    double taint_ms = 0;
    double plain_ms = 0;
};

struct CorpusOptions {
    std::optional<Mode> mode;
    int timing_repetitions = 25;
};

std::vector<CorpusResult> run_corpus(CorpusOptions const& options = {});

}

#endif
