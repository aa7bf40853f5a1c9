// Copyright 2026 The webpol-sim Authors
//
// Licensed under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "webpol/webpol.h"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

namespace {

constexpr int exit_ok = 0;
constexpr int exit_failed = 1;
constexpr int exit_usage = 2;

template<class T, void (*Free)(T*)>
struct Deleter {
    void operator()(T* p) const { Free(p); }
};

using ScenarioPtr = std::unique_ptr<webpol_scenario, Deleter<webpol_scenario, webpol_scenario_free>>;
using ReportPtr = std::unique_ptr<webpol_report, Deleter<webpol_report, webpol_report_free>>;
using NiPtr = std::unique_ptr<webpol_ni_result, Deleter<webpol_ni_result, webpol_ni_free>>;
using CorpusPtr = std::unique_ptr<webpol_corpus, Deleter<webpol_corpus, webpol_corpus_free>>;

int report_failure(char const* what)
{
    std::cerr << "webpol: " << what << ": " << webpol_last_error() << '\n';
    return exit_usage;
}

webpol_mode mode_from(std::string const& text)
{
    if (text == "upgrade")
        return WEBPOL_MODE_UPGRADE;
    if (text == "nsu")
        return WEBPOL_MODE_NSU;
    return WEBPOL_MODE_DEFAULT;
}

ScenarioPtr load(std::string const& path, std::string const& mode)
{
    webpol_scenario* raw = nullptr;
    if (webpol_scenario_load_file(path.c_str(), &raw) != WEBPOL_OK)
        return nullptr;
    ScenarioPtr scenario(raw);
    if (!mode.empty())
        webpol_scenario_set_mode(scenario.get(), mode_from(mode));
    return scenario;
}

int cmd_run(std::string const& file, std::string const& mode, std::string const& out, bool trace)
{
    auto scenario = load(file, mode);
    if (!scenario)
        return report_failure("cannot load scenario");
    webpol_report* raw = nullptr;
    if (webpol_run(scenario.get(), &raw) != WEBPOL_OK)
        return report_failure("run failed");
    ReportPtr report(raw);

    std::string json = webpol_report_json(report.get(), 1);
    if (out.empty()) {
        if (trace)
            std::cerr << webpol_report_trace(report.get());
        std::cout << json << '\n';
    } else {
        std::ofstream file_out(out, std::ios::binary);
        if (!file_out || !(file_out << json << '\n')) {
            std::cerr << "webpol: cannot write '" << out << "'\n";
            return exit_usage;
        }
        if (trace)
            std::cout << webpol_report_trace(report.get());
    }

    char const* detail = nullptr;
    if (!webpol_report_expectations_met(report.get(), &detail)) {
        std::cerr << "expectations not met:\n" << detail;
        return exit_failed;
    }
    return exit_ok;
}

int cmd_check_ni(std::string const& file, std::string const& mode, std::vector<std::string> const& vary)
{
    auto scenario = load(file, mode);
    if (!scenario)
        return report_failure("cannot load scenario");
    std::vector<char const*> specs;
    for (auto const& v : vary)
        specs.push_back(v.c_str());
    webpol_ni_result* raw = nullptr;
    if (webpol_check_ni(scenario.get(), specs.data(), specs.size(), &raw) != WEBPOL_OK)
        return report_failure("check-ni failed");
    NiPtr result(raw);
    if (webpol_ni_passed(result.get())) {
        std::cout << "pass\n";
        return exit_ok;
    }
    std::cout << "fail: " << webpol_ni_witness(result.get()) << '\n';
    return exit_failed;
}

int cmd_corpus(std::string const& mode, int repetitions)
{
    webpol_corpus* raw = nullptr;
    if (webpol_corpus_run(mode.empty() ? WEBPOL_MODE_DEFAULT : mode_from(mode), repetitions, &raw) != WEBPOL_OK)
        return report_failure("corpus run failed");
    CorpusPtr corpus(raw);
    std::size_t failed = 0;
    auto n = webpol_corpus_size(corpus.get());
    for (std::size_t i = 0; i < n; ++i) {
        bool ok = webpol_corpus_passed(corpus.get(), i);
        failed += !ok;
        std::cout << (ok ? "PASS " : "FAIL ") << webpol_corpus_name(corpus.get(), i) << " ("
                  << webpol_corpus_mode(corpus.get(), i) << ")\n";
        if (!ok)
            std::cout << webpol_corpus_detail(corpus.get(), i);
    }
    for (std::size_t i = 0; i < n; ++i) {
        double taint = webpol_corpus_taint_ms(corpus.get(), i);
        double plain = webpol_corpus_plain_ms(corpus.get(), i);
        char line[256];
        std::snprintf(line, sizeof line, "timing %s taint_ms=%.4f plain_ms=%.4f ratio=%.3f", webpol_corpus_name(corpus.get(), i),
            taint, plain, plain > 0 ? taint / plain : 0.0);
        std::cout << line << '\n';
    }
    std::cout << (n - failed) << "/" << n << " scenarios passed\n";
    return failed ? exit_failed : exit_ok;
}

}

int main(int argc, char** argv)
{
    CLI::App app { "Deterministic simulator for page-level information-flow policies" };
    app.set_version_flag("--version", std::string(webpol_version()));
    app.require_subcommand(1);

    std::string file;
    std::string mode;
    std::string out;
    bool trace = false;
    std::vector<std::string> vary;
    int repetitions = 25;
    auto modes = CLI::IsMember({ "upgrade", "nsu" });

    auto* run = app.add_subcommand("run", "Run a scenario and print its report as JSON");
    run->add_option("file", file, "Scenario JSON file")->required();
    run->add_option("--mode", mode, "Override the scenario's enforcement mode")->check(modes);
    run->add_option("--out", out, "Write the report here instead of stdout");
    run->add_flag("--trace", trace, "Print one line per script, handler, request and error");

    auto* ni = app.add_subcommand("check-ni", "Differential noninterference check over secret slots");
    ni->add_option("file", file, "Scenario JSON file")->required();
    ni->add_option("--vary", vary, "<eventIndex>.<field>=v1,v2[,...] (repeatable; lists are zipped)")->required();
    ni->add_option("--mode", mode, "Override the scenario's enforcement mode")->check(modes);

    auto* corpus = app.add_subcommand("corpus", "Run the bundled scenarios and their expectations");
    corpus->add_option("--mode", mode, "Run every scenario in this mode")->check(modes);
    corpus->add_option("--repetitions", repetitions, "Timing repetitions per scenario")->check(CLI::Range(1, 10000));

    try {
        app.parse(argc, argv);
    } catch (CLI::ParseError const& e) {
        int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    if (*run)
        return cmd_run(file, mode, out, trace);
    if (*ni)
        return cmd_check_ni(file, mode, vary);
    return cmd_corpus(mode, repetitions);
}
