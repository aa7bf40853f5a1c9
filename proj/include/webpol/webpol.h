/*
 * Copyright 2026 The webpol-sim Authors
 *
 * Licensed under the Apache License v2.0.
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef WEBPOL_WEBPOL_H
#define WEBPOL_WEBPOL_H

#include <stddef.h>

#if defined(WEBPOL_BUILDING_LIBRARY)
#    define WEBPOL_API __attribute__((visibility("default")))
#else
#    define WEBPOL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum webpol_status {
    WEBPOL_OK = 0,
    WEBPOL_E_INVALID_ARGUMENT = 1,
    WEBPOL_E_IO = 2,
    WEBPOL_E_SCHEMA = 3,
    WEBPOL_E_POLICY_ORIGIN = 4,
    WEBPOL_E_MALFORMED_LABEL = 5,
    WEBPOL_E_INTERNAL = 6,
} webpol_status;

typedef enum webpol_mode {
    WEBPOL_MODE_DEFAULT = -1, /* whatever the scenario declares */
    WEBPOL_MODE_UPGRADE = 0,
    WEBPOL_MODE_NSU = 1,
} webpol_mode;

typedef struct webpol_scenario webpol_scenario;
typedef struct webpol_report webpol_report;
typedef struct webpol_ni_result webpol_ni_result;
typedef struct webpol_corpus webpol_corpus;

WEBPOL_API char const* webpol_version(void);

/* Message for the last failed call on this thread; "" if none. */
WEBPOL_API char const* webpol_last_error(void);

WEBPOL_API webpol_status webpol_scenario_load_file(char const* path, webpol_scenario** out);
/* `base_dir` resolves script "file" references; may be NULL for the current directory. */
WEBPOL_API webpol_status webpol_scenario_load_string(char const* json, char const* base_dir, webpol_scenario** out);
WEBPOL_API webpol_status webpol_scenario_load_bundled(char const* name, webpol_scenario** out);
WEBPOL_API webpol_status webpol_scenario_set_mode(webpol_scenario* scenario, webpol_mode mode);
WEBPOL_API webpol_mode webpol_scenario_mode(webpol_scenario const* scenario);
WEBPOL_API char const* webpol_scenario_name(webpol_scenario const* scenario);
WEBPOL_API void webpol_scenario_free(webpol_scenario* scenario);

WEBPOL_API webpol_status webpol_run(webpol_scenario const* scenario, webpol_report** out);
/* Borrowed strings, valid until the report is freed. */
WEBPOL_API char const* webpol_report_json(webpol_report* report, int include_timings);
WEBPOL_API char const* webpol_report_trace(webpol_report* report);
WEBPOL_API size_t webpol_report_request_count(webpol_report const* report);
WEBPOL_API size_t webpol_report_error_count(webpol_report const* report);
/* 1 if the scenario's expectations for the run's mode hold (or none exist), else 0.
 * `detail` receives newline-separated mismatches. */
WEBPOL_API int webpol_report_expectations_met(webpol_report* report, char const** detail);
WEBPOL_API void webpol_report_free(webpol_report* report);

/* `vary` holds `count` strings of the form "<eventIndex>.<field>=v1,v2[,...]".
 * Value lists are zipped into variants and must have equal lengths. */
WEBPOL_API webpol_status webpol_check_ni(webpol_scenario const* scenario, char const* const* vary, size_t count,
    webpol_ni_result** out);
WEBPOL_API int webpol_ni_passed(webpol_ni_result const* result);
WEBPOL_API char const* webpol_ni_witness(webpol_ni_result const* result);
WEBPOL_API void webpol_ni_free(webpol_ni_result* result);

WEBPOL_API webpol_status webpol_corpus_run(webpol_mode mode, int timing_repetitions, webpol_corpus** out);
WEBPOL_API size_t webpol_corpus_size(webpol_corpus const* corpus);
WEBPOL_API char const* webpol_corpus_name(webpol_corpus const* corpus, size_t index);
WEBPOL_API char const* webpol_corpus_mode(webpol_corpus const* corpus, size_t index);
WEBPOL_API int webpol_corpus_passed(webpol_corpus const* corpus, size_t index);
WEBPOL_API char const* webpol_corpus_detail(webpol_corpus const* corpus, size_t index);
WEBPOL_API double webpol_corpus_taint_ms(webpol_corpus const* corpus, size_t index);
WEBPOL_API double webpol_corpus_plain_ms(webpol_corpus const* corpus, size_t index);
WEBPOL_API void webpol_corpus_free(webpol_corpus* corpus);

/* 1 if data labeled `label` ("public", "local", "HOST" or a domain) may go to `sink`. */
WEBPOL_API webpol_status webpol_label_flow_permitted(char const* label, char const* host, char const* sink, int* out);

#ifdef __cplusplus
}
#endif

#endif
