/*
 * Copyright 2026 The slitport Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef SLITPORT_H
#define SLITPORT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result code of every fallible call.
 */
typedef enum SlitportStatus {
  SLITPORT_STATUS_OK = 0,
  SLITPORT_STATUS_NULL_ARGUMENT = 1,
  SLITPORT_STATUS_INVALID_UTF8 = 2,
  SLITPORT_STATUS_PARSE_ERROR = 3,
  SLITPORT_STATUS_VALIDATION_ERROR = 4,
  SLITPORT_STATUS_INVALID_INPUTS = 5,
  SLITPORT_STATUS_PROTOCOL_ERROR = 6,
  SLITPORT_STATUS_IMPOSSIBLE_OUTCOME = 7,
  SLITPORT_STATUS_NO_VALUE = 8,
  SLITPORT_STATUS_PANIC = 9,
} SlitportStatus;

/*
 Parsed script together with the run inputs it will be validated against.
 */
typedef struct SlitportProgram SlitportProgram;

/*
 Outcome of a completed run.
 */
typedef struct SlitportReport SlitportReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failed call on this thread, or null.

 The pointer stays valid until the next slitport call on the same thread.
 */
const char *slitport_last_error(void);

/*
 Library version as a static string.
 */
const char *slitport_version(void);

/*
 Parse and validate a script. On success `*out` owns a new program.

 # Safety
 `text` must be a NUL-terminated string and `out` a writable pointer.
 */
enum SlitportStatus slitport_program_parse(const char *text, struct SlitportProgram **out);

/*
 Load the built-in teleportation scenario.

 # Safety
 `out` must be a writable pointer.
 */
enum SlitportStatus slitport_program_paper(struct SlitportProgram **out);

/*
 Replace the teleported input `cb|b⟩ + cc|c⟩`.

 # Safety
 `program` must come from this library and not be freed.
 */
enum SlitportStatus slitport_program_set_input(struct SlitportProgram *program,
                                               double cb_re,
                                               double cb_im,
                                               double cc_re,
                                               double cc_im);

/*
 Replace the `$alpha`, `$truncation` and `$gt` parameters.

 # Safety
 `program` must come from this library and not be freed.
 */
enum SlitportStatus slitport_program_set_params(struct SlitportProgram *program,
                                                double alpha,
                                                uintptr_t truncation,
                                                double gt);

/*
 Run the program. `sample` nonzero draws outcomes from a generator seeded
 with `seed`; zero post-selects the scripted outcomes. On success `*out`
 owns a new report.

 # Safety
 `program` must come from this library and `out` must be writable.
 */
enum SlitportStatus slitport_program_run(const struct SlitportProgram *program,
                                         int32_t sample,
                                         uint64_t seed,
                                         struct SlitportReport **out);

/*
 Release a program. Null is ignored.

 # Safety
 `program` must come from this library and not be freed twice.
 */
void slitport_program_free(struct SlitportProgram *program);

/*
 Fidelity of the teleported path register with the input.
 Returns `NoValue` when the script teleports nothing.

 # Safety
 `report` must come from this library; `out` must be writable.
 */
enum SlitportStatus slitport_report_final_fidelity(const struct SlitportReport *report,
                                                   double *out);

/*
 Product of all measurement probabilities, or NaN for a null report.

 # Safety
 `report` must be null or come from this library.
 */
double slitport_report_cumulative_probability(const struct SlitportReport *report);

/*
 Number of executed steps, or zero for a null report.

 # Safety
 `report` must be null or come from this library.
 */
uintptr_t slitport_report_step_count(const struct SlitportReport *report);

/*
 Probability of step `index`.

 # Safety
 `report` must come from this library; `out` must be writable.
 */
enum SlitportStatus slitport_report_step_probability(const struct SlitportReport *report,
                                                     uintptr_t index,
                                                     double *out);

/*
 Canonical JSON of the report. Free the result with
 [`slitport_string_free`]. Returns null on failure.

 # Safety
 `report` must be null or come from this library.
 */
char *slitport_report_to_json(const struct SlitportReport *report);

/*
 Release a report. Null is ignored.

 # Safety
 `report` must come from this library and not be freed twice.
 */
void slitport_report_free(struct SlitportReport *report);

/*
 Release a string returned by this library. Null is ignored.

 # Safety
 `s` must come from this library and not be freed twice.
 */
void slitport_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SLITPORT_H */
