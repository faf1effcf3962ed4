#ifndef ANTICYC_H
#define ANTICYC_H

#pragma once

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every call. Nonzero values match the command-line exit codes where they overlap.
typedef enum AcStatus {
  AC_STATUS_OK = 0,
  AC_STATUS_PRECONDITION = 2,
  AC_STATUS_VERIFICATION = 3,
  AC_STATUS_SCHEMA = 4,
  AC_STATUS_NULL_ARGUMENT = 5,
  AC_STATUS_PANIC = 6,
} AcStatus;

// A U_p-eigenform together with the moment degree it was computed to.
typedef struct AcEigenform AcEigenform;

// A p-adic L-function as a distribution on Z_p^×.
typedef struct AcLFunction AcLFunction;

// A class-set model of definite unitary automorphic forms.
typedef struct AcModel AcModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the last failure on this thread, or null. Valid until the next call.
const char *ac_last_error(void);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must be null or a string produced by this library and not yet freed.
void ac_string_free(char *s);

// Critical range and h-invariant of a weight given as JSON.
//
// # Safety
// `weight_json` must be a nul-terminated string; `out_json` must be writable.
enum AcStatus ac_crit(const char *weight_json, char **out_json);

// Loads a model from its JSON description.
//
// # Safety
// `json` must be a nul-terminated string; `out` must be writable.
enum AcStatus ac_model_load_json(const char *json, struct AcModel **out);

// Loads one of the models shipped with the library by name.
//
// # Safety
// `name` must be a nul-terminated string; `out` must be writable.
enum AcStatus ac_model_load_bundled(const char *name, struct AcModel **out);

// Releases a model. Null is ignored.
//
// # Safety
// `model` must be null or a handle from `ac_model_load_*` not yet freed.
void ac_model_free(struct AcModel *model);

// Finds the U_p-eigenform of the given slope and weight, to `precision` digits and moment degree `degree`.
//
// # Safety
// `model` must be a live handle, `weight_json` a nul-terminated string, `out` writable.
enum AcStatus ac_eigenform_find(const struct AcModel *model,
                                const char *weight_json,
                                uint32_t slope,
                                uint32_t precision,
                                uint32_t degree,
                                struct AcEigenform **out);

// Eigenvalue, slope and certified precision of an eigenform as JSON.
//
// # Safety
// `eigen` must be a live handle and `out_json` writable.
enum AcStatus ac_eigenform_describe(const struct AcEigenform *eigen, char **out_json);

// Releases an eigenform. Null is ignored.
//
// # Safety
// `eigen` must be null or a handle from `ac_eigenform_find` not yet freed.
void ac_eigenform_free(struct AcEigenform *eigen);

// Builds the p-adic L-function of an eigenform at conductor level `beta`.
//
// # Safety
// `model` and `eigen` must be live handles and `out` writable.
enum AcStatus ac_lfunction_build(const struct AcModel *model,
                                 const struct AcEigenform *eigen,
                                 uint32_t beta,
                                 struct AcLFunction **out);

// Decodes an L-function from the moment-table bytes written by `lp-build`.
//
// # Safety
// `bytes` must point to `len` readable bytes and `out` must be writable.
enum AcStatus ac_lfunction_load(const uint8_t *bytes, uintptr_t len, struct AcLFunction **out);

// Evaluates an L-function at a character given as JSON `{"j", "beta", "gen_exponent"}`.
//
// # Safety
// `l` must be a live handle, `character_json` a nul-terminated string, `out_json` writable.
enum AcStatus ac_lfunction_eval(const struct AcLFunction *l,
                                const char *character_json,
                                char **out_json);

// Releases an L-function. Null is ignored.
//
// # Safety
// `l` must be null or a handle from `ac_lfunction_*` not yet freed.
void ac_lfunction_free(struct AcLFunction *l);

// Runs one acceptance criterion (1 to 12). The report is written even when the check fails,
// in which case the status is `Verification`.
//
// # Safety
// `out_json` must be writable.
enum AcStatus ac_verify_criterion(uint8_t id, char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ANTICYC_H */
