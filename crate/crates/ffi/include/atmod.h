#ifndef ATMOD_H
#define ATMOD_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result codes shared by every entry point.
 */
typedef enum AtmodStatus {
  ATMOD_STATUS_OK = 0,
  ATMOD_STATUS_NULL_ARGUMENT = 1,
  ATMOD_STATUS_INVALID_UTF8 = 2,
  ATMOD_STATUS_PARSE_ERROR = 3,
  ATMOD_STATUS_INVALID_THEORY = 4,
  ATMOD_STATUS_INVALID_ARGUMENT = 5,
  ATMOD_STATUS_RESOURCE = 6,
  ATMOD_STATUS_INTERNAL = 7,
  ATMOD_STATUS_PANIC = 8,
} AtmodStatus;

/*
 A parsed, well-formed action theory.
 */
typedef struct AtmodTheory AtmodTheory;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Parses and validates `source`, storing a new handle in `*out`.

 # Safety
 `source` must be a nul-terminated string and `out` a valid pointer.
 */
enum AtmodStatus atmod_theory_parse(const char *source, struct AtmodTheory **out);

/*
 Releases a handle from `atmod_theory_parse`; null is ignored.

 # Safety
 `t` must come from `atmod_theory_parse` and not be freed twice.
 */
void atmod_theory_free(struct AtmodTheory *t);

/*
 Checks postulates and writes the JSON report to `*out`.

 `postulates` is a comma-separated list such as `"PS,PI"`; null selects the default suite.
 Violations are part of the report and still return `Ok`.

 # Safety
 Pointers must be valid; `postulates` may be null.
 */
enum AtmodStatus atmod_check_json(const struct AtmodTheory *t, const char *postulates, char **out);

/*
 Runs the `"static"` or `"inexec"` search for `action` and writes the findings as JSON.

 # Safety
 All pointers must be valid.
 */
enum AtmodStatus atmod_analyze_json(const struct AtmodTheory *t,
                                    const char *action,
                                    const char *search,
                                    char **out);

/*
 Decides whether the theory entails `query`, in plain modal logic when `pdl` is set.

 # Safety
 All pointers must be valid.
 */
enum AtmodStatus atmod_query(const struct AtmodTheory *t,
                             const char *query,
                             bool pdl,
                             bool *entailed);

/*
 Releases a string returned by this library; null is ignored.

 # Safety
 `s` must come from this library and not be freed twice.
 */
void atmod_string_free(char *s);

/*
 The message for the last failure on this thread, or null.
 Valid until the next call into the library from the same thread.
 */
const char *atmod_last_error(void);

/*
 The library version as a static string.
 */
const char *atmod_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ATMOD_H */
