#ifndef LCONF_LCONF_H
#define LCONF_LCONF_H

#include <stddef.h>

#if defined(_WIN32)
#define LCONF_API __declspec(dllexport)
#else
#define LCONF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct lconf_system lconf_system;
typedef struct lconf_options lconf_options;
typedef struct lconf_result lconf_result;

typedef enum lconf_status {
  LCONF_OK = 0,
  LCONF_ERR_INVALID_ARGUMENT = 1,
  LCONF_ERR_IO = 2,
  LCONF_ERR_SYNTAX = 3,
  LCONF_ERR_SORT = 4,
  LCONF_ERR_INVALID_SYSTEM = 5,
  LCONF_ERR_SOLVER = 6,
  LCONF_ERR_INTERNAL = 7
} lconf_status;

typedef enum lconf_verdict { LCONF_YES = 0, LCONF_MAYBE = 1, LCONF_TIMEOUT = 2 } lconf_verdict;

typedef enum lconf_format { LCONF_FORMAT_TEXT = 0, LCONF_FORMAT_KV = 1 } lconf_format;

/* Message of the last failed call on this thread; never NULL. */
LCONF_API const char* lconf_last_error(void);
LCONF_API const char* lconf_status_name(lconf_status status);
LCONF_API const char* lconf_version(void);

/* Strings returned through char** out-parameters are released with this. */
LCONF_API void lconf_string_free(char* s);

LCONF_API lconf_status lconf_system_load_file(const char* path, lconf_system** out);
LCONF_API lconf_status lconf_system_load_string(const char* text, lconf_system** out);
LCONF_API void lconf_system_free(lconf_system* sys);
LCONF_API size_t lconf_system_rule_count(const lconf_system* sys);
/* Solver named in the file, or "" when none was given. */
LCONF_API const char* lconf_system_solver(const lconf_system* sys);
LCONF_API lconf_status lconf_system_print(const lconf_system* sys, char** out);
/* One diagnostic per line ("error: ..." / "warning: ..."). With a non-NULL
   solver path, unsatisfiable rule constraints are reported too. */
LCONF_API lconf_status lconf_system_validate(const lconf_system* sys, const char* solver, char** report,
                                             int* has_errors);

LCONF_API lconf_options* lconf_options_new(void);
LCONF_API void lconf_options_free(lconf_options* opts);
LCONF_API lconf_status lconf_options_set_timeout_ms(lconf_options* opts, long long ms);
LCONF_API lconf_status lconf_options_set_step_bound(lconf_options* opts, long long n);
LCONF_API lconf_status lconf_options_set_join_bound(lconf_options* opts, long long n);
LCONF_API lconf_status lconf_options_set_assume_terminating(lconf_options* opts, int on);
/* Comma-separated selection of o, wo, sc, pc, apc, j. */
LCONF_API lconf_status lconf_options_set_criteria(lconf_options* opts, const char* keys);
LCONF_API lconf_status lconf_options_set_solver(lconf_options* opts, const char* path);
LCONF_API lconf_status lconf_options_set_sequential(lconf_options* opts, int on);
LCONF_API lconf_status lconf_options_set_psi(lconf_options* opts, int on);

/* opts may be NULL for the defaults. */
LCONF_API lconf_status lconf_analyze(const lconf_system* sys, const lconf_options* opts, lconf_result** out);
LCONF_API void lconf_result_free(lconf_result* res);
LCONF_API lconf_verdict lconf_result_verdict(const lconf_result* res);
LCONF_API const char* lconf_result_verdict_name(const lconf_result* res);
/* Method name of a YES verdict, otherwise "". */
LCONF_API const char* lconf_result_method(const lconf_result* res);
LCONF_API const char* lconf_result_method_key(const lconf_result* res);
LCONF_API size_t lconf_result_cp_count(const lconf_result* res);
LCONF_API const char* lconf_result_cp(const lconf_result* res, size_t i);
LCONF_API size_t lconf_result_reason_count(const lconf_result* res);
LCONF_API const char* lconf_result_reason(const lconf_result* res, size_t i);
LCONF_API double lconf_result_elapsed_ms(const lconf_result* res);
LCONF_API lconf_status lconf_result_report(const lconf_result* res, lconf_format format, char** out);
/* Re-executes the proof of a YES verdict; *ok is 1 when every step is
   reproduced. Problems, if any, go to *problems (may be NULL). */
LCONF_API lconf_status lconf_result_replay(const lconf_result* res, int* ok, char** problems);

#ifdef __cplusplus
}
#endif

#endif
