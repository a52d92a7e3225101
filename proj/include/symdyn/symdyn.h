#ifndef SYMDYN_H
#define SYMDYN_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SYMDYN_API __declspec(dllexport)
#else
#define SYMDYN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes double as CLI exit codes. */
typedef enum symdyn_status {
    SYMDYN_OK = 0,
    SYMDYN_ERR_INTERNAL = 1,
    SYMDYN_ERR_INPUT = 2,
    SYMDYN_ERR_BUDGET = 3,
    SYMDYN_ERR_INCONSISTENT = 4,
    SYMDYN_FAIL = 5,
    SYMDYN_PRECONDITION_FAIL = 6
} symdyn_status;

typedef struct symdyn_config symdyn_config;
typedef struct symdyn_result symdyn_result;

SYMDYN_API const char* symdyn_version(void);

/* Message of the last failing call on this thread, "" if none. */
SYMDYN_API const char* symdyn_last_error(void);

SYMDYN_API symdyn_status symdyn_config_load(const char* path, symdyn_config** out);
SYMDYN_API symdyn_status symdyn_config_parse(const char* json_text, symdyn_config** out);
SYMDYN_API void symdyn_config_free(symdyn_config* cfg);

/* Hex SHA-256 of the normalized config; owned by cfg. */
SYMDYN_API const char* symdyn_config_digest(const symdyn_config* cfg);
/* Normalized config as JSON; owned by cfg, valid until the next call on cfg. */
SYMDYN_API const char* symdyn_config_json(symdyn_config* cfg);

SYMDYN_API const char* symdyn_config_output_dir(const symdyn_config* cfg);
SYMDYN_API symdyn_status symdyn_config_set_output_dir(symdyn_config* cfg, const char* dir);
SYMDYN_API symdyn_status symdyn_config_set_budget(symdyn_config* cfg, uint64_t nodes);
SYMDYN_API symdyn_status symdyn_config_set_threads(symdyn_config* cfg, int threads);

/* Number of admissible words of length n (budget from the config). */
SYMDYN_API symdyn_status symdyn_count_words(const symdyn_config* cfg, size_t n, uint64_t* count);

/* Runs a command (enumerate, pressure, gap-profile, verify, equilibrium,
 * anchors). tag names the theorem for verify and may be NULL otherwise.
 * Returns the command's status; *out receives details whenever it is
 * non-NULL, including on failure. */
SYMDYN_API symdyn_status symdyn_run(const symdyn_config* cfg, const char* command, const char* tag,
                                    symdyn_result** out);

SYMDYN_API symdyn_status symdyn_result_status(const symdyn_result* res);
SYMDYN_API const char* symdyn_result_status_name(const symdyn_result* res);
SYMDYN_API const char* symdyn_result_message(const symdyn_result* res);
SYMDYN_API const char* symdyn_result_output_dir(const symdyn_result* res);
SYMDYN_API size_t symdyn_result_file_count(const symdyn_result* res);
SYMDYN_API const char* symdyn_result_file(const symdyn_result* res, size_t i);
SYMDYN_API void symdyn_result_free(symdyn_result* res);

#ifdef __cplusplus
}
#endif

#endif
