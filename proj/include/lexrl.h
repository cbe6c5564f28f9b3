/* C interface of the lexrl shared library: configuration handles, critic
 * training, controller evaluation and the tabular-MDP oracle report. All
 * functions return a status code; details of the most recent failure on the
 * calling thread come from lexrl_last_error(). */

#ifndef LEXRL_H
#define LEXRL_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define LEXRL_API __declspec(dllexport)
#else
#define LEXRL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lexrl_status {
    LEXRL_OK = 0,
    LEXRL_INVALID_ARGUMENT = 1,
    LEXRL_IO_ERROR = 2,
    LEXRL_FORMAT_ERROR = 3,
    LEXRL_STATE_ERROR = 4,
    LEXRL_INTERNAL_ERROR = 5
} lexrl_status;

/* Message of the last failed call on this thread; "" when none. The pointer
 * stays valid until the next library call on the same thread. */
LEXRL_API const char* lexrl_last_error(void);

LEXRL_API const char* lexrl_version(void);

/* Opaque run configuration. Create with defaults or from a config file,
 * adjust with the setters, release with lexrl_config_free. */
typedef struct lexrl_config lexrl_config;

LEXRL_API lexrl_status lexrl_config_default(lexrl_config** out);
LEXRL_API lexrl_status lexrl_config_load(const char* path, lexrl_config** out);
LEXRL_API lexrl_status lexrl_config_set_seed(lexrl_config* config, uint64_t seed);
LEXRL_API lexrl_status lexrl_config_set_out_dir(lexrl_config* config, const char* path);
LEXRL_API lexrl_status lexrl_config_set_episodes(lexrl_config* config, int32_t episodes);
LEXRL_API lexrl_status lexrl_config_set_eval_episodes(lexrl_config* config, int32_t episodes);

/* Borrowed pointer, valid until the config is modified or freed. */
LEXRL_API const char* lexrl_config_out_dir(const lexrl_config* config);

LEXRL_API void lexrl_config_free(lexrl_config* config);

/* Trains the per-channel critics (and, when requested, the scalarized
 * baseline critic) and writes weight files plus training logs into the
 * configured output directory. */
LEXRL_API lexrl_status lexrl_train(const lexrl_config* config, int with_lagrangian);

typedef enum lexrl_eval_mode {
    LEXRL_EVAL_SINGLE = 0,
    LEXRL_EVAL_LEX = 1,
    LEXRL_EVAL_LAGRANGIAN = 2
} lexrl_eval_mode;

typedef struct lexrl_eval_summary {
    double pct_outside_position;
    double pct_outside_angle;
    double mean_abs_force;
    double usage_fraction[8]; /* first usage_count entries are valid */
    int32_t usage_count;
    int32_t episodes;
    int64_t steps_counted;
} lexrl_eval_summary;

/* Runs greedy evaluation episodes against the stored weights and writes the
 * CSV/JSON artifacts next to them. `channel` picks the critic in single
 * mode and is ignored otherwise. `thresholds` (length threshold_count)
 * overrides the configured raw thresholds in lex mode; pass NULL, 0 to use
 * the configured ones. `out_summary` may be NULL. */
LEXRL_API lexrl_status lexrl_eval(const lexrl_config* config, lexrl_eval_mode mode,
                                  int32_t channel, const double* thresholds,
                                  size_t threshold_count, lexrl_eval_summary* out_summary);

/* Loads a tabular MDP file, runs the exhaustive lexicographic search and
 * renders the report. `*out` must be released with lexrl_string_free. */
LEXRL_API lexrl_status lexrl_oracle_report(const char* mdp_path, int all_undominated,
                                           char** out);

LEXRL_API void lexrl_string_free(char* text);

#ifdef __cplusplus
}
#endif

#endif /* LEXRL_H */
