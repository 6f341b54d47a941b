/*
 * Copyright 2026 The swapsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C interface of libswapsim. Every function returns a swapsim_status; on
 * failure swapsim_last_error() holds a message for the calling thread until
 * its next failing call. Handles are opaque, owned by the caller and released
 * with the matching *_destroy function (NULL is accepted). A handle may be
 * read from several threads at once but not modified concurrently.
 *
 * Units are SI (seconds, rad/s) unless a name says otherwise.
 */

#ifndef SWAPSIM_SWAPSIM_H
#define SWAPSIM_SWAPSIM_H

#include <stddef.h>
#include <stdint.h>

#if defined(SWAPSIM_BUILDING)
#define SWAPSIM_API __attribute__((visibility("default")))
#else
#define SWAPSIM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum swapsim_status {
    SWAPSIM_OK = 0,
    SWAPSIM_ERR_INVALID_ARGUMENT = 1,
    SWAPSIM_ERR_CONFIG_PARSE = 2,
    SWAPSIM_ERR_VALIDATION = 3,
    SWAPSIM_ERR_IO = 4,
    SWAPSIM_ERR_NO_DATA = 5,
    SWAPSIM_ERR_BUFFER_TOO_SMALL = 6,
    SWAPSIM_ERR_INTERNAL = 7
} swapsim_status;

typedef struct swapsim_config swapsim_config;
typedef struct swapsim_event_log swapsim_event_log;
typedef struct swapsim_sweep swapsim_sweep;

typedef struct swapsim_estimate {
    double value;
    double std_error;
    uint64_t n_events;
} swapsim_estimate;

typedef struct swapsim_run_counts {
    uint64_t pulses;
    uint64_t accepted;
    uint64_t clipped;
    uint64_t background;
} swapsim_run_counts;

typedef struct swapsim_event {
    uint64_t pulse_index;
    double true_t1;
    double true_t2;
    double measured_t1;
    double measured_t2;
    int phi_plus;   /* 1 for the Phi+ branch, 0 for Phi- */
    int background; /* 1 for a multi-pair event */
    double pockels_phase;
    int clipped;
    int outcome_a;
    int outcome_b;
} swapsim_event;

typedef struct swapsim_witness_report {
    swapsim_estimate correlators[3]; /* x, y, z */
    swapsim_estimate witness;
    int entangled; /* W + 3 sigma < 0 */
} swapsim_witness_report;

typedef struct swapsim_oracle_axis {
    char axis;
    double monte_carlo;
    double oracle;
    double std_error;
    uint64_t n_events;
    double deviation;
    double ratio;
    int pass;
} swapsim_oracle_axis;

typedef struct swapsim_oracle_report {
    swapsim_oracle_axis axes[3];
    int pass;
} swapsim_oracle_report;

typedef struct swapsim_sweep_point {
    double parameter;
    swapsim_estimate estimate;
    swapsim_run_counts counts;
} swapsim_sweep_point;

typedef struct swapsim_fringe_fit {
    double amplitude;
    double omega;
    double phase;
    double offset;
    double period;
    double rms_normalized;
} swapsim_fringe_fit;

typedef enum swapsim_basis { SWAPSIM_BASIS_HV = 0, SWAPSIM_BASIS_PM = 1 } swapsim_basis;

SWAPSIM_API const char *swapsim_version(void);
SWAPSIM_API const char *swapsim_last_error(void);

SWAPSIM_API size_t swapsim_preset_count(void);
SWAPSIM_API const char *swapsim_preset_name(size_t index);

/* Configuration: layered key = value text, resolved on use. `preset` may be
 * NULL for the built-in defaults. */
SWAPSIM_API swapsim_status swapsim_config_create(const char *preset, swapsim_config **out);
SWAPSIM_API swapsim_status swapsim_config_clone(const swapsim_config *cfg, swapsim_config **out);
SWAPSIM_API swapsim_status swapsim_config_merge_text(swapsim_config *cfg, const char *text);
SWAPSIM_API swapsim_status swapsim_config_merge_file(swapsim_config *cfg, const char *path);
SWAPSIM_API swapsim_status swapsim_config_set(swapsim_config *cfg, const char *key, const char *value);
/* Converts and validates the layers. Later calls reuse the result. */
SWAPSIM_API swapsim_status swapsim_config_resolve(swapsim_config *cfg);
/* Writes the canonical text including the terminating NUL. `needed` receives
 * the required size even when the buffer is too small. */
SWAPSIM_API swapsim_status swapsim_config_dump(swapsim_config *cfg, char *buffer, size_t capacity, size_t *needed);
/* Canonical value of one key, same buffer rules as swapsim_config_dump. */
SWAPSIM_API swapsim_status swapsim_config_get(swapsim_config *cfg, const char *key, char *buffer, size_t capacity,
                                              size_t *needed);
SWAPSIM_API swapsim_status swapsim_config_hash(swapsim_config *cfg, uint64_t *out);
SWAPSIM_API void swapsim_config_destroy(swapsim_config *cfg);

/* Monte Carlo run. jobs = 0 uses every hardware thread; the log does not
 * depend on it. */
SWAPSIM_API swapsim_status swapsim_simulate(swapsim_config *cfg, uint64_t n_pulses, uint64_t seed, unsigned jobs,
                                            swapsim_event_log **out);
SWAPSIM_API swapsim_status swapsim_log_counts(const swapsim_event_log *log, swapsim_run_counts *out);
SWAPSIM_API swapsim_status swapsim_log_size(const swapsim_event_log *log, size_t *out);
SWAPSIM_API swapsim_status swapsim_log_event(const swapsim_event_log *log, size_t index, swapsim_event *out);
/* Axis ('x', 'y', 'z') of the log's analyzer setting, or 0 if none matches. */
SWAPSIM_API swapsim_status swapsim_log_axis(const swapsim_event_log *log, char *out);
/* `path` of "-" writes to standard output. */
SWAPSIM_API swapsim_status swapsim_log_write(const swapsim_event_log *log, const char *path);
SWAPSIM_API void swapsim_log_destroy(swapsim_event_log *log);

SWAPSIM_API swapsim_status swapsim_estimate_correlator(const swapsim_event_log *log, char axis,
                                                       swapsim_estimate *out);
SWAPSIM_API swapsim_status swapsim_estimate_visibility(const swapsim_event_log *log, swapsim_basis basis,
                                                       swapsim_estimate *out);
SWAPSIM_API swapsim_status swapsim_estimate_witness(const swapsim_event_log *log_x, const swapsim_event_log *log_y,
                                                    const swapsim_event_log *log_z, swapsim_estimate *out);

/* Three runs with analyzer x, y, z and seeds derived from `seed`. */
SWAPSIM_API swapsim_status swapsim_run_witness(swapsim_config *cfg, uint64_t n_pulses, uint64_t seed, unsigned jobs,
                                               swapsim_witness_report *out);

/* Sweeps; values in seconds, strictly increasing. */
SWAPSIM_API swapsim_status swapsim_sweep_window(swapsim_config *cfg, const double *windows, size_t count,
                                                uint64_t n_pulses, uint64_t seed, unsigned jobs, swapsim_sweep **out);
SWAPSIM_API swapsim_status swapsim_sweep_delta_t(swapsim_config *cfg, const double *delta_ts, size_t count,
                                                 uint64_t n_pulses, uint64_t seed, unsigned jobs,
                                                 swapsim_sweep **out);
SWAPSIM_API swapsim_status swapsim_sweep_size(const swapsim_sweep *sweep, size_t *out);
SWAPSIM_API swapsim_status swapsim_sweep_point_at(const swapsim_sweep *sweep, size_t index,
                                                  swapsim_sweep_point *out);
/* `path` of "-" writes to standard output. */
SWAPSIM_API swapsim_status swapsim_sweep_write_csv(const swapsim_sweep *sweep, const char *path);
/* Cosine fit; omega_lo == omega_hi fixes the frequency. */
SWAPSIM_API swapsim_status swapsim_sweep_fit_fringe(const swapsim_sweep *sweep, double omega_lo, double omega_hi,
                                                    swapsim_fringe_fit *out);
SWAPSIM_API void swapsim_sweep_destroy(swapsim_sweep *sweep);

/* Largest frequency separation (rad/s) for a per-detector jitter FWHM (s). */
SWAPSIM_API swapsim_status swapsim_jitter_limit(double jitter_fwhm, double visibility_floor, double *out);

/* Monte Carlo against the quadrature oracle, background disabled. */
SWAPSIM_API swapsim_status swapsim_oracle_check(swapsim_config *cfg, uint64_t n_pulses, uint64_t seed, unsigned jobs,
                                                swapsim_oracle_report *out);

SWAPSIM_API uint64_t swapsim_random_seed(void);
SWAPSIM_API uint64_t swapsim_derive_seed(uint64_t master, uint64_t index);

#ifdef __cplusplus
}
#endif

#endif /* SWAPSIM_SWAPSIM_H */
