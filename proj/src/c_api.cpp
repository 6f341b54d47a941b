// Copyright 2026 The swapsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "swapsim/swapsim.h"

#include <cstring>
#include <exception>
#include <fstream>
#include <iostream>
#include <memory>
#include <new>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "swapsim/analysis.hpp"
#include "swapsim/config_io.hpp"
#include "swapsim/engine.hpp"
#include "swapsim/error.hpp"

struct swapsim_config {
    swapsim::config::ConfigText text;
    std::optional<swapsim::ExperimentConfig> resolved;
};

struct swapsim_event_log {
    swapsim::engine::EventLog log;
};

struct swapsim_sweep {
    swapsim::analysis::SweepResult sweep;
};

namespace {

using swapsim::ErrorCode;
using swapsim::polarization::Axis;

thread_local std::string g_last_error;

swapsim_status to_status(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument:
            return SWAPSIM_ERR_INVALID_ARGUMENT;
        case ErrorCode::ConfigParse:
            return SWAPSIM_ERR_CONFIG_PARSE;
        case ErrorCode::Validation:
            return SWAPSIM_ERR_VALIDATION;
        case ErrorCode::Io:
            return SWAPSIM_ERR_IO;
        case ErrorCode::NoData:
            return SWAPSIM_ERR_NO_DATA;
        case ErrorCode::Internal:
            return SWAPSIM_ERR_INTERNAL;
    }
    return SWAPSIM_ERR_INTERNAL;
}

swapsim_status set_error(swapsim_status status, const std::string &message) {
    g_last_error = message;
    return status;
}

// Runs `body` and converts any exception into a status code.
template <class F>
swapsim_status guarded(F &&body) {
    try {
        body();
        return SWAPSIM_OK;
    } catch (const swapsim::Error &e) {
        return set_error(to_status(e.code()), e.what());
    } catch (const std::bad_alloc &) {
        return set_error(SWAPSIM_ERR_INTERNAL, "out of memory");
    } catch (const std::exception &e) {
        return set_error(SWAPSIM_ERR_INTERNAL, e.what());
    } catch (...) {
        return set_error(SWAPSIM_ERR_INTERNAL, "unknown error");
    }
}

void check_arg(const void *p, const char *name) {
    if (p == nullptr) {
        swapsim::fail(ErrorCode::InvalidArgument, std::string(name) + " must not be NULL");
    }
}

const swapsim::ExperimentConfig &resolved(swapsim_config *cfg) {
    check_arg(cfg, "config");
    if (!cfg->resolved) {
        cfg->resolved = swapsim::config::resolve(cfg->text);
    }
    return *cfg->resolved;
}

Axis parse_axis(char axis) {
    switch (axis) {
        case 'x':
        case 'X':
            return Axis::X;
        case 'y':
        case 'Y':
            return Axis::Y;
        case 'z':
        case 'Z':
            return Axis::Z;
        default:
            swapsim::fail(ErrorCode::InvalidArgument, std::string("unknown axis '") + axis + "'");
    }
}

swapsim_estimate to_c(const swapsim::analysis::EstimatorResult &r) {
    return {r.value, r.std_error, r.n_events};
}

swapsim_run_counts to_c(const swapsim::engine::RunCounts &c) {
    return {c.pulses, c.accepted, c.clipped, c.background};
}

// `write` receives an ostream; "-" selects standard output.
template <class W>
void write_to(const char *path, W &&write) {
    check_arg(path, "path");
    if (std::strcmp(path, "-") == 0) {
        write(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        swapsim::fail(ErrorCode::Io, std::string("cannot open '") + path + "' for writing");
    }
    write(out);
    out.flush();
    if (!out) {
        swapsim::fail(ErrorCode::Io, std::string("failed writing '") + path + "'");
    }
}

const std::vector<std::string> &presets() {
    static const std::vector<std::string> names = swapsim::config::preset_names();
    return names;
}

}  // namespace

extern "C" {

const char *swapsim_version(void) {
    return SWAPSIM_VERSION_STRING;
}

const char *swapsim_last_error(void) {
    return g_last_error.c_str();
}

size_t swapsim_preset_count(void) {
    return presets().size();
}

const char *swapsim_preset_name(size_t index) {
    return index < presets().size() ? presets()[index].c_str() : nullptr;
}

swapsim_status swapsim_config_create(const char *preset, swapsim_config **out) {
    return guarded([&] {
        check_arg(out, "out");
        auto cfg = std::make_unique<swapsim_config>();
        if (preset != nullptr) {
            cfg->text = swapsim::config::preset(preset);
        }
        *out = cfg.release();
    });
}

swapsim_status swapsim_config_clone(const swapsim_config *cfg, swapsim_config **out) {
    return guarded([&] {
        check_arg(cfg, "config");
        check_arg(out, "out");
        *out = new swapsim_config(*cfg);
    });
}

swapsim_status swapsim_config_merge_text(swapsim_config *cfg, const char *text) {
    return guarded([&] {
        check_arg(cfg, "config");
        check_arg(text, "text");
        cfg->text.merge(swapsim::config::ConfigText::parse(text));
        cfg->resolved.reset();
    });
}

swapsim_status swapsim_config_merge_file(swapsim_config *cfg, const char *path) {
    return guarded([&] {
        check_arg(cfg, "config");
        check_arg(path, "path");
        cfg->text.merge(swapsim::config::read_file(path));
        cfg->resolved.reset();
    });
}

swapsim_status swapsim_config_set(swapsim_config *cfg, const char *key, const char *value) {
    return guarded([&] {
        check_arg(cfg, "config");
        check_arg(key, "key");
        check_arg(value, "value");
        cfg->text.set(key, value);
        cfg->resolved.reset();
    });
}

swapsim_status swapsim_config_resolve(swapsim_config *cfg) {
    return guarded([&] { resolved(cfg); });
}

swapsim_status swapsim_config_dump(swapsim_config *cfg, char *buffer, size_t capacity, size_t *needed) {
    std::string text;
    const swapsim_status st = guarded([&] { text = swapsim::config::dump(resolved(cfg)); });
    if (st != SWAPSIM_OK) {
        return st;
    }
    if (needed != nullptr) {
        *needed = text.size() + 1;
    }
    if (buffer == nullptr || capacity < text.size() + 1) {
        return set_error(SWAPSIM_ERR_BUFFER_TOO_SMALL, "buffer too small for the configuration text");
    }
    std::memcpy(buffer, text.c_str(), text.size() + 1);
    return SWAPSIM_OK;
}

swapsim_status swapsim_config_get(swapsim_config *cfg, const char *key, char *buffer, size_t capacity,
                                  size_t *needed) {
    std::string value;
    const swapsim_status st = guarded([&] {
        check_arg(key, "key");
        std::istringstream in(swapsim::config::dump(resolved(cfg)));
        const std::string prefix = std::string(key) + " = ";
        for (std::string line; std::getline(in, line);) {
            if (line.rfind(prefix, 0) == 0) {
                value = line.substr(prefix.size());
                return;
            }
        }
        swapsim::fail(ErrorCode::InvalidArgument, std::string("unknown configuration key '") + key + "'");
    });
    if (st != SWAPSIM_OK) {
        return st;
    }
    if (needed != nullptr) {
        *needed = value.size() + 1;
    }
    if (buffer == nullptr || capacity < value.size() + 1) {
        return set_error(SWAPSIM_ERR_BUFFER_TOO_SMALL, "buffer too small for the value");
    }
    std::memcpy(buffer, value.c_str(), value.size() + 1);
    return SWAPSIM_OK;
}

swapsim_status swapsim_config_hash(swapsim_config *cfg, uint64_t *out) {
    return guarded([&] {
        check_arg(out, "out");
        *out = swapsim::config::config_hash(resolved(cfg));
    });
}

void swapsim_config_destroy(swapsim_config *cfg) {
    delete cfg;
}

swapsim_status swapsim_simulate(swapsim_config *cfg, uint64_t n_pulses, uint64_t seed, unsigned jobs,
                                swapsim_event_log **out) {
    return guarded([&] {
        check_arg(out, "out");
        swapsim::engine::RunOptions opts;
        opts.jobs = jobs;
        auto log = std::make_unique<swapsim_event_log>();
        log->log = swapsim::engine::run_experiment(resolved(cfg), n_pulses, seed, opts);
        *out = log.release();
    });
}

swapsim_status swapsim_log_counts(const swapsim_event_log *log, swapsim_run_counts *out) {
    return guarded([&] {
        check_arg(log, "log");
        check_arg(out, "out");
        *out = to_c(log->log.counts);
    });
}

swapsim_status swapsim_log_size(const swapsim_event_log *log, size_t *out) {
    return guarded([&] {
        check_arg(log, "log");
        check_arg(out, "out");
        *out = log->log.events.size();
    });
}

swapsim_status swapsim_log_event(const swapsim_event_log *log, size_t index, swapsim_event *out) {
    return guarded([&] {
        check_arg(log, "log");
        check_arg(out, "out");
        swapsim::require(index < log->log.events.size(), "event index out of range");
        const auto &ev = log->log.events[index];
        *out = swapsim_event{ev.pulse_index,
                             ev.true_t1,
                             ev.true_t2,
                             ev.measured_t1,
                             ev.measured_t2,
                             ev.bsm_branch == swapsim::modes::BsmBranch::PhiPlus ? 1 : 0,
                             ev.event_class == swapsim::engine::EventClass::MultipairBackground ? 1 : 0,
                             ev.pockels_phase_applied,
                             ev.clipped ? 1 : 0,
                             ev.outcome_a,
                             ev.outcome_b};
    });
}

swapsim_status swapsim_log_axis(const swapsim_event_log *log, char *out) {
    return guarded([&] {
        check_arg(log, "log");
        check_arg(out, "out");
        *out = 0;
        for (Axis a : {Axis::X, Axis::Y, Axis::Z}) {
            if (log->log.config.analyzer == swapsim::polarization::AnalyzerSetting::for_axis(a)) {
                *out = static_cast<char>(swapsim::polarization::axis_name(a));
            }
        }
    });
}

swapsim_status swapsim_log_write(const swapsim_event_log *log, const char *path) {
    return guarded([&] {
        check_arg(log, "log");
        write_to(path, [&](std::ostream &os) { swapsim::engine::write_event_log(log->log, os); });
    });
}

void swapsim_log_destroy(swapsim_event_log *log) {
    delete log;
}

swapsim_status swapsim_estimate_correlator(const swapsim_event_log *log, char axis, swapsim_estimate *out) {
    return guarded([&] {
        check_arg(log, "log");
        check_arg(out, "out");
        *out = to_c(swapsim::analysis::estimate_correlator(log->log, parse_axis(axis)));
    });
}

swapsim_status swapsim_estimate_visibility(const swapsim_event_log *log, swapsim_basis basis, swapsim_estimate *out) {
    return guarded([&] {
        check_arg(log, "log");
        check_arg(out, "out");
        swapsim::require(basis == SWAPSIM_BASIS_HV || basis == SWAPSIM_BASIS_PM, "unknown basis");
        const auto b = basis == SWAPSIM_BASIS_HV ? swapsim::analysis::Basis::HV : swapsim::analysis::Basis::PM;
        *out = to_c(swapsim::analysis::estimate_visibility(log->log, b));
    });
}

swapsim_status swapsim_estimate_witness(const swapsim_event_log *log_x, const swapsim_event_log *log_y,
                                        const swapsim_event_log *log_z, swapsim_estimate *out) {
    return guarded([&] {
        check_arg(log_x, "log_x");
        check_arg(log_y, "log_y");
        check_arg(log_z, "log_z");
        check_arg(out, "out");
        *out = to_c(swapsim::analysis::estimate_witness(log_x->log, log_y->log, log_z->log));
    });
}

swapsim_status swapsim_run_witness(swapsim_config *cfg, uint64_t n_pulses, uint64_t seed, unsigned jobs,
                                   swapsim_witness_report *out) {
    return guarded([&] {
        check_arg(out, "out");
        const auto r = swapsim::analysis::run_witness(resolved(cfg), n_pulses, seed, jobs);
        for (int i = 0; i < 3; ++i) {
            out->correlators[i] = to_c(r.correlators[i]);
        }
        out->witness = to_c(r.witness);
        out->entangled = r.entangled ? 1 : 0;
    });
}

swapsim_status swapsim_sweep_window(swapsim_config *cfg, const double *windows, size_t count, uint64_t n_pulses,
                                    uint64_t seed, unsigned jobs, swapsim_sweep **out) {
    return guarded([&] {
        check_arg(out, "out");
        swapsim::require(windows != nullptr || count == 0, "windows must not be NULL");
        auto s = std::make_unique<swapsim_sweep>();
        s->sweep = swapsim::analysis::sweep_window(resolved(cfg), {windows, count}, n_pulses, seed, jobs);
        *out = s.release();
    });
}

swapsim_status swapsim_sweep_delta_t(swapsim_config *cfg, const double *delta_ts, size_t count, uint64_t n_pulses,
                                     uint64_t seed, unsigned jobs, swapsim_sweep **out) {
    return guarded([&] {
        check_arg(out, "out");
        swapsim::require(delta_ts != nullptr || count == 0, "delta_ts must not be NULL");
        auto s = std::make_unique<swapsim_sweep>();
        s->sweep = swapsim::analysis::sweep_delta_t(resolved(cfg), {delta_ts, count}, n_pulses, seed, jobs);
        *out = s.release();
    });
}

swapsim_status swapsim_sweep_size(const swapsim_sweep *sweep, size_t *out) {
    return guarded([&] {
        check_arg(sweep, "sweep");
        check_arg(out, "out");
        *out = sweep->sweep.points.size();
    });
}

swapsim_status swapsim_sweep_point_at(const swapsim_sweep *sweep, size_t index, swapsim_sweep_point *out) {
    return guarded([&] {
        check_arg(sweep, "sweep");
        check_arg(out, "out");
        swapsim::require(index < sweep->sweep.points.size(), "sweep index out of range");
        const auto &p = sweep->sweep.points[index];
        *out = swapsim_sweep_point{p.parameter, to_c(p.estimate), to_c(p.counts)};
    });
}

swapsim_status swapsim_sweep_write_csv(const swapsim_sweep *sweep, const char *path) {
    return guarded([&] {
        check_arg(sweep, "sweep");
        write_to(path, [&](std::ostream &os) { swapsim::analysis::write_sweep_csv(sweep->sweep, os); });
    });
}

swapsim_status swapsim_sweep_fit_fringe(const swapsim_sweep *sweep, double omega_lo, double omega_hi,
                                        swapsim_fringe_fit *out) {
    return guarded([&] {
        check_arg(sweep, "sweep");
        check_arg(out, "out");
        const auto f = omega_lo == omega_hi ? swapsim::analysis::fit_fringe_fixed(sweep->sweep, omega_lo)
                                            : swapsim::analysis::fit_fringe(sweep->sweep, omega_lo, omega_hi);
        *out = swapsim_fringe_fit{f.amplitude, f.omega, f.phase, f.offset, f.period, f.rms_normalized};
    });
}

void swapsim_sweep_destroy(swapsim_sweep *sweep) {
    delete sweep;
}

swapsim_status swapsim_jitter_limit(double jitter_fwhm, double visibility_floor, double *out) {
    return guarded([&] {
        check_arg(out, "out");
        *out = swapsim::analysis::jitter_limit(jitter_fwhm, visibility_floor);
    });
}

swapsim_status swapsim_oracle_check(swapsim_config *cfg, uint64_t n_pulses, uint64_t seed, unsigned jobs,
                                    swapsim_oracle_report *out) {
    return guarded([&] {
        check_arg(out, "out");
        const auto r = swapsim::analysis::mc_vs_oracle(resolved(cfg), n_pulses, seed, jobs);
        for (int i = 0; i < 3; ++i) {
            const auto &a = r.axes[i];
            out->axes[i] = swapsim_oracle_axis{static_cast<char>(swapsim::polarization::axis_name(a.axis)),
                                               a.monte_carlo,
                                               a.oracle,
                                               a.std_error,
                                               a.n_events,
                                               a.deviation,
                                               a.ratio,
                                               a.pass ? 1 : 0};
        }
        out->pass = r.pass ? 1 : 0;
    });
}

uint64_t swapsim_random_seed(void) {
    return swapsim::random_seed();
}

uint64_t swapsim_derive_seed(uint64_t master, uint64_t index) {
    return swapsim::derive_seed(master, index);
}

}  // extern "C"
