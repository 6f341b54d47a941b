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

#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "swapsim/engine.hpp"
#include "swapsim/polarization.hpp"

namespace swapsim::analysis {

/// Counting estimate with a 1-sigma binomial error.
struct EstimatorResult {
    double value = 0.0;
    double std_error = 0.0;
    std::uint64_t n_events = 0;
};

enum class Basis { HV, PM };

/// (N++ + N-- - N+- - N-+) / N. Throws Error(InvalidArgument) if the log was
/// not taken with the analyzer of `axis`, Error(NoData) if it is empty.
EstimatorResult estimate_correlator(const engine::EventLog &log, polarization::Axis axis);

/// Correlated minus anticorrelated over total in the H/V (z) or +/- (x) basis.
EstimatorResult estimate_visibility(const engine::EventLog &log, Basis basis);

/// W = (1 - Cx + Cy - Cz) / 4 from one log per axis, errors added in
/// quadrature. Throws Error(InvalidArgument) unless the configs agree apart
/// from the analyzer.
EstimatorResult estimate_witness(const engine::EventLog &log_x, const engine::EventLog &log_y,
                                 const engine::EventLog &log_z);

struct SweepPoint {
    double parameter = 0.0;
    EstimatorResult estimate;
    engine::RunCounts counts;
};

struct SweepResult {
    std::string parameter;  ///< "window" or "delta_t", values in seconds
    std::vector<SweepPoint> points;
    ExperimentConfig config;
    std::uint64_t seed = 0;
};

/// Visibility in the configured analyzer basis against the coincidence
/// window. Point i runs with derive_seed(seed, i). Windows must be strictly
/// increasing and positive.
SweepResult sweep_window(const ExperimentConfig &cfg, std::span<const double> windows, std::uint64_t n_pulses,
                         std::uint64_t seed, unsigned jobs = 1);

/// Visibility against the feed-forward knob delta_t (strictly increasing).
SweepResult sweep_delta_t(const ExperimentConfig &cfg, std::span<const double> delta_ts, std::uint64_t n_pulses,
                          std::uint64_t seed, unsigned jobs = 1);

/// Writes `parameter,value,std_error,n_events` with the parameter in ns.
void write_sweep_csv(const SweepResult &sweep, std::ostream &out);

/// V(x) = amplitude * cos(omega * x + phase) + offset by weighted least squares.
struct FringeFit {
    double amplitude = 0.0;
    double omega = 0.0;  ///< rad/s
    double phase = 0.0;
    double offset = 0.0;
    double period = 0.0;          ///< 2 pi / |omega|
    double rms_normalized = 0.0;  ///< RMS of residual / std_error
};

/// Linear fit at fixed angular frequency.
FringeFit fit_fringe_fixed(const SweepResult &sweep, double omega);

/// Frequency found by scanning [omega_lo, omega_hi] and refining with a
/// golden-section search; amplitude, phase and offset are linear at each trial.
FringeFit fit_fringe(const SweepResult &sweep, double omega_lo, double omega_hi);

/// Largest frequency separation (rad/s) whose jitter-induced dephasing
/// exp(-(dw sigma_c)^2 / 2) stays above `visibility_floor`, with sigma_c the
/// combined sigma of two detectors of the given FWHM. This criterion is a
/// reconstruction, not a derivation. Throws Error(InvalidArgument) for
/// non-positive FWHM or a floor outside (0, 1).
double jitter_limit(double jitter_fwhm, double visibility_floor);

struct WitnessReport {
    std::array<EstimatorResult, 3> correlators;  ///< x, y, z
    EstimatorResult witness;
    bool entangled = false;  ///< W + 3 sigma < 0
};

/// Runs one log per axis with seeds derive_seed(seed, 0..2).
WitnessReport run_witness(const ExperimentConfig &cfg, std::uint64_t n_pulses, std::uint64_t seed,
                          unsigned jobs = 1);

struct OracleAxis {
    polarization::Axis axis = polarization::Axis::X;
    double monte_carlo = 0.0;
    double oracle = 0.0;
    double std_error = 0.0;
    std::uint64_t n_events = 0;
    double deviation = 0.0;  ///< |monte_carlo - oracle|
    double ratio = 0.0;      ///< deviation / std_error
    bool pass = false;
};

struct OracleReport {
    std::array<OracleAxis, 3> axes;
    bool pass = false;
};

inline constexpr double kOracleSigmaBound = 3.0;
inline constexpr double kOracleAbsBound = 0.02;

/// Compares Monte Carlo correlators against the quadrature oracle with the
/// multi-pair background switched off. An axis passes when it lies within 3
/// standard errors and 0.02 of the oracle.
OracleReport mc_vs_oracle(const ExperimentConfig &cfg, std::uint64_t n_pulses, std::uint64_t seed,
                          unsigned jobs = 1);

/// Same comparison against a caller-supplied reference state.
OracleReport compare_with_state(const ExperimentConfig &cfg, const polarization::TwoQubitDensity &reference,
                                std::uint64_t n_pulses, std::uint64_t seed, unsigned jobs = 1);

}  // namespace swapsim::analysis
