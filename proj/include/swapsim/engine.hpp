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

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "swapsim/experiment_config.hpp"
#include "swapsim/rng.hpp"

namespace swapsim::engine {

enum class EventClass { Signal, MultipairBackground };

/// One accepted four-fold coincidence.
struct FourfoldEvent {
    std::uint64_t pulse_index = 0;
    double true_t1 = 0.0;  ///< D1 detection time from pulse start, before jitter (s)
    double true_t2 = 0.0;
    double measured_t1 = 0.0;  ///< with detector jitter; what the electronics see
    double measured_t2 = 0.0;
    modes::BsmBranch bsm_branch = modes::BsmBranch::PhiPlus;
    EventClass event_class = EventClass::Signal;
    double pockels_phase_applied = 0.0;  ///< feed-forward plus branch frame correction (rad)
    bool clipped = false;                ///< TAC input was outside its range
    int outcome_a = 1;                   ///< +1 / -1 behind the A analyzer
    int outcome_b = 1;

    bool operator==(const FourfoldEvent &) const = default;
};

struct RunCounts {
    std::uint64_t pulses = 0;
    std::uint64_t accepted = 0;
    std::uint64_t clipped = 0;
    std::uint64_t background = 0;

    bool operator==(const RunCounts &) const = default;
};

struct EventLog {
    std::vector<FourfoldEvent> events;  ///< ordered by pulse index
    ExperimentConfig config;
    std::uint64_t seed = 0;
    RunCounts counts;
};

struct RunOptions {
    unsigned jobs = 1;  ///< worker threads; 0 = hardware concurrency. Output does not depend on it.
    /// Reused when it matches the config; built otherwise.
    std::shared_ptr<const modes::CoherenceTable> table;
};

/// Pulses per independent RNG substream. Substream b is seeded with
/// derive_seed(seed, b), so the log is identical for any `jobs`.
inline constexpr std::uint64_t kBlockPulses = 1ULL << 16;

/// Simulates `n_pulses` pump pulses. Throws Error(InvalidArgument) for
/// n_pulses == 0 and Error(Validation) for an invalid config.
EventLog run_experiment(const ExperimentConfig &cfg, std::uint64_t n_pulses, std::uint64_t seed,
                        const RunOptions &opts = {});

std::shared_ptr<const modes::CoherenceTable> make_table(const ExperimentConfig &cfg);

/// One photon leaving the BSM beam splitter.
struct PbsPhoton {
    int port = 1;            ///< 1 or 2
    bool detected = false;   ///< survived detector efficiency
    double measured_time = 0.0;
    int polarizer_sign = 1;  ///< which diagonal polarizer state clicked, +1 for |+>
};

struct BsmAcceptance {
    modes::BsmBranch branch;
    std::size_t port1_index;
    std::size_t port2_index;
};

/// Accepts iff exactly one detected photon per port, both within `window` of
/// each other. ++ or -- heralds PhiPlus, +- or -+ heralds PhiMinus.
std::optional<BsmAcceptance> bsm_accept(std::span<const PbsPhoton> photons, double window);

/// Outcomes of a multi-pair event: maximally mixed, so independent fair coins
/// whatever the analyzer setting.
std::pair<int, int> sample_background_outcome(const polarization::AnalyzerSetting &analyzer, Rng &rng);

/// Gaussian sigma of a jitter FWHM.
double jitter_sigma(double fwhm);

/// Writes the comma-separated event log: a `#` header line with config hash,
/// seed and counts, a column line, then one record per event (times in ns, 6
/// decimals).
void write_event_log(const EventLog &log, std::ostream &out);
void write_event_log(const EventLog &log, const std::string &path);

}  // namespace swapsim::engine
