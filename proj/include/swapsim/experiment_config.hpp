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

#include "swapsim/feedforward.hpp"
#include "swapsim/polarization.hpp"
#include "swapsim/temporal_modes.hpp"

namespace swapsim {

struct SourceConfig {
    modes::ModeParams mode;
    double pair_probability = 0.05;  ///< Poisson mean of pairs per pump pulse

    bool operator==(const SourceConfig &) const = default;
};

struct DetectorConfig {
    double bsm_jitter_fwhm = 0.0;  ///< Gaussian timing jitter of D1 and D2 (s)
    double bsm_efficiency = 1.0;
    double ab_jitter_fwhm = 0.0;   ///< jitter of the A/B detectors (no observable effect)
    double ab_efficiency = 1.0;

    bool operator==(const DetectorConfig &) const = default;
};

struct BranchSet {
    bool phi_plus = true;
    bool phi_minus = false;

    bool contains(modes::BsmBranch b) const {
        return b == modes::BsmBranch::PhiPlus ? phi_plus : phi_minus;
    }
    bool operator==(const BranchSet &) const = default;
};

/// Everything one simulated run depends on. SI units throughout.
struct ExperimentConfig {
    SourceConfig source_a;  ///< source of photons A and a (mode f)
    SourceConfig source_b;  ///< source of photons B and b (mode g)
    modes::PumpParams pump{50e-9};
    double rep_rate = 2e6;
    DetectorConfig detectors;
    feedforward::FeedForwardConfig feedforward;
    double coincidence_window = 300e-9;
    polarization::AnalyzerSetting analyzer;
    BranchSet accepted_branches;
    /// Static pi on photon A for the PhiPlus branch, so both branches map onto
    /// |HH> + e^{i phi}|VV>.
    bool frame_correction = true;
    /// Model double emission from one source as uncorrelated background.
    bool multipair = true;
    /// Scalar spatial-mode overlap on the BSM beam splitter, multiplies the
    /// coherence.
    double mode_overlap = 1.0;

    /// Throws Error(Validation) naming the offending field.
    void validate() const;

    /// omega_a - omega_b of the two sources.
    double delta_omega() const {
        return source_a.mode.omega_offset - source_b.mode.omega_offset;
    }

    bool operator==(const ExperimentConfig &) const = default;
};

}  // namespace swapsim
