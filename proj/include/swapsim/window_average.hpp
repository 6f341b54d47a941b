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

#include "swapsim/experiment_config.hpp"
#include "swapsim/polarization.hpp"
#include "swapsim/temporal_modes.hpp"

namespace swapsim::modes {

// Deterministic counterpart of the event engine for signal events: the A,B
// state averaged over every accepted (t1, t2) pair, by 2-D quadrature over
// the true detection times (in the coordinates dt = t1 - t2 and t2) weighted
// by the pump-averaged joint detection density and the coherence factor.
// Detector jitter enters through an average over the measured time
// difference, which sets both the window acceptance and the feed-forward
// phase. Multi-pair background is not included.

struct OracleOptions {
    double max_step = 0.5e-9;  ///< upper bound on the quadrature step (s)
    int noise_nodes = 121;     ///< nodes over +-6 sigma of the timing noise
};

struct OracleResult {
    polarization::TwoQubitDensity state = polarization::TwoQubitDensity::maximally_mixed();
    double clipped_fraction = 0.0;  ///< share of accepted events with TAC clipping
};

OracleResult window_average(const ExperimentConfig &cfg, const CoherenceTable *table = nullptr,
                            const OracleOptions &opts = {});

/// The state with the window, knob delta_t and feed-forward switch overridden.
/// Throws Error(InvalidArgument) for a non-positive window.
polarization::TwoQubitDensity window_averaged_state(double window, double delta_t_offset, bool feedforward_enabled,
                                                    const ExperimentConfig &cfg);

}  // namespace swapsim::modes
