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

namespace swapsim::feedforward {

/// Classical compensation chain: D1-D2 time difference -> unipolar TAC ->
/// Pockels cell phase on photon A. Times in seconds, delta_omega in rad/s.
struct FeedForwardConfig {
    bool enabled = false;
    double delta_omega_setting = 0.0;  ///< frequency difference programmed into the driver
    double fixed_offset = 150e-9;      ///< fixed electronic delay on the D2 signal
    double delta_t = 0.0;              ///< adjustable delay knob
    double tac_range_max = 300e-9;     ///< TAC accepts [0, tac_range_max]
    double tac_resolution = 0.0;       ///< quantization step, 0 = ideal analog
    double chain_latency = 360e-9;     ///< metadata only
    double compensation_delay = 735e-9;  ///< metadata only (fiber loop on A)

    void validate() const;
    bool operator==(const FeedForwardConfig &) const = default;
};

struct TacReading {
    double value = 0.0;    ///< TAC output expressed as a time, in [0, tac_range_max]
    bool clipped = false;  ///< input fell outside the unipolar range
};

/// tac_in = measured_dt + fixed_offset + delta_t, clipped to the TAC range and
/// rounded half away from zero to a multiple of tac_resolution.
TacReading tac_convert(double measured_dt, const FeedForwardConfig &cfg);

/// Pockels phase for a TAC reading:
/// delta_omega_setting * (2 (fixed_offset + delta_t) - tac_out), which equals
/// delta_omega_setting * (fixed_offset + delta_t - measured_dt) inside the range.
double pockels_phase(double tac_out, const FeedForwardConfig &cfg);

/// Phase error left on the |VV> branch after ideal (unclipped, unquantized)
/// compensation: dw * (true_dt - measured_dt) + dw * (fixed_offset + delta_t).
double residual_phase(double true_dt, double measured_dt, const FeedForwardConfig &cfg);

/// Knob value with the smallest magnitude for which
/// delta_omega_setting * (fixed_offset + delta_t) is a multiple of 2 pi.
double tuned_delta_t(const FeedForwardConfig &cfg);

/// Wraps a phase into (-pi, pi].
double wrap_phase(double phi);

}  // namespace swapsim::feedforward
