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

#include "swapsim/feedforward.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "swapsim/error.hpp"

namespace swapsim::feedforward {

void FeedForwardConfig::validate() const {
    require(std::isfinite(delta_omega_setting), "feed-forward delta_omega must be finite");
    require(std::isfinite(fixed_offset) && fixed_offset >= 0.0, "feed-forward fixed offset must be >= 0");
    require(std::isfinite(delta_t), "feed-forward delta_t must be finite");
    require(std::isfinite(tac_range_max) && tac_range_max > 0.0, "TAC range must be positive");
    require(std::isfinite(tac_resolution) && tac_resolution >= 0.0, "TAC resolution must be >= 0");
    require(std::isfinite(chain_latency) && chain_latency >= 0.0, "chain latency must be >= 0");
    require(std::isfinite(compensation_delay) && compensation_delay >= 0.0, "compensation delay must be >= 0");
}

TacReading tac_convert(double measured_dt, const FeedForwardConfig &cfg) {
    const double input = measured_dt + cfg.fixed_offset + cfg.delta_t;
    TacReading out;
    out.clipped = input < 0.0 || input > cfg.tac_range_max;
    out.value = std::clamp(input, 0.0, cfg.tac_range_max);
    if (cfg.tac_resolution > 0.0) {
        // std::round is half-away-from-zero.
        out.value = std::round(out.value / cfg.tac_resolution) * cfg.tac_resolution;
        out.value = std::clamp(out.value, 0.0, cfg.tac_range_max);
    }
    return out;
}

double pockels_phase(double tac_out, const FeedForwardConfig &cfg) {
    return cfg.delta_omega_setting * (2.0 * (cfg.fixed_offset + cfg.delta_t) - tac_out);
}

double residual_phase(double true_dt, double measured_dt, const FeedForwardConfig &cfg) {
    return cfg.delta_omega_setting * (true_dt - measured_dt) + cfg.delta_omega_setting * (cfg.fixed_offset + cfg.delta_t);
}

double tuned_delta_t(const FeedForwardConfig &cfg) {
    if (cfg.delta_omega_setting == 0.0) {
        return 0.0;
    }
    const double period = 2.0 * std::numbers::pi / std::abs(cfg.delta_omega_setting);
    return std::round(cfg.fixed_offset / period) * period - cfg.fixed_offset;
}

double wrap_phase(double phi) {
    const double two_pi = 2.0 * std::numbers::pi;
    double w = std::fmod(phi, two_pi);
    if (w <= -std::numbers::pi) {
        w += two_pi;
    } else if (w > std::numbers::pi) {
        w -= two_pi;
    }
    return w;
}

}  // namespace swapsim::feedforward
