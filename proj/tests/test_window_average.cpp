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

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "swapsim/config_io.hpp"
#include "swapsim/error.hpp"
#include "swapsim/feedforward.hpp"
#include "swapsim/window_average.hpp"

using namespace swapsim;
using namespace swapsim::polarization;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

ExperimentConfig ideal(double offset_hz = 0.0) {
    auto text = config::preset("ideal");
    text.set("source_a.offset_hz", std::to_string(offset_hz));
    return config::resolve(text);
}

// Short-pulse, equal-linewidth limit: dt has density (gamma/2) exp(-gamma |dt|),
// so the averaged coherence over |dt| <= W is
// int_0^W gamma e^{-gamma u} cos(dw u) du / (1 - e^{-gamma W}).
double lorentzian_coherence(double gamma, double dw, double window) {
    const double e = std::exp(-gamma * window);
    const double num = gamma / (gamma * gamma + dw * dw) *
                       (gamma - e * (gamma * std::cos(dw * window) - dw * std::sin(dw * window)));
    return num / (1.0 - e);
}

}  // namespace

TEST_CASE("identical frequencies: Bell state for any window") {
    const auto cfg = ideal();
    for (double w : {10e-9, 100e-9, 300e-9}) {
        const auto s = modes::window_averaged_state(w, 0.0, false, cfg);
        CHECK(witness(s) == doctest::Approx(-0.5).epsilon(1e-3));
    }
}

TEST_CASE("40 MHz, 300 ns window, no feed-forward: close to separable") {
    const auto cfg = ideal(40e6);
    const auto s = modes::window_averaged_state(300e-9, 0.0, false, cfg);
    CHECK(std::abs(witness(s)) <= 0.01);
    const double expected = lorentzian_coherence(cfg.source_a.mode.gamma, cfg.delta_omega(), 300e-9);
    CHECK(correlator(s, Axis::X) == doctest::Approx(expected).epsilon(1e-3));
}

TEST_CASE("Lorentzian closed form over several windows and offsets") {
    for (double offset : {10e6, 40e6, 80e6}) {
        const auto cfg = ideal(offset);
        for (double w : {25e-9, 80e-9, 300e-9}) {
            const auto s = modes::window_averaged_state(w, 0.0, false, cfg);
            const double expected = lorentzian_coherence(cfg.source_a.mode.gamma, cfg.delta_omega(), w);
            CHECK(correlator(s, Axis::X) == doctest::Approx(expected).epsilon(2e-3));
            CHECK(std::abs(correlator(s, Axis::X) - expected) <= 1e-3);
        }
    }
}

TEST_CASE("40 MHz with feed-forward, tuned delta_t, no jitter: Bell state recovered") {
    auto cfg = ideal(40e6);
    cfg.feedforward.delta_omega_setting = cfg.delta_omega();
    const double tuned = feedforward::tuned_delta_t(cfg.feedforward);
    const auto s = modes::window_averaged_state(300e-9, tuned, true, cfg);
    CHECK(witness(s) == doctest::Approx(-0.5).epsilon(1e-2));
    CHECK(std::abs(witness(s) + 0.5) <= 1e-2);
}

TEST_CASE("feed-forward without clipping removes every dt dependence") {
    auto cfg = ideal(40e6);
    cfg.feedforward.delta_omega_setting = cfg.delta_omega();
    cfg.feedforward.tac_range_max = 2000e-9;
    cfg.feedforward.fixed_offset = 1000e-9;
    const double tuned = feedforward::tuned_delta_t(cfg.feedforward);
    for (double w : {2e-9, 50e-9, 150e-9, 300e-9}) {
        const auto result = modes::window_average([&] {
            auto c = cfg;
            c.coincidence_window = w;
            c.feedforward.delta_t = tuned;
            c.feedforward.enabled = true;
            return c;
        }());
        CHECK(result.clipped_fraction == 0.0);
        CHECK(witness(result.state) == doctest::Approx(-0.5).epsilon(1e-3));
    }
}

TEST_CASE("vanishing window approaches the equal-time conditional state") {
    auto cfg = ideal(40e6);
    cfg.source_a.mode.gamma = kTwoPi * 4.2e6;
    cfg.source_b.mode.gamma = kTwoPi * 5.6e6;
    cfg.frame_correction = false;
    cfg.accepted_branches = {false, true};
    const auto s = modes::window_averaged_state(0.05e-9, 0.0, false, cfg);
    const auto target = modes::conditional_swap_state(50e-9, 50e-9, cfg.source_a.mode, cfg.source_b.mode,
                                                      modes::BsmBranch::PhiMinus);
    CHECK(trace_distance(s, target) <= 1e-3);
}

TEST_CASE("large dw window without feed-forward: mixed") {
    auto cfg = ideal(400e6);
    const auto s = modes::window_averaged_state(300e-9, 0.0, false, cfg);
    CHECK(std::abs(correlator(s, Axis::X)) <= 0.02);
    CHECK(std::abs(witness(s)) <= 0.02);
}

TEST_CASE("Gaussian jitter dephasing with compensation") {
    // dw sigma_c = 0.833 rad at 630 MHz and 350 ps: factor exp(-0.833^2 / 2).
    auto cfg = ideal(630e6);
    cfg.feedforward.delta_omega_setting = cfg.delta_omega();
    cfg.feedforward.enabled = true;
    cfg.feedforward.delta_t = feedforward::tuned_delta_t(cfg.feedforward);
    const double clean = correlator(modes::window_average(cfg).state, Axis::X);
    cfg.detectors.bsm_jitter_fwhm = 350e-12;
    const double noisy = correlator(modes::window_average(cfg).state, Axis::X);
    const double sigma_c = std::sqrt(2.0) * 350e-12 / (2.0 * std::sqrt(2.0 * std::log(2.0)));
    const double factor = std::exp(-0.5 * std::pow(cfg.delta_omega() * sigma_c, 2));
    CHECK(factor == doctest::Approx(0.707).epsilon(2e-3));
    CHECK(noisy == doctest::Approx(clean * factor).epsilon(3e-3));
}

TEST_CASE("clipped fraction equals the exponential tail beyond the TAC range") {
    auto cfg = ideal(40e6);
    cfg.feedforward.enabled = true;
    cfg.feedforward.delta_omega_setting = cfg.delta_omega();
    const double g = cfg.source_a.mode.gamma;
    const double expected = (std::exp(-g * 150e-9) - std::exp(-g * 300e-9)) / (1.0 - std::exp(-g * 300e-9));
    CHECK(modes::window_average(cfg).clipped_fraction == doctest::Approx(expected).epsilon(1e-3));
}

TEST_CASE("window_averaged_state rejects a non-positive window") {
    const auto cfg = ideal();
    CHECK_THROWS_AS(modes::window_averaged_state(0.0, 0.0, false, cfg), Error);
    CHECK_THROWS_AS(modes::window_averaged_state(-1e-9, 0.0, false, cfg), Error);
}

TEST_CASE("a long pump lowers the averaged coherence") {
    auto cfg = ideal();
    cfg.pump.pulse_width = 50e-9;
    const double short_pump = correlator(modes::window_averaged_state(300e-9, 0.0, false, cfg), Axis::X);
    cfg.pump.pulse_width = 300e-9;
    const double long_pump = correlator(modes::window_averaged_state(300e-9, 0.0, false, cfg), Axis::X);
    CHECK(long_pump < short_pump - 0.1);
    CHECK(correlator(modes::window_averaged_state(300e-9, 0.0, false, cfg), Axis::Z) ==
          doctest::Approx(1.0).epsilon(1e-12));
}
