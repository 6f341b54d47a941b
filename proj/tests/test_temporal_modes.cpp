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
#include <random>

#include "doctest.h"
#include "swapsim/error.hpp"
#include "swapsim/temporal_modes.hpp"

using namespace swapsim::modes;
using namespace swapsim::polarization;
using swapsim::Error;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

ModeParams mode(double gamma_hz, double offset_hz = 0.0) {
    return {kTwoPi * gamma_hz, kTwoPi * offset_hz};
}

double coherence_phase(const TwoQubitDensity &rho) {
    return std::arg(rho(kVV, kHH));
}

double wrap(double x) {
    return std::remainder(x, kTwoPi);
}

// Independent single-source coherence: closed-form pair amplitude on a fine
// uniform idler grid, plain trapezoid.
double brute_single_coherence(const ModeParams &m, double width, double s, double t) {
    const double upper = std::max({s, t, width}) + 20.0 / m.gamma;
    const int n = 200000;
    const double h = upper / n;
    double kss = 0.0, ktt = 0.0, kst = 0.0;
    auto psi = [&](double ti, double ts) {
        const double u = std::min({width, ti, ts});
        return u <= 0.0 ? 0.0 : std::exp(-0.5 * m.gamma * (ti + ts)) * std::expm1(m.gamma * u) / width;
    };
    for (int k = 0; k <= n; ++k) {
        const double ti = k * h;
        const double w = (k == 0 || k == n) ? 0.5 : 1.0;
        const double a = psi(ti, s);
        const double b = psi(ti, t);
        kss += w * a * a;
        ktt += w * b * b;
        kst += w * a * b;
    }
    return kst / std::sqrt(kss * ktt);
}

}  // namespace

TEST_CASE("mode_amplitude closed form and normalization") {
    const auto m = mode(4.2e6);
    CHECK(std::abs(mode_amplitude(m, -1e-9)) == 0.0);
    CHECK(std::abs(mode_amplitude(m, 0.0)) == doctest::Approx(std::sqrt(m.gamma)));
    // Simpson over [0, 40/gamma] in 20000 panels.
    const double upper = 40.0 / m.gamma;
    const int n = 20000;
    const double h = upper / n;
    double sum = std::norm(mode_amplitude(m, 0.0)) + std::norm(mode_amplitude(m, upper));
    for (int k = 1; k < n; ++k) {
        sum += (k % 2 ? 4.0 : 2.0) * std::norm(mode_amplitude(m, k * h));
    }
    CHECK(std::abs(sum * h / 3.0 - 1.0) <= 1e-6);
}

TEST_CASE("conditional_swap_state: identical sources give a Bell state") {
    const auto a = mode(5e6);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> t(1e-9, 400e-9);
    for (int i = 0; i < 50; ++i) {
        for (BsmBranch b : {BsmBranch::PhiPlus, BsmBranch::PhiMinus}) {
            CHECK(witness(apply_phase_on_A(conditional_swap_state(t(rng), t(rng), a, a, b),
                                           b == BsmBranch::PhiPlus ? std::numbers::pi : 0.0)) ==
                  doctest::Approx(-0.5).epsilon(1e-12));
        }
    }
}

TEST_CASE("conditional_swap_state: 80 MHz, dt = 6.25 ns, Phi- gives a pi phase") {
    const auto a = mode(5e6, 80e6);
    const auto b = mode(5e6);
    const auto s = conditional_swap_state(56.25e-9, 50e-9, a, b, BsmBranch::PhiMinus);
    CHECK(correlator(s, Axis::X) == doctest::Approx(-1.0).epsilon(1e-10));
    CHECK(std::abs(wrap(coherence_phase(s) - std::numbers::pi)) < 1e-10);
}

TEST_CASE("conditional_swap_state: linewidth mismatch sets the amplitude ratio") {
    const auto a = mode(4.2e6);
    const auto b = mode(5.6e6);
    const double dt = 50e-9;
    const double expected_r = std::exp(-(a.gamma - b.gamma) * dt / 2.0);
    CHECK(expected_r == doctest::Approx(1.246).epsilon(1e-3));
    CHECK(swap_amplitude_ratio(100e-9, 50e-9, a, b) == doctest::Approx(expected_r).epsilon(1e-14));
    const auto s = conditional_swap_state(100e-9, 50e-9, a, b, BsmBranch::PhiMinus);
    const double r = std::sqrt(s(kVV, kVV).real() / s(kHH, kHH).real());
    CHECK(r == doctest::Approx(expected_r).epsilon(1e-12));
    CHECK(std::abs(correlator(s, Axis::X)) == doctest::Approx(2 * expected_r / (1 + expected_r * expected_r)));
    CHECK(std::abs(correlator(s, Axis::X)) == doctest::Approx(0.9763).epsilon(1e-4));
}

TEST_CASE("conditional_swap_state: coherence phase is linear in dt") {
    const auto a = mode(4.2e6, 40e6);
    const auto b = mode(5.6e6);
    const double dw = a.omega_offset - b.omega_offset;
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> t(1e-9, 300e-9);
    for (int i = 0; i < 50; ++i) {
        const double t1 = t(rng), t2 = t(rng), u1 = t(rng), u2 = t(rng);
        for (BsmBranch br : {BsmBranch::PhiPlus, BsmBranch::PhiMinus}) {
            const double p = coherence_phase(conditional_swap_state(t1, t2, a, b, br));
            const double q = coherence_phase(conditional_swap_state(u1, u2, a, b, br));
            CHECK(std::abs(wrap((p - q) - dw * ((t1 - t2) - (u1 - u2)))) < 1e-9);
        }
        // Phi+ carries an extra pi relative to Phi-.
        const double pp = coherence_phase(conditional_swap_state(t1, t2, a, b, BsmBranch::PhiPlus));
        const double pm = coherence_phase(conditional_swap_state(t1, t2, a, b, BsmBranch::PhiMinus));
        CHECK(std::abs(wrap(pp - pm - std::numbers::pi)) < 1e-9);
    }
}

TEST_CASE("conditional_swap_state: a detection before emission is rejected") {
    const auto a = mode(5e6);
    CHECK_THROWS_AS(conditional_swap_state(-1e-9, 10e-9, a, a, BsmBranch::PhiPlus), Error);
    CHECK_THROWS_AS(conditional_swap_state(10e-9, -1e-9, a, a, BsmBranch::PhiPlus), Error);
    CHECK_THROWS_AS(conditional_swap_state(-1e-9, -2e-9, a, a, BsmBranch::PhiPlus), Error);
    CHECK_NOTHROW(conditional_swap_state(0.0, 0.0, a, a, BsmBranch::PhiPlus));
}

TEST_CASE("joint_detection_density") {
    const auto f = mode(4.2e6);
    const auto g = mode(5.6e6);
    CHECK(joint_detection_density(-1e-9, 5e-9, f, g, 0.0, 0.0) == 0.0);
    CHECK(joint_detection_density(5e-9, 5e-9, f, g, 10e-9, 10e-9) == 0.0);

    // Swap symmetry under (t1 <-> t2, a <-> b) including emission times.
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> t(0.0, 200e-9);
    for (int i = 0; i < 50; ++i) {
        const double t1 = t(rng), t2 = t(rng), ea = 0.2 * t(rng), eb = 0.2 * t(rng);
        CHECK(joint_detection_density(t1, t2, f, g, ea, eb) ==
              doctest::Approx(joint_detection_density(t2, t1, g, f, eb, ea)).epsilon(1e-14));
    }

    // Equal modes and emission times: gamma^2 exp(-gamma (t1 + t2)).
    for (int i = 0; i < 20; ++i) {
        const double t1 = t(rng), t2 = t(rng);
        CHECK(joint_detection_density(t1, t2, f, f, 0.0, 0.0) ==
              doctest::Approx(f.gamma * f.gamma * std::exp(-f.gamma * (t1 + t2))).epsilon(1e-12));
    }

    // Normalization: 2-D midpoint at n and 2n panels, Richardson-extrapolated.
    const double upper = 30.0 / f.gamma;
    auto midpoint = [&](int n) {
        const double h = upper / n;
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                total += joint_detection_density((i + 0.5) * h, (j + 0.5) * h, f, g, 0.0, 0.0);
            }
        }
        return total * h * h;
    };
    const double coarse = midpoint(1000);
    const double fine = midpoint(2000);
    CHECK(std::abs((4.0 * fine - coarse) / 3.0 - 1.0) <= 1e-6);

    const int m = 20000;
    const double hm = upper / m;
    for (double t1 : {5e-9, 40e-9, 120e-9}) {
        double marginal = 0.0;
        for (int j = 0; j < m; ++j) {
            marginal += joint_detection_density(t1, (j + 0.5) * hm, f, f, 0.0, 0.0);
        }
        marginal *= hm;
        CHECK(marginal == doctest::Approx(f.gamma * std::exp(-f.gamma * t1)).epsilon(1e-6));
    }
}

TEST_CASE("pulse_averaged_intensity matches direct averaging over emission time") {
    const auto f = mode(4.2e6);
    const PumpParams pump{50e-9};
    for (double t : {-1e-9, 10e-9, 49e-9, 51e-9, 200e-9}) {
        const int n = 100000;
        double sum = 0.0;
        for (int k = 0; k < n; ++k) {
            sum += std::norm(mode_amplitude(f, t - (k + 0.5) * pump.pulse_width / n));
        }
        CHECK(pulse_averaged_intensity(f, pump, t) == doctest::Approx(sum / n).epsilon(1e-4));
    }
}

TEST_CASE("pair_amplitude closed form matches direct emission-time integral") {
    const auto f = mode(5e6);
    const PumpParams pump{50e-9};
    for (auto [ti, ts] : {std::pair{10e-9, 30e-9}, {60e-9, 80e-9}, {200e-9, 20e-9}}) {
        const int n = 100000;
        double sum = 0.0;
        for (int k = 0; k < n; ++k) {
            const double tau = (k + 0.5) * pump.pulse_width / n;
            sum += (mode_amplitude(f, ti - tau) * mode_amplitude(f, ts - tau)).real();
        }
        sum /= n;
        CHECK(pair_amplitude(f, pump, ti, ts) == doctest::Approx(sum).epsilon(1e-6));
    }
}

TEST_CASE("coherence_factor examples") {
    const auto m = mode(5e6);
    CHECK(coherence_factor(80e-9, 80e-9, PumpParams{300e-9}, m, m) == 1.0);

    // Near-Fourier-limited pump: no frequency tag left.
    for (double dt : {20e-9, 100e-9, 250e-9}) {
        CHECK(coherence_factor(30e-9 + dt, 30e-9, PumpParams{1e-12}, m, m, {8192, 1e-4}) >= 1.0 - 1e-3);
    }

    const double c50 = coherence_factor(200e-9, 50e-9, PumpParams{50e-9}, m, m);
    const double c300 = coherence_factor(200e-9, 50e-9, PumpParams{300e-9}, m, m);
    CHECK(c300 < c50);
    CHECK(c50 <= 1.0);
    CHECK(c300 >= 0.0);
}

TEST_CASE("coherence_factor rejects under-resolved grids") {
    const auto m = mode(5e6);
    CHECK_THROWS_AS(coherence_factor(10e-9, 20e-9, PumpParams{50e-9}, m, m, {100, 1e-4}), Error);
    CHECK(required_quadrature_nodes(PumpParams{1e-12}, m, m) >= 512 * 4);
}

TEST_CASE("coherence_factor agrees with an independent brute-force evaluation") {
    const auto a = mode(4.2e6);
    const auto b = mode(5.6e6);
    for (double width : {50e-9, 300e-9}) {
        for (auto [t1, t2] : {std::pair{30e-9, 90e-9}, {150e-9, 20e-9}, {260e-9, 200e-9}}) {
            const double expected =
                brute_single_coherence(a, width, t1, t2) * brute_single_coherence(b, width, t1, t2);
            CHECK(coherence_factor(t1, t2, PumpParams{width}, a, b) == doctest::Approx(expected).epsilon(1e-3));
        }
    }
}

TEST_CASE("coherence_factor is non-increasing in pulse width and in |dt|") {
    const auto m = mode(5e6);
    const double widths[] = {10e-9, 50e-9, 100e-9, 200e-9, 300e-9};
    const double dts[] = {10e-9, 50e-9, 100e-9, 150e-9, 250e-9};
    const double t2 = 40e-9;
    for (double dt : dts) {
        double prev = 1.0 + 1e-9;
        for (double w : widths) {
            const double c = coherence_factor(t2 + dt, t2, PumpParams{w}, m, m);
            CHECK(c <= prev + 1e-4);
            prev = c;
        }
    }
    for (double w : {50e-9, 300e-9}) {
        double prev = 1.0 + 1e-9;
        for (double dt : dts) {
            const double c = coherence_factor(t2 + dt, t2, PumpParams{w}, m, m);
            CHECK(c <= prev + 1e-4);
            prev = c;
        }
    }
}

TEST_CASE("CoherenceTable agrees with the quadrature route") {
    const auto a = mode(4.2e6);
    const auto b = mode(5.6e6);
    for (double width : {50e-9, 300e-9}) {
        const CoherenceTable table(PumpParams{width}, a, b);
        CHECK_FALSE(table.trivial());
        CHECK(table.matches(PumpParams{width}, mode(4.2e6, 80e6), b));
        CHECK_FALSE(table.matches(PumpParams{width + 1e-9}, a, b));
        for (auto [t1, t2] : {std::pair{30e-9, 90e-9}, {150e-9, 20e-9}, {260e-9, 200e-9}, {70e-9, 70e-9}}) {
            CHECK(table(t1, t2) == doctest::Approx(coherence_factor(t1, t2, PumpParams{width}, a, b)).epsilon(2e-3));
        }
    }
    CHECK(CoherenceTable(PumpParams{1e-16}, a, b).trivial());
}
