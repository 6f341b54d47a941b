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


// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "swapsim/analysis.hpp"
#include "swapsim/config_io.hpp"
#include "swapsim/engine.hpp"
#include "swapsim/feedforward.hpp"

using namespace swapsim;
using polarization::AnalyzerSetting;
using polarization::Axis;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::uint64_t kTargetEvents = 100000;

using Overrides = std::vector<std::pair<std::string, std::string>>;

ExperimentConfig make(const char *preset, const Overrides &overrides = {}) {
    auto text = config::preset(preset);
    for (const auto &[k, v] : overrides) {
        text.set(k, v);
    }
    return config::resolve(text);
}

// Pulses expected to give `target` accepted events, from a short pilot run.
std::uint64_t pulses_for(const ExperimentConfig &cfg, std::uint64_t target) {
    constexpr std::uint64_t kPilot = 20000000;
    const auto pilot = engine::run_experiment(cfg, kPilot, 0x5eed);
    const double rate = std::max<double>(1.0, static_cast<double>(pilot.events.size())) / kPilot;
    return static_cast<std::uint64_t>(std::ceil(1.1 * static_cast<double>(target) / rate));
}

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string &what) {
        pass = pass && ok;
        if (!detail.empty()) {
            detail += "; ";
        }
        detail += what + (ok ? "" : " [fail]");
    }
};

std::string fmt(const char *f, double a, double b = 0.0, double c = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

analysis::EstimatorResult correlator(ExperimentConfig cfg, Axis axis, std::uint64_t pulses, std::uint64_t seed) {
    cfg.analyzer = AnalyzerSetting::for_axis(axis);
    return analysis::estimate_correlator(engine::run_experiment(cfg, pulses, seed), axis);
}

double binomial(double c, std::uint64_t n) {
    return std::sqrt(std::max(0.0, 1.0 - c * c) / static_cast<double>(n));
}

Outcome criterion1() {
    Outcome o;
    const auto cfg = make("ideal");
    const auto pulses = pulses_for(cfg, kTargetEvents);
    const auto hv = correlator(cfg, Axis::Z, pulses, 101);
    const auto pm = correlator(cfg, Axis::X, pulses, 102);
    o.require(hv.n_events >= kTargetEvents && pm.n_events >= kTargetEvents,
              fmt("events %.0f/%.0f", hv.n_events, pm.n_events));
    o.require(1.0 - hv.value <= 3.0 * binomial(hv.value, hv.n_events), fmt("V_HV=%.5f", hv.value));
    o.require(1.0 - pm.value <= 3.0 * binomial(pm.value, pm.n_events), fmt("V_PM=%.5f", pm.value));
    const auto w = analysis::run_witness(cfg, pulses, 103);
    o.require(std::abs(w.witness.value + 0.5) <= 0.01, fmt("W=%.4f", w.witness.value));
    return o;
}

Overrides detuned_40{{"source_a.offset_hz", "40e6"}, {"feedforward.delta_omega_hz", "40e6"}};

Outcome criterion2() {
    Outcome o;
    auto cfg = make("ideal", detuned_40);
    cfg.feedforward.enabled = false;
    const auto pulses = pulses_for(cfg, kTargetEvents);
    const auto pm = correlator(cfg, Axis::X, pulses, 201);
    o.require(pm.n_events >= kTargetEvents, fmt("events %.0f", pm.n_events));
    o.require(std::abs(pm.value) <= 0.03, fmt("V_PM=%.4f", pm.value));
    const auto w = analysis::run_witness(cfg, pulses, 202);
    o.require(std::abs(w.witness.value) <= 0.02, fmt("W=%.4f", w.witness.value));
    return o;
}

Outcome criterion3() {
    Outcome o;
    auto cfg = make("ideal", detuned_40);
    cfg.feedforward.enabled = true;
    cfg.feedforward.delta_t = feedforward::tuned_delta_t(cfg.feedforward);
    const auto pulses = pulses_for(cfg, kTargetEvents);
    const auto w = analysis::run_witness(cfg, pulses, 301);
    o.require(std::abs(w.witness.value + 0.5) <= 0.01, fmt("W=%.4f", w.witness.value));

    // Jitter reduction, at the stated 40 MHz and at 630 MHz where it is large.
    for (const char *hz : {"40e6", "630e6"}) {
        auto clean = make("ideal", {{"source_a.offset_hz", hz}, {"feedforward.delta_omega_hz", hz}});
        clean.feedforward.enabled = true;
        clean.feedforward.delta_t = feedforward::tuned_delta_t(clean.feedforward);
        auto noisy = clean;
        noisy.detectors.bsm_jitter_fwhm = 350e-12;
        const auto n = pulses_for(clean, kTargetEvents);
        const double c0 = correlator(clean, Axis::X, n, 302).value;
        const double c1 = correlator(noisy, Axis::X, n, 303).value;
        const double sigma_c = std::sqrt(2.0) * 350e-12 / 2.3548200450309493;
        const double factor = std::exp(-0.5 * std::pow(clean.delta_omega() * sigma_c, 2));
        o.require(std::abs(c1 / c0 - factor) <= 0.03,
                  fmt("%.0f MHz: ratio %.4f vs %.4f", clean.delta_omega() / kTwoPi / 1e6, c1 / c0, factor));
    }
    return o;
}

Outcome criterion4() {
    Outcome o;
    std::vector<double> dts;
    for (int i = 0; i <= 20; ++i) {
        dts.push_back(2.5e-9 * i);
    }
    for (const char *preset : {"paper_40mhz", "paper_80mhz"}) {
        for (bool ff : {true, false}) {
            const auto t0 = std::chrono::steady_clock::now();
            auto cfg = make(preset);
            cfg.feedforward.enabled = ff;
            const auto pulses = pulses_for(cfg, 20000);
            const auto sweep = analysis::sweep_delta_t(cfg, dts, pulses, ff ? 401 : 402);
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            const double dw = cfg.delta_omega();
            if (ff) {
                const auto fit = analysis::fit_fringe(sweep, 0.5 * dw, 2.0 * dw);
                const double expected = kTwoPi / dw;
                o.require(std::abs(fit.period / expected - 1.0) <= 0.02,
                          std::string(preset) +
                              fmt(" period %.3f ns (expected %.3f)", fit.period * 1e9, expected * 1e9));
            } else {
                double worst = 0.0;
                for (const auto &p : sweep.points) {
                    worst = std::max(worst, std::abs(p.estimate.value));
                }
                o.require(worst <= 0.05, std::string(preset) + fmt(" ff off max|V_PM| %.4f", worst));
            }
            o.require(secs <= 60.0, fmt("sweep %.1f s", secs));
        }
    }
    return o;
}

Outcome criterion5() {
    Outcome o;
    const std::pair<double, double> cases[] = {{350e-12, 630e6}, {30e-12, 7.3e9}, {150e-15, 1.5e12}};
    for (const auto &[fwhm, expected] : cases) {
        const double got = analysis::jitter_limit(fwhm, 0.71) / kTwoPi;
        o.require(std::abs(got / expected - 1.0) <= 0.05, fmt("%.4g Hz vs %.4g Hz", got, expected));
    }
    return o;
}

Outcome criterion6() {
    Outcome o;
    const std::vector<double> windows = {50e-9, 100e-9, 150e-9, 200e-9, 250e-9, 300e-9};
    for (const char *width : {"50", "300"}) {
        auto cfg = make("ideal", {{"pump.width_ns", width}});
        // The narrowest window accepts least; size the run for it.
        auto narrow = cfg;
        narrow.coincidence_window = windows.front();
        const auto pulses = pulses_for(narrow, kTargetEvents);
        const auto sweep = analysis::sweep_window(cfg, windows, pulses, 600);
        std::string values;
        double lo = 1.0, hi = -1.0;
        bool decreasing = true;
        bool enough = true;
        for (std::size_t i = 0; i < sweep.points.size(); ++i) {
            const double v = sweep.points[i].estimate.value;
            values += fmt(i ? ",%.3f" : "%.3f", v);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            enough = enough && sweep.points[i].estimate.n_events >= kTargetEvents;
            if (i > 0 && v >= sweep.points[i - 1].estimate.value) {
                decreasing = false;
            }
        }
        o.require(enough, std::string(width) + " ns pump events/point >= 1e5");
        if (std::string(width) == "50") {
            o.require(hi - lo <= 0.05, "50 ns pump V_PM [" + values + "] spread" + fmt(" %.4f", hi - lo));
        } else {
            const double drop = sweep.points.front().estimate.value - sweep.points.back().estimate.value;
            o.require(decreasing && drop >= 0.1, "300 ns pump V_PM [" + values + "] drop" + fmt(" %.4f", drop));
        }
    }
    return o;
}

Outcome criterion7() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    for (const char *hz : {"0", "80e6"}) {
        for (bool ff : {true, false}) {
            auto cfg = make("paper_80mhz", {{"source_a.offset_hz", hz}, {"feedforward.delta_omega_hz", hz}});
            cfg.feedforward.enabled = ff;
            cfg.multipair = false;
            const auto pulses = pulses_for(cfg, kTargetEvents);
            const auto report = analysis::mc_vs_oracle(cfg, pulses, 700);
            std::string line = std::string(hz) + (ff ? " ff on:" : " ff off:");
            bool enough = true;
            for (const auto &ax : report.axes) {
                line += fmt(" %.4f/%.4f (%.2f sigma)", ax.monte_carlo, ax.oracle, ax.ratio);
                enough = enough && ax.n_events >= kTargetEvents;
            }
            o.require(report.pass && enough, line);
        }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(secs <= 60.0, fmt("total %.1f s", secs));
    return o;
}

Outcome criterion8() {
    Outcome o;
    const auto cfg = make("paper_40mhz");
    engine::RunOptions opts;
    opts.jobs = 1;
    const auto base = engine::run_experiment(cfg, 100000000, 800, opts);
    for (unsigned jobs : {4u, 16u}) {
        opts.jobs = jobs;
        const auto other = engine::run_experiment(cfg, 100000000, 800, opts);
        o.require(other.events == base.events && other.counts == base.counts,
                  fmt("jobs %.0f identical (%.0f events)", jobs, static_cast<double>(base.events.size())));
    }
    const std::vector<double> dts = {0.0, 5e-9, 10e-9};
    const auto s1 = analysis::sweep_delta_t(cfg, dts, 20000000, 801, 1);
    const auto s16 = analysis::sweep_delta_t(cfg, dts, 20000000, 801, 16);
    bool same = true;
    for (std::size_t i = 0; i < dts.size(); ++i) {
        same = same && s1.points[i].estimate.value == s16.points[i].estimate.value &&
               s1.points[i].counts == s16.points[i].counts;
    }
    o.require(same, "sweep identical for jobs 1 and 16");
    return o;
}

}  // namespace

int main() {
    struct Entry {
        int id;
        const char *name;
        double budget;  // seconds
        std::function<Outcome()> run;
    };
    const std::vector<Entry> entries = {
        {1, "identical-frequency baseline", 10.0, criterion1},
        {2, "mixedness without feed-forward", 10.0, criterion2},
        {3, "recovery with feed-forward", 0.0, criterion3},
        {4, "fringe periods", 0.0, criterion4},
        {5, "jitter limit numbers", 1.0, criterion5},
        {6, "window-sweep trends", 0.0, criterion6},
        {7, "oracle equivalence", 0.0, criterion7},
        {8, "determinism across jobs", 0.0, criterion8},
    };
    int failures = 0;
    for (const auto &e : entries) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = e.run();
        } catch (const std::exception &ex) {
            o.pass = false;
            o.detail = std::string("exception: ") + ex.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (e.budget > 0.0 && secs > e.budget) {
            o.require(false, fmt("runtime %.1f s over %.0f s budget", secs, e.budget));
        }
        failures += o.pass ? 0 : 1;
        std::printf("criterion %d %s: %s (%.1f s) %s\n", e.id, o.pass ? "PASS" : "FAIL", e.name, secs,
                    o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%s: %d of %zu criteria passed\n", failures ? "FAIL" : "PASS",
                static_cast<int>(entries.size()) - failures, entries.size());
    return failures ? 1 : 0;
}
