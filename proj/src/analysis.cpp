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

#include "swapsim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>

#include <Eigen/Dense>

#include "swapsim/config_io.hpp"
#include "swapsim/error.hpp"
#include "swapsim/window_average.hpp"

namespace swapsim::analysis {

namespace {

using polarization::AnalyzerSetting;
using polarization::Axis;

constexpr std::array<Axis, 3> kAxes{Axis::X, Axis::Y, Axis::Z};

std::optional<Axis> axis_of(const AnalyzerSetting &setting) {
    for (Axis a : kAxes) {
        if (AnalyzerSetting::for_axis(a) == setting) {
            return a;
        }
    }
    return std::nullopt;
}

double binomial_error(double c, std::uint64_t n) {
    return std::sqrt(std::max(0.0, 1.0 - c * c) / static_cast<double>(n));
}

void require_increasing(std::span<const double> xs, const char *what) {
    require(!xs.empty(), std::string(what) + " list is empty");
    for (std::size_t i = 0; i < xs.size(); ++i) {
        require(std::isfinite(xs[i]), std::string(what) + " values must be finite");
        if (i > 0) {
            require(xs[i] > xs[i - 1], std::string(what) + " values must be strictly increasing");
        }
    }
}

template <class Apply>
SweepResult sweep(const ExperimentConfig &cfg, std::string name, std::span<const double> values,
                  std::uint64_t n_pulses, std::uint64_t seed, unsigned jobs, Apply apply) {
    cfg.validate();
    const auto axis = axis_of(cfg.analyzer);
    require(axis.has_value(), "sweeps need an x, y or z analyzer setting");

    SweepResult out;
    out.parameter = std::move(name);
    out.config = cfg;
    out.seed = seed;
    engine::RunOptions opts;
    opts.jobs = jobs;
    opts.table = engine::make_table(cfg);
    for (std::size_t i = 0; i < values.size(); ++i) {
        ExperimentConfig point = cfg;
        apply(point, values[i]);
        const auto log = engine::run_experiment(point, n_pulses, derive_seed(seed, i), opts);
        SweepPoint sp;
        sp.parameter = values[i];
        sp.counts = log.counts;
        sp.estimate = estimate_correlator(log, *axis);
        out.points.push_back(sp);
    }
    return out;
}

struct LinearFit {
    double a = 0.0;  // cos coefficient
    double b = 0.0;  // sin coefficient
    double c = 0.0;
    double chi2 = 0.0;
};

double point_sigma(const SweepPoint &p) {
    // A point at exactly +-1 has zero binomial error; 1/N keeps its weight finite.
    return std::max(p.estimate.std_error, 1.0 / static_cast<double>(std::max<std::uint64_t>(1, p.estimate.n_events)));
}

LinearFit linear_fit(const SweepResult &sweep, double omega) {
    Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
    Eigen::Vector3d aty = Eigen::Vector3d::Zero();
    for (const auto &p : sweep.points) {
        const double w = 1.0 / std::pow(point_sigma(p), 2);
        const Eigen::Vector3d row(std::cos(omega * p.parameter), std::sin(omega * p.parameter), 1.0);
        ata += w * row * row.transpose();
        aty += w * row * p.estimate.value;
    }
    const Eigen::Vector3d x = ata.ldlt().solve(aty);
    LinearFit fit{x(0), x(1), x(2), 0.0};
    for (const auto &p : sweep.points) {
        const double model = fit.a * std::cos(omega * p.parameter) + fit.b * std::sin(omega * p.parameter) + fit.c;
        fit.chi2 += std::pow((p.estimate.value - model) / point_sigma(p), 2);
    }
    return fit;
}

FringeFit to_fringe(const SweepResult &sweep, double omega, const LinearFit &lin) {
    FringeFit f;
    f.omega = omega;
    f.amplitude = std::hypot(lin.a, lin.b);
    f.phase = std::atan2(-lin.b, lin.a);
    f.offset = lin.c;
    f.period = 2.0 * std::numbers::pi / std::abs(omega);
    f.rms_normalized = std::sqrt(lin.chi2 / static_cast<double>(sweep.points.size()));
    return f;
}

}  // namespace

EstimatorResult estimate_correlator(const engine::EventLog &log, Axis axis) {
    require(log.config.analyzer == AnalyzerSetting::for_axis(axis),
            std::string("log was not taken with the ") + polarization::axis_name(axis) + " analyzer setting");
    if (log.events.empty()) {
        fail(ErrorCode::NoData, "event log is empty");
    }
    std::int64_t sum = 0;
    for (const auto &ev : log.events) {
        sum += ev.outcome_a * ev.outcome_b;
    }
    EstimatorResult r;
    r.n_events = log.events.size();
    r.value = static_cast<double>(sum) / static_cast<double>(r.n_events);
    r.std_error = binomial_error(r.value, r.n_events);
    return r;
}

EstimatorResult estimate_visibility(const engine::EventLog &log, Basis basis) {
    return estimate_correlator(log, basis == Basis::HV ? Axis::Z : Axis::X);
}

EstimatorResult estimate_witness(const engine::EventLog &log_x, const engine::EventLog &log_y,
                                 const engine::EventLog &log_z) {
    auto strip = [](ExperimentConfig c) {
        c.analyzer = {};
        return c;
    };
    require(strip(log_x.config) == strip(log_y.config) && strip(log_x.config) == strip(log_z.config),
            "witness logs differ in more than the analyzer setting");
    const auto cx = estimate_correlator(log_x, Axis::X);
    const auto cy = estimate_correlator(log_y, Axis::Y);
    const auto cz = estimate_correlator(log_z, Axis::Z);
    EstimatorResult w;
    w.value = 0.25 * (1.0 - cx.value + cy.value - cz.value);
    w.std_error = 0.25 * std::sqrt(cx.std_error * cx.std_error + cy.std_error * cy.std_error +
                                   cz.std_error * cz.std_error);
    w.n_events = cx.n_events + cy.n_events + cz.n_events;
    return w;
}

SweepResult sweep_window(const ExperimentConfig &cfg, std::span<const double> windows, std::uint64_t n_pulses,
                         std::uint64_t seed, unsigned jobs) {
    require_increasing(windows, "window");
    require(windows.front() > 0.0, "windows must be positive");
    return sweep(cfg, "window", windows, n_pulses, seed, jobs,
                 [](ExperimentConfig &c, double w) { c.coincidence_window = w; });
}

SweepResult sweep_delta_t(const ExperimentConfig &cfg, std::span<const double> delta_ts, std::uint64_t n_pulses,
                          std::uint64_t seed, unsigned jobs) {
    require_increasing(delta_ts, "delta_t");
    return sweep(cfg, "delta_t", delta_ts, n_pulses, seed, jobs,
                 [](ExperimentConfig &c, double dt) { c.feedforward.delta_t = dt; });
}

void write_sweep_csv(const SweepResult &sweep, std::ostream &out) {
    char line[160];
    std::snprintf(line, sizeof line, "# sweep=%s seed=%llu config_hash=%016llx\n", sweep.parameter.c_str(),
                  static_cast<unsigned long long>(sweep.seed),
                  static_cast<unsigned long long>(config::config_hash(sweep.config)));
    out << line << "parameter,value,std_error,n_events\n";
    for (const auto &p : sweep.points) {
        std::snprintf(line, sizeof line, "%.6f,%.6f,%.6f,%llu\n", p.parameter * 1e9, p.estimate.value,
                      p.estimate.std_error, static_cast<unsigned long long>(p.estimate.n_events));
        out << line;
    }
}

FringeFit fit_fringe_fixed(const SweepResult &sweep, double omega) {
    require(sweep.points.size() >= 3, "a fringe fit needs at least three points");
    require(std::isfinite(omega) && omega != 0.0, "fringe frequency must be finite and nonzero");
    return to_fringe(sweep, omega, linear_fit(sweep, omega));
}

FringeFit fit_fringe(const SweepResult &sweep, double omega_lo, double omega_hi) {
    require(sweep.points.size() >= 4, "a free-frequency fringe fit needs at least four points");
    require(omega_lo > 0.0 && omega_hi > omega_lo, "fringe frequency range must be positive and ordered");

    constexpr int kScan = 2000;
    const double step = (omega_hi - omega_lo) / kScan;
    int best = 0;
    double best_chi2 = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= kScan; ++i) {
        const double chi2 = linear_fit(sweep, omega_lo + i * step).chi2;
        if (chi2 < best_chi2) {
            best_chi2 = chi2;
            best = i;
        }
    }

    double lo = omega_lo + std::max(0, best - 1) * step;
    double hi = omega_lo + std::min(kScan, best + 1) * step;
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - g * (hi - lo);
    double x2 = lo + g * (hi - lo);
    double f1 = linear_fit(sweep, x1).chi2;
    double f2 = linear_fit(sweep, x2).chi2;
    for (int it = 0; it < 80 && hi - lo > 1e-12 * hi; ++it) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = linear_fit(sweep, x1).chi2;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = linear_fit(sweep, x2).chi2;
        }
    }
    const double omega = 0.5 * (lo + hi);
    return to_fringe(sweep, omega, linear_fit(sweep, omega));
}

double jitter_limit(double jitter_fwhm, double visibility_floor) {
    require(std::isfinite(jitter_fwhm) && jitter_fwhm > 0.0, "jitter FWHM must be positive");
    require(visibility_floor > 0.0 && visibility_floor < 1.0, "visibility floor must lie in (0, 1)");
    const double sigma = jitter_fwhm / (2.0 * std::sqrt(2.0 * std::numbers::ln2));
    return std::sqrt(-2.0 * std::log(visibility_floor)) / (std::sqrt(2.0) * sigma);
}

WitnessReport run_witness(const ExperimentConfig &cfg, std::uint64_t n_pulses, std::uint64_t seed, unsigned jobs) {
    cfg.validate();
    engine::RunOptions opts;
    opts.jobs = jobs;
    opts.table = engine::make_table(cfg);
    std::array<engine::EventLog, 3> logs;
    WitnessReport report;
    for (std::size_t i = 0; i < kAxes.size(); ++i) {
        ExperimentConfig c = cfg;
        c.analyzer = AnalyzerSetting::for_axis(kAxes[i]);
        logs[i] = engine::run_experiment(c, n_pulses, derive_seed(seed, i), opts);
        report.correlators[i] = estimate_correlator(logs[i], kAxes[i]);
    }
    report.witness = estimate_witness(logs[0], logs[1], logs[2]);
    report.entangled = report.witness.value + 3.0 * report.witness.std_error < 0.0;
    return report;
}

OracleReport compare_with_state(const ExperimentConfig &cfg, const polarization::TwoQubitDensity &reference,
                                std::uint64_t n_pulses, std::uint64_t seed, unsigned jobs) {
    ExperimentConfig base = cfg;
    base.multipair = false;
    base.validate();
    engine::RunOptions opts;
    opts.jobs = jobs;
    opts.table = engine::make_table(base);

    OracleReport report;
    report.pass = true;
    for (std::size_t i = 0; i < kAxes.size(); ++i) {
        ExperimentConfig c = base;
        c.analyzer = AnalyzerSetting::for_axis(kAxes[i]);
        const auto log = engine::run_experiment(c, n_pulses, derive_seed(seed, i), opts);
        const auto mc = estimate_correlator(log, kAxes[i]);
        OracleAxis &ax = report.axes[i];
        ax.axis = kAxes[i];
        ax.monte_carlo = mc.value;
        ax.oracle = polarization::correlator(reference, kAxes[i]);
        ax.n_events = mc.n_events;
        // Error from whichever of the two values is less extreme, floored at
        // 1/N so a perfect correlation still has a finite scale.
        const double c_min = std::min(std::abs(mc.value), std::abs(ax.oracle));
        ax.std_error = std::max(binomial_error(c_min, mc.n_events), 1.0 / static_cast<double>(mc.n_events));
        ax.deviation = std::abs(ax.monte_carlo - ax.oracle);
        ax.ratio = ax.deviation / ax.std_error;
        ax.pass = ax.ratio <= kOracleSigmaBound && ax.deviation <= kOracleAbsBound;
        report.pass = report.pass && ax.pass;
    }
    return report;
}

OracleReport mc_vs_oracle(const ExperimentConfig &cfg, std::uint64_t n_pulses, std::uint64_t seed, unsigned jobs) {
    ExperimentConfig base = cfg;
    base.multipair = false;
    const auto table = engine::make_table(base);
    const auto reference = modes::window_average(base, table.get()).state;
    return compare_with_state(base, reference, n_pulses, seed, jobs);
}

}  // namespace swapsim::analysis
