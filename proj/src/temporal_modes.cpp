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

#include "swapsim/temporal_modes.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "swapsim/error.hpp"

namespace swapsim::modes {

using polarization::TwoQubitDensity;

void ModeParams::validate() const {
    require(std::isfinite(gamma) && gamma > 0.0, "mode decay rate gamma must be positive");
    require(std::isfinite(omega_offset), "mode frequency offset must be finite");
}

void PumpParams::validate() const {
    require(std::isfinite(pulse_width) && pulse_width > 0.0, "pump pulse width must be positive");
}

int branch_sign(BsmBranch branch) {
    return branch == BsmBranch::PhiPlus ? -1 : 1;
}

std::complex<double> mode_amplitude(const ModeParams &mode, double t) {
    if (t < 0.0) {
        return 0.0;
    }
    return std::sqrt(mode.gamma) * std::exp(-0.5 * mode.gamma * t);
}

double swap_amplitude_ratio(double t1, double t2, const ModeParams &mode_a, const ModeParams &mode_b) {
    return std::exp(-0.5 * (mode_a.gamma - mode_b.gamma) * (t1 - t2));
}

TwoQubitDensity conditional_swap_state(double t1, double t2, const ModeParams &mode_a, const ModeParams &mode_b,
                                       BsmBranch branch) {
    const bool hh = mode_amplitude(mode_b, t1) != 0.0 && mode_amplitude(mode_a, t2) != 0.0;
    const bool vv = mode_amplitude(mode_a, t1) != 0.0 && mode_amplitude(mode_b, t2) != 0.0;
    if (!hh && !vv) {
        fail(ErrorCode::InvalidArgument, "detection times precede emission: not a coincidence event");
    }
    if (hh != vv) {
        Eigen::Vector4cd product = Eigen::Vector4cd::Zero();
        product(hh ? polarization::kHH : polarization::kVV) = 1.0;
        return TwoQubitDensity::pure(product);
    }
    const double delta_omega = mode_a.omega_offset - mode_b.omega_offset;
    const double r = swap_amplitude_ratio(t1, t2, mode_a, mode_b);
    return polarization::phase_bell_state(delta_omega * (t1 - t2), r, branch_sign(branch));
}

double joint_detection_density(double t1, double t2, const ModeParams &mode_a, const ModeParams &mode_b,
                               double emission_time_a, double emission_time_b) {
    const double g1 = std::norm(mode_amplitude(mode_b, t1 - emission_time_b));
    const double f2 = std::norm(mode_amplitude(mode_a, t2 - emission_time_a));
    const double f1 = std::norm(mode_amplitude(mode_a, t1 - emission_time_a));
    const double g2 = std::norm(mode_amplitude(mode_b, t2 - emission_time_b));
    return 0.5 * (g1 * f2 + f1 * g2);
}

double pulse_averaged_intensity(const ModeParams &mode, const PumpParams &pump, double t) {
    if (t <= 0.0) {
        return 0.0;
    }
    const double width = pump.pulse_width;
    if (t <= width) {
        return -std::expm1(-mode.gamma * t) / width;
    }
    return std::exp(-mode.gamma * (t - width)) * -std::expm1(-mode.gamma * width) / width;
}

double pair_amplitude(const ModeParams &mode, const PumpParams &pump, double t_idler, double t_signal) {
    const double upper = std::min({pump.pulse_width, t_idler, t_signal});
    if (upper <= 0.0) {
        return 0.0;
    }
    // gamma * integral_0^upper exp(-gamma (ti + ts - 2 tau) / 2) dtau / T
    const double g = mode.gamma;
    return std::exp(-0.5 * g * (t_idler + t_signal)) * std::expm1(g * upper) / pump.pulse_width;
}

int required_quadrature_nodes(const PumpParams &pump, const ModeParams &mode_a, const ModeParams &mode_b) {
    double decades = 0.0;
    for (const ModeParams *m : {&mode_a, &mode_b}) {
        decades = std::max(decades, std::abs(std::log10(m->gamma * pump.pulse_width)));
    }
    return 512 * std::max(1, static_cast<int>(std::ceil(decades)));
}

namespace {

// Pair amplitude by quadrature over the emission time: composite Simpson on
// [0, min(T, t_idler, t_signal)], refined until successive estimates agree.
double pair_amplitude_quadrature(const ModeParams &mode, double width, double t_idler, double t_signal) {
    const double upper = std::min({width, t_idler, t_signal});
    if (upper <= 0.0) {
        return 0.0;
    }
    const double g = mode.gamma;
    auto integrand = [&](double tau) { return g * std::exp(-0.5 * g * (t_idler + t_signal - 2.0 * tau)); };
    double previous = 0.0;
    for (int n = 32;; n *= 2) {
        const double h = upper / n;
        double sum = integrand(0.0) + integrand(upper);
        for (int k = 1; k < n; ++k) {
            sum += (k % 2 ? 4.0 : 2.0) * integrand(k * h);
        }
        const double estimate = sum * h / 3.0 / width;
        if (n > 32 && (std::abs(estimate - previous) <= 1e-10 * std::abs(estimate) || n >= 1 << 14)) {
            return estimate;
        }
        previous = estimate;
    }
}

struct Overlaps {
    double ss = 0.0;
    double tt = 0.0;
    double st = 0.0;
};

// K(s, s), K(t, t), K(s, t) with K(x, y) = integral dt_i psi(t_i, x) psi(t_i, y):
// trapezoid over the idler time with breakpoints at the kinks of psi.
Overlaps idler_overlaps(const ModeParams &mode, double width, double s, double t, int min_nodes, double rel_tol) {
    const double upper = std::max({s, t, width}) + 16.0 / mode.gamma;
    std::vector<double> breaks{0.0, upper};
    for (double b : {s, t, width}) {
        if (b > 0.0 && b < upper) {
            breaks.push_back(b);
        }
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    auto evaluate = [&](int total_nodes) {
        Overlaps out;
        for (std::size_t seg = 0; seg + 1 < breaks.size(); ++seg) {
            const double lo = breaks[seg];
            const double hi = breaks[seg + 1];
            const int n = std::max(4, static_cast<int>(std::ceil(total_nodes * (hi - lo) / upper)));
            const double h = (hi - lo) / n;
            for (int k = 0; k <= n; ++k) {
                const double ti = lo + k * h;
                const double w = (k == 0 || k == n) ? 0.5 * h : h;
                const double ps = pair_amplitude_quadrature(mode, width, ti, s);
                const double pt = pair_amplitude_quadrature(mode, width, ti, t);
                out.ss += w * ps * ps;
                out.tt += w * pt * pt;
                out.st += w * ps * pt;
            }
        }
        return out;
    };

    Overlaps current = evaluate(min_nodes);
    for (int nodes = 2 * min_nodes; nodes <= 64 * min_nodes; nodes *= 2) {
        const Overlaps next = evaluate(nodes);
        auto close = [&](double a, double b) { return std::abs(a - b) <= rel_tol * std::abs(b); };
        const bool converged = close(current.ss, next.ss) && close(current.tt, next.tt) && close(current.st, next.st);
        current = next;
        if (converged) {
            break;
        }
    }
    return current;
}

double single_source_coherence(const ModeParams &mode, double width, double t1, double t2, const QuadratureOptions &opts) {
    if (t1 <= 0.0 || t2 <= 0.0 || t1 == t2) {
        return 1.0;
    }
    const Overlaps k = idler_overlaps(mode, width, t1, t2, opts.nodes, opts.rel_tol);
    if (k.ss <= 0.0 || k.tt <= 0.0) {
        return 1.0;
    }
    return std::clamp(k.st / std::sqrt(k.ss * k.tt), 0.0, 1.0);
}

}  // namespace

double coherence_factor(double t1, double t2, const PumpParams &pump, const ModeParams &mode_a,
                        const ModeParams &mode_b, const QuadratureOptions &opts) {
    pump.validate();
    mode_a.validate();
    mode_b.validate();
    require(opts.rel_tol > 0.0, "quadrature tolerance must be positive");
    const int needed = required_quadrature_nodes(pump, mode_a, mode_b);
    if (opts.nodes < needed) {
        fail(ErrorCode::InvalidArgument, "quadrature grid under-resolved: " + std::to_string(opts.nodes) +
                                             " nodes, need at least " + std::to_string(needed));
    }
    if (t1 == t2) {
        return 1.0;
    }
    return single_source_coherence(mode_a, pump.pulse_width, t1, t2, opts) *
           single_source_coherence(mode_b, pump.pulse_width, t1, t2, opts);
}

CoherenceTable::CoherenceTable(const PumpParams &pump, const ModeParams &mode_a, const ModeParams &mode_b, int nodes)
    : pump_(pump), mode_a_(mode_a), mode_b_(mode_b) {
    pump.validate();
    mode_a.validate();
    mode_b.validate();
    require(nodes >= 16, "coherence table needs at least 16 nodes");
    const double gamma_min = std::min(mode_a.gamma, mode_b.gamma);
    const double gamma_max = std::max(mode_a.gamma, mode_b.gamma);
    span_ = pump.pulse_width + 14.0 / gamma_min;
    // Fourier-limited pump: the pair amplitude factorizes and nothing decoheres.
    if (gamma_max * pump.pulse_width < 1e-7) {
        trivial_ = true;
        return;
    }
    n_ = nodes;
    step_ = span_ / (n_ - 1);

    values_.assign(static_cast<std::size_t>(n_) * n_, 1.0);
    for (const ModeParams *mode : {&mode_a, &mode_b}) {
        // psi(i, k): idler at midpoint i, signal at grid node k.
        Eigen::MatrixXd psi(n_, n_);
        for (int k = 0; k < n_; ++k) {
            for (int i = 0; i < n_; ++i) {
                psi(i, k) = pair_amplitude(*mode, pump, (i + 0.5) * step_, k * step_);
            }
        }
        const Eigen::MatrixXd overlap = psi.transpose() * psi;
        for (int k = 0; k < n_; ++k) {
            for (int l = 0; l < n_; ++l) {
                const double norm = std::sqrt(overlap(k, k) * overlap(l, l));
                const double c = norm > 0.0 ? std::clamp(overlap(k, l) / norm, 0.0, 1.0) : 1.0;
                values_[static_cast<std::size_t>(k) * n_ + l] *= c;
            }
        }
    }
}

double CoherenceTable::operator()(double t1, double t2) const {
    if (trivial_) {
        return 1.0;
    }
    auto locate = [&](double t, int &idx, double &frac) {
        const double x = std::clamp(t, 0.0, span_) / step_;
        idx = std::min(static_cast<int>(x), n_ - 2);
        frac = x - idx;
    };
    int i, j;
    double fi, fj;
    locate(t1, i, fi);
    locate(t2, j, fj);
    auto at = [&](int a, int b) { return values_[static_cast<std::size_t>(a) * n_ + b]; };
    return (1 - fi) * ((1 - fj) * at(i, j) + fj * at(i, j + 1)) + fi * ((1 - fj) * at(i + 1, j) + fj * at(i + 1, j + 1));
}

bool CoherenceTable::matches(const PumpParams &pump, const ModeParams &mode_a, const ModeParams &mode_b) const {
    // Frequency offsets do not enter the table.
    return pump == pump_ && mode_a.gamma == mode_a_.gamma && mode_b.gamma == mode_b_.gamma;
}

}  // namespace swapsim::modes
