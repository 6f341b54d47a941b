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

#include "swapsim/window_average.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "swapsim/error.hpp"
#include "swapsim/feedforward.hpp"

namespace swapsim::modes {

namespace {

using polarization::Complex;

double gaussian_sigma(double fwhm) {
    return fwhm / (2.0 * std::sqrt(2.0 * std::numbers::ln2));
}

// Averages over the measured-minus-true difference of the two BSM detectors.
class NoiseAverage {
   public:
    NoiseAverage(double sigma, int nodes) {
        if (sigma <= 0.0) {
            offsets_ = {0.0};
            weights_ = {1.0};
            return;
        }
        nodes = std::max(nodes, 3) | 1;
        double total = 0.0;
        for (int k = 0; k < nodes; ++k) {
            const double z = -6.0 + 12.0 * k / (nodes - 1);
            offsets_.push_back(sigma * z);
            weights_.push_back(std::exp(-0.5 * z * z));
            total += weights_.back();
        }
        for (double &w : weights_) {
            w /= total;
        }
    }

    const std::vector<double> &offsets() const {
        return offsets_;
    }
    const std::vector<double> &weights() const {
        return weights_;
    }

   private:
    std::vector<double> offsets_;
    std::vector<double> weights_;
};

// Sum over accepted branches of sign * frame phase, divided by their number.
Complex branch_factor(const ExperimentConfig &cfg) {
    Complex sum = 0.0;
    int n = 0;
    for (BsmBranch b : {BsmBranch::PhiPlus, BsmBranch::PhiMinus}) {
        if (!cfg.accepted_branches.contains(b)) {
            continue;
        }
        const bool flip = cfg.frame_correction && b == BsmBranch::PhiPlus;
        sum += static_cast<double>(branch_sign(b)) * (flip ? -1.0 : 1.0);
        ++n;
    }
    require(n > 0, "no BSM branch accepted");
    return sum / static_cast<double>(n);
}

}  // namespace

OracleResult window_average(const ExperimentConfig &cfg, const CoherenceTable *table, const OracleOptions &opts) {
    cfg.validate();
    require(opts.max_step > 0.0, "oracle step must be positive");

    std::optional<CoherenceTable> own;
    if (table == nullptr || !table->matches(cfg.pump, cfg.source_a.mode, cfg.source_b.mode)) {
        own.emplace(cfg.pump, cfg.source_a.mode, cfg.source_b.mode);
        table = &*own;
    }

    const ModeParams &fa = cfg.source_a.mode;
    const ModeParams &fb = cfg.source_b.mode;
    const double gamma_min = std::min(fa.gamma, fb.gamma);
    const double gamma_max = std::max(fa.gamma, fb.gamma);
    const double span = cfg.pump.pulse_width + 14.0 / gamma_min;
    const double dw = cfg.delta_omega();
    const double sigma_c = std::sqrt(2.0) * gaussian_sigma(cfg.detectors.bsm_jitter_fwhm);
    const double window = cfg.coincidence_window;
    const auto &ff = cfg.feedforward;

    // The t2 integrand only carries the envelopes; dt also carries the fringe.
    const double t_step = std::min(opts.max_step, 1.0 / (20.0 * gamma_max));
    double step = t_step;
    if (dw != 0.0) {
        step = std::min(step, 2.0 * std::numbers::pi / std::abs(dw) / 40.0);
    }

    // Cells in dt are aligned with +-window so a sharp window edge falls on a
    // cell boundary.
    const double u_max = std::min(span, window + 6.0 * sigma_c);
    const int n_u = std::max(64, static_cast<int>(std::ceil(2.0 * u_max / step)));
    const double hu = 2.0 * u_max / n_u;
    const int n_t = std::max(64, static_cast<int>(std::ceil(span / t_step)));

    const NoiseAverage noise(sigma_c, opts.noise_nodes);
    const Complex frame = branch_factor(cfg);
    const bool trivial = table->trivial();

    double p_hh = 0.0;
    double p_vv = 0.0;
    Complex coh = 0.0;
    double mass = 0.0;
    double clipped = 0.0;

    for (int i = 0; i < n_u; ++i) {
        const double u = -u_max + (i + 0.5) * hu;

        // Acceptance, feed-forward phase and clipping averaged over the timing noise.
        double accept = 0.0;
        Complex phase = 0.0;
        double clip = 0.0;
        for (std::size_t k = 0; k < noise.offsets().size(); ++k) {
            const double measured = u + noise.offsets()[k];
            if (std::abs(measured) > window) {
                continue;
            }
            const double w = noise.weights()[k];
            accept += w;
            if (ff.enabled) {
                const auto tac = feedforward::tac_convert(measured, ff);
                phase += w * std::polar(1.0, feedforward::pockels_phase(tac.value, ff));
                clip += tac.clipped ? w : 0.0;
            } else {
                phase += w;
            }
        }
        if (accept == 0.0) {
            continue;
        }

        // t1 = t2 + u, both inside (0, span].
        const double lo = std::max(0.0, -u);
        const double hi = span - std::max(0.0, u);
        if (hi <= lo) {
            continue;
        }
        const int m = std::max(8, static_cast<int>(std::ceil((hi - lo) / (span / n_t))));
        const double ht = (hi - lo) / m;
        double density = 0.0;
        double weighted = 0.0;
        for (int j = 0; j < m; ++j) {
            const double t2 = lo + (j + 0.5) * ht;
            const double t1 = t2 + u;
            const double d = 0.5 * (pulse_averaged_intensity(fb, cfg.pump, t1) *
                                        pulse_averaged_intensity(fa, cfg.pump, t2) +
                                    pulse_averaged_intensity(fa, cfg.pump, t1) *
                                        pulse_averaged_intensity(fb, cfg.pump, t2));
            density += d;
            const double c = trivial ? 1.0 : (*table)(t1, t2);
            weighted += d * std::clamp(c * cfg.mode_overlap, 0.0, 1.0);
        }
        density *= ht * hu;
        weighted *= ht * hu;

        const double r = std::exp(-0.5 * (fa.gamma - fb.gamma) * u);
        const double norm = 1.0 + r * r;
        mass += accept * density;
        clipped += clip * density;
        p_hh += accept * density / norm;
        p_vv += accept * density * r * r / norm;
        coh += weighted * (r / norm) * std::polar(1.0, dw * u) * phase;
    }

    if (!(mass > 0.0)) {
        fail(ErrorCode::NoData, "no accepted detection-time pairs inside the window");
    }
    coh *= frame;

    polarization::Matrix4 m = polarization::Matrix4::Zero();
    m(polarization::kHH, polarization::kHH) = p_hh / mass;
    m(polarization::kVV, polarization::kVV) = p_vv / mass;
    m(polarization::kVV, polarization::kHH) = coh / mass;
    m(polarization::kHH, polarization::kVV) = std::conj(coh / mass);

    OracleResult out;
    out.state = polarization::TwoQubitDensity::from_matrix(m);
    out.clipped_fraction = clipped / mass;
    return out;
}

polarization::TwoQubitDensity window_averaged_state(double window, double delta_t_offset, bool feedforward_enabled,
                                                    const ExperimentConfig &cfg) {
    require(window > 0.0, "coincidence window must be positive");
    ExperimentConfig c = cfg;
    c.coincidence_window = window;
    c.feedforward.delta_t = delta_t_offset;
    c.feedforward.enabled = feedforward_enabled;
    return window_average(c).state;
}

}  // namespace swapsim::modes
