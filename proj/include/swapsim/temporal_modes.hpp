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

#include <complex>
#include <vector>

#include "swapsim/polarization.hpp"

namespace swapsim::modes {

/// Single-photon wavepacket of one source. All times in seconds, rates in
/// rad/s.
struct ModeParams {
    double gamma = 0.0;         ///< intensity decay rate of the cavity output
    double omega_offset = 0.0;  ///< center angular frequency relative to a common reference

    void validate() const;
    bool operator==(const ModeParams &) const = default;
};

/// Rectangular pump pulse; pairs are emitted uniformly inside it.
struct PumpParams {
    double pulse_width = 0.0;

    void validate() const;
    bool operator==(const PumpParams &) const = default;
};

/// Outcome of the Bell-state measurement on photons a and b. PhiPlus is
/// heralded by ++ or -- behind the two diagonal polarizers and leaves A,B in
/// |HH> - e^{i dw dt}|VV>; PhiMinus leaves |HH> + e^{i dw dt}|VV>.
enum class BsmBranch { PhiPlus, PhiMinus };

/// Sign of the |VV> amplitude carried by the A,B state for a branch.
int branch_sign(BsmBranch branch);

/// sqrt(gamma) * exp(-gamma t / 2) for t >= 0, zero before emission.
std::complex<double> mode_amplitude(const ModeParams &mode, double t);

/// A,B polarization state heralded by a BSM with detection times t1 (port 1)
/// and t2 (port 2), both measured from the common emission reference.
/// Photon `a` has mode_a (f), photon `b` has mode_b (g); the HH branch has b at
/// D1 and a at D2. Throws if neither branch amplitude is supported.
polarization::TwoQubitDensity conditional_swap_state(double t1, double t2, const ModeParams &mode_a,
                                                     const ModeParams &mode_b, BsmBranch branch);

/// Amplitude ratio |c_VV / c_HH| = exp(-(gamma_a - gamma_b)(t1 - t2) / 2).
double swap_amplitude_ratio(double t1, double t2, const ModeParams &mode_a, const ModeParams &mode_b);

/// Unnormalized density of accepted BSM coincidences at (t1, t2) for pairs
/// emitted at the given times: (|g(t1-tb) f(t2-ta)|^2 + |f(t1-ta) g(t2-tb)|^2) / 2.
double joint_detection_density(double t1, double t2, const ModeParams &mode_a, const ModeParams &mode_b,
                               double emission_time_a, double emission_time_b);

/// |mode_amplitude|^2 averaged over an emission time uniform in the pump pulse.
double pulse_averaged_intensity(const ModeParams &mode, const PumpParams &pump, double t);

/// Two-photon time amplitude of one source up to normalization,
/// (1/T) * integral over the pulse of h(t_idler - tau) h(t_signal - tau), in
/// closed form for a rectangular pump.
double pair_amplitude(const ModeParams &mode, const PumpParams &pump, double t_idler, double t_signal);

struct QuadratureOptions {
    int nodes = 4096;        ///< minimum trapezoid nodes over the outer integral
    double rel_tol = 1e-4;   ///< stop refining once successive estimates agree
};

/// Smallest node count accepted for these scales: 512 per decade separating
/// 1/gamma from the pulse width.
int required_quadrature_nodes(const PumpParams &pump, const ModeParams &mode_a, const ModeParams &mode_b);

/// Magnitude of the |HH><VV| coherence that survives tracing out the
/// undetected partners of a frequency-correlated pair, for a BSM detection at
/// (t1, t2). Evaluated by nested numerical quadrature of the pump-averaged pair
/// amplitude. 1 at t1 == t2.
double coherence_factor(double t1, double t2, const PumpParams &pump, const ModeParams &mode_a,
                        const ModeParams &mode_b, const QuadratureOptions &opts = {});

/// Tabulated coherence_factor on a uniform (t1, t2) grid built from the
/// closed-form pair amplitude; used on the hot path of the event engine and
/// by the window-averaged oracle.
class CoherenceTable {
   public:
    CoherenceTable(const PumpParams &pump, const ModeParams &mode_a, const ModeParams &mode_b, int nodes = 1024);

    /// Bilinear interpolation; times outside the grid are clamped.
    double operator()(double t1, double t2) const;

    double span() const {
        return span_;
    }
    bool trivial() const {
        return trivial_;
    }
    bool matches(const PumpParams &pump, const ModeParams &mode_a, const ModeParams &mode_b) const;

   private:
    PumpParams pump_;
    ModeParams mode_a_;
    ModeParams mode_b_;
    bool trivial_ = false;
    int n_ = 0;
    double span_ = 0.0;
    double step_ = 0.0;
    std::vector<double> values_;
};

}  // namespace swapsim::modes
