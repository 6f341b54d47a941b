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

#include <array>
#include <complex>

#include <Eigen/Core>

namespace swapsim::polarization {

using Complex = std::complex<double>;
using Matrix4 = Eigen::Matrix4cd;
using Matrix2 = Eigen::Matrix2cd;

// Basis order for every 4x4 matrix in this library: |HH>, |HV>, |VH>, |VV>,
// first letter is photon A. H is qubit state 0, V is qubit state 1.
inline constexpr int kHH = 0;
inline constexpr int kHV = 1;
inline constexpr int kVH = 2;
inline constexpr int kVV = 3;

enum class Axis { X, Y, Z };

char axis_name(Axis axis);

/// Two-photon polarization state. Always Hermitian, unit trace and positive
/// semidefinite; `from_matrix` enforces this, and every operation in this
/// header preserves it.
class TwoQubitDensity {
   public:
    static constexpr double kHermitianTol = 1e-12;
    static constexpr double kTraceTol = 1e-12;
    static constexpr double kPsdTol = -1e-9;

    /// Validates and wraps `m`. Throws Error(InvalidArgument) on violation.
    static TwoQubitDensity from_matrix(const Matrix4 &m);
    static TwoQubitDensity maximally_mixed();
    static TwoQubitDensity pure(const Eigen::Vector4cd &amplitudes);

    const Matrix4 &matrix() const {
        return m_;
    }
    Complex operator()(int row, int col) const {
        return m_(row, col);
    }

    /// Re-checks all three invariants; throws on failure.
    void validate() const;

   private:
    explicit TwoQubitDensity(const Matrix4 &m) : m_(m) {
    }
    Matrix4 m_;

    friend TwoQubitDensity phase_bell_state(double, double, int);
    friend TwoQubitDensity apply_phase_on_A(const TwoQubitDensity &, double);
    friend TwoQubitDensity dephase_vv_hh(const TwoQubitDensity &, double);
    friend TwoQubitDensity mix(const TwoQubitDensity &, const TwoQubitDensity &, double);
};

/// Polarizer pair in front of the A and B detectors. A linear analyzer passes
/// cos(angle)|H> + sin(angle)|V> as its "+" outcome; a circular analyzer
/// passes (|H> + i|V>)/sqrt(2), the +1 eigenstate of sigma_y, and ignores the
/// angles.
struct AnalyzerSetting {
    double angle_a = 0.0;
    double angle_b = 0.0;
    bool circular = false;

    void validate() const;
    bool operator==(const AnalyzerSetting &) const = default;

    static AnalyzerSetting for_axis(Axis axis);
};

/// Probabilities of (++, +-, -+, --) outcomes.
using OutcomeProbabilities = std::array<double, 4>;

/// (|HH> + sign * r * e^{i phi} |VV>) / sqrt(1 + r^2).
TwoQubitDensity phase_bell_state(double phi, double r, int sign);

/// Tr(rho sigma_i (x) sigma_i).
double correlator(const TwoQubitDensity &rho, Axis axis);

/// W = (1 - <xx> + <yy> - <zz>) / 4. Negative values certify entanglement.
double witness(const TwoQubitDensity &rho);

OutcomeProbabilities outcome_probabilities(const TwoQubitDensity &rho, const AnalyzerSetting &setting);

/// |V>_A -> e^{i phi} |V>_A.
TwoQubitDensity apply_phase_on_A(const TwoQubitDensity &rho, double phi);

/// Scales the |HH><VV| and |VV><HH| coherences by `factor` in [0, 1].
TwoQubitDensity dephase_vv_hh(const TwoQubitDensity &rho, double factor);

/// weight * a + (1 - weight) * b, weight in [0, 1].
TwoQubitDensity mix(const TwoQubitDensity &a, const TwoQubitDensity &b, double weight);

Matrix2 reduced_a(const TwoQubitDensity &rho);
Matrix2 reduced_b(const TwoQubitDensity &rho);

double trace_distance(const TwoQubitDensity &a, const TwoQubitDensity &b);

/// <psi| rho |psi> for a normalized pure target.
double fidelity(const TwoQubitDensity &rho, const Eigen::Vector4cd &target);

}  // namespace swapsim::polarization
