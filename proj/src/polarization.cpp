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

#include "swapsim/polarization.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "swapsim/error.hpp"

namespace swapsim::polarization {

namespace {

constexpr Complex kI{0.0, 1.0};

Matrix2 pauli(Axis axis) {
    Matrix2 s;
    switch (axis) {
        case Axis::X:
            s << 0.0, 1.0, 1.0, 0.0;
            break;
        case Axis::Y:
            s << 0.0, -kI, kI, 0.0;
            break;
        case Axis::Z:
            s << 1.0, 0.0, 0.0, -1.0;
            break;
    }
    return s;
}

Matrix4 kron(const Matrix2 &a, const Matrix2 &b) {
    Matrix4 out;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
        }
    }
    return out;
}

// "+" and "-" analyzer eigenvectors for one photon.
std::array<Eigen::Vector2cd, 2> analyzer_states(double angle, bool circular) {
    Eigen::Vector2cd plus, minus;
    if (circular) {
        const double s = std::numbers::sqrt2 / 2.0;
        plus << s, s * kI;
        minus << s, -s * kI;
    } else {
        plus << std::cos(angle), std::sin(angle);
        minus << -std::sin(angle), std::cos(angle);
    }
    return {plus, minus};
}

Eigen::Vector4d hermitian_eigenvalues(const Matrix4 &m) {
    Eigen::SelfAdjointEigenSolver<Matrix4> solver(Matrix4(0.5 * (m + m.adjoint())), Eigen::EigenvaluesOnly);
    return solver.eigenvalues();
}

}  // namespace

char axis_name(Axis axis) {
    switch (axis) {
        case Axis::X:
            return 'x';
        case Axis::Y:
            return 'y';
        case Axis::Z:
            return 'z';
    }
    return '?';
}

TwoQubitDensity TwoQubitDensity::from_matrix(const Matrix4 &m) {
    TwoQubitDensity rho(m);
    rho.validate();
    return rho;
}

TwoQubitDensity TwoQubitDensity::maximally_mixed() {
    return TwoQubitDensity(Matrix4::Identity() * 0.25);
}

TwoQubitDensity TwoQubitDensity::pure(const Eigen::Vector4cd &amplitudes) {
    const double norm = amplitudes.norm();
    require(norm > 0.0 && std::isfinite(norm), "pure state needs a finite nonzero amplitude vector");
    const Eigen::Vector4cd psi = amplitudes / norm;
    return TwoQubitDensity(psi * psi.adjoint());
}

void TwoQubitDensity::validate() const {
    if (!m_.allFinite()) {
        fail(ErrorCode::InvalidArgument, "density matrix has non-finite entries");
    }
    const double herm = (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
    if (herm > kHermitianTol) {
        std::ostringstream os;
        os << "density matrix is not Hermitian (max deviation " << herm << ")";
        fail(ErrorCode::InvalidArgument, os.str());
    }
    const double tr = m_.trace().real();
    if (std::abs(tr - 1.0) > kTraceTol) {
        std::ostringstream os;
        os << "density matrix trace is " << tr;
        fail(ErrorCode::InvalidArgument, os.str());
    }
    const double min_eig = hermitian_eigenvalues(m_).minCoeff();
    if (min_eig < kPsdTol) {
        std::ostringstream os;
        os << "density matrix has negative eigenvalue " << min_eig;
        fail(ErrorCode::InvalidArgument, os.str());
    }
}

void AnalyzerSetting::validate() const {
    auto in_range = [](double a) { return std::isfinite(a) && a >= 0.0 && a < std::numbers::pi; };
    require(in_range(angle_a) && in_range(angle_b), "analyzer angles must lie in [0, pi)");
}

AnalyzerSetting AnalyzerSetting::for_axis(Axis axis) {
    switch (axis) {
        case Axis::X:
            return {std::numbers::pi / 4.0, std::numbers::pi / 4.0, false};
        case Axis::Y:
            return {0.0, 0.0, true};
        case Axis::Z:
            return {0.0, 0.0, false};
    }
    return {};
}

TwoQubitDensity phase_bell_state(double phi, double r, int sign) {
    require(std::isfinite(phi) && std::isfinite(r) && r >= 0.0, "phase_bell_state needs finite phi and r >= 0");
    require(sign == 1 || sign == -1, "phase_bell_state sign must be +1 or -1");
    const double norm = 1.0 + r * r;
    const Complex c_vv = static_cast<double>(sign) * r * std::polar(1.0, phi);
    Matrix4 m = Matrix4::Zero();
    m(kHH, kHH) = 1.0 / norm;
    m(kVV, kVV) = r * r / norm;
    m(kVV, kHH) = c_vv / norm;
    m(kHH, kVV) = std::conj(c_vv) / norm;
    return TwoQubitDensity(m);
}

double correlator(const TwoQubitDensity &rho, Axis axis) {
    const Matrix2 s = pauli(axis);
    const Complex value = (rho.matrix() * kron(s, s)).trace();
    return value.real();
}

double witness(const TwoQubitDensity &rho) {
    return 0.25 * (1.0 - correlator(rho, Axis::X) + correlator(rho, Axis::Y) - correlator(rho, Axis::Z));
}

OutcomeProbabilities outcome_probabilities(const TwoQubitDensity &rho, const AnalyzerSetting &setting) {
    setting.validate();
    const auto a = analyzer_states(setting.angle_a, setting.circular);
    const auto b = analyzer_states(setting.angle_b, setting.circular);
    OutcomeProbabilities p{};
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            Eigen::Vector4cd v;
            v << a[i](0) * b[j](0), a[i](0) * b[j](1), a[i](1) * b[j](0), a[i](1) * b[j](1);
            const double prob = (v.adjoint() * rho.matrix() * v)(0, 0).real();
            p[2 * i + j] = std::max(prob, 0.0);
        }
    }
    const double total = p[0] + p[1] + p[2] + p[3];
    for (double &x : p) {
        x /= total;
    }
    return p;
}

TwoQubitDensity apply_phase_on_A(const TwoQubitDensity &rho, double phi) {
    const Complex u = std::polar(1.0, phi);
    Matrix4 m = rho.matrix();
    // Rows/cols 2 and 3 carry A = V.
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            const bool row_v = i >= 2;
            const bool col_v = j >= 2;
            if (row_v && !col_v) {
                m(i, j) *= u;
            } else if (!row_v && col_v) {
                m(i, j) *= std::conj(u);
            }
        }
    }
    return TwoQubitDensity(m);
}

TwoQubitDensity dephase_vv_hh(const TwoQubitDensity &rho, double factor) {
    require(std::isfinite(factor) && factor >= 0.0 && factor <= 1.0, "dephasing factor must lie in [0, 1]");
    // Phase-flip channel on photon A: every A=H / A=V coherence, including
    // |HH><VV|, is scaled by `factor`. Completely positive for any input.
    Matrix4 m = rho.matrix();
    for (int i = 0; i < 2; ++i) {
        for (int j = 2; j < 4; ++j) {
            m(i, j) *= factor;
            m(j, i) *= factor;
        }
    }
    return TwoQubitDensity(m);
}

TwoQubitDensity mix(const TwoQubitDensity &a, const TwoQubitDensity &b, double weight) {
    require(weight >= 0.0 && weight <= 1.0, "mixing weight must lie in [0, 1]");
    return TwoQubitDensity(weight * a.matrix() + (1.0 - weight) * b.matrix());
}

Matrix2 reduced_a(const TwoQubitDensity &rho) {
    const Matrix4 &m = rho.matrix();
    Matrix2 out;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            out(i, j) = m(2 * i, 2 * j) + m(2 * i + 1, 2 * j + 1);
        }
    }
    return out;
}

Matrix2 reduced_b(const TwoQubitDensity &rho) {
    const Matrix4 &m = rho.matrix();
    Matrix2 out;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            out(i, j) = m(i, j) + m(2 + i, 2 + j);
        }
    }
    return out;
}

double trace_distance(const TwoQubitDensity &a, const TwoQubitDensity &b) {
    return 0.5 * hermitian_eigenvalues(a.matrix() - b.matrix()).cwiseAbs().sum();
}

double fidelity(const TwoQubitDensity &rho, const Eigen::Vector4cd &target) {
    return (target.adjoint() * rho.matrix() * target)(0, 0).real();
}

}  // namespace swapsim::polarization
