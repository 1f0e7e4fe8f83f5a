// Copyright 2026 The bfecho Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "bfecho/spin.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace bfecho {

SpinSystem::SpinSystem(int n_particles) : n_(n_particles) {
    if (n_particles < 1) {
        throw std::invalid_argument("SpinSystem: particle number must be >= 1, got " +
                                    std::to_string(n_particles));
    }
}

SpinSystem make_spin_system(int n_particles) { return SpinSystem(n_particles); }

UnitAxis::UnitAxis(double x, double y, double z) : v_{x, y, z} {
    const double norm2 = x * x + y * y + z * z;
    if (!std::isfinite(norm2) || std::abs(norm2 - 1.0) > 1e-12) {
        throw std::invalid_argument("UnitAxis: squared norm " + std::to_string(norm2) +
                                    " is not 1");
    }
}

UnitAxis UnitAxis::normalized(double x, double y, double z) {
    const double norm = std::sqrt(x * x + y * y + z * z);
    if (!(norm > 0.0) || !std::isfinite(norm)) {
        throw std::invalid_argument("UnitAxis::normalized: zero or non-finite vector");
    }
    return UnitAxis(Trusted{}, x / norm, y / norm, z / norm);
}

SpinOperators spin_operators(const SpinSystem& sys) {
    const int d = sys.dim();
    const double s = sys.spin();
    SpinOperators ops;
    ops.sz = Matrix::Zero(d, d);
    ops.sp = Matrix::Zero(d, d);
    for (int i = 0; i < d; ++i) {
        ops.sz(i, i) = sys.m_of(i);
    }
    // S+ |m> = sqrt(S(S+1) - m(m+1)) |m+1>; m+1 sits at index i-1.
    for (int i = 1; i < d; ++i) {
        const double m = sys.m_of(i);
        ops.sp(i - 1, i) = std::sqrt(s * (s + 1.0) - m * (m + 1.0));
    }
    ops.sm = ops.sp.adjoint();
    ops.sx = 0.5 * (ops.sp + ops.sm);
    ops.sy = (ops.sp - ops.sm) / Complex(0.0, 2.0);
    return ops;
}

Matrix axis_operator(const SpinOperators& ops, const UnitAxis& n) {
    return n.x() * ops.sx + n.y() * ops.sy + n.z() * ops.sz;
}

Matrix axis_operator(const SpinSystem& sys, const UnitAxis& n) {
    return axis_operator(spin_operators(sys), n);
}

SpectralPropagator::SpectralPropagator(const Matrix& hermitian) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(hermitian));
    if (es.info() != Eigen::Success) {
        throw NumericalGuardError("SpectralPropagator: eigendecomposition failed");
    }
    evals_ = es.eigenvalues();
    evecs_ = es.eigenvectors();
}

Matrix SpectralPropagator::unitary(double t) const {
    Eigen::VectorXcd phases(evals_.size());
    for (Eigen::Index i = 0; i < evals_.size(); ++i) {
        phases(i) = std::polar(1.0, -evals_(i) * t);
    }
    return evecs_ * phases.asDiagonal() * evecs_.adjoint();
}

Ket SpectralPropagator::apply(double t, const Ket& psi) const {
    Ket c = evecs_.adjoint() * psi;
    for (Eigen::Index i = 0; i < c.size(); ++i) {
        c(i) *= std::polar(1.0, -evals_(i) * t);
    }
    return evecs_ * c;
}

Matrix rotation(const SpinSystem& sys, const UnitAxis& n, double theta) {
    if (n == UnitAxis::z_axis()) {
        Matrix r = Matrix::Zero(sys.dim(), sys.dim());
        for (int i = 0; i < sys.dim(); ++i) {
            r(i, i) = std::polar(1.0, -sys.m_of(i) * theta);
        }
        return r;
    }
    return SpectralPropagator(axis_operator(sys, n)).unitary(theta);
}

Complex trace_rotation_pair(const SpinSystem& sys, const UnitAxis& n, const UnitAxis& m,
                            double theta, RelativeSign sign) {
    const double second = sign == RelativeSign::plus ? -theta : theta;
    return (rotation(sys, n, theta) * rotation(sys, m, second)).trace();
}

Ket dicke_state(const SpinSystem& sys, double m) {
    const double index = sys.spin() - m;
    const double rounded = std::round(index);
    if (std::abs(index - rounded) > 1e-9 || rounded < 0 || rounded > sys.n_particles()) {
        throw std::invalid_argument("dicke_state: m = " + std::to_string(m) +
                                    " is not in {-S, ..., S}");
    }
    Ket psi = Ket::Zero(sys.dim());
    psi(static_cast<Eigen::Index>(rounded)) = 1.0;
    return psi;
}

Ket coherent_state(const SpinSystem& sys, const UnitAxis& n) {
    const Ket top = dicke_state(sys, sys.spin());
    const double cross = std::hypot(n.x(), n.y());
    if (cross < 1e-15) {
        if (n.z() > 0) {
            return top;
        }
        return rotation(sys, UnitAxis::x_axis(), std::numbers::pi) * top;
    }
    // z x n = (-n_y, n_x, 0)
    const UnitAxis axis = UnitAxis::normalized(-n.y(), n.x(), 0.0);
    const double angle = std::acos(std::clamp(n.z(), -1.0, 1.0));
    return rotation(sys, axis, angle) * top;
}

Ket coherent_amplitudes(const SpinSystem& sys, double polar, double azimuth) {
    const int n = sys.n_particles();
    const double c = std::cos(0.5 * polar);
    const double s = std::sin(0.5 * polar);
    Ket psi(sys.dim());
    for (int k = 0; k < sys.dim(); ++k) {
        // k = S - m spin flips: sqrt(C(N,k)) c^(N-k) s^k e^{i k phi}
        const double log_binom =
            std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
        const double mag = std::exp(0.5 * log_binom) * std::pow(c, n - k) * std::pow(s, k);
        psi(k) = std::polar(mag, k * azimuth);
    }
    return psi;
}

HusimiField husimi_q(const SpinSystem& sys, const DensityOp& rho, int n_polar, int n_azimuth) {
    if (n_polar < 2 || n_azimuth < 2) {
        throw std::invalid_argument("husimi_q: grid dimensions must be >= 2");
    }
    if (rho.rows() != sys.dim() || rho.cols() != sys.dim()) {
        throw std::invalid_argument("husimi_q: density matrix dimension mismatch");
    }
    HusimiField field;
    field.n_polar = n_polar;
    field.n_azimuth = n_azimuth;
    for (int i = 0; i < n_polar; ++i) {
        field.polar.push_back(std::numbers::pi * i / (n_polar - 1));
    }
    for (int j = 0; j < n_azimuth; ++j) {
        field.azimuth.push_back(2.0 * std::numbers::pi * j / n_azimuth);
    }
    field.q.reserve(static_cast<std::size_t>(n_polar) * n_azimuth);
    for (double th : field.polar) {
        for (double ph : field.azimuth) {
            const Ket v = coherent_amplitudes(sys, th, ph);
            field.q.push_back(std::clamp(v.dot(rho * v).real(), 0.0, 1.0));
        }
    }
    return field;
}

double husimi_normalization(const HusimiField& field, int dim) {
    // Polar weights integrate sin(polar) exactly against the piecewise-linear
    // interpolant of Q; the azimuthal sum is the periodic trapezoid rule.
    const double h = std::numbers::pi / (field.n_polar - 1);
    const double dph = 2.0 * std::numbers::pi / field.n_azimuth;
    std::vector<double> w(field.n_polar, 0.0);
    for (int i = 0; i + 1 < field.n_polar; ++i) {
        const double a = field.polar[i];
        const double b = field.polar[i + 1];
        w[i] += (h * std::cos(a) - std::sin(b) + std::sin(a)) / h;
        w[i + 1] += (-h * std::cos(b) + std::sin(b) - std::sin(a)) / h;
    }
    double total = 0.0;
    for (int i = 0; i < field.n_polar; ++i) {
        double row = 0.0;
        for (int j = 0; j < field.n_azimuth; ++j) {
            row += field.at(i, j);
        }
        total += w[i] * row;
    }
    return dim / (4.0 * std::numbers::pi) * total * dph;
}

void validate_density(const DensityOp& rho, double tol) {
    if (rho.rows() != rho.cols()) {
        throw std::invalid_argument("density matrix must be square");
    }
    if (hermiticity_residual(rho) > tol) {
        throw std::invalid_argument("density matrix is not Hermitian");
    }
    if (std::abs(rho.trace() - Complex(1.0)) > tol) {
        throw std::invalid_argument("density matrix trace is not 1");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(rho), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol) {
        throw std::invalid_argument("density matrix has a negative eigenvalue " +
                                    std::to_string(es.eigenvalues().minCoeff()));
    }
}

DensityOp pure_density(const Ket& psi) { return psi * psi.adjoint(); }

} // namespace bfecho
