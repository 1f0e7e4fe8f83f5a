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

#include "bfecho/mmse.hpp"

#include "bfecho/channels.hpp"

#include <cmath>

namespace bfecho {

GaussLegendre gauss_legendre(int n, double a, double b) {
    if (n < 1) {
        throw std::invalid_argument("gauss_legendre: need at least one node");
    }
    RealMatrix jacobi = RealMatrix::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        const double off = k / std::sqrt(4.0 * k * k - 1.0);
        jacobi(k, k - 1) = off;
        jacobi(k - 1, k) = off;
    }
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(jacobi);
    GaussLegendre rule;
    const double half = 0.5 * (b - a);
    rule.nodes = (es.eigenvalues().array() + 1.0) * half + a;
    rule.weights = 2.0 * half * es.eigenvectors().row(0).transpose().array().square();
    return rule;
}

MmseMode parse_mmse_mode(const std::string& name) {
    if (name == "small_theta") {
        return MmseMode::small_theta;
    }
    if (name == "exact") {
        return MmseMode::exact;
    }
    throw std::invalid_argument("unknown MMSE mode '" + name + "'");
}

std::string to_string(MmseMode mode) {
    return mode == MmseMode::exact ? "exact" : "small_theta";
}

MmsePair build_gamma_eta(const SpinSystem& sys, const DensityOp& rho, double theta_max, int n_quad,
                         MmseMode mode) {
    if (!(theta_max > 0.0)) {
        throw std::invalid_argument("build_gamma_eta: theta_max must be > 0");
    }
    if (n_quad < 8) {
        throw std::invalid_argument("build_gamma_eta: n_quad must be >= 8");
    }
    validate_density(rho);
    if (mode == MmseMode::small_theta && std::abs((rho * rho).trace().real() - 1.0) > 1e-10) {
        throw std::invalid_argument("build_gamma_eta: small_theta mode needs a pure state");
    }
    const auto rule = gauss_legendre(n_quad, 0.0, theta_max);
    const auto quad = octahedral_26();
    MmsePair pair;
    pair.theta_max = theta_max;
    pair.n_quad = n_quad;
    pair.mode = mode;
    pair.gamma = Matrix::Zero(rho.rows(), rho.cols());
    pair.eta = Matrix::Zero(rho.rows(), rho.cols());
    for (int i = 0; i < n_quad; ++i) {
        const double th = rule.nodes(i);
        const double w = rule.weights(i) / theta_max;
        const DensityOp out = mode == MmseMode::exact ? axis_averaged_channel(sys, rho, th, quad)
                                                      : depolarizing_step(sys, rho, th);
        pair.gamma += w * out;
        pair.eta += (w * th) * out;
    }
    pair.gamma = symmetrized(pair.gamma);
    pair.eta = symmetrized(pair.eta);
    return pair;
}

Matrix solve_mmse_observable(const Matrix& gamma, const Matrix& eta) {
    if (gamma.rows() != gamma.cols() || eta.rows() != gamma.rows() || eta.cols() != gamma.cols()) {
        throw std::invalid_argument("solve_mmse_observable: shape mismatch");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(gamma));
    if (es.info() != Eigen::Success) {
        throw NumericalGuardError("solve_mmse_observable: eigensolver failed");
    }
    const RealVector& lam = es.eigenvalues();
    if (lam.minCoeff() <= 1e-12) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "%.6g", lam.minCoeff());
        throw NumericalGuardError(std::string("solve_mmse_observable: Gamma is not positive definite "
                                              "(min eigenvalue ") + buf + ")");
    }
    const Matrix& v = es.eigenvectors();
    Matrix a = v.adjoint() * symmetrized(eta) * v;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            a(i, j) *= 2.0 / (lam(i) + lam(j));
        }
    }
    return symmetrized(v * a * v.adjoint());
}

Matrix solve_mmse_observable(const MmsePair& pair) {
    return solve_mmse_observable(pair.gamma, pair.eta);
}

double anticommutator_residual(const Matrix& gamma, const Matrix& eta, const Matrix& a) {
    return max_abs(gamma * a + a * gamma - 2.0 * eta);
}

double mmse_estimate(const Matrix& a, const DensityOp& rho_encoded) {
    if (a.rows() != rho_encoded.rows() || a.cols() != rho_encoded.cols()) {
        throw std::invalid_argument("mmse_estimate: shape mismatch");
    }
    return (a * rho_encoded).trace().real();
}

namespace {

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const auto n = static_cast<double>(x.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return (sxx > 0.0 && syy > 0.0) ? sxy / std::sqrt(sxx * syy) : 0.0;
}

} // namespace

MmseReport mmse_report(const SpinSystem& sys, const Ket& probe, double theta_max, int n_quad,
                       MmseMode mode, int n_grid) {
    if (n_grid < 3) {
        throw std::invalid_argument("mmse_report: n_grid must be >= 3");
    }
    const DensityOp rho = pure_density(probe);
    const MmsePair pair = build_gamma_eta(sys, rho, theta_max, n_quad, mode);
    Eigen::SelfAdjointEigenSolver<Matrix> es(pair.gamma, Eigen::EigenvaluesOnly);
    const Matrix a = solve_mmse_observable(pair);

    MmseReport r;
    r.theta_max = theta_max;
    r.min_gamma_eigenvalue = es.eigenvalues().minCoeff();
    r.residual = anticommutator_residual(pair.gamma, pair.eta, a);
    r.bias_at_zero = mmse_estimate(a, rho);
    r.deviation = max_abs(a - (0.5 * theta_max) * rho);
    r.probe_deviation = expectation(probe, a) - 0.5 * theta_max;
    const auto quad = octahedral_26();
    for (int i = 0; i < n_grid; ++i) {
        const double th = theta_max * i / (n_grid - 1);
        const DensityOp encoded = axis_averaged_channel(sys, rho, th, quad);
        r.theta_grid.push_back(th);
        r.estimates.push_back(mmse_estimate(a, encoded));
        r.overlaps.push_back((rho * encoded).trace().real());
    }
    r.overlap_correlation = pearson(r.estimates, r.overlaps);
    return r;
}

} // namespace bfecho
