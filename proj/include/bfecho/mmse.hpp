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

#ifndef BFECHO_MMSE_HPP
#define BFECHO_MMSE_HPP

#include "bfecho/spin.hpp"

#include <string>
#include <vector>

namespace bfecho {

struct GaussLegendre {
    RealVector nodes;
    RealVector weights;
};

/// n-point Gauss-Legendre rule on [a, b] (Golub-Welsch).
GaussLegendre gauss_legendre(int n, double a, double b);

/// small_theta: M_theta is the depolarizing step (pure probes only).
/// exact: M_theta is the 26-point axis-averaged rotation channel.
enum class MmseMode { small_theta, exact };

MmseMode parse_mmse_mode(const std::string& name);
std::string to_string(MmseMode mode);

/// Prior-averaged state Gamma and first-moment state eta for a uniform
/// prior on [0, theta_max].
struct MmsePair {
    Matrix gamma;
    Matrix eta;
    double theta_max = 0.0;
    int n_quad = 0;
    MmseMode mode = MmseMode::small_theta;
};

MmsePair build_gamma_eta(const SpinSystem& sys, const DensityOp& rho, double theta_max, int n_quad = 32,
                         MmseMode mode = MmseMode::small_theta);

/// Solves Gamma A + A Gamma = 2 eta in the eigenbasis of Gamma. Throws
/// NumericalGuardError, quoting the minimum eigenvalue, unless Gamma is
/// positive definite beyond 1e-12.
Matrix solve_mmse_observable(const Matrix& gamma, const Matrix& eta);
Matrix solve_mmse_observable(const MmsePair& pair);

/// max |Gamma A + A Gamma - 2 eta|.
double anticommutator_residual(const Matrix& gamma, const Matrix& eta, const Matrix& a);

/// Tr(A rho_encoded).
double mmse_estimate(const Matrix& a, const DensityOp& rho_encoded);

struct MmseReport {
    double theta_max = 0.0;
    double bias_at_zero = 0.0;          // estimate when the true angle is 0
    double residual = 0.0;              // anticommutator residual
    double overlap_correlation = 0.0;   // estimate vs Tr(rho M_theta[rho]) over a theta grid
    double deviation = 0.0;             // max |A - theta_max rho / 2|
    double probe_deviation = 0.0;       // <psi|A|psi> - theta_max / 2
    double min_gamma_eigenvalue = 0.0;
    std::vector<double> theta_grid;
    std::vector<double> estimates;
    std::vector<double> overlaps;
};

/// Builds Gamma and eta for the probe, solves for A, and evaluates the
/// estimator on n_grid evenly spaced true angles in [0, theta_max].
MmseReport mmse_report(const SpinSystem& sys, const Ket& probe, double theta_max, int n_quad = 32,
                       MmseMode mode = MmseMode::exact, int n_grid = 17);

} // namespace bfecho

#endif
