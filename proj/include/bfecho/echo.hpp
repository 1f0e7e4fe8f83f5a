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

#ifndef BFECHO_ECHO_HPP
#define BFECHO_ECHO_HPP

#include "bfecho/ensembles.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace bfecho {

struct EchoMoments {
    double mean_sz = 0.0;
    double mean_sz2 = 0.0;
};

/// <chi|S_z|chi> and <chi|S_z^2|chi> for |chi> = U^dagger R_n(theta) U |S,S>.
EchoMoments run_echo(const SpinSystem& sys, const Matrix& scrambler, const UnitAxis& n, double theta);
EchoMoments run_echo(const SpinSystem& sys, const OatCircuit& circuit, const UnitAxis& n, double theta);

/// Precomputes everything that does not depend on theta, so evaluating a
/// whole grid costs O(D^2) per point.
class EchoEvaluator {
public:
    EchoEvaluator(const SpinOperators& ops, const Matrix& scrambler, const UnitAxis& n);
    EchoMoments operator()(double theta) const;

private:
    RealVector evals_;
    Ket probe_;     // U|S,S> in the S_n eigenbasis
    Matrix sz_;     // U S_z U^dagger in the S_n eigenbasis
    Matrix sz2_;
};

/// F_n = 4 Var(S_n) for a pure probe.
double probe_qfi(const SpinOperators& ops, const Ket& psi, const UnitAxis& n);
double probe_qfi(const SpinSystem& sys, const Ket& psi, const UnitAxis& n);

/// First and symmetrized second spin moments of a pure state; enough to
/// evaluate <S_n> and <S_n^2> for any axis in O(1).
struct SpinMoments {
    Eigen::Vector3d first;
    Eigen::Matrix3d second;

    double mean(const UnitAxis& n) const;
    double mean_square(const UnitAxis& n) const;
    double qfi(const UnitAxis& n) const { return 4.0 * (mean_square(n) - mean(n) * mean(n)); }
};

SpinMoments spin_moments(const SpinOperators& ops, const Ket& psi);

struct QfiStats {
    int step = 0;
    double mean_qfi = 0.0;
    /// sqrt of the axis-averaged across-circuit variance of F_n (fixed axis).
    double std_qfi = 0.0;
    int n_circuits = 0;
    int n_axes = 0;
};

/// QFI statistics of OAT-prepared probes after 0..n_steps_max twists. Every
/// circuit at a given step is evaluated on the same random axis set.
std::vector<QfiStats> qfi_convergence(const SpinSystem& sys, int n_steps_max, int n_circuits,
                                      int n_axes, double strength, std::uint64_t seed,
                                      int workers = 1);

struct EchoPointStats {
    double theta = 0.0;
    double x = 0.0; // S * theta
    double mean_sz = 0.0;
    double mean_sz2 = 0.0;
    double var_circuits_sz = 0.0;  // unbiased, across circuits
    double var_circuits_sz2 = 0.0; // unbiased, across circuits
    int n_samples = 0;

    double sem_sz() const;
    double sem_sz2() const;
};

struct SensitivityResult {
    std::vector<double> values;
    /// True where dS_z vanished and the value was taken from the nearest
    /// point with finite quantum noise (the theta -> 0 limit).
    std::vector<bool> limit_flag;
};

struct EchoSweepResult {
    SpinSystem sys{1};
    std::vector<EchoPointStats> points;
    std::vector<double> sensitivity;
    std::vector<bool> sensitivity_limit_flag;
    std::vector<double> gain_db;
    std::uint64_t seed = 0;
    EnsembleKind ensemble = EnsembleKind::haar;
};

/// Monte Carlo sweep over theta. Circuit c uses RngStream(seed, c); with no
/// fixed axis each circuit also draws its own rotation axis.
EchoSweepResult echo_sweep(const SpinSystem& sys, const EnsembleConfig& ensemble,
                           const std::vector<double>& theta_grid, int n_circuits, std::uint64_t seed,
                           std::optional<UnitAxis> fixed_axis = std::nullopt, int workers = 1);

/// 1/dtheta = |d(S - <S_z>)/dtheta| / dS_z with dS_z = sqrt(<S_z^2> - <S_z>^2).
/// Three-point differences (one-sided at the ends). Needs >= 3 points.
SensitivityResult sensitivity_from_sweep(const std::vector<EchoPointStats>& points, double spin);

/// G = 10 log10((1/dtheta)^2 / N) in dB.
double metrological_gain(double inv_delta_theta, int n_particles);

struct IsotropyOrder {
    int order = 0;
    std::vector<double> axis_means;
    std::vector<double> axis_sems;
    double common_mean = 0.0;
    double max_spread_z = 0.0; // max_a |mean_a - common| / sem_a
    double max_zero_z = 0.0;   // max_a |mean_a| / sem_a
};

struct IsotropyReport {
    std::vector<UnitAxis> axes;
    std::vector<IsotropyOrder> orders; // t = 1 .. 2k
    double max_anisotropy = 0.0;       // max spread z over all orders
};

/// Estimates E_U[<S_n^t>] for t <= 2k on the given axes and reports the
/// axis-to-axis spread in units of the standard error.
IsotropyReport moment_isotropy_check(const SpinSystem& sys, const EnsembleConfig& ensemble, int k,
                                     int n_circuits, const std::vector<UnitAxis>& axes,
                                     std::uint64_t seed, int workers = 1);

std::vector<UnitAxis> default_isotropy_axes();

} // namespace bfecho

#endif
