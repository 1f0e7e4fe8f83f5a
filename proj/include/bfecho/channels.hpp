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

#ifndef BFECHO_CHANNELS_HPP
#define BFECHO_CHANNELS_HPP

#include "bfecho/echo.hpp"
#include "bfecho/ensembles.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bfecho {

/// Weighted nodes on the unit sphere; weights sum to 1.
struct SphereQuadrature {
    std::vector<UnitAxis> nodes;
    std::vector<double> weights;
};

/// 26-point rule (6 vertices, 12 edge midpoints, 8 corners of the cube),
/// exact for polynomials in n of degree <= 7.
SphereQuadrature octahedral_26();

/// n uniformly random axes with equal weights.
SphereQuadrature monte_carlo_axes(int n_axes, RngStream& rng);

/// E_n[R_n(theta) rho R_n(theta)^dagger] under the given axis rule.
DensityOp axis_averaged_channel(const SpinSystem& sys, const DensityOp& rho, double theta,
                                const SphereQuadrature& rule);
DensityOp axis_averaged_channel(const SpinSystem& sys, const DensityOp& rho, double theta,
                                int n_axes, RngStream& rng);

/// sum_j (S_j rho S_j - {S_j^2, rho}/2) over the jump set.
DensityOp collective_dissipator(const SpinOperators& ops, const DensityOp& rho, bool z_only = false);

/// rho + (theta^2/3) sum_j (S_j rho S_j - {S_j^2, rho}/2).
DensityOp depolarizing_step(const SpinSystem& sys, const DensityOp& rho, double theta);

/// Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2. Throws
/// std::invalid_argument if either input has an eigenvalue below -1e-10.
double fidelity(const DensityOp& rho, const DensityOp& sigma);

/// Axis-averaged QFI of a pure probe, (4/3) sum_j Var(S_j).
double small_theta_qfi(const SpinSystem& sys, const Ket& psi);

/// The same quantity from the fidelity expansion 8 (1 - sqrt f) / theta^2,
/// with f the fidelity between rho and the quadrature-averaged channel output.
double small_theta_qfi_fidelity(const SpinSystem& sys, const Ket& psi, double theta);

enum class NoiseModel { isotropic_collective, z_collective };

NoiseModel parse_noise_model(const std::string& name);
std::string to_string(NoiseModel model);

struct HamiltonianPiece {
    Matrix h;
    double duration = 0.0;
};

struct LindbladSpec {
    NoiseModel model = NoiseModel::isotropic_collective;
    double gamma = 0.0;
    double dt = 1e-3;
    std::vector<HamiltonianPiece> schedule;
};

/// Integrates d rho/dt = -i[H(t), rho] + gamma D[rho] with fixed-step RK4.
/// Each piece is split into ceil(duration/dt) equal steps. Throws
/// NumericalGuardError when ||H|| dt or gamma S^2 dt exceeds 0.1.
DensityOp lindblad_evolve(const SpinSystem& sys, const DensityOp& rho, const LindbladSpec& spec);

/// Exact propagator exp(gamma D t) of the dissipator alone. The
/// superoperator is Hermitian, so it is diagonalized once.
class DissipatorPropagator {
public:
    DissipatorPropagator(const SpinSystem& sys, NoiseModel model, double gamma);

    DensityOp apply(const DensityOp& rho, double t) const;

private:
    int dim_;
    RealVector rates_;
    Matrix modes_;
};

enum class NoisyScrambler { brownian, oat };

struct NoisyEchoConfig {
    NoiseModel model = NoiseModel::isotropic_collective;
    double gamma = 0.0;
    double t_oneway = 5.0;  // duration of each leg
    int n_steps = 250;      // Brownian timesteps or OAT twists per leg
    int substeps = 8;       // unitary/noise splitting per OAT twist
    double theta = 0.0;
    int n_circuits = 16;
    NoisyScrambler scrambler = NoisyScrambler::brownian;
    double brownian_rate = 1.0;
    double twist_strength = 0.0; // 0 selects the default pi/(2 sqrt N)
    std::optional<UnitAxis> axis; // random per circuit when empty
};

/// Echo with dissipation on both legs. Each slice applies the exact unitary
/// and then the exact dissipator propagator for the slice duration.
EchoPointStats noisy_echo_mc(const SpinSystem& sys, const NoisyEchoConfig& config,
                             std::uint64_t seed, int workers = 1);

struct DecayFit {
    double spin = 0.0;
    double c = 0.0;
    double t_oneway = 0.0;
    std::vector<double> gammas;
    std::vector<double> log_signal; // ln(<S_z>/S) at theta = 0
    double kappa = 0.0;             // ln(<S_z>/S) ~ -kappa gamma
    double kappa_over_ct = 0.0;
};

/// Least-squares slope through the origin of ln(<S_z>/S) against gamma,
/// with the same circuits reused for every gamma.
DecayFit fit_decay_rate(const SpinSystem& sys, const NoisyEchoConfig& base,
                        const std::vector<double>& gammas, std::uint64_t seed, int workers = 1);

} // namespace bfecho

#endif
