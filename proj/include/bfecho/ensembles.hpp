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

#ifndef BFECHO_ENSEMBLES_HPP
#define BFECHO_ENSEMBLES_HPP

#include "bfecho/spin.hpp"

#include <json.hpp>

#include <cstdint>
#include <random>
#include <vector>

namespace bfecho {

/// Counter-based random stream: the engine state is a pure function of
/// (master_seed, stream_index), so sample i draws the same numbers no matter
/// which worker runs it.
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_index);

    std::uint64_t master_seed() const { return master_; }
    std::uint64_t stream_index() const { return index_; }

    /// Independent stream keyed by (this stream, sub_index).
    RngStream substream(std::uint64_t sub_index) const;

    double normal() { return normal_(engine_); }
    double uniform() { return uniform_(engine_); }

private:
    std::uint64_t master_;
    std::uint64_t index_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

std::uint64_t splitmix64(std::uint64_t x);

/// Haar-random D x D unitary: Gaussian matrix, QR, column phases fixed by
/// the diagonal of R.
Matrix haar_unitary(int dim, RngStream& rng);

/// Uniform direction on the 2-sphere.
UnitAxis random_axis(RngStream& rng);

/// Twist strength chi*t that wraps a coherent state once around the sphere.
double default_twist_strength(int n_particles);

struct OatCircuit {
    SpinSystem sys;
    double strength = 0.0; // chi * t of every twist
    std::vector<UnitAxis> axes;

    std::size_t size() const { return axes.size(); }
};

OatCircuit sample_oat_circuit(const SpinSystem& sys, int n_steps, double strength, RngStream& rng);

enum class Direction { forward, reverse };

/// Forward applies U = U_k ... U_1 with U_j = exp(-i strength S_{m_j}^2);
/// reverse applies U^dagger.
Ket apply_oat(const OatCircuit& circuit, const Ket& psi, Direction direction);

/// exp(-i strength S_m^2).
Matrix twist_unitary(const SpinSystem& sys, const UnitAxis& axis, double strength);

/// Dense matrix of the full forward circuit.
Matrix oat_unitary(const OatCircuit& circuit);

nlohmann::json circuit_to_json(const OatCircuit& circuit);
OatCircuit circuit_from_json(const nlohmann::json& j);

/// One Brownian timestep worth of couplings. Symmetric Gaussian with
/// Var(J^aa) = 2J/(S^2 dt), Var(J^ab) = J/(S^2 dt) for a != b.
struct BrownianCouplings {
    Eigen::Matrix3d j_matrix;
    double dt = 0.0;
    double rate = 0.0;
};

BrownianCouplings sample_brownian_couplings(const SpinSystem& sys, double rate, double dt,
                                            RngStream& rng);

/// H_B = sum_ab J^ab S^a S^b.
Matrix brownian_hamiltonian(const SpinOperators& ops, const BrownianCouplings& couplings);

/// exp(-i H_B dt) for a fresh draw of couplings.
Matrix sample_brownian_step(const SpinSystem& sys, double rate, double dt, RngStream& rng);

enum class EnsembleKind { haar, oat, brownian, identity };

EnsembleKind parse_ensemble(const std::string& name);
std::string to_string(EnsembleKind kind);

/// Which scrambler to draw and its parameters.
struct EnsembleConfig {
    EnsembleKind kind = EnsembleKind::haar;
    int oat_steps = 8;
    double twist_scale = 1.0; // multiplier on the default twist strength
    double brownian_rate = 1.0;
    double brownian_dt = 0.02;
    double brownian_time = 5.0;
};

/// Draws one scrambler from the configured ensemble as a dense unitary.
Matrix sample_scrambler(const SpinSystem& sys, const EnsembleConfig& config, RngStream& rng);

} // namespace bfecho

#endif
