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

#ifndef BFECHO_REPLICA_HPP
#define BFECHO_REPLICA_HPP

#include "bfecho/ensembles.hpp"

#include <cstddef>
#include <utility>
#include <vector>

namespace bfecho {

/// 2k copies of the spin, ordered (1L, 1R, 2L, 2R, ...).
struct ReplicaSystem {
    SpinSystem base;
    int k = 1;

    ReplicaSystem(const SpinSystem& base, int k);
    std::size_t dim() const;
};

/// Default cap on D^{2k} for dense construction.
inline constexpr std::size_t kReplicaDimCap = 4096;

/// Disorder-averaged Brownian replica Hamiltonian
///   (J/2S^2) [ sum_r (2 S_r^4 - S_r^2) + sum_{r != s} (-1)^{a_r + a_s} (2 (S_r.S_s)^2 + S_r.S_s) ]
/// as a dense real symmetric matrix (every S_r.S_s is real in the Dicke
/// basis). Throws NumericalGuardError when D^{2k} exceeds max_dim.
RealMatrix build_heff(const SpinSystem& base, int k, double coupling,
                      std::size_t max_dim = kReplicaDimCap);

struct SpectrumLevel {
    double energy = 0.0;
    int degeneracy = 0;
};

struct SpectrumReport {
    std::vector<SpectrumLevel> levels; // ascending, distinct within tolerance
    double gap = 0.0;                  // E_1 - E_0; 0 if there is a single level
    std::size_t dim = 0;
};

/// Groups sorted eigenvalues whose spacing is below rel_tol * max|E|.
SpectrumReport cluster_spectrum(std::vector<double> eigenvalues, double rel_tol = 1e-7);

/// Full numerical spectrum of a replica Hamiltonian.
SpectrumReport heff_spectrum(const RealMatrix& h, double rel_tol = 1e-7);

/// E(S, j) = (J/2S^2) j(j+1) (4S(S+1) - j(j+1) - 1).
double exact_level_k1(double spin, int j, double coupling);

/// Levels j = 0..2S with multiplicity 2j+1, merged where two j give the
/// same energy.
SpectrumReport exact_spectrum_k1(double spin, double coupling);

struct GapRow {
    double spin = 0.0;
    double gap_numeric = 0.0;
    double gap_exact = 0.0; // lowest nonzero exact level
    double e1_exact = 0.0;  // E(S, 1)
    bool matches = false;   // |gap_numeric - gap_exact| < 1e-8 J
};

struct GapReport {
    std::vector<GapRow> rows;
    bool all_match = false;
    bool monotone_toward_4j = false; // |gap - 4J| decreasing along the list
};

GapReport verify_gap_constancy(const std::vector<double>& spins, double coupling);

/// Singlet-sector mean-field energies (J/2S^2)(4S(S+1) - 1) (j1(j1+1) + j2(j2+1)).
std::vector<double> mean_field_energies_k2(double spin, double coupling,
                                           const std::vector<std::pair<int, int>>& j_pairs);

/// Two-replica singlet sum_i (-1)^i |i>|D-1-i> / sqrt(D) placed on slots
/// (a, b) of a 4-replica space, tensored with a singlet on the other pair.
RealVector pairing_state(const SpinSystem& base, int a1, int b1, int a2, int b2);

struct PerturbationReport {
    double spin = 0.0;
    double overlap = 0.0;       // <alpha|beta>
    double expected_overlap = 0.0;
    double h_alpha = 0.0;       // ||H alpha||
    double h_beta = 0.0;
    double v_alpha_alpha = 0.0;
    double v_alpha_mu = 0.0;
    double v_mu_mu = 0.0;
    double expected_v_mu_mu = 0.0;
    int null_dim = 0;
    bool passed = false;
};

/// Ladder and crossed pairings of the k = 2 problem and the matrix elements
/// of V = sum_r (S(S+1) + S_rL.S_rR).
PerturbationReport perturbation_check(const SpinSystem& base, std::size_t max_dim = kReplicaDimCap);

/// Number of eigenvalues with |E| <= rel_tol * max|E|.
int null_space_dim(const RealMatrix& h, double rel_tol = 1e-7);

struct CorrespondenceReport {
    double spin = 0.0;
    double chi = 0.0;
    double dt = 0.0;
    int n_axes = 0;
    double expected_prefactor = 0.0; // chi^2 S^2 dt / (15 J)
    double fitted_prefactor = 0.0;   // <G, H> / <H, H>
    double max_rel_deviation = 0.0;  // over entries with |H| > 1e-9 max|H|
    double frobenius_rel_deviation = 0.0;
    double generator_norm = 0.0;
};

/// Averages exp(-i chi dt S_n^2) (x) exp(+i chi dt S_n^2) over random
/// orthonormal frames (three axes each) and compares G = (I - M)/dt with
/// the scaled k = 1 replica Hamiltonian.
CorrespondenceReport roat_brownian_correspondence(const SpinSystem& base, double chi, double dt,
                                                  int n_axes, RngStream& rng, double coupling = 1.0);

struct O3Moments {
    double nz4 = 0.0;     // 1/5
    double nz2_nx2 = 0.0; // 1/15
    int n_samples = 0;
};

O3Moments o3_moment_check(int n_samples, RngStream& rng);

} // namespace bfecho

#endif
