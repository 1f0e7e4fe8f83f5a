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

#ifndef BFECHO_SPIN_HPP
#define BFECHO_SPIN_HPP

#include "bfecho/types.hpp"

#include <array>
#include <vector>

namespace bfecho {

/// Collective spin of N spin-1/2 particles restricted to the symmetric
/// subspace: S = N/2, dimension D = N + 1. Basis index 0 is m = S.
class SpinSystem {
public:
    explicit SpinSystem(int n_particles);

    int n_particles() const { return n_; }
    int dim() const { return n_ + 1; }
    double spin() const { return 0.5 * n_; }
    /// m quantum number of basis index i.
    double m_of(int index) const { return spin() - index; }

    bool operator==(const SpinSystem&) const = default;

private:
    int n_;
};

/// Throws std::invalid_argument for N < 1.
SpinSystem make_spin_system(int n_particles);

/// Unit 3-vector. Construction validates the norm to 1e-12; use
/// UnitAxis::normalized for arbitrary nonzero input.
class UnitAxis {
public:
    UnitAxis(double x, double y, double z);
    static UnitAxis normalized(double x, double y, double z);
    static UnitAxis x_axis() { return {1.0, 0.0, 0.0}; }
    static UnitAxis y_axis() { return {0.0, 1.0, 0.0}; }
    static UnitAxis z_axis() { return {0.0, 0.0, 1.0}; }

    double x() const { return v_[0]; }
    double y() const { return v_[1]; }
    double z() const { return v_[2]; }
    double operator[](int i) const { return v_[i]; }
    const std::array<double, 3>& components() const { return v_; }
    double dot(const UnitAxis& o) const { return v_[0] * o.v_[0] + v_[1] * o.v_[1] + v_[2] * o.v_[2]; }

    bool operator==(const UnitAxis&) const = default;

private:
    struct Trusted {};
    UnitAxis(Trusted, double x, double y, double z) : v_{x, y, z} {}
    std::array<double, 3> v_;
};

struct SpinOperators {
    Matrix sx, sy, sz, sp, sm;
    /// Component by Cartesian index 0, 1, 2.
    const Matrix& component(int j) const { return j == 0 ? sx : (j == 1 ? sy : sz); }
};

SpinOperators spin_operators(const SpinSystem& sys);

/// S_n = n . S.
Matrix axis_operator(const SpinSystem& sys, const UnitAxis& n);
Matrix axis_operator(const SpinOperators& ops, const UnitAxis& n);

/// Eigendecomposition of a Hermitian generator H (symmetrized on entry),
/// giving exact propagators exp(-i H t) for any t.
class SpectralPropagator {
public:
    explicit SpectralPropagator(const Matrix& hermitian);

    Matrix unitary(double t) const;
    Ket apply(double t, const Ket& psi) const;
    const RealVector& eigenvalues() const { return evals_; }
    const Matrix& eigenvectors() const { return evecs_; }

private:
    RealVector evals_;
    Matrix evecs_;
};

/// R_n(theta) = exp(-i S_n theta).
Matrix rotation(const SpinSystem& sys, const UnitAxis& n, double theta);

enum class RelativeSign { plus, minus };

/// Tr[exp(-i S_n theta) exp(+/- i S_m theta)] by explicit matrix products.
Complex trace_rotation_pair(const SpinSystem& sys, const UnitAxis& n, const UnitAxis& m,
                            double theta, RelativeSign sign);

/// |S, m>; m must be one of S, S-1, ..., -S.
Ket dicke_state(const SpinSystem& sys, double m);

/// Spin-coherent state pointing along n, built by rotating |S,S>.
Ket coherent_state(const SpinSystem& sys, const UnitAxis& n);

/// Closed-form coherent-state amplitudes for polar/azimuth angles. Equal to
/// coherent_state up to a global phase.
Ket coherent_amplitudes(const SpinSystem& sys, double polar, double azimuth);

struct HusimiField {
    int n_polar = 0;
    int n_azimuth = 0;
    std::vector<double> polar;   // includes both poles
    std::vector<double> azimuth; // [0, 2 pi)
    std::vector<double> q;       // row-major, polar then azimuth

    double at(int i, int j) const { return q[static_cast<std::size_t>(i) * n_azimuth + j]; }
};

/// Q(n) = <n|rho|n> on a polar x azimuth grid. Throws for grid sizes < 2.
HusimiField husimi_q(const SpinSystem& sys, const DensityOp& rho, int n_polar, int n_azimuth);

/// (D / 4 pi) * integral of Q over the sphere, trapezoid in both angles.
double husimi_normalization(const HusimiField& field, int dim);

/// Throws std::invalid_argument unless rho is a valid density matrix
/// (Hermitian, unit trace, eigenvalues >= -1e-10).
void validate_density(const DensityOp& rho, double tol = 1e-10);

DensityOp pure_density(const Ket& psi);

} // namespace bfecho

#endif
