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

#ifndef BFECHO_TYPES_HPP
#define BFECHO_TYPES_HPP

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace bfecho {

using Complex = std::complex<double>;

/// Dense complex matrix in the Dicke basis (operators, density matrices, unitaries).
using Matrix = Eigen::MatrixXcd;
/// State vector in the Dicke basis; index i holds the amplitude of |S, S - i>.
using Ket = Eigen::VectorXcd;
using DensityOp = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Raised when a numerical guard trips (integrator step, dimension cap,
/// singular solve). The CLI maps it to exit code 3.
class NumericalGuardError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

inline double hermiticity_residual(const Matrix& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

inline double expectation(const Ket& psi, const Matrix& op) {
    return psi.dot(op * psi).real();
}

} // namespace bfecho

#endif
