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

// Test-only oracles and seeded generators. Nothing here is used by the
// library; the point is to check it against independent constructions.

#ifndef BFECHO_TESTS_SUPPORT_HPP
#define BFECHO_TESTS_SUPPORT_HPP

#include "bfecho/types.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

namespace testsupport {

using bfecho::Complex;
using bfecho::Matrix;
using bfecho::Ket;

/// Independent seeded generator for property tests.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : engine_(seed) {}

    double normal() { return normal_(engine_); }
    double uniform(double a = 0.0, double b = 1.0) { return std::uniform_real_distribution<double>(a, b)(engine_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }

    /// Direction from normalized Gaussians.
    std::array<double, 3> direction() {
        for (;;) {
            const double x = normal();
            const double y = normal();
            const double z = normal();
            const double r = std::sqrt(x * x + y * y + z * z);
            if (r > 1e-12) {
                return {x / r, y / r, z / r};
            }
        }
    }

    Matrix hermitian(int d) {
        Matrix m(d, d);
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) {
                m(i, j) = Complex(normal(), normal());
            }
        }
        return 0.5 * (m + m.adjoint());
    }

    Ket ket(int d) {
        Ket v(d);
        for (int i = 0; i < d; ++i) {
            v(i) = Complex(normal(), normal());
        }
        return v.normalized();
    }

    /// Random density matrix with full rank.
    Matrix density(int d) {
        Matrix g(d, d);
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) {
                g(i, j) = Complex(normal(), normal());
            }
        }
        Matrix rho = g * g.adjoint();
        return rho / rho.trace().real();
    }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

/// exp(-i H t) by scaling-and-squaring Pade (Eigen unsupported module).
inline Matrix expm_unitary(const Matrix& h, double t) {
    const Matrix a = Complex(0.0, -t) * h;
    return a.exp();
}

/// Spin operators straight from the ladder matrix elements, built without
/// the library.
struct NaiveSpin {
    Matrix sx, sy, sz;
};

inline NaiveSpin naive_spin(int n_particles) {
    const int d = n_particles + 1;
    const double s = 0.5 * n_particles;
    Matrix sp = Matrix::Zero(d, d);
    Matrix sz = Matrix::Zero(d, d);
    for (int i = 0; i < d; ++i) {
        const double m = s - i;
        sz(i, i) = m;
        if (i > 0) {
            // <m+1| S+ |m>
            sp(i - 1, i) = std::sqrt(s * (s + 1) - m * (m + 1));
        }
    }
    const Matrix sm = sp.adjoint();
    return {0.5 * (sp + sm), Complex(0.0, -0.5) * (sp - sm), sz};
}

/// Sum over m of exp(-i m theta), by brute force.
inline double dirichlet_direct(double s, double theta) {
    Complex acc = 0.0;
    const int d = static_cast<int>(std::lround(2 * s)) + 1;
    for (int i = 0; i < d; ++i) {
        acc += std::polar(1.0, -(s - i) * theta);
    }
    return acc.real();
}

struct Stats {
    double mean = 0.0;
    double var = 0.0; // unbiased
    double sem = 0.0;
};

inline Stats stats(const std::vector<double>& xs) {
    Stats s;
    for (double x : xs) {
        s.mean += x;
    }
    s.mean /= xs.size();
    for (double x : xs) {
        s.var += (x - s.mean) * (x - s.mean);
    }
    s.var /= (xs.size() - 1);
    s.sem = std::sqrt(s.var / xs.size());
    return s;
}

inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= x.size();
    my /= x.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
        sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
    }
    return sxy / sxx;
}

} // namespace testsupport

#endif
