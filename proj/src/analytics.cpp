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

#include "bfecho/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace bfecho::analytics {

namespace {

constexpr double kPi = std::numbers::pi;

double dimension(double spin) { return 2.0 * spin + 1.0; }

// 1 - sinc(x)^2 without cancellation at small x.
double one_minus_sinc2(double x) {
    if (std::abs(x) < 1e-3) {
        const double x2 = x * x;
        return x2 / 3.0 - 2.0 * x2 * x2 / 45.0;
    }
    const double s = sinc(x);
    return 1.0 - s * s;
}

// sinc(x) - cos(x) without cancellation at small x.
double sinc_minus_cos(double x) {
    if (std::abs(x) < 1e-3) {
        const double x2 = x * x;
        return x2 / 3.0 - x2 * x2 / 30.0;
    }
    return sinc(x) - std::cos(x);
}

} // namespace

double sinc(double x) {
    if (std::abs(x) < 1e-8) {
        return 1.0 - x * x / 6.0;
    }
    return std::sin(x) / x;
}

double dirichlet_f(double spin, double theta) {
    const double d = dimension(spin);
    const double half = 0.5 * theta;
    if (std::abs(theta) < 1e-6) {
        // sum m^2 = S(S+1) D / 3
        return d * (1.0 - theta * theta * spin * (spin + 1.0) / 6.0);
    }
    const double s = std::sin(half);
    if (std::abs(s) < 1e-6) {
        // theta near a nonzero multiple of 2 pi: sum directly
        double total = 0.0;
        for (int k = 0; k < static_cast<int>(d); ++k) {
            total += std::cos((spin - k) * theta);
        }
        return total;
    }
    return std::sin(d * half) / s;
}

MuAngles mu_angles(double theta, double cos_nm) {
    const double c2 = std::cos(0.5 * theta);
    const double s2 = std::sin(0.5 * theta);
    const double base = c2 * c2;
    const double spread = cos_nm * s2 * s2;
    const auto angle = [](double c) { return 2.0 * std::acos(std::clamp(c, -1.0, 1.0)); };
    return {angle(base + spread), angle(base - spread)};
}

double noise_constant(double spin) {
    const double d2 = dimension(spin) * dimension(spin);
    return 2.0 * spin * (spin + 1.0) * d2 / (d2 - 1.0);
}

double noisy_signal(double spin, double theta, double c_gamma_t) {
    const double d2 = dimension(spin) * dimension(spin);
    const double f = dirichlet_f(spin, theta);
    return spin * std::exp(-c_gamma_t) * (f * f - 1.0) / (d2 - 1.0);
}

double noisy_second_moment(double spin, double theta, double c_gamma_t) {
    const double d2 = dimension(spin) * dimension(spin);
    const double f = dirichlet_f(spin, theta);
    const double decay = std::exp(-c_gamma_t);
    return spin * (spin + 1.0) / 3.0 * (d2 - decay) / (d2 - 1.0) +
           decay * (2.0 * spin - 1.0) / (12.0 * (spin + 1.0)) * (f * f - 1.0);
}

double clean_signal(double spin, double theta) { return noisy_signal(spin, theta, 0.0); }

double clean_second_moment(double spin, double theta) {
    return noisy_second_moment(spin, theta, 0.0);
}

double asymptotic_signal(double x) {
    const double s = sinc(x);
    return s * s;
}

double asymptotic_second_moment(double x) { return (1.0 + 2.0 * asymptotic_signal(x)) / 3.0; }

double angular_sensitivity_series(int n_particles, double x) {
    return 0.5 * n_particles * (1.0 - 3.0 * x * x / 40.0);
}

double angular_sensitivity(int n_particles, double x, double c_gamma_t) {
    if (x < 0.0) {
        throw std::invalid_argument("angular_sensitivity: x must be >= 0");
    }
    const double n = n_particles;
    if (c_gamma_t == 0.0) {
        if (x < 1e-3) {
            return angular_sensitivity_series(n_particles, x);
        }
        const double s = sinc(x);
        // 1 + 2 s^2 - 3 s^4 = (1 - s^2)(1 + 3 s^2)
        const double denom = std::sqrt(one_minus_sinc2(x) * (1.0 + 3.0 * s * s));
        return n * std::sqrt(3.0) / x * std::abs(s * sinc_minus_cos(x)) / denom;
    }
    const double e = std::exp(-c_gamma_t);
    const double s = sinc(x);
    const double s2 = s * s;
    const double denom = std::sqrt(1.0 + 2.0 * s2 * e - 3.0 * s2 * s2 * e * e);
    if (x == 0.0) {
        return 0.0; // numerator vanishes linearly, denominator stays positive
    }
    return n * std::sqrt(3.0) / x * e * std::abs(s * sinc_minus_cos(x)) / denom;
}

double gain_db(double inv_delta_theta, int n_particles) {
    if (inv_delta_theta < 0.0) {
        throw std::invalid_argument("gain_db: sensitivity must be >= 0");
    }
    if (inv_delta_theta == 0.0) {
        return -std::numeric_limits<double>::infinity();
    }
    return 10.0 * std::log10(inv_delta_theta * inv_delta_theta / n_particles);
}

GainSurface gain_surface(int n_particles, const std::vector<double>& x_grid,
                         const std::vector<double>& c_gamma_t_grid) {
    if (x_grid.empty() || c_gamma_t_grid.empty()) {
        throw std::invalid_argument("gain_surface: grids must be nonempty");
    }
    GainSurface surface{x_grid, c_gamma_t_grid, {}, {}};
    for (double cgt : c_gamma_t_grid) {
        std::vector<double> row;
        row.reserve(x_grid.size());
        std::size_t best = 0;
        for (std::size_t i = 0; i < x_grid.size(); ++i) {
            row.push_back(gain_db(angular_sensitivity(n_particles, x_grid[i], cgt), n_particles));
            if (row[i] > row[best]) {
                best = i;
            }
        }
        surface.optimal_x.push_back(x_grid[best]);
        surface.gain_db.push_back(std::move(row));
    }
    return surface;
}

double haar_qfi_mean(int n_particles) {
    const double n = n_particles;
    return n * (n + 1.0) / 3.0;
}

double var_qfi_circuits(int n_particles) {
    const double n = n_particles;
    return 4.0 * n * n * n / 45.0;
}

double haar_qfi_std(int n_particles) {
    return 2.0 * std::pow(static_cast<double>(n_particles), 1.5) / (3.0 * std::sqrt(5.0));
}

SignalFluctuations signal_fluctuation_formulas(double spin, double x) {
    const double x4 = x * x * x * x;
    return {17.0 / 270.0 * spin * x4, 23.0 / 324.0 * spin * x4};
}

double bandwidth(int n_particles) {
    if (n_particles < 1) {
        throw std::invalid_argument("bandwidth: N must be >= 1");
    }
    return 2.0 * kPi / n_particles;
}

} // namespace bfecho::analytics
