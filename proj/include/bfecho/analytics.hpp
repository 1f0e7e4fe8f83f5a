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

#ifndef BFECHO_ANALYTICS_HPP
#define BFECHO_ANALYTICS_HPP

#include <utility>
#include <vector>

namespace bfecho::analytics {

/// sin(x)/x with sinc(0) = 1.
double sinc(double x);

/// f(theta) = sum_{m=-S}^{S} exp(-i m theta) = sin(D theta / 2) / sin(theta / 2).
/// Real-valued; f(0) = D.
double dirichlet_f(double spin, double theta);

/// Rotation angles of the compositions R_n(theta) R_m(-/+theta):
/// cos(mu/2) = cos^2(theta/2) +/- (n.m) sin^2(theta/2). Both in [0, 2 pi].
struct MuAngles {
    double plus;
    double minus;
};
MuAngles mu_angles(double theta, double cos_nm);

/// c = 2 S (S+1) D^2 / (D^2 - 1), the decay constant of the echo signal
/// under isotropic collective depolarizing noise.
double noise_constant(double spin);

/// Haar-averaged echo signal <S_z> and second moment <S_z^2>.
double clean_signal(double spin, double theta);
double clean_second_moment(double spin, double theta);

/// Same with depolarizing noise; `c_gamma_t` is the dimensionless c*gamma*T.
double noisy_signal(double spin, double theta, double c_gamma_t);
double noisy_second_moment(double spin, double theta, double c_gamma_t);

/// Large-S limits at fixed x = S theta.
double asymptotic_signal(double x);        // sinc^2(x)
double asymptotic_second_moment(double x); // (1 + 2 sinc^2(x)) / 3, in units of S^2

/// Leading large-N angular sensitivity 1/dtheta at x = S theta with noise
/// c*gamma*T. For the clean case near x = 0 the series N/2 (1 - 3x^2/40)
/// is used; with noise the full expression is evaluated.
double angular_sensitivity(int n_particles, double x, double c_gamma_t);
double angular_sensitivity_series(int n_particles, double x);

/// G = 10 log10((1/dtheta)^2 / N); -infinity for zero sensitivity.
double gain_db(double inv_delta_theta, int n_particles);

struct GainSurface {
    std::vector<double> x_grid;
    std::vector<double> c_gamma_t_grid;
    std::vector<std::vector<double>> gain_db; // [noise row][x column]
    std::vector<double> optimal_x;            // argmax x per noise row
};

GainSurface gain_surface(int n_particles, const std::vector<double>& x_grid,
                         const std::vector<double>& c_gamma_t_grid);

/// Serialization floor for gain values.
inline constexpr double kGainFloorDb = -50.0;

double haar_qfi_mean(int n_particles);       // N(N+1)/3
double haar_qfi_std(int n_particles);        // 2 N^{3/2} / (3 sqrt 5)
double var_qfi_circuits(int n_particles);    // 4 N^3 / 45

/// Leading-order variances of <S_z> across circuits and across axes.
struct SignalFluctuations {
    double var_circuits; // (17/270) S x^4
    double var_axes;     // (23/324) S x^4
};
SignalFluctuations signal_fluctuation_formulas(double spin, double x);

/// theta_bw = 2 pi / N, the first zero of the asymptotic signal.
double bandwidth(int n_particles);

} // namespace bfecho::analytics

#endif
