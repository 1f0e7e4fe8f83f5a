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

#include "bfecho/channels.hpp"

#include "bfecho/analytics.hpp"
#include "bfecho/parallel.hpp"

#include <cmath>

namespace bfecho {

SphereQuadrature octahedral_26() {
    SphereQuadrature rule;
    const auto add = [&rule](double x, double y, double z, double w) {
        rule.nodes.push_back(UnitAxis::normalized(x, y, z));
        rule.weights.push_back(w);
    };
    for (int axis = 0; axis < 3; ++axis) {
        for (double s : {1.0, -1.0}) {
            double v[3] = {0.0, 0.0, 0.0};
            v[axis] = s;
            add(v[0], v[1], v[2], 1.0 / 21.0);
        }
    }
    for (int skip = 0; skip < 3; ++skip) {
        for (double s1 : {1.0, -1.0}) {
            for (double s2 : {1.0, -1.0}) {
                double v[3];
                v[skip] = 0.0;
                v[(skip + 1) % 3] = s1;
                v[(skip + 2) % 3] = s2;
                add(v[0], v[1], v[2], 4.0 / 105.0);
            }
        }
    }
    for (double sx : {1.0, -1.0}) {
        for (double sy : {1.0, -1.0}) {
            for (double sz : {1.0, -1.0}) {
                add(sx, sy, sz, 27.0 / 840.0);
            }
        }
    }
    return rule;
}

SphereQuadrature monte_carlo_axes(int n_axes, RngStream& rng) {
    if (n_axes < 1) {
        throw std::invalid_argument("monte_carlo_axes: n_axes must be >= 1");
    }
    SphereQuadrature rule;
    for (int i = 0; i < n_axes; ++i) {
        rule.nodes.push_back(random_axis(rng));
        rule.weights.push_back(1.0 / n_axes);
    }
    return rule;
}

DensityOp axis_averaged_channel(const SpinSystem& sys, const DensityOp& rho, double theta,
                                const SphereQuadrature& rule) {
    if (rho.rows() != sys.dim() || rho.cols() != sys.dim()) {
        throw std::invalid_argument("axis_averaged_channel: state dimension mismatch");
    }
    if (rule.nodes.empty() || rule.nodes.size() != rule.weights.size()) {
        throw std::invalid_argument("axis_averaged_channel: malformed quadrature rule");
    }
    if (theta == 0.0) {
        return rho;
    }
    DensityOp out = DensityOp::Zero(rho.rows(), rho.cols());
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const Matrix r = rotation(sys, rule.nodes[i], theta);
        out.noalias() += rule.weights[i] * (r * rho * r.adjoint());
    }
    return symmetrized(out);
}

DensityOp axis_averaged_channel(const SpinSystem& sys, const DensityOp& rho, double theta,
                                int n_axes, RngStream& rng) {
    return axis_averaged_channel(sys, rho, theta, monte_carlo_axes(n_axes, rng));
}

DensityOp collective_dissipator(const SpinOperators& ops, const DensityOp& rho, bool z_only) {
    DensityOp out = DensityOp::Zero(rho.rows(), rho.cols());
    for (int j = z_only ? 2 : 0; j < 3; ++j) {
        const Matrix& s = ops.component(j);
        const Matrix s2 = s * s;
        out.noalias() += s * rho * s;
        out.noalias() -= 0.5 * (s2 * rho + rho * s2);
    }
    return out;
}

DensityOp depolarizing_step(const SpinSystem& sys, const DensityOp& rho, double theta) {
    if (rho.rows() != sys.dim() || rho.cols() != sys.dim()) {
        throw std::invalid_argument("depolarizing_step: state dimension mismatch");
    }
    const auto ops = spin_operators(sys);
    return rho + (theta * theta / 3.0) * collective_dissipator(ops, rho);
}

namespace {

Eigen::SelfAdjointEigenSolver<Matrix> checked_spectrum(const DensityOp& m, const char* name) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(m));
    if (es.info() != Eigen::Success) {
        throw NumericalGuardError(std::string("fidelity: eigensolver failed on ") + name);
    }
    if (es.eigenvalues().minCoeff() < -1e-10) {
        throw std::invalid_argument(std::string("fidelity: ") + name +
                                    " is not positive semidefinite (min eigenvalue " +
                                    std::to_string(es.eigenvalues().minCoeff()) + ")");
    }
    return es;
}

// Eigenvalues below this fraction of the largest are treated as exact zeros.
constexpr double kSupportTol = 1e-13;

int support_rank(const RealVector& evals) {
    const double cut = kSupportTol * evals.maxCoeff();
    return static_cast<int>((evals.array() > cut).count());
}

} // namespace

double fidelity(const DensityOp& rho, const DensityOp& sigma) {
    if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols()) {
        throw std::invalid_argument("fidelity: dimension mismatch");
    }
    const auto es_rho = checked_spectrum(rho, "rho");
    const auto es_sigma = checked_spectrum(sigma, "sigma");
    // Work on the support of whichever state has the smaller numerical rank;
    // for a pure state this reduces to <psi|sigma|psi>.
    const bool swap = support_rank(es_sigma.eigenvalues()) < support_rank(es_rho.eigenvalues());
    const auto& es = swap ? es_sigma : es_rho;
    const DensityOp& other = swap ? rho : sigma;
    const RealVector& p = es.eigenvalues();
    const double cut = kSupportTol * p.maxCoeff();
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        if (p(i) > cut) {
            keep.push_back(i);
        }
    }
    const auto r = static_cast<Eigen::Index>(keep.size());
    Matrix v(es.eigenvectors().rows(), r);
    RealVector roots(r);
    for (Eigen::Index k = 0; k < r; ++k) {
        v.col(k) = es.eigenvectors().col(keep[k]);
        roots(k) = std::sqrt(p(keep[k]));
    }
    const Matrix m = roots.asDiagonal() * (v.adjoint() * other * v) * roots.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Matrix> inner(symmetrized(m), Eigen::EigenvaluesOnly);
    const double trace_root = inner.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
    return trace_root * trace_root;
}

double small_theta_qfi(const SpinSystem& sys, const Ket& psi) {
    const auto ops = spin_operators(sys);
    double total = 0.0;
    for (int j = 0; j < 3; ++j) {
        const Ket v = ops.component(j) * psi;
        const double mean = psi.dot(v).real();
        total += v.squaredNorm() - mean * mean;
    }
    return 4.0 / 3.0 * total;
}

double small_theta_qfi_fidelity(const SpinSystem& sys, const Ket& psi, double theta) {
    if (theta == 0.0) {
        throw std::invalid_argument("small_theta_qfi_fidelity: theta must be nonzero");
    }
    const DensityOp rho = pure_density(psi);
    const DensityOp out = axis_averaged_channel(sys, rho, theta, octahedral_26());
    const double f = fidelity(rho, out);
    return 8.0 * (1.0 - std::sqrt(f)) / (theta * theta);
}

NoiseModel parse_noise_model(const std::string& name) {
    if (name == "isotropic_collective") {
        return NoiseModel::isotropic_collective;
    }
    if (name == "z_collective") {
        return NoiseModel::z_collective;
    }
    throw std::invalid_argument("unknown noise model '" + name + "'");
}

std::string to_string(NoiseModel model) {
    return model == NoiseModel::z_collective ? "z_collective" : "isotropic_collective";
}

DensityOp lindblad_evolve(const SpinSystem& sys, const DensityOp& rho, const LindbladSpec& spec) {
    const auto d = sys.dim();
    if (rho.rows() != d || rho.cols() != d) {
        throw std::invalid_argument("lindblad_evolve: state dimension mismatch");
    }
    if (!(spec.gamma >= 0.0)) {
        throw std::invalid_argument("lindblad_evolve: gamma must be >= 0");
    }
    if (!(spec.dt > 0.0)) {
        throw std::invalid_argument("lindblad_evolve: dt must be > 0");
    }
    const double noise_load = spec.gamma * sys.spin() * sys.spin() * spec.dt;
    if (noise_load > 0.1) {
        throw NumericalGuardError("lindblad_evolve: gamma S^2 dt = " + std::to_string(noise_load) +
                                  " exceeds 0.1; reduce dt");
    }
    const auto ops = spin_operators(sys);
    const bool z_only = spec.model == NoiseModel::z_collective;
    DensityOp state = rho;
    for (const auto& piece : spec.schedule) {
        if (piece.h.rows() != d || piece.h.cols() != d) {
            throw std::invalid_argument("lindblad_evolve: Hamiltonian dimension mismatch");
        }
        if (!(piece.duration >= 0.0)) {
            throw std::invalid_argument("lindblad_evolve: durations must be >= 0");
        }
        const Matrix h = symmetrized(piece.h);
        Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
        const double h_norm = es.eigenvalues().cwiseAbs().maxCoeff();
        if (h_norm * spec.dt > 0.1) {
            throw NumericalGuardError("lindblad_evolve: ||H|| dt = " + std::to_string(h_norm * spec.dt) +
                                      " exceeds 0.1; reduce dt");
        }
        if (piece.duration == 0.0) {
            continue;
        }
        const auto n_steps = static_cast<long>(std::ceil(piece.duration / spec.dt - 1e-12));
        const double step = piece.duration / static_cast<double>(n_steps);
        const Complex minus_i(0.0, -1.0);
        const auto rhs = [&](const DensityOp& r) -> DensityOp {
            DensityOp out = minus_i * (h * r - r * h);
            if (spec.gamma > 0.0) {
                out += spec.gamma * collective_dissipator(ops, r, z_only);
            }
            return out;
        };
        for (long s = 0; s < n_steps; ++s) {
            const DensityOp k1 = rhs(state);
            const DensityOp k2 = rhs(state + 0.5 * step * k1);
            const DensityOp k3 = rhs(state + 0.5 * step * k2);
            const DensityOp k4 = rhs(state + step * k3);
            state += (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            state = symmetrized(state);
        }
    }
    return state;
}

namespace {

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

} // namespace

DissipatorPropagator::DissipatorPropagator(const SpinSystem& sys, NoiseModel model, double gamma)
    : dim_(sys.dim()) {
    if (!(gamma >= 0.0)) {
        throw std::invalid_argument("DissipatorPropagator: gamma must be >= 0");
    }
    const auto ops = spin_operators(sys);
    const Matrix id = Matrix::Identity(dim_, dim_);
    Matrix super = Matrix::Zero(dim_ * dim_, dim_ * dim_);
    // vec(A rho B) = (B^T kron A) vec(rho), column-major
    for (int j = model == NoiseModel::z_collective ? 2 : 0; j < 3; ++j) {
        const Matrix& s = ops.component(j);
        const Matrix s2 = s * s;
        super += kron(s.transpose(), s) - 0.5 * kron(id, s2) - 0.5 * kron(s2.transpose(), id);
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(gamma * symmetrized(super));
    if (es.info() != Eigen::Success) {
        throw NumericalGuardError("DissipatorPropagator: eigensolver failed");
    }
    rates_ = es.eigenvalues();
    modes_ = es.eigenvectors();
}

DensityOp DissipatorPropagator::apply(const DensityOp& rho, double t) const {
    if (rho.rows() != dim_ || rho.cols() != dim_) {
        throw std::invalid_argument("DissipatorPropagator: state dimension mismatch");
    }
    const Eigen::Map<const Ket> vec(rho.data(), rho.size());
    Ket coeffs = modes_.adjoint() * vec;
    for (Eigen::Index i = 0; i < coeffs.size(); ++i) {
        coeffs(i) *= std::exp(rates_(i) * t);
    }
    const Ket out = modes_ * coeffs;
    return symmetrized(Eigen::Map<const Matrix>(out.data(), dim_, dim_));
}

EchoPointStats noisy_echo_mc(const SpinSystem& sys, const NoisyEchoConfig& config,
                             std::uint64_t seed, int workers) {
    if (config.n_circuits < 2) {
        throw std::invalid_argument("noisy_echo_mc: need at least 2 circuits");
    }
    if (config.n_steps < 1 || config.substeps < 1) {
        throw std::invalid_argument("noisy_echo_mc: n_steps and substeps must be >= 1");
    }
    if (!(config.t_oneway > 0.0) || !(config.gamma >= 0.0)) {
        throw std::invalid_argument("noisy_echo_mc: need t_oneway > 0 and gamma >= 0");
    }
    const bool brownian = config.scrambler == NoisyScrambler::brownian;
    const int slices_per_step = brownian ? 1 : config.substeps;
    const double tau = config.t_oneway / (config.n_steps * slices_per_step);
    const double strength =
        config.twist_strength > 0.0 ? config.twist_strength : default_twist_strength(sys.n_particles());
    const std::optional<DissipatorPropagator> noise =
        config.gamma > 0.0 ? std::optional<DissipatorPropagator>(std::in_place, sys, config.model, config.gamma)
                           : std::nullopt;
    const auto ops = spin_operators(sys);
    const Matrix sz2 = ops.sz * ops.sz;

    std::vector<EchoMoments> samples(static_cast<std::size_t>(config.n_circuits));
    parallel_for(samples.size(), workers, [&](std::size_t c) {
        RngStream rng(seed, c);
        std::vector<Matrix> slices;
        slices.reserve(static_cast<std::size_t>(config.n_steps * slices_per_step));
        for (int s = 0; s < config.n_steps; ++s) {
            if (brownian) {
                slices.push_back(sample_brownian_step(sys, config.brownian_rate, tau, rng));
            } else {
                const Matrix u = twist_unitary(sys, random_axis(rng), strength / slices_per_step);
                for (int k = 0; k < slices_per_step; ++k) {
                    slices.push_back(u);
                }
            }
        }
        const UnitAxis n = config.axis ? *config.axis : random_axis(rng);
        const auto dissipate = [&](DensityOp& rho) {
            if (noise) {
                rho = noise->apply(rho, tau);
            }
        };
        DensityOp rho = pure_density(dicke_state(sys, sys.spin()));
        for (const auto& u : slices) {
            rho = u * rho * u.adjoint();
            dissipate(rho);
        }
        const Matrix r = rotation(sys, n, config.theta);
        rho = r * rho * r.adjoint();
        for (auto it = slices.rbegin(); it != slices.rend(); ++it) {
            rho = it->adjoint() * rho * (*it);
            dissipate(rho);
        }
        samples[c] = {(rho * ops.sz).trace().real(), (rho * sz2).trace().real()};
    });

    EchoPointStats p;
    p.theta = config.theta;
    p.x = sys.spin() * config.theta;
    p.n_samples = config.n_circuits;
    for (const auto& s : samples) {
        p.mean_sz += s.mean_sz;
        p.mean_sz2 += s.mean_sz2;
    }
    p.mean_sz /= config.n_circuits;
    p.mean_sz2 /= config.n_circuits;
    for (const auto& s : samples) {
        p.var_circuits_sz += (s.mean_sz - p.mean_sz) * (s.mean_sz - p.mean_sz);
        p.var_circuits_sz2 += (s.mean_sz2 - p.mean_sz2) * (s.mean_sz2 - p.mean_sz2);
    }
    p.var_circuits_sz /= (config.n_circuits - 1);
    p.var_circuits_sz2 /= (config.n_circuits - 1);
    return p;
}

DecayFit fit_decay_rate(const SpinSystem& sys, const NoisyEchoConfig& base,
                        const std::vector<double>& gammas, std::uint64_t seed, int workers) {
    if (gammas.empty()) {
        throw std::invalid_argument("fit_decay_rate: gamma grid is empty");
    }
    DecayFit fit;
    fit.spin = sys.spin();
    fit.c = analytics::noise_constant(sys.spin());
    fit.t_oneway = base.t_oneway;
    double sxy = 0.0;
    double sxx = 0.0;
    for (double g : gammas) {
        NoisyEchoConfig cfg = base;
        cfg.gamma = g;
        cfg.theta = 0.0;
        const auto p = noisy_echo_mc(sys, cfg, seed, workers);
        if (!(p.mean_sz > 0.0)) {
            throw NumericalGuardError("fit_decay_rate: signal decayed to zero; use smaller gamma");
        }
        const double y = std::log(p.mean_sz / sys.spin());
        fit.gammas.push_back(g);
        fit.log_signal.push_back(y);
        sxy += g * y;
        sxx += g * g;
    }
    if (sxx == 0.0) {
        throw std::invalid_argument("fit_decay_rate: need a nonzero gamma");
    }
    fit.kappa = -sxy / sxx;
    fit.kappa_over_ct = fit.kappa / (fit.c * fit.t_oneway);
    return fit;
}

} // namespace bfecho
