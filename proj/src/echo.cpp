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

#include "bfecho/echo.hpp"

#include "bfecho/analytics.hpp"
#include "bfecho/parallel.hpp"

#include <array>
#include <cmath>
#include <limits>

namespace bfecho {

EchoEvaluator::EchoEvaluator(const SpinOperators& ops, const Matrix& scrambler, const UnitAxis& n) {
    const auto d = ops.sz.rows();
    if (scrambler.rows() != d || scrambler.cols() != d) {
        throw std::invalid_argument("echo: scrambler dimension does not match spin system");
    }
    SpectralPropagator sn(axis_operator(ops, n));
    evals_ = sn.eigenvalues();
    const Matrix& v = sn.eigenvectors();
    probe_ = v.adjoint() * scrambler.col(0);
    const Matrix frame = v.adjoint() * scrambler;
    sz_ = frame * ops.sz * frame.adjoint();
    sz2_ = frame * (ops.sz * ops.sz) * frame.adjoint();
}

EchoMoments EchoEvaluator::operator()(double theta) const {
    Ket phi = probe_;
    for (Eigen::Index i = 0; i < phi.size(); ++i) {
        phi(i) *= std::polar(1.0, -evals_(i) * theta);
    }
    return {phi.dot(sz_ * phi).real(), phi.dot(sz2_ * phi).real()};
}

EchoMoments run_echo(const SpinSystem& sys, const Matrix& scrambler, const UnitAxis& n, double theta) {
    if (scrambler.rows() != sys.dim() || scrambler.cols() != sys.dim()) {
        throw std::invalid_argument("run_echo: scrambler dimension does not match spin system");
    }
    const auto ops = spin_operators(sys);
    const Ket top = dicke_state(sys, sys.spin());
    const Ket chi = scrambler.adjoint() * (rotation(sys, n, theta) * (scrambler * top));
    return {expectation(chi, ops.sz), expectation(chi, ops.sz * ops.sz)};
}

EchoMoments run_echo(const SpinSystem& sys, const OatCircuit& circuit, const UnitAxis& n, double theta) {
    if (!(circuit.sys == sys)) {
        throw std::invalid_argument("run_echo: circuit built for a different spin system");
    }
    const auto ops = spin_operators(sys);
    Ket psi = apply_oat(circuit, dicke_state(sys, sys.spin()), Direction::forward);
    psi = rotation(sys, n, theta) * psi;
    const Ket chi = apply_oat(circuit, psi, Direction::reverse);
    return {expectation(chi, ops.sz), expectation(chi, ops.sz * ops.sz)};
}

double probe_qfi(const SpinOperators& ops, const Ket& psi, const UnitAxis& n) {
    const Matrix sn = axis_operator(ops, n);
    const Ket v = sn * psi;
    const double mean = psi.dot(v).real();
    return std::max(0.0, 4.0 * (v.squaredNorm() - mean * mean));
}

double probe_qfi(const SpinSystem& sys, const Ket& psi, const UnitAxis& n) {
    return probe_qfi(spin_operators(sys), psi, n);
}

double SpinMoments::mean(const UnitAxis& n) const {
    return first(0) * n.x() + first(1) * n.y() + first(2) * n.z();
}

double SpinMoments::mean_square(const UnitAxis& n) const {
    const Eigen::Vector3d v(n.x(), n.y(), n.z());
    return v.dot(second * v);
}

SpinMoments spin_moments(const SpinOperators& ops, const Ket& psi) {
    SpinMoments m;
    std::array<Ket, 3> applied;
    for (int a = 0; a < 3; ++a) {
        applied[a] = ops.component(a) * psi;
        m.first(a) = psi.dot(applied[a]).real();
    }
    for (int a = 0; a < 3; ++a) {
        for (int b = a; b < 3; ++b) {
            // Re <S_a S_b> = <{S_a, S_b}> / 2
            m.second(a, b) = applied[a].dot(applied[b]).real();
            m.second(b, a) = m.second(a, b);
        }
    }
    return m;
}

namespace {

constexpr std::uint64_t kAxisDomain = 0x5eedaa15ULL;

double unbiased_variance(const std::vector<double>& xs, double mean) {
    if (xs.size() < 2) {
        return 0.0;
    }
    double acc = 0.0;
    for (double x : xs) {
        acc += (x - mean) * (x - mean);
    }
    return acc / static_cast<double>(xs.size() - 1);
}

double mean_of(const std::vector<double>& xs) {
    double acc = 0.0;
    for (double x : xs) {
        acc += x;
    }
    return xs.empty() ? 0.0 : acc / static_cast<double>(xs.size());
}

} // namespace

std::vector<QfiStats> qfi_convergence(const SpinSystem& sys, int n_steps_max, int n_circuits,
                                      int n_axes, double strength, std::uint64_t seed, int workers) {
    if (n_steps_max < 0 || n_circuits < 1 || n_axes < 1) {
        throw std::invalid_argument("qfi_convergence: counts must be >= 1 (steps >= 0)");
    }
    const auto ops = spin_operators(sys);
    const std::size_t steps = static_cast<std::size_t>(n_steps_max) + 1;

    std::vector<std::vector<UnitAxis>> axes(steps);
    for (std::size_t t = 0; t < steps; ++t) {
        RngStream rng(seed ^ kAxisDomain, t);
        for (int a = 0; a < n_axes; ++a) {
            axes[t].push_back(random_axis(rng));
        }
    }

    // qfi[c][t][a]
    std::vector<std::vector<std::vector<double>>> qfi(static_cast<std::size_t>(n_circuits));
    parallel_for(qfi.size(), workers, [&](std::size_t c) {
        RngStream rng(seed, c);
        const OatCircuit circuit = sample_oat_circuit(sys, n_steps_max, strength, rng);
        Ket psi = dicke_state(sys, sys.spin());
        auto& out = qfi[c];
        out.resize(steps);
        for (std::size_t t = 0; t < steps; ++t) {
            if (t > 0) {
                psi = twist_unitary(sys, circuit.axes[t - 1], strength) * psi;
            }
            const SpinMoments m = spin_moments(ops, psi);
            out[t].reserve(axes[t].size());
            for (const auto& n : axes[t]) {
                out[t].push_back(m.qfi(n));
            }
        }
    });

    std::vector<QfiStats> stats;
    for (std::size_t t = 0; t < steps; ++t) {
        double total = 0.0;
        double var_sum = 0.0;
        std::vector<double> column(static_cast<std::size_t>(n_circuits));
        for (int a = 0; a < n_axes; ++a) {
            for (int c = 0; c < n_circuits; ++c) {
                column[c] = qfi[c][t][a];
            }
            const double m = mean_of(column);
            total += m;
            var_sum += unbiased_variance(column, m);
        }
        stats.push_back({static_cast<int>(t), total / n_axes, std::sqrt(var_sum / n_axes), n_circuits,
                         n_axes});
    }
    return stats;
}

double EchoPointStats::sem_sz() const {
    return n_samples > 0 ? std::sqrt(var_circuits_sz / n_samples) : 0.0;
}

double EchoPointStats::sem_sz2() const {
    return n_samples > 0 ? std::sqrt(var_circuits_sz2 / n_samples) : 0.0;
}

EchoSweepResult echo_sweep(const SpinSystem& sys, const EnsembleConfig& ensemble,
                           const std::vector<double>& theta_grid, int n_circuits, std::uint64_t seed,
                           std::optional<UnitAxis> fixed_axis, int workers) {
    if (theta_grid.empty()) {
        throw std::invalid_argument("echo_sweep: theta grid is empty");
    }
    for (std::size_t i = 1; i < theta_grid.size(); ++i) {
        if (!(theta_grid[i] > theta_grid[i - 1])) {
            throw std::invalid_argument("echo_sweep: theta grid must be strictly increasing");
        }
    }
    if (n_circuits < 2) {
        throw std::invalid_argument("echo_sweep: need at least 2 circuits");
    }
    const auto ops = spin_operators(sys);
    const std::size_t n_theta = theta_grid.size();
    std::vector<std::vector<EchoMoments>> samples(static_cast<std::size_t>(n_circuits));
    parallel_for(samples.size(), workers, [&](std::size_t c) {
        RngStream rng(seed, c);
        const Matrix u = sample_scrambler(sys, ensemble, rng);
        const UnitAxis n = fixed_axis ? *fixed_axis : random_axis(rng);
        const EchoEvaluator echo(ops, u, n);
        samples[c].reserve(n_theta);
        for (double th : theta_grid) {
            samples[c].push_back(echo(th));
        }
    });

    EchoSweepResult result;
    result.sys = sys;
    result.seed = seed;
    result.ensemble = ensemble.kind;
    std::vector<double> sz(static_cast<std::size_t>(n_circuits));
    std::vector<double> sz2(static_cast<std::size_t>(n_circuits));
    for (std::size_t i = 0; i < n_theta; ++i) {
        for (std::size_t c = 0; c < samples.size(); ++c) {
            sz[c] = samples[c][i].mean_sz;
            sz2[c] = samples[c][i].mean_sz2;
        }
        EchoPointStats p;
        p.theta = theta_grid[i];
        p.x = sys.spin() * theta_grid[i];
        p.mean_sz = mean_of(sz);
        p.mean_sz2 = mean_of(sz2);
        p.var_circuits_sz = unbiased_variance(sz, p.mean_sz);
        p.var_circuits_sz2 = unbiased_variance(sz2, p.mean_sz2);
        p.n_samples = n_circuits;
        result.points.push_back(p);
    }
    if (n_theta >= 3) {
        const auto sens = sensitivity_from_sweep(result.points, sys.spin());
        result.sensitivity = sens.values;
        result.sensitivity_limit_flag = sens.limit_flag;
        for (double v : sens.values) {
            result.gain_db.push_back(metrological_gain(v, sys.n_particles()));
        }
    }
    return result;
}

SensitivityResult sensitivity_from_sweep(const std::vector<EchoPointStats>& points, double spin) {
    const std::size_t n = points.size();
    if (n < 3) {
        throw std::invalid_argument("sensitivity_from_sweep: need at least 3 grid points");
    }
    std::vector<double> deficit(n);
    std::vector<double> noise(n);
    for (std::size_t i = 0; i < n; ++i) {
        deficit[i] = spin - points[i].mean_sz;
        const double var = points[i].mean_sz2 - points[i].mean_sz * points[i].mean_sz;
        noise[i] = std::sqrt(std::max(var, 0.0));
    }
    const auto th = [&](std::size_t i) { return points[i].theta; };
    std::vector<double> slope(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (i == 0 || i == n - 1) {
            // one-sided three-point difference, mirrored at the upper end
            const bool lower = i == 0;
            const std::size_t a = lower ? 0 : n - 1;
            const std::size_t b = lower ? 1 : n - 2;
            const std::size_t c = lower ? 2 : n - 3;
            const double h1 = th(b) - th(a);
            const double h2 = th(c) - th(b);
            slope[i] = -(2.0 * h1 + h2) / (h1 * (h1 + h2)) * deficit[a] +
                       (h1 + h2) / (h1 * h2) * deficit[b] - h1 / (h2 * (h1 + h2)) * deficit[c];
        } else {
            const double h1 = th(i) - th(i - 1);
            const double h2 = th(i + 1) - th(i);
            slope[i] = -h2 / (h1 * (h1 + h2)) * deficit[i - 1] + (h2 - h1) / (h1 * h2) * deficit[i] +
                       h1 / (h2 * (h1 + h2)) * deficit[i + 1];
        }
    }
    const double noise_floor = 1e-6 * std::max(spin, 1.0);
    const double slope_floor = 1e-9 * std::max(spin, 1.0);
    SensitivityResult result;
    result.values.assign(n, 0.0);
    result.limit_flag.assign(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        if (noise[i] > noise_floor) {
            result.values[i] = std::abs(slope[i]) / noise[i];
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (noise[i] > noise_floor || std::abs(slope[i]) <= slope_floor) {
            continue;
        }
        // 0/0: take the limit from the nearest point with finite noise
        std::size_t best = n;
        for (std::size_t d = 1; d < n && best == n; ++d) {
            if (i + d < n && noise[i + d] > noise_floor) {
                best = i + d;
            } else if (i >= d && noise[i - d] > noise_floor) {
                best = i - d;
            }
        }
        if (best != n) {
            result.values[i] = result.values[best];
            result.limit_flag[i] = true;
        }
    }
    return result;
}

double metrological_gain(double inv_delta_theta, int n_particles) {
    return analytics::gain_db(inv_delta_theta, n_particles);
}

std::vector<UnitAxis> default_isotropy_axes() {
    return {UnitAxis::x_axis(), UnitAxis::y_axis(), UnitAxis::z_axis(),
            UnitAxis::normalized(1.0, 1.0, 1.0), UnitAxis::normalized(1.0, -2.0, 0.5)};
}

IsotropyReport moment_isotropy_check(const SpinSystem& sys, const EnsembleConfig& ensemble, int k,
                                     int n_circuits, const std::vector<UnitAxis>& axes,
                                     std::uint64_t seed, int workers) {
    if (k != 1 && k != 2) {
        throw std::invalid_argument("moment_isotropy_check: k must be 1 or 2");
    }
    if (n_circuits < 1 || axes.empty()) {
        throw std::invalid_argument("moment_isotropy_check: need circuits and axes");
    }
    const auto ops = spin_operators(sys);
    const int max_order = 2 * k;
    std::vector<Matrix> axis_ops;
    for (const auto& n : axes) {
        axis_ops.push_back(axis_operator(ops, n));
    }
    // values[c][t-1][a]
    std::vector<std::vector<std::vector<double>>> values(static_cast<std::size_t>(n_circuits));
    parallel_for(values.size(), workers, [&](std::size_t c) {
        RngStream rng(seed, c);
        const Matrix u = sample_scrambler(sys, ensemble, rng);
        const Ket psi = u.col(0);
        values[c].assign(static_cast<std::size_t>(max_order), std::vector<double>(axes.size()));
        for (std::size_t a = 0; a < axes.size(); ++a) {
            Ket v = psi;
            for (int t = 1; t <= max_order; ++t) {
                v = axis_ops[a] * v;
                values[c][t - 1][a] = psi.dot(v).real();
            }
        }
    });

    IsotropyReport report;
    report.axes = axes;
    std::vector<double> column(static_cast<std::size_t>(n_circuits));
    for (int t = 1; t <= max_order; ++t) {
        IsotropyOrder order;
        order.order = t;
        for (std::size_t a = 0; a < axes.size(); ++a) {
            for (std::size_t c = 0; c < column.size(); ++c) {
                column[c] = values[c][t - 1][a];
            }
            const double m = mean_of(column);
            order.axis_means.push_back(m);
            order.axis_sems.push_back(std::sqrt(unbiased_variance(column, m) / n_circuits));
        }
        order.common_mean = mean_of(order.axis_means);
        const double scale = std::pow(std::max(sys.spin(), 1.0), t);
        const auto z_score = [&](double diff, double sem) {
            if (std::abs(diff) <= 1e-12 * scale) {
                return 0.0;
            }
            return sem > 0.0 ? std::abs(diff) / sem : std::numeric_limits<double>::infinity();
        };
        for (std::size_t a = 0; a < axes.size(); ++a) {
            order.max_spread_z = std::max(
                order.max_spread_z, z_score(order.axis_means[a] - order.common_mean, order.axis_sems[a]));
            order.max_zero_z = std::max(order.max_zero_z, z_score(order.axis_means[a], order.axis_sems[a]));
        }
        report.max_anisotropy = std::max(report.max_anisotropy, order.max_spread_z);
        report.orders.push_back(std::move(order));
    }
    return report;
}

} // namespace bfecho
