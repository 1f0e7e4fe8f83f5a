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
#include "bfecho/echo.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace bfecho;
using testsupport::Gen;

namespace {

constexpr double kPi = std::numbers::pi;

UnitAxis axis_from(const std::array<double, 3>& v) { return UnitAxis::normalized(v[0], v[1], v[2]); }

// |chi> = U^+ exp(-i S_n theta) U |S,S>, with the rotation from the Pade exponential.
EchoMoments echo_oracle(const SpinSystem& sys, const Matrix& u, const UnitAxis& n, double theta) {
    const auto sp = testsupport::naive_spin(sys.n_particles());
    const Matrix sn = n.x() * sp.sx + n.y() * sp.sy + n.z() * sp.sz;
    Ket top = Ket::Zero(sys.dim());
    top(0) = 1.0;
    const Ket chi = u.adjoint() * testsupport::expm_unitary(sn, theta) * u * top;
    return {chi.dot(sp.sz * chi).real(), chi.dot(sp.sz * sp.sz * chi).real()};
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v;
    for (int i = 0; i < n; ++i) {
        v.push_back(a + (b - a) * i / (n - 1));
    }
    return v;
}

} // namespace

TEST_CASE("perfect echo at zero angle") {
    const SpinSystem sys(11);
    for (auto kind : {EnsembleKind::haar, EnsembleKind::oat, EnsembleKind::brownian}) {
        EnsembleConfig cfg;
        cfg.kind = kind;
        cfg.brownian_time = 1.0;
        for (int i = 0; i < 5; ++i) {
            RngStream rng(1, i);
            const Matrix u = sample_scrambler(sys, cfg, rng);
            const auto m = run_echo(sys, u, UnitAxis::normalized(1, 2, 3), 0.0);
            CHECK(std::abs(m.mean_sz - 5.5) < 1e-10);
            CHECK(std::abs(m.mean_sz2 - 30.25) < 1e-10);
        }
    }
}

TEST_CASE("identity scrambler precesses a coherent state") {
    const SpinSystem sys(8);
    const Matrix id = Matrix::Identity(9, 9);
    for (double theta : {0.1, 0.7, 2.0, 3.0}) {
        for (const auto& n : {UnitAxis::x_axis(), UnitAxis::y_axis(), UnitAxis::normalized(1, -1, 0)}) {
            CHECK(std::abs(run_echo(sys, id, n, theta).mean_sz - 4.0 * std::cos(theta)) < 1e-10);
        }
    }
}

TEST_CASE("echo matches a direct propagation oracle") {
    Gen gen(3);
    for (int trial = 0; trial < 30; ++trial) {
        const SpinSystem sys(gen.integer(1, 20));
        RngStream rng(3, trial);
        const Matrix u = haar_unitary(sys.dim(), rng);
        const UnitAxis n = axis_from(gen.direction());
        const double theta = gen.uniform(-1.0, 3.0);
        const auto ref = echo_oracle(sys, u, n, theta);
        const auto direct = run_echo(sys, u, n, theta);
        const auto fast = EchoEvaluator(spin_operators(sys), u, n)(theta);
        CHECK(std::abs(direct.mean_sz - ref.mean_sz) < 1e-10);
        CHECK(std::abs(direct.mean_sz2 - ref.mean_sz2) < 1e-9);
        CHECK(std::abs(fast.mean_sz - ref.mean_sz) < 1e-10);
        CHECK(std::abs(fast.mean_sz2 - ref.mean_sz2) < 1e-9);
    }
}

TEST_CASE("circuit and matrix scramblers agree") {
    const SpinSystem sys(10);
    RngStream rng(4, 0);
    const OatCircuit c = sample_oat_circuit(sys, 5, default_twist_strength(10), rng);
    const Matrix u = oat_unitary(c);
    for (double theta : {0.0, 0.05, 0.3}) {
        const auto a = run_echo(sys, c, UnitAxis::y_axis(), theta);
        const auto b = run_echo(sys, u, UnitAxis::y_axis(), theta);
        CHECK(std::abs(a.mean_sz - b.mean_sz) < 1e-10);
        CHECK(std::abs(a.mean_sz2 - b.mean_sz2) < 1e-9);
    }
    CHECK_THROWS_AS(run_echo(SpinSystem(9), c, UnitAxis::y_axis(), 0.1), std::invalid_argument);
    CHECK_THROWS_AS(run_echo(SpinSystem(9), u, UnitAxis::y_axis(), 0.1), std::invalid_argument);
}

TEST_CASE("echo moments stay within spin bounds") {
    Gen gen(5);
    for (int trial = 0; trial < 200; ++trial) {
        const SpinSystem sys(gen.integer(1, 30));
        RngStream rng(5, trial);
        const EchoEvaluator echo(spin_operators(sys), haar_unitary(sys.dim(), rng), axis_from(gen.direction()));
        const auto m = echo(gen.uniform(-10.0, 10.0));
        const double s = sys.spin();
        CHECK(std::abs(m.mean_sz) <= s + 1e-10);
        CHECK(m.mean_sz2 >= -1e-10);
        CHECK(m.mean_sz2 <= s * s + 1e-10);
        CHECK(m.mean_sz2 >= m.mean_sz * m.mean_sz - 1e-9);
    }
}

TEST_CASE("Haar average at a quarter turn matches the closed form") {
    const SpinSystem sys(20);
    const double theta = kPi / (2 * sys.spin());
    const auto r = echo_sweep(sys, EnsembleConfig{}, {theta}, 500, 6);
    REQUIRE(r.points.size() == 1);
    CHECK(r.sensitivity.empty());
    const auto& p = r.points[0];
    CHECK(std::abs(p.mean_sz - analytics::clean_signal(10.0, theta)) < 3 * p.sem_sz());
    CHECK(std::abs(p.mean_sz2 - analytics::clean_second_moment(10.0, theta)) < 3 * p.sem_sz2());
}

TEST_CASE("Haar average at S=10, theta=0.05 with 10^4 circuits") {
    const SpinSystem sys(20);
    const auto r = echo_sweep(sys, EnsembleConfig{}, {0.05}, 10000, 7);
    const auto& p = r.points[0];
    CHECK(std::abs(p.mean_sz - analytics::clean_signal(10.0, 0.05)) < 3 * p.sem_sz());
}

TEST_CASE("probe QFI") {
    const SpinSystem sys(12);
    const auto ops = spin_operators(sys);
    const Ket top = dicke_state(sys, 6.0);
    CHECK(std::abs(probe_qfi(sys, top, UnitAxis::z_axis())) < 1e-12);
    CHECK(std::abs(probe_qfi(sys, top, UnitAxis::x_axis()) - 12.0) < 1e-10);
    const Ket ghz = (top + dicke_state(sys, -6.0)) / std::sqrt(2.0);
    CHECK(std::abs(probe_qfi(sys, ghz, UnitAxis::z_axis()) - 144.0) < 1e-10);

    Gen gen(8);
    for (int trial = 0; trial < 50; ++trial) {
        const Ket psi = gen.ket(sys.dim());
        const UnitAxis n = axis_from(gen.direction());
        const double direct = probe_qfi(ops, psi, n);
        CHECK(direct >= 0.0);
        CHECK(std::abs(spin_moments(ops, psi).qfi(n) - direct) < 1e-9);
        // Explicit 4 (<S_n^2> - <S_n>^2) from the naive operators
        const auto sp = testsupport::naive_spin(12);
        const Matrix sn = n.x() * sp.sx + n.y() * sp.sy + n.z() * sp.sz;
        const double mean = psi.dot(sn * psi).real();
        CHECK(std::abs(4 * (psi.dot(sn * sn * psi).real() - mean * mean) - direct) < 1e-9);
    }
}

TEST_CASE("Haar QFI mean is N(N+1)/3") {
    for (int n : {4, 10}) {
        const SpinSystem sys(n);
        const auto ops = spin_operators(sys);
        std::vector<double> xs;
        for (int i = 0; i < 4000; ++i) {
            RngStream rng(9, i);
            const Ket psi = haar_unitary(sys.dim(), rng).col(0);
            xs.push_back(probe_qfi(ops, psi, UnitAxis::z_axis()));
        }
        const auto st = testsupport::stats(xs);
        CHECK(std::abs(st.mean - analytics::haar_qfi_mean(n)) < 3 * st.sem);
    }
}

TEST_CASE("QFI convergence of the polarized state at step 0") {
    const SpinSystem sys(12);
    const auto stats = qfi_convergence(sys, 0, 3, 20000, 0.1, 10);
    REQUIRE(stats.size() == 1);
    CHECK(stats[0].std_qfi < 1e-12);
    // Axis quadrature of 4 Var(S_n) = 2S (1 - n_z^2) on a polar midpoint grid.
    const int m = 2000;
    double acc = 0.0;
    for (int i = 0; i < m; ++i) {
        const double z = -1.0 + (i + 0.5) * 2.0 / m;
        acc += 2 * sys.spin() * (1 - z * z);
    }
    const double quadrature = acc / m;
    CHECK(std::abs(quadrature - 8.0) < 1e-5);
    CHECK(std::abs(stats[0].mean_qfi / quadrature - 1.0) < 0.02);
}

TEST_CASE("QFI convergence approaches the Haar values") {
    const SpinSystem sys(12);
    const auto stats = qfi_convergence(sys, 8, 300, 1000, default_twist_strength(12), 11);
    REQUIRE(stats.size() == 9);
    CHECK(std::abs(stats[8].mean_qfi / 52.0 - 1.0) < 0.05);
    CHECK(std::abs(stats[8].std_qfi / analytics::haar_qfi_std(12) - 1.0) < 0.25);
    for (const auto& s : stats) {
        CHECK(s.mean_qfi >= 0.0);
        CHECK(s.mean_qfi <= 144.0);
        CHECK(s.n_circuits == 300);
        CHECK(s.n_axes == 1000);
    }
    CHECK_THROWS_AS(qfi_convergence(sys, -1, 3, 3, 0.1, 1), std::invalid_argument);
    CHECK_THROWS_AS(qfi_convergence(sys, 2, 0, 3, 0.1, 1), std::invalid_argument);
}

TEST_CASE("Monte Carlo results do not depend on the worker count") {
    const SpinSystem sys(8);
    const auto a = qfi_convergence(sys, 4, 17, 50, 0.3, 12, 1);
    const auto b = qfi_convergence(sys, 4, 17, 50, 0.3, 12, 4);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].mean_qfi == b[i].mean_qfi);
        CHECK(a[i].std_qfi == b[i].std_qfi);
    }
    EnsembleConfig cfg;
    cfg.kind = EnsembleKind::oat;
    const auto grid = linspace(0.0, 0.5, 7);
    const auto s1 = echo_sweep(sys, cfg, grid, 13, 14, std::nullopt, 1);
    const auto s3 = echo_sweep(sys, cfg, grid, 13, 14, std::nullopt, 3);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(s1.points[i].mean_sz == s3.points[i].mean_sz);
        CHECK(s1.points[i].var_circuits_sz == s3.points[i].var_circuits_sz);
        CHECK(s1.sensitivity[i] == s3.sensitivity[i]);
    }
}

TEST_CASE("echo sweep edge cases") {
    const SpinSystem sys(2);
    const auto single = echo_sweep(sys, EnsembleConfig{}, {0.0}, 10, 1);
    CHECK(std::abs(single.points[0].mean_sz - 1.0) < 1e-12);
    CHECK(single.points[0].var_circuits_sz < 1e-12);
    CHECK(single.points[0].n_samples == 10);
    CHECK_THROWS_AS(echo_sweep(sys, EnsembleConfig{}, {}, 10, 1), std::invalid_argument);
    CHECK_THROWS_AS(echo_sweep(sys, EnsembleConfig{}, {0.1, 0.1}, 10, 1), std::invalid_argument);
    CHECK_THROWS_AS(echo_sweep(sys, EnsembleConfig{}, {0.2, 0.1}, 10, 1), std::invalid_argument);
    CHECK_THROWS_AS(echo_sweep(sys, EnsembleConfig{}, {0.1}, 1, 1), std::invalid_argument);
}

TEST_CASE("flat signal has zero sensitivity") {
    EnsembleConfig cfg;
    cfg.kind = EnsembleKind::identity;
    const auto r = echo_sweep(SpinSystem(6), cfg, linspace(0.0, 1.0, 11), 2, 1, UnitAxis::z_axis());
    for (std::size_t i = 0; i < r.sensitivity.size(); ++i) {
        CHECK(r.sensitivity[i] == 0.0);
        CHECK_FALSE(r.sensitivity_limit_flag[i]);
        CHECK(std::isinf(r.gain_db[i]));
    }
}

TEST_CASE("sensitivity from closed-form moments") {
    const int n = 1000;
    const double s = 0.5 * n;
    // fine grid around x = 0.5 and a coarse start at theta = 0
    std::vector<EchoPointStats> pts;
    for (int i = 0; i <= 400; ++i) {
        EchoPointStats p;
        p.theta = (1.0 / s) * i / 400.0;
        p.x = s * p.theta;
        p.mean_sz = analytics::clean_signal(s, p.theta);
        p.mean_sz2 = analytics::clean_second_moment(s, p.theta);
        p.n_samples = 1;
        pts.push_back(p);
    }
    const auto sens = sensitivity_from_sweep(pts, s);
    REQUIRE(sens.values.size() == pts.size());
    const double at_half = sens.values[200];
    CHECK(std::abs(pts[200].x - 0.5) < 1e-12);
    CHECK(std::abs(at_half / analytics::angular_sensitivity(n, 0.5, 0.0) - 1.0) < 0.01);
    CHECK(sens.limit_flag[0]);
    CHECK(sens.values[0] == sens.values[1]);
    CHECK(std::abs(sens.values[1] / 500.0 - 1.0) < 0.1);
    for (std::size_t i = 1; i < pts.size(); ++i) {
        CHECK_FALSE(sens.limit_flag[i]);
    }

    // Rescaling the signal and its noise together leaves the ratio unchanged.
    std::vector<EchoPointStats> scaled = pts;
    for (auto& p : scaled) {
        p.mean_sz *= 3.0;
        p.mean_sz2 *= 9.0;
    }
    const auto sens3 = sensitivity_from_sweep(scaled, 3.0 * s);
    for (std::size_t i = 1; i < pts.size(); ++i) {
        CHECK(std::abs(sens3.values[i] / sens.values[i] - 1.0) < 1e-9);
    }

    std::vector<EchoPointStats> two(pts.begin(), pts.begin() + 2);
    CHECK_THROWS_AS(sensitivity_from_sweep(two, s), std::invalid_argument);
}

TEST_CASE("Haar sweep recovers N/2 near zero angle") {
    const SpinSystem sys(100);
    const double bw = analytics::bandwidth(100);
    const auto r = echo_sweep(sys, EnsembleConfig{}, linspace(0.0, bw, 41), 100, 15);
    CHECK(r.sensitivity_limit_flag[0]);
    CHECK(std::abs(r.sensitivity[1] / 50.0 - 1.0) < 0.1);
    CHECK(r.gain_db[0] == r.gain_db[1]);
}

TEST_CASE("metrological gain") {
    CHECK(std::abs(metrological_gain(std::sqrt(50.0), 50)) < 1e-12);
    CHECK(std::abs(metrological_gain(50.0, 50) - 10 * std::log10(50.0)) < 1e-12);
    CHECK(std::abs(metrological_gain(500.0, 1000) - 23.98) < 0.01);
}

TEST_CASE("Haar probes are isotropic") {
    const SpinSystem sys(12);
    const auto rep = moment_isotropy_check(sys, EnsembleConfig{}, 2, 2000, default_isotropy_axes(), 16);
    REQUIRE(rep.orders.size() == 4);
    CHECK(rep.orders[0].max_zero_z < 3.0);
    CHECK(rep.orders[1].max_spread_z < 3.0);
    const double expected = 6.0 * 7.0 / 3.0;
    CHECK(std::abs(rep.orders[1].common_mean - expected) < 3.0 * rep.orders[1].axis_sems[0]);
    CHECK(rep.max_anisotropy < 3.5);
}

TEST_CASE("the polarized state is not isotropic") {
    EnsembleConfig cfg;
    cfg.kind = EnsembleKind::identity;
    const auto rep = moment_isotropy_check(SpinSystem(12), cfg, 2, 4, default_isotropy_axes(), 1);
    // <S_z^2> = S^2 against <S_x^2> = S/2, with no circuit spread at all
    CHECK(std::abs(rep.orders[1].axis_means[2] - 36.0) < 1e-10);
    CHECK(std::abs(rep.orders[1].axis_means[0] - 3.0) < 1e-10);
    CHECK(std::isinf(rep.max_anisotropy));
    CHECK_THROWS_AS(moment_isotropy_check(SpinSystem(4), cfg, 3, 4, default_isotropy_axes(), 1),
                    std::invalid_argument);
}
