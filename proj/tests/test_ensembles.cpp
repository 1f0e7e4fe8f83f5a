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

#include "bfecho/ensembles.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace bfecho;
using testsupport::Gen;

namespace {

Matrix identity(int d) { return Matrix::Identity(d, d); }

bool same_axes(const OatCircuit& a, const OatCircuit& b) {
    if (a.size() != b.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!(a.axes[i] == b.axes[i])) {
            return false;
        }
    }
    return true;
}

} // namespace

TEST_CASE("rng streams are keyed by seed and index") {
    RngStream a(42, 7);
    RngStream b(42, 7);
    RngStream c(42, 8);
    RngStream d(43, 7);
    bool differs_c = false;
    bool differs_d = false;
    for (int i = 0; i < 16; ++i) {
        const double x = a.normal();
        CHECK(x == b.normal());
        differs_c |= (x != c.normal());
        differs_d |= (x != d.normal());
    }
    CHECK(differs_c);
    CHECK(differs_d);

    RngStream s1 = RngStream(9, 1).substream(3);
    RngStream s2 = RngStream(9, 1).substream(3);
    RngStream s3 = RngStream(9, 1).substream(4);
    const double v = s1.uniform();
    CHECK(v == s2.uniform());
    CHECK(v != s3.uniform());
    CHECK(splitmix64(0) != splitmix64(1));
}

TEST_CASE("distinct streams are uncorrelated") {
    const int n = 20000;
    double sxy = 0.0;
    for (int i = 0; i < n; ++i) {
        RngStream x(5, 2 * i);
        RngStream y(5, 2 * i + 1);
        sxy += x.normal() * y.normal();
    }
    // Correlation of standard normals has standard error 1/sqrt(n).
    CHECK(std::abs(sxy / n) < 4.0 / std::sqrt(n));
}

TEST_CASE("Haar unitaries are unitary") {
    RngStream rng(1, 0);
    for (int d : {1, 2, 3, 7, 20, 51}) {
        const Matrix u = haar_unitary(d, rng);
        CHECK(max_abs(u * u.adjoint() - identity(d)) < 1e-12);
    }
    CHECK_THROWS_AS(haar_unitary(0, rng), std::invalid_argument);
}

TEST_CASE("Haar D=1 is a uniform phase") {
    RngStream rng(2, 0);
    Complex mean = 0.0;
    double mean_cos2 = 0.0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        const Complex z = haar_unitary(1, rng)(0, 0);
        CHECK(std::abs(std::abs(z) - 1.0) < 1e-14);
        mean += z;
        mean_cos2 += z.real() * z.real();
    }
    mean /= double(n);
    CHECK(std::abs(mean) < 4.0 / std::sqrt(n));
    CHECK(std::abs(mean_cos2 / n - 0.5) < 4.0 * std::sqrt(0.125 / n));
}

TEST_CASE("Haar first moment") {
    RngStream rng(3, 0);
    std::vector<double> xs;
    for (int i = 0; i < 10000; ++i) {
        xs.push_back(std::norm(haar_unitary(3, rng)(0, 0)));
    }
    const auto st = testsupport::stats(xs);
    CHECK(std::abs(st.mean - 1.0 / 3.0) < 3.0 * st.sem);
}

TEST_CASE("Haar scrambled polarized state averages to I/D") {
    const SpinSystem sys(12);
    const int d = sys.dim();
    const Ket top = dicke_state(sys, sys.spin());
    Matrix mean = Matrix::Zero(d, d);
    for (int i = 0; i < 300; ++i) {
        RngStream rng(4, i);
        const Ket psi = haar_unitary(d, rng) * top;
        mean += psi * psi.adjoint();
    }
    mean /= 300.0;
    CHECK(max_abs(mean - identity(d) / d) < 5.0 / std::sqrt(300.0) / d);
}

TEST_CASE("Haar second moment matches the two-design twirl") {
    for (int d : {2, 4, 6}) {
        Gen gen(100 + d);
        const Matrix a = gen.hermitian(d);
        const Matrix b = gen.hermitian(d);
        // E[(UAU^+)_{ij} (UBU^+)_{kl}] = alpha d_ij d_kl + beta d_il d_kj
        const double tr_x = (a.trace() * b.trace()).real();
        const double tr_xf = (a * b).trace().real();
        const double alpha = (tr_x - tr_xf / d) / (d * d - 1.0);
        const double beta = (tr_xf - tr_x / d) / (d * d - 1.0);

        struct Entry {
            int i, j, k, l;
        };
        const std::vector<Entry> entries = {{0, 0, 0, 0}, {0, 0, 1, 1}, {0, 1, 1, 0}, {0, 1, 0, 1}, {1, 0, 0, 1}};
        std::vector<std::vector<double>> samples(entries.size());
        const int m = 10000;
        for (int s = 0; s < m; ++s) {
            RngStream rng(77, static_cast<std::uint64_t>(d) * 100000 + s);
            const Matrix u = haar_unitary(d, rng);
            const Matrix ua = u * a * u.adjoint();
            const Matrix ub = u * b * u.adjoint();
            for (std::size_t e = 0; e < entries.size(); ++e) {
                const auto& en = entries[e];
                samples[e].push_back((ua(en.i, en.j) * ub(en.k, en.l)).real());
            }
        }
        for (std::size_t e = 0; e < entries.size(); ++e) {
            const auto& en = entries[e];
            const double expected = alpha * (en.i == en.j && en.k == en.l) + beta * (en.i == en.l && en.k == en.j);
            const auto st = testsupport::stats(samples[e]);
            CHECK(std::abs(st.mean - expected) < 5.0 * st.sem + 1e-12);
        }
    }
}

TEST_CASE("random axes are uniform on the sphere") {
    const int n = 100000;
    Eigen::Vector3d first = Eigen::Vector3d::Zero();
    Eigen::Matrix3d second = Eigen::Matrix3d::Zero();
    RngStream rng(8, 0);
    for (int i = 0; i < n; ++i) {
        const UnitAxis a = random_axis(rng);
        const Eigen::Vector3d v(a.x(), a.y(), a.z());
        first += v;
        second += v * v.transpose();
    }
    first /= n;
    second /= n;
    for (int i = 0; i < 3; ++i) {
        CHECK(std::abs(first(i)) < 0.01);
        for (int j = 0; j < 3; ++j) {
            CHECK(std::abs(second(i, j) - (i == j ? 1.0 / 3.0 : 0.0)) < 0.01);
        }
    }
    RngStream r1(8, 1);
    RngStream r2(8, 1);
    CHECK(random_axis(r1) == random_axis(r2));
}

TEST_CASE("OAT circuit sampling") {
    const SpinSystem sys(100);
    CHECK(std::abs(default_twist_strength(100) - std::numbers::pi / 20) < 1e-15);
    RngStream rng(10, 0);
    const OatCircuit empty = sample_oat_circuit(sys, 0, 0.1, rng);
    CHECK(empty.size() == 0);
    CHECK(max_abs(oat_unitary(empty) - identity(sys.dim())) == 0.0);

    RngStream r1(10, 3);
    RngStream r2(10, 3);
    const OatCircuit c1 = sample_oat_circuit(sys, 8, 0.2, r1);
    const OatCircuit c2 = sample_oat_circuit(sys, 8, 0.2, r2);
    CHECK(c1.size() == 8);
    CHECK(same_axes(c1, c2));
    CHECK(c1.strength == 0.2);

    CHECK_THROWS_AS(sample_oat_circuit(sys, -1, 0.1, rng), std::invalid_argument);
    CHECK_THROWS_AS(sample_oat_circuit(sys, 2, NAN, rng), std::invalid_argument);
}

TEST_CASE("OAT application") {
    const SpinSystem sys(9);
    const SpinOperators ops = spin_operators(sys);
    Gen gen(12);
    RngStream rng(11, 0);
    const OatCircuit circuit = sample_oat_circuit(sys, 6, default_twist_strength(9), rng);
    const Ket psi = gen.ket(sys.dim());
    const Ket fwd = apply_oat(circuit, psi, Direction::forward);
    CHECK(std::abs(fwd.norm() - 1.0) < 1e-12);
    CHECK((apply_oat(circuit, fwd, Direction::reverse) - psi).norm() < 1e-10);
    CHECK((oat_unitary(circuit) * psi - fwd).norm() < 1e-10);
    CHECK((oat_unitary(circuit).adjoint() * psi - apply_oat(circuit, psi, Direction::reverse)).norm() < 1e-10);

    // Product of independent exponentials of S_n^2.
    Matrix ref = identity(sys.dim());
    for (const auto& a : circuit.axes) {
        const Matrix sn = axis_operator(ops, a);
        ref = testsupport::expm_unitary(sn * sn, circuit.strength) * ref;
    }
    CHECK(max_abs(oat_unitary(circuit) - ref) < 1e-10);

    OatCircuit z_twist{sys, 0.4, {UnitAxis::z_axis()}};
    const Ket top = dicke_state(sys, sys.spin());
    CHECK(std::abs(std::abs(top.dot(apply_oat(z_twist, top, Direction::forward))) - 1.0) < 1e-12);
    const Ket cx = coherent_state(sys, UnitAxis::x_axis());
    const Ket twisted = apply_oat(z_twist, cx, Direction::forward);
    CHECK(std::abs(twisted.dot(ops.sz * twisted) - cx.dot(ops.sz * cx)) < 1e-10);

    CHECK_THROWS_AS(apply_oat(circuit, gen.ket(4), Direction::forward), std::invalid_argument);
}

TEST_CASE("OAT circuit JSON round trip") {
    RngStream rng(13, 0);
    const OatCircuit c = sample_oat_circuit(SpinSystem(6), 5, 0.3, rng);
    const OatCircuit back = circuit_from_json(nlohmann::json::parse(circuit_to_json(c).dump()));
    CHECK(back.sys == c.sys);
    CHECK(back.strength == c.strength);
    CHECK(same_axes(back, c));
}

TEST_CASE("Brownian steps") {
    const SpinSystem sys(4);
    RngStream rng(14, 0);
    const Matrix tiny = sample_brownian_step(sys, 1e-20, 0.01, rng);
    CHECK(max_abs(tiny - identity(sys.dim())) < 1e-8);
    const Matrix step = sample_brownian_step(sys, 1.0, 0.01, rng);
    CHECK(max_abs(step * step.adjoint() - identity(sys.dim())) < 1e-12);

    const auto c = sample_brownian_couplings(sys, 1.0, 0.01, rng);
    CHECK(c.j_matrix == c.j_matrix.transpose());
    const Matrix h = brownian_hamiltonian(spin_operators(sys), c);
    CHECK(max_abs(h - h.adjoint()) < 1e-12);

    CHECK_THROWS_AS(sample_brownian_couplings(sys, 1.0, 0.0, rng), std::invalid_argument);
    CHECK_THROWS_AS(sample_brownian_couplings(sys, -1.0, 0.1, rng), std::invalid_argument);
}

TEST_CASE("Brownian coupling covariance") {
    const SpinSystem sys(6);
    const double rate = 1.3;
    const double dt = 0.02;
    const double scale = rate / (sys.spin() * sys.spin() * dt);
    RngStream rng(15, 0);
    const int n = 100000;
    double xy = 0, xx = 0, xy_xz = 0, xx_yy = 0;
    for (int i = 0; i < n; ++i) {
        const auto c = sample_brownian_couplings(sys, rate, dt, rng);
        xy += c.j_matrix(0, 1) * c.j_matrix(0, 1);
        xx += c.j_matrix(0, 0) * c.j_matrix(0, 0);
        xy_xz += c.j_matrix(0, 1) * c.j_matrix(0, 2);
        xx_yy += c.j_matrix(0, 0) * c.j_matrix(1, 1);
    }
    CHECK(std::abs(xy / n / scale - 1.0) < 0.05);
    CHECK(std::abs(xx / n / (2.0 * scale) - 1.0) < 0.05);
    CHECK(std::abs(xy_xz / n / scale) < 0.05);
    CHECK(std::abs(xx_yy / n / scale) < 0.05);
}

TEST_CASE("ensemble names and scramblers") {
    for (auto k : {EnsembleKind::haar, EnsembleKind::oat, EnsembleKind::brownian, EnsembleKind::identity}) {
        CHECK(parse_ensemble(to_string(k)) == k);
    }
    CHECK_THROWS_AS(parse_ensemble("gue"), std::invalid_argument);

    const SpinSystem sys(5);
    for (auto k : {EnsembleKind::haar, EnsembleKind::oat, EnsembleKind::brownian}) {
        EnsembleConfig cfg;
        cfg.kind = k;
        cfg.brownian_time = 0.5;
        RngStream r1(16, 2);
        RngStream r2(16, 2);
        const Matrix u1 = sample_scrambler(sys, cfg, r1);
        CHECK(max_abs(u1 * u1.adjoint() - identity(sys.dim())) < 1e-11);
        CHECK(max_abs(u1 - sample_scrambler(sys, cfg, r2)) == 0.0);
    }
    EnsembleConfig id;
    id.kind = EnsembleKind::identity;
    RngStream rng(16, 0);
    CHECK(max_abs(sample_scrambler(sys, id, rng) - identity(sys.dim())) == 0.0);
}
