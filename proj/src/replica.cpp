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

#include "bfecho/replica.hpp"

#include "bfecho/analytics.hpp"

#include <algorithm>
#include <cmath>

namespace bfecho {

ReplicaSystem::ReplicaSystem(const SpinSystem& base_sys, int k_pairs) : base(base_sys), k(k_pairs) {
    if (k != 1 && k != 2) {
        throw std::invalid_argument("ReplicaSystem: k must be 1 or 2");
    }
}

std::size_t ReplicaSystem::dim() const {
    std::size_t d = 1;
    for (int r = 0; r < 2 * k; ++r) {
        d *= static_cast<std::size_t>(base.dim());
    }
    return d;
}

namespace {

struct RealSpin {
    RealMatrix x, k, z; // S_y = -i K
};

RealSpin real_spin(const SpinSystem& sys) {
    const auto ops = spin_operators(sys);
    const RealMatrix sp = ops.sp.real();
    const RealMatrix sm = ops.sm.real();
    return {0.5 * (sp + sm), 0.5 * (sp - sm), ops.sz.real()};
}

RealMatrix kron(const RealMatrix& a, const RealMatrix& b) {
    RealMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

/// S_a . S_b on two copies, D^2 x D^2.
RealMatrix dot_pair(const RealSpin& s) {
    return kron(s.x, s.x) - kron(s.k, s.k) + kron(s.z, s.z);
}

/// out += scale * (pair operator p on slots i < j).
void add_embedded(RealMatrix& out, int d, int n_slots, int i, int j, const RealMatrix& p, double scale) {
    std::vector<std::size_t> stride(static_cast<std::size_t>(n_slots));
    std::size_t s = 1;
    for (int r = n_slots - 1; r >= 0; --r) {
        stride[r] = s;
        s *= static_cast<std::size_t>(d);
    }
    const std::size_t dim = s;
    const std::size_t si = stride[i];
    const std::size_t sj = stride[j];
    for (std::size_t idx = 0; idx < dim; ++idx) {
        const auto di = static_cast<int>((idx / si) % d);
        const auto dj = static_cast<int>((idx / sj) % d);
        const std::size_t rest = idx - di * si - dj * sj;
        const int row = di * d + dj;
        for (int q = 0; q < d * d; ++q) {
            const double v = p(row, q);
            if (v != 0.0) {
                out(idx, rest + (q / d) * si + (q % d) * sj) += scale * v;
            }
        }
    }
}

std::size_t replica_dim(const SpinSystem& base, int k) {
    return ReplicaSystem(base, k).dim();
}

RealVector two_singlet(int d) {
    RealVector v = RealVector::Zero(d * d);
    for (int i = 0; i < d; ++i) {
        v(i * d + (d - 1 - i)) = (i % 2 == 0 ? 1.0 : -1.0) / std::sqrt(static_cast<double>(d));
    }
    return v;
}

} // namespace

RealMatrix build_heff(const SpinSystem& base, int k, double coupling, std::size_t max_dim) {
    const std::size_t dim = replica_dim(base, k);
    if (dim > max_dim) {
        throw NumericalGuardError("build_heff: replica dimension " + std::to_string(dim) +
                                  " exceeds the cap " + std::to_string(max_dim));
    }
    const int d = base.dim();
    const double spin = base.spin();
    const double cas = spin * (spin + 1.0);
    const RealSpin s = real_spin(base);
    const RealMatrix t = dot_pair(s);
    const RealMatrix pair = 2.0 * t * t + t;
    const int n_slots = 2 * k;

    RealMatrix h = RealMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    h.diagonal().setConstant(n_slots * (2.0 * cas * cas - cas));
    for (int i = 0; i < n_slots; ++i) {
        for (int j = i + 1; j < n_slots; ++j) {
            const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
            add_embedded(h, d, n_slots, i, j, pair, 2.0 * sign);
        }
    }
    h *= coupling / (2.0 * spin * spin);
    return 0.5 * (h + h.transpose());
}

SpectrumReport cluster_spectrum(std::vector<double> eigenvalues, double rel_tol) {
    SpectrumReport report;
    report.dim = eigenvalues.size();
    if (eigenvalues.empty()) {
        return report;
    }
    std::sort(eigenvalues.begin(), eigenvalues.end());
    double scale = 0.0;
    for (double e : eigenvalues) {
        scale = std::max(scale, std::abs(e));
    }
    const double tol = rel_tol * (scale > 0.0 ? scale : 1.0);
    double sum = eigenvalues[0];
    int count = 1;
    for (std::size_t i = 1; i <= eigenvalues.size(); ++i) {
        if (i < eigenvalues.size() && eigenvalues[i] - eigenvalues[i - 1] <= tol) {
            sum += eigenvalues[i];
            ++count;
            continue;
        }
        report.levels.push_back({sum / count, count});
        if (i < eigenvalues.size()) {
            sum = eigenvalues[i];
            count = 1;
        }
    }
    if (report.levels.size() > 1) {
        report.gap = report.levels[1].energy - report.levels[0].energy;
    }
    return report;
}

SpectrumReport heff_spectrum(const RealMatrix& h, double rel_tol) {
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(h, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
        throw NumericalGuardError("heff_spectrum: eigensolver failed");
    }
    const RealVector& e = es.eigenvalues();
    return cluster_spectrum(std::vector<double>(e.data(), e.data() + e.size()), rel_tol);
}

double exact_level_k1(double spin, int j, double coupling) {
    const double jj = j * (j + 1.0);
    return coupling / (2.0 * spin * spin) * jj * (4.0 * spin * (spin + 1.0) - jj - 1.0);
}

SpectrumReport exact_spectrum_k1(double spin, double coupling) {
    const auto two_s = static_cast<int>(std::lround(2.0 * spin));
    if (two_s < 1 || std::abs(two_s - 2.0 * spin) > 1e-12) {
        throw std::invalid_argument("exact_spectrum_k1: S must be a positive multiple of 1/2");
    }
    std::vector<double> levels;
    for (int j = 0; j <= two_s; ++j) {
        const double e = exact_level_k1(spin, j, coupling);
        levels.insert(levels.end(), static_cast<std::size_t>(2 * j + 1), e);
    }
    return cluster_spectrum(std::move(levels));
}

GapReport verify_gap_constancy(const std::vector<double>& spins, double coupling) {
    if (spins.empty()) {
        throw std::invalid_argument("verify_gap_constancy: spin list is empty");
    }
    GapReport report;
    report.all_match = true;
    for (double spin : spins) {
        const SpinSystem sys(static_cast<int>(std::lround(2.0 * spin)));
        if (std::abs(sys.spin() - spin) > 1e-12) {
            throw std::invalid_argument("verify_gap_constancy: S must be a positive multiple of 1/2");
        }
        GapRow row;
        row.spin = spin;
        row.gap_numeric = heff_spectrum(build_heff(sys, 1, coupling)).gap;
        row.gap_exact = exact_spectrum_k1(spin, coupling).gap;
        row.e1_exact = exact_level_k1(spin, 1, coupling);
        row.matches = std::abs(row.gap_numeric - row.gap_exact) < 1e-8 * std::abs(coupling);
        report.all_match = report.all_match && row.matches;
        report.rows.push_back(row);
    }
    report.monotone_toward_4j = true;
    for (std::size_t i = 1; i < report.rows.size(); ++i) {
        if (!(std::abs(report.rows[i].gap_numeric - 4.0 * coupling) <
              std::abs(report.rows[i - 1].gap_numeric - 4.0 * coupling))) {
            report.monotone_toward_4j = false;
        }
    }
    return report;
}

std::vector<double> mean_field_energies_k2(double spin, double coupling,
                                           const std::vector<std::pair<int, int>>& j_pairs) {
    std::vector<double> out;
    const double pref = coupling / (2.0 * spin * spin) * (4.0 * spin * (spin + 1.0) - 1.0);
    for (const auto& [j1, j2] : j_pairs) {
        if (j1 < 0 || j2 < 0 || j1 > 2.0 * spin + 1e-12 || j2 > 2.0 * spin + 1e-12) {
            throw std::invalid_argument("mean_field_energies_k2: need 0 <= j <= 2S");
        }
        out.push_back(pref * (j1 * (j1 + 1.0) + j2 * (j2 + 1.0)));
    }
    return out;
}

RealVector pairing_state(const SpinSystem& base, int a1, int b1, int a2, int b2) {
    const int slots[4] = {a1, b1, a2, b2};
    for (int r = 0; r < 4; ++r) {
        if (slots[r] < 0 || slots[r] > 3) {
            throw std::invalid_argument("pairing_state: slots must lie in 0..3");
        }
        for (int q = 0; q < r; ++q) {
            if (slots[q] == slots[r]) {
                throw std::invalid_argument("pairing_state: slots must be distinct");
            }
        }
    }
    const int d = base.dim();
    const RealVector singlet = two_singlet(d);
    const std::size_t dim = replica_dim(base, 2);
    RealVector out(static_cast<Eigen::Index>(dim));
    int digit[4];
    for (std::size_t idx = 0; idx < dim; ++idx) {
        std::size_t rem = idx;
        for (int r = 3; r >= 0; --r) {
            digit[r] = static_cast<int>(rem % d);
            rem /= d;
        }
        out(static_cast<Eigen::Index>(idx)) = singlet(digit[a1] * d + digit[b1]) * singlet(digit[a2] * d + digit[b2]);
    }
    return out;
}

int null_space_dim(const RealMatrix& h, double rel_tol) {
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(h, Eigen::EigenvaluesOnly);
    const RealVector& e = es.eigenvalues();
    const double scale = std::max(e.cwiseAbs().maxCoeff(), 1e-300);
    int count = 0;
    for (Eigen::Index i = 0; i < e.size(); ++i) {
        if (std::abs(e(i)) <= rel_tol * scale) {
            ++count;
        }
    }
    return count;
}

PerturbationReport perturbation_check(const SpinSystem& base, std::size_t max_dim) {
    const RealMatrix h = build_heff(base, 2, 1.0, max_dim);
    const int d = base.dim();
    const double spin = base.spin();
    const double cas = spin * (spin + 1.0);

    RealMatrix pair = dot_pair(real_spin(base));
    pair.diagonal().array() += cas;
    RealMatrix v = RealMatrix::Zero(h.rows(), h.cols());
    add_embedded(v, d, 4, 0, 1, pair, 1.0);
    add_embedded(v, d, 4, 2, 3, pair, 1.0);

    const RealVector alpha = pairing_state(base, 0, 1, 2, 3);
    const RealVector beta = pairing_state(base, 0, 3, 2, 1);
    PerturbationReport r;
    r.spin = spin;
    r.overlap = alpha.dot(beta);
    r.expected_overlap = 1.0 / d;
    r.h_alpha = (h * alpha).norm();
    r.h_beta = (h * beta).norm();
    RealVector mu = beta - r.overlap * alpha;
    mu.normalize();
    r.v_alpha_alpha = alpha.dot(v * alpha);
    r.v_alpha_mu = alpha.dot(v * mu);
    r.v_mu_mu = mu.dot(v * mu);
    r.expected_v_mu_mu = analytics::noise_constant(spin);
    r.null_dim = null_space_dim(h);
    r.passed = std::abs(std::abs(r.overlap) - r.expected_overlap) < 1e-10 && r.h_alpha < 1e-8 &&
               r.h_beta < 1e-8 && std::abs(r.v_alpha_alpha) < 1e-9 && std::abs(r.v_alpha_mu) < 1e-9 &&
               std::abs(r.v_mu_mu - r.expected_v_mu_mu) < 1e-8 && r.null_dim == 2;
    return r;
}

CorrespondenceReport roat_brownian_correspondence(const SpinSystem& base, double chi, double dt,
                                                  int n_axes, RngStream& rng, double coupling) {
    if (n_axes < 3 || !(dt > 0.0) || !(coupling > 0.0)) {
        throw std::invalid_argument("roat_brownian_correspondence: need n_axes >= 3, dt > 0, J > 0");
    }
    const double spin = base.spin();
    if (std::abs(chi) * spin * spin * dt >= 0.1) {
        throw NumericalGuardError("roat_brownian_correspondence: chi S^2 dt must be below 0.1");
    }
    const auto ops = spin_operators(base);
    const int d = base.dim();
    const int n_frames = (n_axes + 2) / 3;
    Matrix m = Matrix::Zero(d * d, d * d);
    for (int f = 0; f < n_frames; ++f) {
        Eigen::Matrix3d g;
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                g(i, j) = rng.normal();
            }
        }
        Eigen::HouseholderQR<Eigen::Matrix3d> qr(g);
        const Eigen::Matrix3d q = qr.householderQ();
        const Eigen::Matrix3d r = qr.matrixQR().triangularView<Eigen::Upper>();
        for (int col = 0; col < 3; ++col) {
            const double sgn = r(col, col) < 0.0 ? -1.0 : 1.0;
            const UnitAxis n = UnitAxis::normalized(sgn * q(0, col), sgn * q(1, col), sgn * q(2, col));
            const Matrix sn = axis_operator(ops, n);
            const Matrix u = SpectralPropagator(sn * sn).unitary(chi * dt);
            const Matrix ud = u.adjoint();
            for (int i = 0; i < d; ++i) {
                for (int j = 0; j < d; ++j) {
                    m.block(i * d, j * d, d, d) += u(i, j) * ud;
                }
            }
        }
    }
    const int used = 3 * n_frames;
    m /= static_cast<double>(used);
    const Matrix gen = (Matrix::Identity(d * d, d * d) - m) / dt;
    const Matrix h = build_heff(base, 1, coupling).cast<Complex>();

    CorrespondenceReport rep;
    rep.spin = spin;
    rep.chi = chi;
    rep.dt = dt;
    rep.n_axes = used;
    rep.expected_prefactor = chi * chi * spin * spin * dt / (15.0 * coupling);
    rep.fitted_prefactor = (h.array().conjugate() * gen.array()).sum().real() / h.squaredNorm();
    const Matrix target = rep.expected_prefactor * h;
    const double hmax = max_abs(h);
    for (Eigen::Index i = 0; i < h.rows(); ++i) {
        for (Eigen::Index j = 0; j < h.cols(); ++j) {
            if (std::abs(h(i, j)) > 1e-9 * hmax) {
                rep.max_rel_deviation =
                    std::max(rep.max_rel_deviation, std::abs(gen(i, j) - target(i, j)) / std::abs(target(i, j)));
            }
        }
    }
    rep.frobenius_rel_deviation = (gen - target).norm() / target.norm();
    rep.generator_norm = gen.norm();
    return rep;
}

O3Moments o3_moment_check(int n_samples, RngStream& rng) {
    if (n_samples < 1) {
        throw std::invalid_argument("o3_moment_check: need at least one sample");
    }
    O3Moments m;
    m.n_samples = n_samples;
    for (int i = 0; i < n_samples; ++i) {
        const UnitAxis n = random_axis(rng);
        const double z2 = n.z() * n.z();
        m.nz4 += z2 * z2;
        m.nz2_nx2 += z2 * n.x() * n.x();
    }
    m.nz4 /= n_samples;
    m.nz2_nx2 /= n_samples;
    return m;
}

} // namespace bfecho
