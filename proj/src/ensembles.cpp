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

#include <cmath>
#include <numbers>

namespace bfecho {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

namespace {

std::mt19937_64 seeded_engine(std::uint64_t master, std::uint64_t index) {
    const std::uint64_t a = splitmix64(master);
    const std::uint64_t b = splitmix64(a ^ splitmix64(index + 0x632be59bd9b4e019ULL));
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    return std::mt19937_64(seq);
}

} // namespace

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_index)
    : master_(master_seed), index_(stream_index), engine_(seeded_engine(master_seed, stream_index)) {}

RngStream RngStream::substream(std::uint64_t sub_index) const {
    return RngStream(splitmix64(master_ ^ splitmix64(index_)), sub_index);
}

Matrix haar_unitary(int dim, RngStream& rng) {
    if (dim < 1) {
        throw std::invalid_argument("haar_unitary: dimension must be >= 1");
    }
    Matrix z(dim, dim);
    for (int j = 0; j < dim; ++j) {
        for (int i = 0; i < dim; ++i) {
            const double re = rng.normal();
            const double im = rng.normal();
            z(i, j) = Complex(re, im) * std::sqrt(0.5);
        }
    }
    Eigen::HouseholderQR<Matrix> qr(z);
    Matrix q = qr.householderQ();
    const Matrix& r = qr.matrixQR();
    for (int j = 0; j < dim; ++j) {
        const Complex d = r(j, j);
        const double mag = std::abs(d);
        q.col(j) *= mag > 0.0 ? d / mag : Complex(1.0);
    }
    return q;
}

UnitAxis random_axis(RngStream& rng) {
    for (;;) {
        const double x = rng.normal();
        const double y = rng.normal();
        const double z = rng.normal();
        if (x * x + y * y + z * z > 1e-300) {
            return UnitAxis::normalized(x, y, z);
        }
    }
}

double default_twist_strength(int n_particles) {
    return std::numbers::pi / (2.0 * std::sqrt(static_cast<double>(n_particles)));
}

OatCircuit sample_oat_circuit(const SpinSystem& sys, int n_steps, double strength, RngStream& rng) {
    if (n_steps < 0) {
        throw std::invalid_argument("sample_oat_circuit: n_steps must be >= 0");
    }
    if (!std::isfinite(strength)) {
        throw std::invalid_argument("sample_oat_circuit: strength must be finite");
    }
    OatCircuit circuit{sys, strength, {}};
    circuit.axes.reserve(static_cast<std::size_t>(n_steps));
    for (int i = 0; i < n_steps; ++i) {
        circuit.axes.push_back(random_axis(rng));
    }
    return circuit;
}

Matrix twist_unitary(const SpinSystem& sys, const UnitAxis& axis, double strength) {
    SpectralPropagator sn(axis_operator(sys, axis));
    Eigen::VectorXcd phases(sys.dim());
    for (int i = 0; i < sys.dim(); ++i) {
        const double w = sn.eigenvalues()(i);
        phases(i) = std::polar(1.0, -strength * w * w);
    }
    return sn.eigenvectors() * phases.asDiagonal() * sn.eigenvectors().adjoint();
}

Ket apply_oat(const OatCircuit& circuit, const Ket& psi, Direction direction) {
    if (psi.size() != circuit.sys.dim()) {
        throw std::invalid_argument("apply_oat: state dimension does not match circuit");
    }
    Ket out = psi;
    const auto steps = circuit.axes.size();
    for (std::size_t k = 0; k < steps; ++k) {
        const std::size_t j = direction == Direction::forward ? k : steps - 1 - k;
        const Matrix u = twist_unitary(circuit.sys, circuit.axes[j], circuit.strength);
        out = direction == Direction::forward ? Ket(u * out) : Ket(u.adjoint() * out);
    }
    return out;
}

Matrix oat_unitary(const OatCircuit& circuit) {
    Matrix u = Matrix::Identity(circuit.sys.dim(), circuit.sys.dim());
    for (const auto& axis : circuit.axes) {
        u = twist_unitary(circuit.sys, axis, circuit.strength) * u;
    }
    return u;
}

nlohmann::json circuit_to_json(const OatCircuit& circuit) {
    nlohmann::json axes = nlohmann::json::array();
    for (const auto& a : circuit.axes) {
        axes.push_back({a.x(), a.y(), a.z()});
    }
    return {{"n", circuit.sys.n_particles()}, {"strength", circuit.strength}, {"axes", axes}};
}

OatCircuit circuit_from_json(const nlohmann::json& j) {
    OatCircuit circuit{SpinSystem(j.at("n").get<int>()), j.at("strength").get<double>(), {}};
    for (const auto& a : j.at("axes")) {
        circuit.axes.push_back(
            UnitAxis(a.at(0).get<double>(), a.at(1).get<double>(), a.at(2).get<double>()));
    }
    return circuit;
}

BrownianCouplings sample_brownian_couplings(const SpinSystem& sys, double rate, double dt,
                                            RngStream& rng) {
    if (!(dt > 0.0) || !(rate >= 0.0)) {
        throw std::invalid_argument("sample_brownian_couplings: need dt > 0 and rate >= 0");
    }
    const double s = sys.spin();
    const double sigma = std::sqrt(rate / (s * s * dt));
    BrownianCouplings c;
    c.dt = dt;
    c.rate = rate;
    for (int a = 0; a < 3; ++a) {
        c.j_matrix(a, a) = std::sqrt(2.0) * sigma * rng.normal();
        for (int b = a + 1; b < 3; ++b) {
            c.j_matrix(a, b) = sigma * rng.normal();
            c.j_matrix(b, a) = c.j_matrix(a, b);
        }
    }
    return c;
}

Matrix brownian_hamiltonian(const SpinOperators& ops, const BrownianCouplings& couplings) {
    const int d = static_cast<int>(ops.sz.rows());
    Matrix h = Matrix::Zero(d, d);
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
            h += couplings.j_matrix(a, b) * (ops.component(a) * ops.component(b));
        }
    }
    return h;
}

Matrix sample_brownian_step(const SpinSystem& sys, double rate, double dt, RngStream& rng) {
    const auto couplings = sample_brownian_couplings(sys, rate, dt, rng);
    return SpectralPropagator(brownian_hamiltonian(spin_operators(sys), couplings)).unitary(dt);
}

EnsembleKind parse_ensemble(const std::string& name) {
    if (name == "haar") return EnsembleKind::haar;
    if (name == "oat") return EnsembleKind::oat;
    if (name == "brownian") return EnsembleKind::brownian;
    if (name == "identity") return EnsembleKind::identity;
    throw std::invalid_argument("unknown ensemble '" + name + "'");
}

std::string to_string(EnsembleKind kind) {
    switch (kind) {
    case EnsembleKind::haar: return "haar";
    case EnsembleKind::oat: return "oat";
    case EnsembleKind::brownian: return "brownian";
    case EnsembleKind::identity: return "identity";
    }
    return "unknown";
}

Matrix sample_scrambler(const SpinSystem& sys, const EnsembleConfig& config, RngStream& rng) {
    switch (config.kind) {
    case EnsembleKind::haar:
        return haar_unitary(sys.dim(), rng);
    case EnsembleKind::oat: {
        const double strength = config.twist_scale * default_twist_strength(sys.n_particles());
        return oat_unitary(sample_oat_circuit(sys, config.oat_steps, strength, rng));
    }
    case EnsembleKind::brownian: {
        const auto ops = spin_operators(sys);
        const int steps =
            std::max(1, static_cast<int>(std::lround(config.brownian_time / config.brownian_dt)));
        Matrix u = Matrix::Identity(sys.dim(), sys.dim());
        for (int t = 0; t < steps; ++t) {
            const auto c = sample_brownian_couplings(sys, config.brownian_rate, config.brownian_dt, rng);
            u = SpectralPropagator(brownian_hamiltonian(ops, c)).unitary(config.brownian_dt) * u;
        }
        return u;
    }
    case EnsembleKind::identity:
        return Matrix::Identity(sys.dim(), sys.dim());
    }
    throw std::logic_error("sample_scrambler: unhandled ensemble");
}

} // namespace bfecho
