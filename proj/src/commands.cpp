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

#include "bfecho/commands.hpp"

#include "bfecho/analytics.hpp"
#include "bfecho/channels.hpp"
#include "bfecho/echo.hpp"
#include "bfecho/io.hpp"
#include "bfecho/mmse.hpp"
#include "bfecho/parallel.hpp"
#include "bfecho/replica.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bfecho::cli {

namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::uint64_t kProbeDomain = 0x9e0be5ULL;

class OutputWriter {
public:
    OutputWriter(Command command, const RunConfig& config) : command_(command), config_(config), dir_(config.out_dir) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec || !fs::is_directory(dir_)) {
            throw io::IoError("out_dir '" + dir_.string() + "' cannot be created");
        }
    }

    void table(const std::string& stem, const io::Table& t) {
        if (config_.format == OutputFormat::json) {
            emit(stem + ".json", io::to_json(t));
        } else {
            emit(stem + ".csv", io::to_csv(t));
        }
    }

    void summary(const std::string& stem, const io::JsonObject& obj) { emit(stem + ".json", obj.dump()); }

    std::vector<fs::path> files;

private:
    void emit(const std::string& name, const std::string& content) {
        const fs::path path = dir_ / name;
        io::write_text_file(path, content);
        nlohmann::ordered_json meta;
        meta["artifact"] = "bfecho";
        meta["version"] = kArtifactVersion;
        meta["command"] = to_string(command_);
        meta["file"] = name;
        meta["config_hash"] = config_hash(config_);
        meta["seed"] = config_.seed;
        meta["config"] = canonical_json(config_);
        io::write_text_file(dir_ / (name + ".meta.json"), meta.dump(2) + "\n");
        files.push_back(path);
    }

    Command command_;
    const RunConfig& config_;
    fs::path dir_;
};

double serial_gain(double g) {
    return std::isnan(g) ? g : std::max(g, analytics::kGainFloorDb);
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() < 2) {
        return kNaN;
    }
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= x.size();
    my /= x.size();
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
        sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
    }
    return sxx > 0.0 ? sxy / sxx : kNaN;
}

void add_haar_summary(io::JsonObject& obj, int n) {
    obj.add("N", n)
        .add("theta_bw", analytics::bandwidth(n))
        .add("qfi_mean", analytics::haar_qfi_mean(n))
        .add("qfi_std", analytics::haar_qfi_std(n));
}

void cmd_echo_sweep(const RunConfig& c, OutputWriter& out) {
    const SpinSystem sys(c.n);
    const auto grid = theta_grid(c);
    const auto res = echo_sweep(sys, ensemble_config(c), grid, c.n_circuits, c.seed, c.fixed_axis, c.workers);
    const double spin = sys.spin();
    io::Table t(io::kEchoColumns);
    double peak = kNaN;
    for (std::size_t i = 0; i < res.points.size(); ++i) {
        const auto& p = res.points[i];
        const double sens = res.sensitivity.empty() ? kNaN : res.sensitivity[i];
        const double gain = res.gain_db.empty() ? kNaN : serial_gain(res.gain_db[i]);
        if (!std::isnan(gain) && (std::isnan(peak) || gain > peak)) {
            peak = gain;
        }
        t.add_row({p.theta, p.x, p.mean_sz / spin, p.sem_sz() / spin, p.var_circuits_sz, sens, gain,
                   static_cast<std::int64_t>(p.n_samples)});
    }
    out.table("echo_sweep", t);
    io::JsonObject s;
    add_haar_summary(s, c.n);
    s.add("peak_gain_db", peak).add("seed", c.seed).add("ensemble", to_string(c.ensemble)).add("n_circuits", c.n_circuits);
    out.summary("echo_summary", s);
}

void cmd_oat_converge(const RunConfig& c, OutputWriter& out) {
    const SpinSystem sys(c.n);
    const double strength = c.twist_scale * default_twist_strength(c.n);
    const auto stats = qfi_convergence(sys, c.oat_steps, c.n_circuits, c.n_axes, strength, c.seed, c.workers);
    io::Table t(io::kQfiColumns);
    const double target = analytics::haar_qfi_mean(c.n);
    int converged = -1;
    for (const auto& s : stats) {
        t.add_row({static_cast<std::int64_t>(s.step), s.mean_qfi, s.std_qfi, static_cast<std::int64_t>(s.n_circuits),
                   static_cast<std::int64_t>(s.n_axes)});
        if (converged < 0 && s.mean_qfi >= 0.95 * target) {
            converged = s.step;
        }
    }
    out.table("qfi_convergence", t);
    io::JsonObject s;
    add_haar_summary(s, c.n);
    s.add("final_mean_qfi", stats.back().mean_qfi)
        .add("final_std_qfi", stats.back().std_qfi)
        .add("convergence_step", converged)
        .add("seed", c.seed);
    out.summary("qfi_summary", s);
}

void cmd_noise_sweep(const RunConfig& c, OutputWriter& out) {
    std::vector<double> xs;
    for (int i = 0; i < c.x_points; ++i) {
        xs.push_back(c.x_max * i / (c.x_points - 1));
    }
    const auto surface = analytics::gain_surface(c.n, xs, c.c_gamma_t);
    io::Table g(io::kGainColumns);
    for (std::size_t r = 0; r < c.c_gamma_t.size(); ++r) {
        for (std::size_t i = 0; i < xs.size(); ++i) {
            g.add_row({xs[i], c.c_gamma_t[r], serial_gain(surface.gain_db[r][i])});
        }
    }
    out.table("gain_surface", g);
    io::JsonObject s;
    add_haar_summary(s, c.n);
    s.add("c", analytics::noise_constant(0.5 * c.n))
        .add("c_gamma_T", c.c_gamma_t)
        .add("optimal_x", surface.optimal_x)
        .add("model", to_string(c.noise_model));
    out.summary("noise_summary", s);

    if (c.n_circuits == 0) {
        return;
    }
    const SpinSystem sys(c.n);
    const auto d2 = static_cast<std::size_t>(sys.dim()) * sys.dim();
    if (d2 > kReplicaDimCap) {
        throw NumericalGuardError("noise-sweep: Monte Carlo needs D^2 <= " + std::to_string(kReplicaDimCap) +
                                  " (got " + std::to_string(d2) + "); lower N or set n_circuits to 0");
    }
    NoisyEchoConfig base;
    base.model = c.noise_model;
    base.n_circuits = c.n_circuits;
    base.substeps = c.noise_substeps;
    base.brownian_rate = c.brownian_rate;
    base.twist_strength = c.twist_scale * default_twist_strength(c.n);
    base.axis = c.fixed_axis;
    if (c.ensemble == EnsembleKind::brownian) {
        base.scrambler = NoisyScrambler::brownian;
        base.n_steps = std::max(1, static_cast<int>(std::lround(c.brownian_time / c.brownian_dt)));
        base.t_oneway = c.brownian_time;
    } else {
        base.scrambler = NoisyScrambler::oat;
        base.n_steps = c.noise_t_steps;
        base.t_oneway = c.noise_t_steps * base.twist_strength; // chi = 1
    }
    io::Table t(io::kNoisyColumns);
    const double spin = sys.spin();
    for (double gamma : c.noise_gamma) {
        for (double theta : theta_grid(c)) {
            NoisyEchoConfig cfg = base;
            cfg.gamma = gamma;
            cfg.theta = theta;
            const auto p = noisy_echo_mc(sys, cfg, c.seed, c.workers);
            t.add_row({theta, gamma, base.t_oneway, p.mean_sz / spin, p.sem_sz() / spin,
                       static_cast<std::int64_t>(p.n_samples), to_string(c.noise_model)});
        }
    }
    out.table("noisy_echo", t);
}

void cmd_heff(const RunConfig& c, OutputWriter& out) {
    io::Table t(io::kSpectrumColumns);
    std::vector<double> spins;
    std::vector<double> gaps;
    std::vector<double> level_errors;
    std::vector<double> null_dims;
    for (double spin : c.heff_spins) {
        const SpinSystem sys(static_cast<int>(std::lround(2.0 * spin)));
        const RealMatrix h = build_heff(sys, c.heff_k, c.heff_coupling, c.heff_max_dim);
        const auto numeric = heff_spectrum(h);
        for (std::size_t i = 0; i < numeric.levels.size(); ++i) {
            t.add_row({sys.spin(), static_cast<std::int64_t>(c.heff_k), static_cast<std::int64_t>(i),
                       numeric.levels[i].energy / c.heff_coupling,
                       static_cast<std::int64_t>(numeric.levels[i].degeneracy)});
        }
        spins.push_back(sys.spin());
        gaps.push_back(numeric.gap / c.heff_coupling);
        if (c.heff_k == 1) {
            const auto exact = exact_spectrum_k1(sys.spin(), c.heff_coupling);
            double err = std::numeric_limits<double>::infinity();
            if (exact.levels.size() == numeric.levels.size()) {
                err = 0.0;
                for (std::size_t i = 0; i < exact.levels.size(); ++i) {
                    if (exact.levels[i].degeneracy != numeric.levels[i].degeneracy) {
                        err = std::numeric_limits<double>::infinity();
                        break;
                    }
                    err = std::max(err, std::abs(exact.levels[i].energy - numeric.levels[i].energy));
                }
            }
            level_errors.push_back(err / c.heff_coupling);
        } else {
            null_dims.push_back(null_space_dim(h));
        }
    }
    out.table("heff_spectrum", t);
    io::JsonObject s;
    s.add("k", c.heff_k).add("J", c.heff_coupling).add("S_list", spins).add("gap_over_J", gaps);
    if (c.heff_k == 1) {
        s.add("max_level_error_over_J", level_errors);
    } else {
        s.add("null_space_dim", null_dims);
    }
    out.summary("heff_summary", s);
}

void cmd_mmse(const RunConfig& c, OutputWriter& out) {
    const SpinSystem sys(c.n);
    const auto r = mmse_report(sys, make_probe(c), c.mmse_theta_max, c.mmse_n_quad, c.mmse_mode, c.mmse_n_grid);
    io::JsonObject s;
    s.add("theta_max", r.theta_max)
        .add("bias_at_zero", r.bias_at_zero)
        .add("residual", r.residual)
        .add("overlap_correlation", r.overlap_correlation);
    out.summary("mmse", s);
    io::Table t({"theta", "estimate", "overlap"});
    for (std::size_t i = 0; i < r.theta_grid.size(); ++i) {
        t.add_row({r.theta_grid[i], r.estimates[i], r.overlaps[i]});
    }
    out.table("mmse_grid", t);
}

void cmd_channel_check(const RunConfig& c, OutputWriter& out) {
    const SpinSystem sys(c.n);
    const Ket psi = make_probe(c);
    const DensityOp rho = pure_density(psi);
    const auto rule = octahedral_26();
    io::Table t({"theta", "residual", "qfi_direct", "qfi_fidelity"});
    std::vector<double> thetas;
    std::vector<double> residuals;
    for (double theta : c.channel_thetas) {
        const double res = max_abs(axis_averaged_channel(sys, rho, theta, rule) - depolarizing_step(sys, rho, theta));
        t.add_row({theta, res, small_theta_qfi(sys, psi), small_theta_qfi_fidelity(sys, psi, theta)});
        thetas.push_back(theta);
        residuals.push_back(res);
    }
    out.table("channel_check", t);

    std::vector<double> qfi(static_cast<std::size_t>(c.channel_n_probes));
    parallel_for(qfi.size(), c.workers, [&](std::size_t p) {
        RngStream rng(c.seed ^ kProbeDomain, p);
        qfi[p] = small_theta_qfi(sys, haar_unitary(sys.dim(), rng).col(0));
    });
    double mean = 0.0;
    for (double q : qfi) {
        mean += q;
    }
    mean /= qfi.size();
    double var = 0.0;
    for (double q : qfi) {
        var += (q - mean) * (q - mean);
    }
    var /= (qfi.size() - 1);
    const double spin = sys.spin();
    io::JsonObject s;
    s.add("N", c.n)
        .add("residual_slope", loglog_slope(thetas, residuals))
        .add("n_probes", c.channel_n_probes)
        .add("haar_qfi_mean", mean)
        .add("haar_qfi_sem", std::sqrt(var / qfi.size()))
        .add("qfi_formula", 4.0 / 3.0 * spin * (spin + 1.0))
        .add("qfi_haar_exact", analytics::haar_qfi_mean(c.n));
    out.summary("channel_summary", s);
}

void cmd_husimi(const RunConfig& c, OutputWriter& out) {
    const SpinSystem sys(c.n);
    const auto field = husimi_q(sys, pure_density(make_probe(c)), c.husimi_n_polar, c.husimi_n_azimuth);
    io::Table t(io::kHusimiColumns);
    for (int i = 0; i < field.n_polar; ++i) {
        for (int j = 0; j < field.n_azimuth; ++j) {
            t.add_row({field.polar[i], field.azimuth[j], field.at(i, j)});
        }
    }
    out.table("husimi", t);
}

} // namespace

Ket make_probe(const RunConfig& c) {
    const SpinSystem sys(c.n);
    const Ket top = dicke_state(sys, sys.spin());
    RngStream rng(c.seed ^ kProbeDomain, 0xffffffffULL);
    if (c.state == "polarized") {
        return top;
    }
    if (c.state == "haar") {
        return haar_unitary(sys.dim(), rng).col(0);
    }
    if (c.state == "oat") {
        const auto circuit = sample_oat_circuit(sys, c.oat_steps, c.twist_scale * default_twist_strength(c.n), rng);
        return apply_oat(circuit, top, Direction::forward);
    }
    throw ConfigError("config field 'state': expected 'polarized', 'haar' or 'oat'");
}

std::vector<fs::path> run_command(Command command, const RunConfig& config) {
    validate(config, command);
    OutputWriter out(command, config);
    switch (command) {
    case Command::echo_sweep: cmd_echo_sweep(config, out); break;
    case Command::oat_converge: cmd_oat_converge(config, out); break;
    case Command::noise_sweep: cmd_noise_sweep(config, out); break;
    case Command::heff: cmd_heff(config, out); break;
    case Command::mmse: cmd_mmse(config, out); break;
    case Command::channel_check: cmd_channel_check(config, out); break;
    case Command::husimi: cmd_husimi(config, out); break;
    }
    return out.files;
}

} // namespace bfecho::cli
