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

#include "bfecho/config.hpp"

#include "bfecho/io.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <set>

namespace bfecho::cli {

namespace {

const std::vector<std::pair<Command, std::string>>& command_table() {
    static const std::vector<std::pair<Command, std::string>> table = {
        {Command::echo_sweep, "echo-sweep"}, {Command::oat_converge, "oat-converge"},
        {Command::noise_sweep, "noise-sweep"}, {Command::heff, "heff"},
        {Command::mmse, "mmse"}, {Command::channel_check, "channel-check"},
        {Command::husimi, "husimi"}};
    return table;
}

[[noreturn]] void fail(const std::string& field, const std::string& what) {
    throw ConfigError("config field '" + field + "': " + what);
}

using nlohmann::json;

int get_int(const json& v, const std::string& field) {
    if (!v.is_number_integer()) {
        fail(field, "expected an integer");
    }
    const auto x = v.get<std::int64_t>();
    if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
        fail(field, "integer out of range");
    }
    return static_cast<int>(x);
}

std::uint64_t get_u64(const json& v, const std::string& field) {
    if (v.is_number_unsigned()) {
        return v.get<std::uint64_t>();
    }
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
        return static_cast<std::uint64_t>(v.get<std::int64_t>());
    }
    fail(field, "expected a non-negative integer");
}

double get_double(const json& v, const std::string& field) {
    if (!v.is_number()) {
        fail(field, "expected a number");
    }
    return v.get<double>();
}

std::string get_string(const json& v, const std::string& field) {
    if (!v.is_string()) {
        fail(field, "expected a string");
    }
    return v.get<std::string>();
}

std::vector<double> get_double_list(const json& v, const std::string& field) {
    if (v.is_number()) {
        return {v.get<double>()};
    }
    if (!v.is_array()) {
        fail(field, "expected a number or an array of numbers");
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        out.push_back(get_double(v[i], field + "[" + std::to_string(i) + "]"));
    }
    return out;
}

void check_keys(const json& obj, const std::string& prefix, const std::set<std::string>& allowed) {
    if (!obj.is_object()) {
        fail(prefix.empty() ? "<root>" : prefix, "expected a JSON object");
    }
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.count(key)) {
            fail(prefix.empty() ? key : prefix + "." + key, "unknown key");
        }
    }
}

template <class Fn>
void with(const json& obj, const std::string& key, Fn&& fn) {
    if (obj.contains(key)) {
        fn(obj.at(key));
    }
}

bool is_half_integer(double s) {
    const double two_s = 2.0 * s;
    return s > 0.0 && std::abs(two_s - std::round(two_s)) < 1e-12;
}

} // namespace

Command parse_command(const std::string& name) {
    for (const auto& [c, n] : command_table()) {
        if (n == name) {
            return c;
        }
    }
    throw ConfigError("unknown command '" + name + "'");
}

std::string to_string(Command command) {
    for (const auto& [c, n] : command_table()) {
        if (c == command) {
            return n;
        }
    }
    return "?";
}

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& entry : command_table()) {
            out.push_back(entry.second);
        }
        return out;
    }();
    return names;
}

RunConfig default_config(Command command) {
    RunConfig c;
    switch (command) {
    case Command::echo_sweep:
        break; // N = 100, 8 OAT steps, 100 circuits, fixed axis y
    case Command::oat_converge:
        c.n = 12;
        c.n_circuits = 300;
        c.n_axes = 1000;
        break;
    case Command::noise_sweep:
        c.n = 1000;
        c.n_circuits = 0;
        c.fixed_axis.reset();
        break;
    case Command::heff:
        break;
    case Command::mmse:
    case Command::channel_check:
        c.n = 6;
        break;
    case Command::husimi:
        c.n = 10;
        c.state = "polarized";
        break;
    }
    return c;
}

RunConfig apply_json(const json& j, RunConfig c) {
    check_keys(j, "",
               {"N", "seed", "n_circuits", "n_axes", "theta_min", "theta_max", "theta_points", "ensemble",
                "oat_steps", "twist_scale", "fixed_axis", "brownian", "noise", "heff", "mmse", "channel",
                "state", "husimi", "out_dir", "format", "workers"});
    with(j, "N", [&](const json& v) { c.n = get_int(v, "N"); });
    with(j, "seed", [&](const json& v) { c.seed = get_u64(v, "seed"); });
    with(j, "n_circuits", [&](const json& v) { c.n_circuits = get_int(v, "n_circuits"); });
    with(j, "n_axes", [&](const json& v) { c.n_axes = get_int(v, "n_axes"); });
    with(j, "theta_min", [&](const json& v) { c.theta_min = get_double(v, "theta_min"); });
    with(j, "theta_max", [&](const json& v) {
        if (v.is_null()) {
            c.theta_max.reset();
        } else {
            c.theta_max = get_double(v, "theta_max");
        }
    });
    with(j, "theta_points", [&](const json& v) { c.theta_points = get_int(v, "theta_points"); });
    with(j, "ensemble", [&](const json& v) {
        try {
            c.ensemble = parse_ensemble(get_string(v, "ensemble"));
        } catch (const std::invalid_argument& e) {
            fail("ensemble", e.what());
        }
    });
    with(j, "oat_steps", [&](const json& v) { c.oat_steps = get_int(v, "oat_steps"); });
    with(j, "twist_scale", [&](const json& v) { c.twist_scale = get_double(v, "twist_scale"); });
    with(j, "fixed_axis", [&](const json& v) {
        if (v.is_null()) {
            c.fixed_axis.reset();
            return;
        }
        const auto xs = get_double_list(v, "fixed_axis");
        if (xs.size() != 3) {
            fail("fixed_axis", "expected [x, y, z] or null");
        }
        try {
            c.fixed_axis = UnitAxis::normalized(xs[0], xs[1], xs[2]);
        } catch (const std::invalid_argument& e) {
            fail("fixed_axis", e.what());
        }
    });
    with(j, "brownian", [&](const json& b) {
        check_keys(b, "brownian", {"rate", "dt", "time"});
        with(b, "rate", [&](const json& v) { c.brownian_rate = get_double(v, "brownian.rate"); });
        with(b, "dt", [&](const json& v) { c.brownian_dt = get_double(v, "brownian.dt"); });
        with(b, "time", [&](const json& v) { c.brownian_time = get_double(v, "brownian.time"); });
    });
    with(j, "noise", [&](const json& n) {
        check_keys(n, "noise", {"model", "gamma", "T_steps", "substeps", "c_gamma_T", "x_max", "x_points"});
        with(n, "model", [&](const json& v) {
            try {
                c.noise_model = parse_noise_model(get_string(v, "noise.model"));
            } catch (const std::invalid_argument& e) {
                fail("noise.model", e.what());
            }
        });
        with(n, "gamma", [&](const json& v) { c.noise_gamma = get_double_list(v, "noise.gamma"); });
        with(n, "T_steps", [&](const json& v) { c.noise_t_steps = get_int(v, "noise.T_steps"); });
        with(n, "substeps", [&](const json& v) { c.noise_substeps = get_int(v, "noise.substeps"); });
        with(n, "c_gamma_T", [&](const json& v) { c.c_gamma_t = get_double_list(v, "noise.c_gamma_T"); });
        with(n, "x_max", [&](const json& v) { c.x_max = get_double(v, "noise.x_max"); });
        with(n, "x_points", [&](const json& v) { c.x_points = get_int(v, "noise.x_points"); });
    });
    with(j, "heff", [&](const json& h) {
        check_keys(h, "heff", {"S_list", "k", "J", "max_dim"});
        with(h, "S_list", [&](const json& v) { c.heff_spins = get_double_list(v, "heff.S_list"); });
        with(h, "k", [&](const json& v) { c.heff_k = get_int(v, "heff.k"); });
        with(h, "J", [&](const json& v) { c.heff_coupling = get_double(v, "heff.J"); });
        with(h, "max_dim", [&](const json& v) { c.heff_max_dim = get_u64(v, "heff.max_dim"); });
    });
    with(j, "mmse", [&](const json& m) {
        check_keys(m, "mmse", {"theta_max", "n_quad", "mode", "n_grid"});
        with(m, "theta_max", [&](const json& v) { c.mmse_theta_max = get_double(v, "mmse.theta_max"); });
        with(m, "n_quad", [&](const json& v) { c.mmse_n_quad = get_int(v, "mmse.n_quad"); });
        with(m, "mode", [&](const json& v) {
            try {
                c.mmse_mode = parse_mmse_mode(get_string(v, "mmse.mode"));
            } catch (const std::invalid_argument& e) {
                fail("mmse.mode", e.what());
            }
        });
        with(m, "n_grid", [&](const json& v) { c.mmse_n_grid = get_int(v, "mmse.n_grid"); });
    });
    with(j, "channel", [&](const json& ch) {
        check_keys(ch, "channel", {"thetas", "n_probes"});
        with(ch, "thetas", [&](const json& v) { c.channel_thetas = get_double_list(v, "channel.thetas"); });
        with(ch, "n_probes", [&](const json& v) { c.channel_n_probes = get_int(v, "channel.n_probes"); });
    });
    with(j, "state", [&](const json& v) { c.state = get_string(v, "state"); });
    with(j, "husimi", [&](const json& h) {
        check_keys(h, "husimi", {"n_polar", "n_azimuth"});
        with(h, "n_polar", [&](const json& v) { c.husimi_n_polar = get_int(v, "husimi.n_polar"); });
        with(h, "n_azimuth", [&](const json& v) { c.husimi_n_azimuth = get_int(v, "husimi.n_azimuth"); });
    });
    with(j, "out_dir", [&](const json& v) { c.out_dir = get_string(v, "out_dir"); });
    with(j, "format", [&](const json& v) {
        const auto f = get_string(v, "format");
        if (f == "csv") {
            c.format = OutputFormat::csv;
        } else if (f == "json") {
            c.format = OutputFormat::json;
        } else {
            fail("format", "expected 'csv' or 'json'");
        }
    });
    with(j, "workers", [&](const json& v) { c.workers = get_int(v, "workers"); });
    return c;
}

void validate(const RunConfig& c, Command command) {
    const auto finite = [](double v) { return std::isfinite(v); };
    if (c.n < 1) {
        fail("N", "must be >= 1");
    }
    if (c.workers < 1 || c.workers > 1024) {
        fail("workers", "must be in [1, 1024]");
    }
    if (c.out_dir.empty()) {
        fail("out_dir", "must not be empty");
    }
    if (!(c.twist_scale > 0.0) || !finite(c.twist_scale)) {
        fail("twist_scale", "must be > 0");
    }
    if (c.oat_steps < 0) {
        fail("oat_steps", "must be >= 0");
    }
    if (!(c.brownian_rate > 0.0) || !finite(c.brownian_rate)) {
        fail("brownian.rate", "must be > 0");
    }
    if (!(c.brownian_dt > 0.0) || !finite(c.brownian_dt)) {
        fail("brownian.dt", "must be > 0");
    }
    if (!(c.brownian_time > 0.0) || !finite(c.brownian_time)) {
        fail("brownian.time", "must be > 0");
    }
    const bool uses_grid = command == Command::echo_sweep || (command == Command::noise_sweep && c.n_circuits > 0);
    if (uses_grid) {
        if (c.theta_points < 1) {
            fail("theta_points", "must be >= 1");
        }
        if (!finite(c.theta_min)) {
            fail("theta_min", "must be finite");
        }
        if (c.theta_max && !finite(*c.theta_max)) {
            fail("theta_max", "must be finite");
        }
        if (c.theta_points > 1 && c.theta_max && !(*c.theta_max > c.theta_min)) {
            fail("theta_max", "must exceed theta_min when theta_points > 1");
        }
    }
    switch (command) {
    case Command::echo_sweep:
        if (c.n_circuits < 2) {
            fail("n_circuits", "must be >= 2");
        }
        break;
    case Command::oat_converge:
        if (c.n_circuits < 1) {
            fail("n_circuits", "must be >= 1");
        }
        if (c.n_axes < 1) {
            fail("n_axes", "must be >= 1");
        }
        break;
    case Command::noise_sweep:
        if (c.c_gamma_t.empty()) {
            fail("noise.c_gamma_T", "must not be empty");
        }
        for (double v : c.c_gamma_t) {
            if (!(v >= 0.0) || !finite(v)) {
                fail("noise.c_gamma_T", "values must be >= 0");
            }
        }
        if (!(c.x_max > 0.0) || !finite(c.x_max)) {
            fail("noise.x_max", "must be > 0");
        }
        if (c.x_points < 2) {
            fail("noise.x_points", "must be >= 2");
        }
        if (c.n_circuits < 0 || c.n_circuits == 1) {
            fail("n_circuits", "must be 0 (analytic only) or >= 2");
        }
        if (c.n_circuits > 0) {
            if (c.ensemble != EnsembleKind::oat && c.ensemble != EnsembleKind::brownian) {
                fail("ensemble", "noisy Monte Carlo needs 'oat' or 'brownian'");
            }
            if (c.noise_gamma.empty()) {
                fail("noise.gamma", "must not be empty");
            }
            for (double g : c.noise_gamma) {
                if (!(g >= 0.0) || !finite(g)) {
                    fail("noise.gamma", "values must be >= 0");
                }
            }
            if (c.noise_t_steps < 1) {
                fail("noise.T_steps", "must be >= 1");
            }
            if (c.noise_substeps < 1) {
                fail("noise.substeps", "must be >= 1");
            }
        }
        break;
    case Command::heff:
        if (c.heff_spins.empty()) {
            fail("heff.S_list", "must not be empty");
        }
        for (double s : c.heff_spins) {
            if (!is_half_integer(s)) {
                fail("heff.S_list", "values must be positive multiples of 1/2");
            }
        }
        if (c.heff_k != 1 && c.heff_k != 2) {
            fail("heff.k", "must be 1 or 2");
        }
        if (!(c.heff_coupling > 0.0) || !finite(c.heff_coupling)) {
            fail("heff.J", "must be > 0");
        }
        if (c.heff_max_dim < 1) {
            fail("heff.max_dim", "must be >= 1");
        }
        break;
    case Command::mmse:
        if (!(c.mmse_theta_max > 0.0) || !finite(c.mmse_theta_max)) {
            fail("mmse.theta_max", "must be > 0");
        }
        if (c.mmse_n_quad < 8) {
            fail("mmse.n_quad", "must be >= 8");
        }
        if (c.mmse_n_grid < 3) {
            fail("mmse.n_grid", "must be >= 3");
        }
        break;
    case Command::channel_check:
        if (c.channel_thetas.empty()) {
            fail("channel.thetas", "must not be empty");
        }
        for (double t : c.channel_thetas) {
            if (!(t > 0.0) || !finite(t)) {
                fail("channel.thetas", "values must be > 0");
            }
        }
        if (c.channel_n_probes < 2) {
            fail("channel.n_probes", "must be >= 2");
        }
        break;
    case Command::husimi:
        if (c.husimi_n_polar < 2) {
            fail("husimi.n_polar", "must be >= 2");
        }
        if (c.husimi_n_azimuth < 2) {
            fail("husimi.n_azimuth", "must be >= 2");
        }
        break;
    }
    if (command == Command::mmse || command == Command::channel_check || command == Command::husimi) {
        if (c.state != "polarized" && c.state != "haar" && c.state != "oat") {
            fail("state", "expected 'polarized', 'haar' or 'oat'");
        }
    }
}

nlohmann::json canonical_json(const RunConfig& c) {
    json j;
    j["N"] = c.n;
    j["seed"] = c.seed;
    j["n_circuits"] = c.n_circuits;
    j["n_axes"] = c.n_axes;
    j["theta_min"] = c.theta_min;
    j["theta_max"] = c.theta_max ? json(*c.theta_max) : json(nullptr);
    j["theta_points"] = c.theta_points;
    j["ensemble"] = to_string(c.ensemble);
    j["oat_steps"] = c.oat_steps;
    j["twist_scale"] = c.twist_scale;
    j["fixed_axis"] = c.fixed_axis ? json::array({c.fixed_axis->x(), c.fixed_axis->y(), c.fixed_axis->z()})
                                   : json(nullptr);
    j["brownian"] = {{"rate", c.brownian_rate}, {"dt", c.brownian_dt}, {"time", c.brownian_time}};
    j["noise"] = {{"model", to_string(c.noise_model)}, {"gamma", c.noise_gamma},
                  {"T_steps", c.noise_t_steps},         {"substeps", c.noise_substeps},
                  {"c_gamma_T", c.c_gamma_t},           {"x_max", c.x_max},
                  {"x_points", c.x_points}};
    j["heff"] = {{"S_list", c.heff_spins}, {"k", c.heff_k}, {"J", c.heff_coupling}, {"max_dim", c.heff_max_dim}};
    j["mmse"] = {{"theta_max", c.mmse_theta_max}, {"n_quad", c.mmse_n_quad},
                 {"mode", to_string(c.mmse_mode)},  {"n_grid", c.mmse_n_grid}};
    j["channel"] = {{"thetas", c.channel_thetas}, {"n_probes", c.channel_n_probes}};
    j["state"] = c.state;
    j["husimi"] = {{"n_polar", c.husimi_n_polar}, {"n_azimuth", c.husimi_n_azimuth}};
    j["format"] = c.format == OutputFormat::json ? "json" : "csv";
    return j;
}

std::string config_hash(const RunConfig& config) {
    return io::hex64(io::fnv1a64(canonical_json(config).dump()));
}

std::vector<double> theta_grid(const RunConfig& c) {
    if (c.theta_points == 1) {
        return {c.theta_min};
    }
    const double spin = 0.5 * c.n;
    const double hi = c.theta_max ? *c.theta_max : 3.0 * std::numbers::pi / spin;
    if (!(hi > c.theta_min)) {
        fail("theta_max", "must exceed theta_min when theta_points > 1");
    }
    std::vector<double> grid;
    for (int i = 0; i < c.theta_points; ++i) {
        grid.push_back(c.theta_min + (hi - c.theta_min) * i / (c.theta_points - 1));
    }
    return grid;
}

EnsembleConfig ensemble_config(const RunConfig& c) {
    EnsembleConfig e;
    e.kind = c.ensemble;
    e.oat_steps = c.oat_steps;
    e.twist_scale = c.twist_scale;
    e.brownian_rate = c.brownian_rate;
    e.brownian_dt = c.brownian_dt;
    e.brownian_time = c.brownian_time;
    return e;
}

} // namespace bfecho::cli
