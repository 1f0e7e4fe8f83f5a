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

#ifndef BFECHO_CONFIG_HPP
#define BFECHO_CONFIG_HPP

#include "bfecho/channels.hpp"
#include "bfecho/ensembles.hpp"
#include "bfecho/mmse.hpp"
#include "bfecho/replica.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bfecho::cli {

/// Invalid or out-of-range configuration; the message names the field.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Command { echo_sweep, oat_converge, noise_sweep, heff, mmse, channel_check, husimi };

Command parse_command(const std::string& name);
std::string to_string(Command command);
const std::vector<std::string>& command_names();

enum class OutputFormat { csv, json };

struct RunConfig {
    int n = 100;
    std::uint64_t seed = 1;
    int n_circuits = 100;
    int n_axes = 1000;
    double theta_min = 0.0;
    std::optional<double> theta_max; // default: x = S theta up to 3 pi
    int theta_points = 121;
    EnsembleKind ensemble = EnsembleKind::oat;
    int oat_steps = 8;
    double twist_scale = 1.0;
    std::optional<UnitAxis> fixed_axis = UnitAxis::y_axis();

    double brownian_rate = 1.0;
    double brownian_dt = 0.02;
    double brownian_time = 5.0;

    NoiseModel noise_model = NoiseModel::isotropic_collective;
    std::vector<double> noise_gamma = {0.0, 0.01, 0.02};
    int noise_t_steps = 8;
    int noise_substeps = 8;
    std::vector<double> c_gamma_t = {0.0, 0.25, 0.5, 1.0, 2.0};
    double x_max = 3.141592653589793;
    int x_points = 201;

    std::vector<double> heff_spins = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    int heff_k = 1;
    double heff_coupling = 1.0;
    std::uint64_t heff_max_dim = kReplicaDimCap;

    double mmse_theta_max = 0.01;
    int mmse_n_quad = 32;
    MmseMode mmse_mode = MmseMode::exact;
    int mmse_n_grid = 17;

    std::vector<double> channel_thetas = {0.02, 0.04, 0.08};
    int channel_n_probes = 1000;

    /// Probe for mmse / channel-check / husimi: polarized, haar or oat.
    std::string state = "haar";
    int husimi_n_polar = 64;
    int husimi_n_azimuth = 128;

    std::string out_dir = "out";
    OutputFormat format = OutputFormat::csv;
    int workers = 1;

};

/// Per-command defaults.
RunConfig default_config(Command command);

/// Applies the keys of a JSON object on top of `base`. Unknown keys and
/// wrongly typed values throw ConfigError naming the key.
RunConfig apply_json(const nlohmann::json& j, RunConfig base);

/// Range checks for the fields the command uses.
void validate(const RunConfig& config, Command command);

/// Canonical JSON of everything that affects results (not out_dir or workers).
nlohmann::json canonical_json(const RunConfig& config);
std::string config_hash(const RunConfig& config);

/// theta grid from theta_min / theta_max / theta_points.
std::vector<double> theta_grid(const RunConfig& config);

EnsembleConfig ensemble_config(const RunConfig& config);

} // namespace bfecho::cli

#endif
