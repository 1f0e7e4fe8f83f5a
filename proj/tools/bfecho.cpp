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

// Command-line front end: bfecho <subcommand> [--config FILE] [--seed N]
// [--out DIR] [--format csv|json] [--workers N]. Exit codes: 0 success,
// 2 configuration error, 3 numerical guard, 1 anything else.

#include "bfecho/commands.hpp"
#include "bfecho/io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitGuard = 3;

nlohmann::json read_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) {
        throw bfecho::cli::ConfigError("config file '" + path + "' cannot be opened");
    }
    try {
        return nlohmann::json::parse(f);
    } catch (const nlohmann::json::parse_error& e) {
        throw bfecho::cli::ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
    }
}

} // namespace

int main(int argc, char** argv) {
    using namespace bfecho::cli;

    CLI::App app{"Butterfly echo rotation-sensing simulator"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<std::string> format;
    std::optional<int> workers;
    app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    app.add_option("--seed", seed, "master seed (overrides the config)");
    app.add_option("--out", out_dir, "output directory (overrides the config)");
    app.add_option("--format", format, "csv or json (overrides the config)")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--workers", workers, "worker threads (overrides the config)")->check(CLI::PositiveNumber);

    const std::vector<std::pair<std::string, std::string>> subcommands = {
        {"echo-sweep", "echo signal, sensitivity and gain over a theta grid"},
        {"oat-converge", "QFI statistics of OAT-prepared probes versus twist count"},
        {"noise-sweep", "analytic gain surface and optional noisy Monte Carlo"},
        {"heff", "replica effective Hamiltonian spectra"},
        {"mmse", "MMSE observable and bias report"},
        {"channel-check", "axis-averaged channel versus depolarizing reduction"},
        {"husimi", "Husimi Q field of a probe state"}};
    for (const auto& [name, help] : subcommands) {
        app.add_subcommand(name, help);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    try {
        const Command command = parse_command(name);
        RunConfig config = default_config(command);
        if (!config_path.empty()) {
            config = apply_json(read_config_file(config_path), config);
        }
        if (seed) {
            config.seed = *seed;
        }
        if (out_dir) {
            config.out_dir = *out_dir;
        }
        if (format) {
            config.format = *format == "json" ? OutputFormat::json : OutputFormat::csv;
        }
        if (workers) {
            config.workers = *workers;
        }
        for (const auto& path : run_command(command, config)) {
            std::cout << path.string() << '\n';
        }
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const bfecho::NumericalGuardError& e) {
        std::cerr << "numerical guard: " << e.what() << '\n';
        return kExitGuard;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kExitConfig;
    } catch (const bfecho::io::IoError& e) {
        std::cerr << "output error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
