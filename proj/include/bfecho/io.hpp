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

#ifndef BFECHO_IO_HPP
#define BFECHO_IO_HPP

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace bfecho::io {

/// Output file could not be written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// 17 significant digits, "." separator; "inf", "-inf", "nan" otherwise.
std::string format_double(double v);

using Cell = std::variant<double, std::int64_t, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    explicit Table(std::vector<std::string> cols) : columns(std::move(cols)) {}
    /// Throws std::logic_error if the row width does not match the header.
    void add_row(std::vector<Cell> row);
};

/// Header line then one line per row, "\n" endings.
std::string to_csv(const Table& table);
/// Array of row objects keyed by column name, one row per line.
std::string to_json(const Table& table);

/// Flat, insertion-ordered JSON object with the same number formatting as
/// the CSV writer.
class JsonObject {
public:
    JsonObject& add(const std::string& key, double v);
    JsonObject& add(const std::string& key, int v) { return add(key, static_cast<std::int64_t>(v)); }
    JsonObject& add(const std::string& key, std::int64_t v);
    JsonObject& add(const std::string& key, std::uint64_t v);
    JsonObject& add(const std::string& key, bool v);
    JsonObject& add(const std::string& key, const std::string& v);
    JsonObject& add(const std::string& key, const char* v) { return add(key, std::string(v)); }
    JsonObject& add(const std::string& key, const std::vector<double>& v);

    std::string dump() const;

private:
    std::vector<std::pair<std::string, std::string>> fields_; // key, encoded value
};

std::string json_quote(std::string_view s);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t v);

void write_text_file(const std::filesystem::path& path, const std::string& content);

// Column sets shared with the plotting scripts.
inline const std::vector<std::string> kEchoColumns = {"theta", "x", "mean_sz_norm", "sem_sz_norm",
                                                      "var_circ_sz", "sensitivity", "gain_db", "n_samples"};
inline const std::vector<std::string> kQfiColumns = {"step", "mean_qfi", "std_qfi", "n_circuits", "n_axes"};
inline const std::vector<std::string> kGainColumns = {"x", "c_gamma_T", "gain_db"};
inline const std::vector<std::string> kNoisyColumns = {"theta", "gamma", "T", "mean_sz_norm",
                                                       "sem_sz_norm", "n_circuits", "model"};
inline const std::vector<std::string> kSpectrumColumns = {"S", "k", "level_index", "energy_over_J",
                                                          "degeneracy"};
inline const std::vector<std::string> kHusimiColumns = {"polar", "azimuth", "q"};

} // namespace bfecho::io

#endif
