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

#include "bfecho/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace bfecho::io {

std::string format_double(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void Table::add_row(std::vector<Cell> row) {
    if (row.size() != columns.size()) {
        throw std::logic_error("Table::add_row: expected " + std::to_string(columns.size()) + " cells, got " +
                               std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
}

namespace {

std::string cell_text(const Cell& c, bool json) {
    if (const auto* d = std::get_if<double>(&c)) {
        const std::string s = format_double(*d);
        // JSON has no literal for non-finite numbers
        return (json && !std::isfinite(*d)) ? json_quote(s) : s;
    }
    if (const auto* i = std::get_if<std::int64_t>(&c)) {
        return std::to_string(*i);
    }
    const auto& s = std::get<std::string>(c);
    return json ? json_quote(s) : s;
}

} // namespace

std::string to_csv(const Table& table) {
    std::string out;
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        out += (i ? "," : "") + table.columns[i];
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) {
                out += ',';
            }
            out += cell_text(row[i], false);
        }
        out += '\n';
    }
    return out;
}

std::string to_json(const Table& table) {
    std::string out = "[\n";
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        out += "  {";
        for (std::size_t i = 0; i < table.columns.size(); ++i) {
            out += (i ? ", " : "") + json_quote(table.columns[i]) + ": " + cell_text(table.rows[r][i], true);
        }
        out += r + 1 < table.rows.size() ? "},\n" : "}\n";
    }
    out += "]\n";
    return out;
}

std::string json_quote(std::string_view s) {
    std::string out = "\"";
    for (char ch : s) {
        switch (ch) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        case '\r': out += "\\r"; break;
        default:
            if (static_cast<unsigned char>(ch) < 0x20) {
                char buf[8];
                std::snprintf(buf, sizeof buf, "\\u%04x", static_cast<unsigned>(ch));
                out += buf;
            } else {
                out += ch;
            }
        }
    }
    return out + "\"";
}

JsonObject& JsonObject::add(const std::string& key, double v) {
    fields_.emplace_back(key, std::isfinite(v) ? format_double(v) : json_quote(format_double(v)));
    return *this;
}

JsonObject& JsonObject::add(const std::string& key, std::int64_t v) {
    fields_.emplace_back(key, std::to_string(v));
    return *this;
}

JsonObject& JsonObject::add(const std::string& key, std::uint64_t v) {
    fields_.emplace_back(key, std::to_string(v));
    return *this;
}

JsonObject& JsonObject::add(const std::string& key, bool v) {
    fields_.emplace_back(key, v ? "true" : "false");
    return *this;
}

JsonObject& JsonObject::add(const std::string& key, const std::string& v) {
    fields_.emplace_back(key, json_quote(v));
    return *this;
}

JsonObject& JsonObject::add(const std::string& key, const std::vector<double>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        s += (i ? ", " : "") + (std::isfinite(v[i]) ? format_double(v[i]) : json_quote(format_double(v[i])));
    }
    fields_.emplace_back(key, s + "]");
    return *this;
}

std::string JsonObject::dump() const {
    std::string out = "{\n";
    for (std::size_t i = 0; i < fields_.size(); ++i) {
        out += "  " + json_quote(fields_[i].first) + ": " + fields_[i].second;
        out += i + 1 < fields_.size() ? ",\n" : "\n";
    }
    return out + "}\n";
}

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : data) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) {
        throw IoError("failed writing '" + path.string() + "'");
    }
}

} // namespace bfecho::io
