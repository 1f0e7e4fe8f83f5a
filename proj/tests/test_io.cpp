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

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

using namespace bfecho::io;

TEST_CASE("format_double round-trips and spells non-finite values") {
    for (double v : {0.0, 1.0, -2.5, 0.1, 1.0 / 3.0, 6.02214076e23, 5e-324, 1.7976931348623157e308}) {
        CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
    }
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(3.0) == "3");
    CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
    CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
}

TEST_CASE("Table rejects rows of the wrong width") {
    Table t({"a", "b"});
    CHECK_NOTHROW(t.add_row({1.0, std::int64_t{2}}));
    CHECK_THROWS_AS(t.add_row({1.0}), std::logic_error);
    CHECK_THROWS_AS(t.add_row({1.0, 2.0, 3.0}), std::logic_error);
    CHECK(t.rows.size() == 1);
}

TEST_CASE("CSV layout") {
    Table t({"x", "n", "name"});
    t.add_row({0.25, std::int64_t{7}, std::string("iso")});
    t.add_row({std::numeric_limits<double>::quiet_NaN(), std::int64_t{-1}, std::string("z")});
    CHECK(to_csv(t) == "x,n,name\n0.25,7,iso\nnan,-1,z\n");
    CHECK(to_csv(Table({"only"})) == "only\n");
}

TEST_CASE("JSON table parses back with the same values") {
    Table t({"x", "n", "name"});
    t.add_row({1.0 / 3.0, std::int64_t{42}, std::string("a\"b\\c\n")});
    t.add_row({std::numeric_limits<double>::infinity(), std::int64_t{0}, std::string("")});
    const auto j = nlohmann::json::parse(to_json(t));
    REQUIRE(j.is_array());
    REQUIRE(j.size() == 2);
    CHECK(j[0]["x"].get<double>() == 1.0 / 3.0);
    CHECK(j[0]["n"].get<int>() == 42);
    CHECK(j[0]["name"].get<std::string>() == "a\"b\\c\n");
    CHECK(j[1]["x"].get<std::string>() == "inf");
    CHECK(nlohmann::json::parse(to_json(Table({"a"}))).empty());
}

TEST_CASE("JsonObject keeps insertion order") {
    JsonObject o;
    o.add("zeta", 1).add("alpha", 0.5).add("flag", true).add("name", "x").add("list", std::vector<double>{1.0, 2.5});
    o.add("big", std::uint64_t{18446744073709551615ULL}).add("bad", std::numeric_limits<double>::quiet_NaN());
    const auto j = nlohmann::ordered_json::parse(o.dump());
    std::vector<std::string> keys;
    for (const auto& [k, v] : j.items()) {
        keys.push_back(k);
    }
    CHECK(keys == std::vector<std::string>{"zeta", "alpha", "flag", "name", "list", "big", "bad"});
    CHECK(j["alpha"].get<double>() == 0.5);
    CHECK(j["flag"].get<bool>());
    CHECK(j["list"][1].get<double>() == 2.5);
    CHECK(j["big"].get<std::uint64_t>() == 18446744073709551615ULL);
    CHECK(j["bad"].get<std::string>() == "nan");
}

TEST_CASE("json_quote escapes control characters") {
    CHECK(json_quote("plain") == "\"plain\"");
    CHECK(json_quote(std::string("\x01", 1)) == "\"\\u0001\"");
    CHECK(nlohmann::json::parse(json_quote("tab\there\r")).get<std::string>() == "tab\there\r");
}

TEST_CASE("FNV-1a reference vectors") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
    CHECK(hex64(0xcbf29ce484222325ULL) == "cbf29ce484222325");
    CHECK(hex64(1) == "0000000000000001");
}

TEST_CASE("write_text_file writes bytes verbatim and reports failures") {
    const auto dir = std::filesystem::temp_directory_path() / "bfecho_test_io";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    const auto path = dir / "f.txt";
    write_text_file(path, "a,b\n1,2\n");
    write_text_file(path, "x\n");
    std::ifstream f(path, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    CHECK(ss.str() == "x\n");
    CHECK_THROWS_AS(write_text_file(dir / "missing" / "f.txt", "x"), IoError);
    std::filesystem::remove_all(dir);
}
