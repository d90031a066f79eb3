#pragma once

#include "fm/potentials.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace fmtool {

using nlohmann::json;

// Bad config: where (file, line when known, field path) and why. Maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string file, int line, std::string field, const std::string& message);
    const std::string& field() const { return field_; }
    int line() const { return line_; }

private:
    std::string field_;
    int line_;
};

struct GridSpec {
    double period = 0.0;
    int modes = 8;
    double half_width = 32.0;
    int points = 256;
};

struct FieldSpec {
    double constant = 0.0;
    std::vector<double> cos;
    std::vector<double> sin;
};

struct CheckSpec {
    std::string name;
    json params;   // everything except "name"
    std::string where;  // "checks[i]" for diagnostics
};

struct OutputSpec {
    std::filesystem::path directory = "fm-out";
    bool json = true;
    bool csv = true;
};

struct ExperimentConfig {
    std::filesystem::path source;
    std::uint64_t seed = 1;
    std::vector<double> masses;
    std::vector<double> charges;
    GridSpec grid;
    std::vector<fm::PairInteraction> pairs;  // 0-based particle labels
    std::optional<FieldSpec> field;
    std::vector<CheckSpec> checks;
    OutputSpec output;
    json canonical;  // the whole document, for hashing and the manifest
    std::map<std::string, int> lines;  // field path -> source line (TOML only)

    fm::PotentialModel model() const;
    fm::ProductGrid product_grid() const;
    std::string hash() const;  // FNV-1a of the canonical JSON, hex
};

const std::vector<std::string>& known_checks();

// Reads TOML (any extension but .json) or JSON, validates the schema and the parameter ranges.
// Relative output directories resolve against the config file.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& text, bool is_json, const std::filesystem::path& source);

// Applies "key=value" overrides to one check's parameters (values parsed as JSON, else string).
void apply_overrides(CheckSpec& check, const std::vector<std::string>& assignments);

// ConfigError for a field, with its source line when known.
[[noreturn]] void fail(const ExperimentConfig& config, const std::string& field, const std::string& message);

// Typed access to one table of the document; every failure names the field and its line.
class Reader {
public:
    Reader(const ExperimentConfig& config, const json& object, std::string path)
        : config_(config), object_(object), path_(std::move(path)) {
        if (!object_.is_object()) fail(config_, path_, "expected a table");
    }

    bool has(const std::string& key) const { return object_.contains(key); }

    double number(const std::string& key, std::optional<double> fallback = {}) {
        const json* v = get(key, fallback.has_value());
        if (!v) return *fallback;
        if (!v->is_number()) fail(config_, field(key), "expected a number");
        return v->get<double>();
    }

    std::int64_t integer(const std::string& key, std::optional<std::int64_t> fallback = {}) {
        const json* v = get(key, fallback.has_value());
        if (!v) return *fallback;
        if (!v->is_number_integer()) fail(config_, field(key), "expected an integer");
        return v->get<std::int64_t>();
    }

    std::string text(const std::string& key, std::optional<std::string> fallback = {}) {
        const json* v = get(key, fallback.has_value());
        if (!v) return *fallback;
        if (!v->is_string()) fail(config_, field(key), "expected a string");
        return v->get<std::string>();
    }

    bool flag(const std::string& key, bool fallback) {
        const json* v = get(key, true);
        if (!v) return fallback;
        if (!v->is_boolean()) fail(config_, field(key), "expected true or false");
        return v->get<bool>();
    }

    std::vector<double> numbers(const std::string& key, std::optional<std::vector<double>> fallback = {}) {
        const json* v = get(key, fallback.has_value());
        if (!v) return *fallback;
        if (!v->is_array()) fail(config_, field(key), "expected an array of numbers");
        std::vector<double> out;
        for (std::size_t i = 0; i < v->size(); ++i) {
            if (!(*v)[i].is_number()) fail(config_, field(key) + "[" + std::to_string(i) + "]", "expected a number");
            out.push_back((*v)[i].get<double>());
        }
        return out;
    }

    const json& raw(const std::string& key) {
        const json* v = get(key, false);
        return *v;
    }

    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    // Every key must have been read.
    void finish() const {
        for (const auto& [key, value] : object_.items())
            if (!used_.contains(key)) fail(config_, field(key), "unknown field");
    }

private:
    const json* get(const std::string& key, bool optional) {
        used_.insert(key);
        if (!object_.contains(key)) {
            if (optional) return nullptr;
            fail(config_, field(key), "missing required field");
        }
        return &object_.at(key);
    }

    const ExperimentConfig& config_;
    const json& object_;
    std::string path_;
    std::set<std::string> used_;
};

}  // namespace fmtool
