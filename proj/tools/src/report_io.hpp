#pragma once

#include "fm/verify.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace fmtool {

using nlohmann::json;

json to_json(const fm::VerificationReport& report);
fm::VerificationReport report_from_json(const json& j);

// "name [unit]" for a table column.
std::string column_header(const std::string& column);

// CSV with one header row naming columns and units; numbers printed round-trip exact.
void write_csv(std::ostream& out, const fm::Table& table);
// Parses and validates a table written by write_csv: known header syntax, equal row lengths,
// numeric cells. Throws std::runtime_error naming the row and column.
fm::Table read_csv(std::istream& in);

struct ManifestEntry {
    std::string check;
    std::string where;
    std::string report;  // file name relative to the manifest
    std::string table;   // empty when no table was written
    std::string status;
    double seconds = 0.0;
};

struct Manifest {
    std::string config;
    std::string config_hash;
    std::string version;
    std::uint64_t seed = 0;
    int workers = 1;
    std::vector<ManifestEntry> entries;
};

json to_json(const Manifest& manifest);

// One row per check of a run, as rendered by `report --format csv`.
struct SummaryRow {
    std::string check;
    std::string where;
    std::string status;
    double computed = 0.0;
    double bound = 0.0;
    double margin = 0.0;
    double tolerance = 0.0;
    std::string parameters;  // "k=v;k=v", sorted by key
};

SummaryRow summarize(const ManifestEntry& entry, const fm::VerificationReport& report);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);
// Validates the header, the status vocabulary and every numeric cell.
std::vector<SummaryRow> read_summary_csv(std::istream& in);
void write_summary_text(std::ostream& out, const std::vector<SummaryRow>& rows);
Manifest manifest_from_json(const json& j);

// Dumps with a fixed layout: identical inputs give identical bytes.
void write_json_file(const std::filesystem::path& path, const json& j);
json read_json_file(const std::filesystem::path& path);

}  // namespace fmtool
