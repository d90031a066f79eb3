#include "report_io.hpp"

#include <charconv>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace fmtool {

namespace {

// Non-finite values are kept as strings so they survive the round trip.
json number(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

double number(const json& j) {
    if (j.is_number()) return j.get<double>();
    const auto s = j.get<std::string>();
    if (s == "nan") return std::nan("");
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    throw std::runtime_error("not a number: " + s);
}

json numbers(const std::vector<double>& v) {
    json out = json::array();
    for (double x : v) out.push_back(number(x));
    return out;
}

std::vector<double> numbers(const json& j) {
    std::vector<double> out;
    for (const auto& x : j) out.push_back(number(x));
    return out;
}

const std::map<std::string, std::string>& units() {
    static const std::map<std::string, std::string> u = {
        {"lambda", "energy"},      {"epsilon", "energy"},        {"norm", "1"},
        {"iterations", "count"},   {"sigma", "time"},            {"integrand", "1"},
        {"mode", "omega"},         {"filter_norm", "1"},         {"ritz_min", "1"},
        {"constant", "1"},         {"eigenvalue", "energy"},     {"virial_residual", "1"},
        {"lambda_a", "energy"},    {"bin", "count"},             {"window", "1"},
        {"commutator_min", "1"},   {"fiber_constant", "1"},      {"form_min", "1"},
        {"scale", "length"},       {"ritz", "1"},                {"margin", "1"},
        {"quasi_energy", "energy"}, {"leakage", "1"},            {"mode_centroid", "omega"},
        {"threshold", "energy"},   {"cluster", "index"},         {"bound", "flag"},
    };
    return u;
}

std::string format(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace

json to_json(const fm::VerificationReport& r) {
    json j;
    j["check"] = r.check;
    j["status"] = std::string(fm::to_string(r.status));
    j["computed"] = number(r.computed);
    j["bound"] = number(r.bound);
    j["margin"] = number(r.margin);
    j["tolerance"] = number(r.tolerance);
    j["grid"] = r.grid;
    j["note"] = r.note;
    json params = json::object();
    for (const auto& [k, v] : r.parameters) params[k] = number(v);
    j["parameters"] = params;
    json series = json::object();
    for (const auto& [k, v] : r.series) series[k] = numbers(v);
    j["series"] = series;
    json rows = json::array();
    for (const auto& row : r.table.rows) rows.push_back(numbers(row));
    j["table"] = {{"columns", r.table.columns}, {"rows", rows}};
    return j;
}

fm::VerificationReport report_from_json(const json& j) {
    fm::VerificationReport r;
    r.check = j.at("check").get<std::string>();
    const auto status = j.at("status").get<std::string>();
    if (status == "PASS") r.status = fm::CheckStatus::Pass;
    else if (status == "FAIL") r.status = fm::CheckStatus::Fail;
    else if (status == "SKIP") r.status = fm::CheckStatus::Skip;
    else throw std::runtime_error("unknown status '" + status + "'");
    r.computed = number(j.at("computed"));
    r.bound = number(j.at("bound"));
    r.margin = number(j.at("margin"));
    r.tolerance = number(j.at("tolerance"));
    r.grid = j.at("grid").get<std::string>();
    r.note = j.at("note").get<std::string>();
    for (const auto& [k, v] : j.at("parameters").items()) r.parameters[k] = number(v);
    for (const auto& [k, v] : j.at("series").items()) r.series[k] = numbers(v);
    r.table.columns = j.at("table").at("columns").get<std::vector<std::string>>();
    for (const auto& row : j.at("table").at("rows")) r.table.rows.push_back(numbers(row));
    return r;
}

std::string column_header(const std::string& column) {
    const auto it = units().find(column);
    return column + " [" + (it == units().end() ? "1" : it->second) + "]";
}

void write_csv(std::ostream& out, const fm::Table& table) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) out << (c ? "," : "") << column_header(table.columns[c]);
    out << "\n";
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format(row[c]);
        out << "\n";
    }
}

fm::Table read_csv(std::istream& in) {
    fm::Table t;
    std::string line;
    if (!std::getline(in, line) || line.empty()) throw std::runtime_error("csv: missing header row");
    std::stringstream header(line);
    for (std::string cell; std::getline(header, cell, ',');) {
        const auto open = cell.find(" [");
        if (open == std::string::npos || open == 0 || cell.back() != ']')
            throw std::runtime_error("csv: header cell '" + cell + "' is not 'name [unit]'");
        t.columns.push_back(cell.substr(0, open));
    }
    for (int row = 2; std::getline(in, line); ++row) {
        if (line.empty()) continue;
        std::vector<double> values;
        std::stringstream cells(line);
        for (std::string cell; std::getline(cells, cell, ',');) {
            double v = 0.0;
            if (cell == "nan") v = std::nan("");
            else if (cell == "inf") v = INFINITY;
            else if (cell == "-inf") v = -INFINITY;
            else {
                const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
                if (res.ec != std::errc() || res.ptr != cell.data() + cell.size())
                    throw std::runtime_error("csv: row " + std::to_string(row) + ", column " +
                                             std::to_string(values.size() + 1) + ": '" + cell + "' is not a number");
            }
            values.push_back(v);
        }
        if (values.size() != t.columns.size())
            throw std::runtime_error("csv: row " + std::to_string(row) + " has " + std::to_string(values.size()) +
                                     " cells, header has " + std::to_string(t.columns.size()));
        t.rows.push_back(std::move(values));
    }
    return t;
}

json to_json(const Manifest& m) {
    json entries = json::array();
    for (const auto& e : m.entries)
        entries.push_back({{"check", e.check}, {"where", e.where}, {"report", e.report}, {"table", e.table},
                           {"status", e.status}, {"seconds", e.seconds}});
    return {{"config", m.config}, {"config_hash", m.config_hash}, {"version", m.version},
            {"seed", m.seed},     {"workers", m.workers},         {"checks", entries}};
}

Manifest manifest_from_json(const json& j) {
    Manifest m;
    m.config = j.at("config").get<std::string>();
    m.config_hash = j.at("config_hash").get<std::string>();
    m.version = j.at("version").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.workers = j.at("workers").get<int>();
    for (const auto& e : j.at("checks"))
        m.entries.push_back({e.at("check").get<std::string>(), e.at("where").get<std::string>(),
                             e.at("report").get<std::string>(), e.at("table").get<std::string>(),
                             e.at("status").get<std::string>(), e.at("seconds").get<double>()});
    return m;
}

SummaryRow summarize(const ManifestEntry& entry, const fm::VerificationReport& r) {
    std::string params;
    for (const auto& [k, v] : r.parameters) params += (params.empty() ? "" : ";") + k + "=" + format(v);
    return {entry.check, entry.where, std::string(fm::to_string(r.status)), r.computed, r.bound, r.margin, r.tolerance,
            params};
}

namespace {

constexpr const char* kSummaryHeader = "check,where,status,computed,bound,margin,tolerance,parameters";

double parse_cell(const std::string& cell, int row, const char* column) {
    if (cell == "nan") return std::nan("");
    if (cell == "inf") return INFINITY;
    if (cell == "-inf") return -INFINITY;
    double v = 0.0;
    const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (res.ec != std::errc() || res.ptr != cell.data() + cell.size())
        throw std::runtime_error("csv: row " + std::to_string(row) + ", " + column + ": '" + cell + "' is not a number");
    return v;
}

}  // namespace

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
    out << kSummaryHeader << "\n";
    for (const auto& r : rows)
        out << r.check << "," << r.where << "," << r.status << "," << format(r.computed) << "," << format(r.bound) << ","
            << format(r.margin) << "," << format(r.tolerance) << "," << r.parameters << "\n";
}

std::vector<SummaryRow> read_summary_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kSummaryHeader) throw std::runtime_error("csv: unexpected summary header");
    std::vector<SummaryRow> rows;
    for (int row = 2; std::getline(in, line); ++row) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
        if (cells.size() == 7) cells.emplace_back();  // empty parameter list
        if (cells.size() != 8) throw std::runtime_error("csv: row " + std::to_string(row) + " does not have 8 cells");
        if (cells[2] != "PASS" && cells[2] != "FAIL" && cells[2] != "SKIP")
            throw std::runtime_error("csv: row " + std::to_string(row) + ": unknown status '" + cells[2] + "'");
        rows.push_back({cells[0], cells[1], cells[2], parse_cell(cells[3], row, "computed"),
                        parse_cell(cells[4], row, "bound"), parse_cell(cells[5], row, "margin"),
                        parse_cell(cells[6], row, "tolerance"), cells[7]});
    }
    return rows;
}

void write_summary_text(std::ostream& out, const std::vector<SummaryRow>& rows) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-18s %-10s %-6s %14s %14s %14s\n", "check", "where", "status", "computed", "bound",
                  "margin");
    out << buf;
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%-18s %-10s %-6s %14.6g %14.6g %14.6g\n", r.check.c_str(), r.where.c_str(),
                      r.status.c_str(), r.computed, r.bound, r.margin);
        out << buf;
        if (!r.parameters.empty()) out << "    " << r.parameters << "\n";
    }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << "\n";
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return json::parse(in);
}

}  // namespace fmtool
