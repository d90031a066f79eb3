#include "config.hpp"

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace fmtool {

namespace {

std::string location(const std::string& file, int line) {
    return line > 0 ? file + ":" + std::to_string(line) : file;
}

// TOML document -> JSON value, recording the source line of every field path.
json to_json(const toml::node& node, const std::string& path, std::map<std::string, int>& lines) {
    lines[path] = static_cast<int>(node.source().begin.line);
    if (const auto* t = node.as_table()) {
        json out = json::object();
        for (const auto& [key, value] : *t) {
            const std::string child = path.empty() ? std::string(key.str()) : path + "." + std::string(key.str());
            out[std::string(key.str())] = to_json(value, child, lines);
        }
        return out;
    }
    if (const auto* a = node.as_array()) {
        json out = json::array();
        for (std::size_t i = 0; i < a->size(); ++i)
            out.push_back(to_json(*a->get(i), path + "[" + std::to_string(i) + "]", lines));
        return out;
    }
    if (auto v = node.value<std::int64_t>(); v && node.is_integer()) return *v;
    if (auto v = node.value<double>(); v && node.is_floating_point()) return *v;
    if (auto v = node.value<bool>()) return *v;
    if (auto v = node.value<std::string>()) return *v;
    // dates and times have no meaning in an experiment config
    std::ostringstream os;
    node.visit([&](const auto& v) { os << v; });
    return os.str();
}

fm::PairFamily parse_family(const ExperimentConfig& c, const std::string& field, const std::string& name) {
    if (name == "gaussian-well") return fm::PairFamily::GaussianWell;
    if (name == "soft-core") return fm::PairFamily::SoftCore;
    if (name == "zero") return fm::PairFamily::Zero;
    fail(c, field, "unknown pair family '" + name + "' (gaussian-well, soft-core, zero)");
}

void read_document(ExperimentConfig& c) {
    Reader top(c, c.canonical, "");
    c.seed = static_cast<std::uint64_t>(top.integer("seed", 1));

    Reader geometry(c, top.raw("geometry"), "geometry");
    c.masses = geometry.numbers("masses");
    c.charges = geometry.numbers("charges", std::vector<double>{});
    geometry.finish();
    try {
        fm::MassGeometry(c.masses, c.charges);
    } catch (const fm::Error& e) {
        fail(c, "geometry.masses", e.what());
    }
    const int n = static_cast<int>(c.masses.size());

    if (top.has("grid")) {
        Reader grid(c, top.raw("grid"), "grid");
        c.grid.period = grid.number("period", 2.0 * std::numbers::pi);
        c.grid.modes = static_cast<int>(grid.integer("modes", 8));
        c.grid.half_width = grid.number("half_width", 32.0);
        c.grid.points = static_cast<int>(grid.integer("points", 256));
        grid.finish();
    } else {
        c.grid.period = 2.0 * std::numbers::pi;
    }
    if (!(c.grid.period > 0.0)) fail(c, "grid.period", "period must be positive");
    if (c.grid.modes < 4 || c.grid.modes % 2 != 0) fail(c, "grid.modes", "mode count must be even and at least 4");
    if (!(c.grid.half_width > 0.0)) fail(c, "grid.half_width", "half width must be positive");
    if (c.grid.points < 8 || (c.grid.points & (c.grid.points - 1)) != 0)
        fail(c, "grid.points", "point count must be a power of two and at least 8");

    if (top.has("potentials")) {
        const json& list = top.raw("potentials");
        if (!list.is_array()) fail(c, "potentials", "expected an array of tables");
        std::set<std::pair<int, int>> seen;
        for (std::size_t i = 0; i < list.size(); ++i) {
            const std::string where = "potentials[" + std::to_string(i) + "]";
            Reader p(c, list[i], where);
            const auto pair = p.numbers("pair");
            if (pair.size() != 2 || pair[0] != std::round(pair[0]) || pair[1] != std::round(pair[1]))
                fail(c, where + ".pair", "expected two particle labels");
            const int j = static_cast<int>(pair[0]) - 1, k = static_cast<int>(pair[1]) - 1;
            if (j < 0 || k < 0 || j >= n || k >= n || j == k)
                fail(c, where + ".pair", "pair references a particle outside 1.." + std::to_string(n));
            if (!seen.insert({std::min(j, k), std::max(j, k)}).second) fail(c, where + ".pair", "pair listed twice");
            fm::PairProfile profile;
            profile.family = parse_family(c, where + ".family", p.text("family"));
            profile.strength = p.number("strength", 0.0);
            profile.width = p.number("width", 1.0);
            p.finish();
            if (!(profile.width > 0.0)) fail(c, where + ".width", "width must be positive");
            c.pairs.push_back({std::min(j, k), std::max(j, k), profile});
        }
    }

    if (top.has("field")) {
        Reader f(c, top.raw("field"), "field");
        FieldSpec spec;
        spec.constant = f.number("constant", 0.0);
        spec.cos = f.numbers("cos", std::vector<double>{});
        spec.sin = f.numbers("sin", std::vector<double>{});
        f.finish();
        if (c.charges.empty()) fail(c, "field", "a field needs geometry.charges");
        c.field = spec;
    }

    if (top.has("output")) {
        Reader o(c, top.raw("output"), "output");
        c.output.directory = o.text("directory", "fm-out");
        if (o.has("formats")) {
            const json& formats = o.raw("formats");
            if (!formats.is_array()) fail(c, "output.formats", "expected an array of strings");
            c.output.json = c.output.csv = false;
            for (const auto& f : formats) {
                if (f == "json") c.output.json = true;
                else if (f == "csv") c.output.csv = true;
                else fail(c, "output.formats", "unknown format " + f.dump() + " (json, csv)");
            }
        }
        o.finish();
    }
    if (c.output.directory.is_relative()) c.output.directory = c.source.parent_path() / c.output.directory;

    const json& checks = top.raw("checks");
    if (!checks.is_array() || checks.empty()) fail(c, "checks", "expected a non-empty array of tables");
    for (std::size_t i = 0; i < checks.size(); ++i) {
        const std::string where = "checks[" + std::to_string(i) + "]";
        if (!checks[i].is_object()) fail(c, where, "expected a table");
        if (!checks[i].contains("name") || !checks[i]["name"].is_string()) fail(c, where + ".name", "missing check name");
        CheckSpec spec{checks[i]["name"].get<std::string>(), checks[i], where};
        spec.params.erase("name");
        const auto& names = known_checks();
        if (std::find(names.begin(), names.end(), spec.name) == names.end())
            fail(c, where + ".name", "unknown check '" + spec.name + "'");
        c.checks.push_back(std::move(spec));
    }
    top.finish();
}

}  // namespace

ConfigError::ConfigError(std::string file, int line, std::string field, const std::string& message)
    : std::runtime_error(location(file, line) + ": " + (field.empty() ? "" : field + ": ") + message),
      field_(std::move(field)), line_(line) {}

void fail(const ExperimentConfig& config, const std::string& field, const std::string& message) {
    int line = 0;
    // the closest recorded ancestor of the field carries the line
    for (std::string path = field; !path.empty();) {
        if (auto it = config.lines.find(path); it != config.lines.end()) {
            line = it->second;
            break;
        }
        const auto cut = path.find_last_of(".[");
        path = cut == std::string::npos ? "" : path.substr(0, cut);
    }
    throw ConfigError(config.source.string(), line, field, message);
}

const std::vector<std::string>& known_checks() {
    static const std::vector<std::string> names = {"mourre", "lap", "virial", "modes", "eta", "ladder",
                                                   "floquet-group", "avron-herbst", "smoothness", "minimal-velocity"};
    return names;
}

fm::PotentialModel ExperimentConfig::model() const {
    fm::MassGeometry geometry(masses, charges);
    std::optional<fm::AcStarkFields> fields;
    if (field) {
        const double omega = 2.0 * std::numbers::pi / grid.period;
        fields.emplace(geometry, fm::TrigSeries::from_cos_sin(omega, field->constant, field->cos, field->sin));
    }
    return fm::PotentialModel(geometry, pairs, fields);
}

fm::ProductGrid ExperimentConfig::product_grid() const {
    return fm::ProductGrid(grid.period, grid.modes, grid.half_width, grid.points, static_cast<int>(masses.size()) - 1);
}

std::string ExperimentConfig::hash() const {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : canonical.dump()) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ExperimentConfig parse_config(const std::string& text, bool is_json, const std::filesystem::path& source) {
    ExperimentConfig c;
    c.source = source;
    if (is_json) {
        try {
            c.canonical = json::parse(text);
        } catch (const json::parse_error& e) {
            throw ConfigError(source.string(), 0, "", std::string("JSON parse error: ") + e.what());
        }
    } else {
        try {
            const toml::table table = toml::parse(text, source.string());
            c.canonical = to_json(table, "", c.lines);
        } catch (const toml::parse_error& e) {
            throw ConfigError(source.string(), static_cast<int>(e.source().begin.line), "",
                              std::string(e.description()));
        }
    }
    read_document(c);
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string(), 0, "", "cannot open config file");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.extension() == ".json", path);
}

void apply_overrides(CheckSpec& check, const std::vector<std::string>& assignments) {
    for (const auto& a : assignments) {
        const auto eq = a.find('=');
        if (eq == std::string::npos || eq == 0)
            throw ConfigError("--param", 0, a, "expected key=value");
        const std::string key = a.substr(0, eq), value = a.substr(eq + 1);
        if (key == "name") throw ConfigError("--param", 0, key, "the check name cannot be overridden");
        try {
            check.params[key] = json::parse(value);
        } catch (const json::parse_error&) {
            check.params[key] = value;
        }
    }
}

}  // namespace fmtool
