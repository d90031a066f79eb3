#include "runner.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

using namespace fmtool;

int cmd_run(const std::string& path, const std::string& output) {
    auto config = load_config(path);
    if (!output.empty()) config.output.directory = output;
    RunOptions opt;
    opt.workers = workers_from_env();
    opt.seed = seed_from_env();
    const auto result = run_experiment(config, opt);
    std::vector<SummaryRow> rows;
    for (std::size_t i = 0; i < result.reports.size(); ++i)
        rows.push_back(summarize(result.manifest.entries[i], result.reports[i]));
    write_summary_text(std::cout, rows);
    std::cout << "wrote " << (config.output.directory / "manifest.json").string() << "\n";
    return exit_status(result.reports);
}

int cmd_report(const std::string& path, const std::string& format) {
    const std::filesystem::path manifest_path(path);
    const auto manifest = manifest_from_json(read_json_file(manifest_path));
    std::vector<SummaryRow> rows;
    std::vector<fm::VerificationReport> reports;
    for (const auto& entry : manifest.entries) {
        if (entry.report.empty()) throw std::runtime_error("manifest entry '" + entry.check + "' has no JSON report");
        reports.push_back(report_from_json(read_json_file(manifest_path.parent_path() / entry.report)));
        rows.push_back(summarize(entry, reports.back()));
    }
    if (format == "csv") {
        write_summary_csv(std::cout, rows);
    } else {
        std::cout << "config " << manifest.config << " (hash " << manifest.config_hash << ", seed " << manifest.seed
                  << ", version " << manifest.version << ")\n";
        write_summary_text(std::cout, rows);
        for (const auto& r : reports)
            if (!r.note.empty()) std::cout << r.check << ": " << r.note << "\n";
    }
    return exit_status(reports);
}

int cmd_spectrum(const std::string& path, const std::string& format, bool with_full, bool all) {
    const auto config = load_config(path);
    const auto model = config.model();
    const double period = config.grid.period;
    fm::Table table;
    table.columns = {"cluster", "quasi_energy", "leakage", "bound"};
    const auto lattice = fm::cluster_lattice(static_cast<int>(config.masses.size()));
    for (std::size_t i = 1; i < lattice.size(); ++i) {
        if (lattice[i].is_finest()) continue;
        for (const auto& q : fm::subsystem_quasi_energies(model, period, lattice[i]))
            if (all || q.bound) table.rows.push_back({static_cast<double>(i), q.value, q.leakage, q.bound ? 1.0 : 0.0});
    }
    const auto thresholds = fm::thresholds(model, period);
    std::vector<double> point;
    if (with_full) {
        Experiment experiment(config);
        point = fm::localized_eigenvalues(experiment.spectrum());
        for (double v : point) table.rows.push_back({0.0, v, 0.0, 1.0});
    }
    if (format == "csv") {
        write_csv(std::cout, table);
        return 0;
    }
    std::cout << "omega " << thresholds.omega() << "\nthreshold bases:";
    for (double b : thresholds.bases()) std::cout << " " << b;
    std::cout << (thresholds.bases().empty() ? " (only the ladder omega*Z of the free motion)\n" : "\n");
    for (const auto& row : table.rows) {
        const auto idx = static_cast<std::size_t>(row[0]);
        std::cout << (idx == 0 ? std::string("full system") : lattice[idx].label()) << "  quasi-energy " << row[1]
                  << "  leakage " << row[2] << (row[3] > 0.5 ? "  bound" : "  not bound") << "\n";
    }
    return 0;
}

int cmd_probe(const std::string& path, const std::string& check, int index, const std::vector<std::string>& params) {
    auto config = load_config(path);
    std::size_t pick = config.checks.size();
    int seen = 0;
    for (std::size_t i = 0; i < config.checks.size(); ++i)
        if (config.checks[i].name == check && seen++ == index) pick = i;
    if (pick == config.checks.size())
        throw ConfigError(path, 0, "checks", "no check named '" + check + "' at index " + std::to_string(index));
    auto spec = config.checks[pick];
    apply_overrides(spec, params);
    config.checks = {spec};
    RunOptions opt;
    opt.seed = seed_from_env();
    opt.write = false;
    const auto result = run_experiment(config, opt);
    std::cout << to_json(result.reports.front()).dump(2) << "\n";
    return exit_status(result.reports);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Floquet many-body verification driver"};
    app.require_subcommand(1);

    std::string config_path, manifest_path, output, format = "text", check;
    std::vector<std::string> params;
    int index = 0;
    bool full = false, all = false;

    auto* run = app.add_subcommand("run", "run every check of a config and write reports");
    run->add_option("config", config_path, "TOML or JSON experiment config")->required();
    run->add_option("--output", output, "write here instead of the config's output directory");

    auto* report = app.add_subcommand("report", "render the reports listed in a manifest");
    report->add_option("manifest", manifest_path, "manifest.json written by run")->required();
    report->add_option("--format", format, "text or csv")->check(CLI::IsMember({"text", "csv"}));

    auto* spectrum = app.add_subcommand("spectrum", "print subsystem quasi-energies and thresholds");
    spectrum->add_option("config", config_path)->required();
    spectrum->add_option("--format", format, "text or csv")->check(CLI::IsMember({"text", "csv"}));
    spectrum->add_flag("--full", full, "also diagonalize the full Floquet operator");
    spectrum->add_flag("--all", all, "list unbound subsystem states too");

    auto* probe = app.add_subcommand("probe", "run one check with parameter overrides");
    probe->add_option("config", config_path)->required();
    probe->add_option("--check", check, "check name")->required();
    probe->add_option("--index", index, "which check of that name (0-based)")->check(CLI::NonNegativeNumber);
    probe->add_option("--param", params, "key=value override, repeatable");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*run) return cmd_run(config_path, output);
        if (*report) return cmd_report(manifest_path, format);
        if (*spectrum) return cmd_spectrum(config_path, format, full, all);
        if (*probe) return cmd_probe(config_path, check, index, params);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const fm::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
