#include "runner.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>

using namespace fmtool;

namespace {

const std::filesystem::path kConfigs = FM_CONFIG_DIR;
const std::filesystem::path kData = FM_TEST_DATA_DIR;

const char* kMinimal = R"(
seed = 4

[geometry]
masses = [1.0, 1.0]

[[checks]]
name = "modes"
)";

std::string message_of(const std::string& text) {
    try {
        validate_checks(parse_config(text, false, "inline.toml"));
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("config: TOML and JSON spellings of one experiment hash alike") {
    const auto toml = load_config(kConfigs / "free-two-body.toml");
    const auto json = load_config(kConfigs / "free-two-body.json");
    CHECK(toml.hash() == json.hash());
    CHECK(toml.hash().size() == 16);
    CHECK(toml.checks.size() == json.checks.size());
    CHECK(load_config(kData / "quick.toml").hash() != toml.hash());
}

TEST_CASE("config: defaults and labels") {
    const auto c = parse_config(kMinimal, false, "/tmp/x/inline.toml");
    CHECK(c.seed == 4);
    CHECK(c.grid.modes == 8);
    CHECK(c.grid.points == 256);
    CHECK(c.output.directory == std::filesystem::path("/tmp/x/fm-out"));
    CHECK(c.product_grid().dim() == 1);

    const auto p = parse_config(std::string(kMinimal) + R"(
[[potentials]]
pair = [2, 1]
family = "soft-core"
strength = 0.3
)",
                                false, "inline.toml");
    REQUIRE(p.pairs.size() == 1);
    CHECK(p.pairs[0].first == 0);
    CHECK(p.pairs[0].second == 1);
}

TEST_CASE("config: errors name the file, line and field") {
    const auto unknown = message_of(std::string(kMinimal) + "\n[grid]\nmodes = 8\nmodez = 3\n");
    CHECK(unknown.find("inline.toml:") == 0);
    CHECK(unknown.find("grid.modez") != std::string::npos);

    const auto odd = message_of(std::string(kMinimal) + "\n[grid]\npoints = 100\n");
    CHECK(odd.find("inline.toml:11: grid.points") != std::string::npos);

    const auto ordering = message_of(std::string(kMinimal) +
                                     "\n[[checks]]\nname = \"mourre\"\nlambda0 = 0.5\ndelta0 = 0.1\ndelta = 0.1\n");
    CHECK(ordering.find("checks[1]") != std::string::npos);
    CHECK(ordering.find("ordering") != std::string::npos);

    const auto four = message_of("[geometry]\nmasses = [1.0, 1.0, 1.0, 1.0]\n[[checks]]\nname = \"modes\"\n");
    CHECK(four.find("unsupported-configuration") != std::string::npos);
    CHECK(four.find("geometry.masses") != std::string::npos);

    CHECK(message_of(std::string(kMinimal) + "\n[[checks]]\nname = \"nope\"\n").find("unknown check") !=
          std::string::npos);
    CHECK(message_of(std::string(kMinimal) + "\n[[potentials]]\npair = [1, 3]\nfamily = \"zero\"\n")
              .find("outside 1..2") != std::string::npos);
    CHECK(message_of(std::string(kMinimal) + "\n[field]\ncos = [0.1]\n").find("charges") != std::string::npos);
    CHECK(message_of(std::string(kMinimal) + "\n[[checks]]\nname = \"avron-herbst\"\n").find("field") !=
          std::string::npos);
    CHECK_THROWS_AS(parse_config("seed = ", false, "bad.toml"), ConfigError);
    CHECK_THROWS_AS(parse_config("{", true, "bad.json"), ConfigError);
}

TEST_CASE("config: parameter overrides") {
    CheckSpec spec{"mourre", json::object(), "checks[0]"};
    apply_overrides(spec, {"delta=0.02", "conjugate=glued", "scales=[2,4]"});
    CHECK(spec.params["delta"].get<double>() == 0.02);
    CHECK(spec.params["conjugate"] == "glued");
    CHECK(spec.params["scales"].size() == 2);
    CHECK_THROWS_AS(apply_overrides(spec, {"delta"}), ConfigError);
    CHECK_THROWS_AS(apply_overrides(spec, {"name=lap"}), ConfigError);
}

TEST_CASE("report io: JSON round trip keeps non-finite values") {
    fm::VerificationReport r = fm::VerificationReport::judge("mourre", 0.7, 0.5, 1e-6);
    r.parameters = {{"lambda0", 0.5}, {"ratio", std::nan("")}};
    r.series["values"] = {1.0, -INFINITY};
    r.table.columns = {"scale", "ritz"};
    r.table.rows = {{2.0, 0.1}, {4.0, 0.30000000000000004}};
    const auto back = report_from_json(to_json(r));
    CHECK(back.status == fm::CheckStatus::Pass);
    CHECK(back.computed == 0.7);
    CHECK(std::isnan(back.parameters.at("ratio")));
    CHECK(back.series.at("values")[1] == -INFINITY);
    CHECK(back.table.rows[1][1] == 0.30000000000000004);
    CHECK(to_json(back).dump() == to_json(r).dump());
}

TEST_CASE("report io: CSV tables round trip and are validated") {
    fm::Table t;
    t.columns = {"lambda", "norm", "custom"};
    t.rows = {{0.1, 1.0 / 3.0, 7.0}, {0.2, std::nan(""), -1e-300}};
    std::stringstream buf;
    write_csv(buf, t);
    CHECK(buf.str().rfind("lambda [energy],norm [1],custom [1]\n", 0) == 0);
    const auto back = read_csv(buf);
    CHECK(back.columns == t.columns);
    CHECK(back.rows[0][1] == 1.0 / 3.0);
    CHECK(std::isnan(back.rows[1][1]));
    CHECK(back.rows[1][2] == -1e-300);

    std::stringstream no_unit("lambda,norm\n1,2\n");
    CHECK_THROWS(read_csv(no_unit));
    std::stringstream ragged("a [1],b [1]\n1,2\n3\n");
    CHECK_THROWS(read_csv(ragged));
    std::stringstream text("a [1]\nx\n");
    CHECK_THROWS(read_csv(text));
}

TEST_CASE("report io: summary CSV round trip") {
    const auto manifest = manifest_from_json(read_json_file(kData / "skip" / "manifest.json"));
    std::vector<SummaryRow> rows;
    for (const auto& e : manifest.entries)
        rows.push_back(summarize(e, report_from_json(read_json_file(kData / "skip" / e.report))));
    CHECK(rows[0].status == "SKIP");
    std::stringstream buf;
    write_summary_csv(buf, rows);
    const auto back = read_summary_csv(buf);
    REQUIRE(back.size() == 2);
    CHECK(back[0].status == "SKIP");
    CHECK(std::isnan(back[0].computed));
    CHECK(back[1].parameters == "delta0=0.1;lambda0=0.5");
    CHECK(back[1].margin == 0.02);

    std::stringstream bad("check,where,status,computed,bound,margin,tolerance,parameters\nx,y,MAYBE,1,1,1,1,\n");
    CHECK_THROWS(read_summary_csv(bad));
}

TEST_CASE("runner: core errors become FAIL or SKIP reports") {
    const auto config = parse_config(kMinimal, false, "inline.toml");
    Experiment e(config);
    auto fail = run_guarded(
        "lap", [](Experiment&) -> fm::VerificationReport { throw fm::Error(fm::ErrorKind::SingularResolvent, "x"); },
        e);
    CHECK(fail.status == fm::CheckStatus::Fail);
    CHECK(fail.note.rfind("error: singular-resolvent", 0) == 0);
    auto skip = run_guarded(
        "mourre",
        [](Experiment&) -> fm::VerificationReport { throw fm::Error(fm::ErrorKind::InconclusiveWindow, "y"); }, e);
    CHECK(skip.status == fm::CheckStatus::Skip);
    CHECK(exit_status({fail, skip}) == 1);
    CHECK(exit_status({skip}) == 0);
}

TEST_CASE("runner: a run writes validated tables and a manifest") {
    auto config = load_config(kData / "quick.toml");
    const auto out = std::filesystem::temp_directory_path() / "fmtool-runner-test";
    std::filesystem::remove_all(out);
    config.output.directory = out;
    RunOptions opt;
    opt.workers = 2;
    const auto result = run_experiment(config, opt);
    CHECK(exit_status(result.reports) == 0);
    const auto manifest = manifest_from_json(read_json_file(out / "manifest.json"));
    CHECK(manifest.config_hash == config.hash());
    CHECK(manifest.seed == 21);
    REQUIRE(manifest.entries.size() == config.checks.size());
    int tables = 0;
    for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
        const auto& e = manifest.entries[i];
        const auto report = report_from_json(read_json_file(out / e.report));
        CHECK(report.check == e.check);
        CHECK(to_json(report).dump() == to_json(result.reports[i]).dump());
        if (!e.table.empty()) {
            std::ifstream in(out / e.table);
            CHECK(read_csv(in).rows.size() == report.table.rows.size());
            ++tables;
        }
    }
    CHECK(tables > 0);

    // an FM_SEED-style override reaches the manifest
    opt.seed = 99;
    opt.write = false;
    CHECK(run_experiment(config, opt).manifest.seed == 99);
    std::filesystem::remove_all(out);
}
