#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "gibbs_lines/csv.hpp"
#include "gibbs_lines/experiment.hpp"
#include "gibbs_lines/svg.hpp"

using namespace gibbs_lines;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE(f);
    return std::string(std::istreambuf_iterator<char>(f), {});
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

} // namespace

TEST_CASE("double formatting and undefined token") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(kInf) == "inf");
    CHECK(format_cell(std::nullopt) == "undefined");
    CHECK_THROWS(format_double(std::nan("")));
}

TEST_CASE("csv quoting follows RFC 4180") {
    CsvWriter w;
    w.row({"plain", "with,comma", "with\"quote", "line\nbreak"});
    CHECK(w.str() == "plain,\"with,comma\",\"with\"\"quote\",\"line\nbreak\"\r\n");
}

TEST_CASE("environment and array serialization round out") {
    const auto env = sample_environment(2.0, 3, 2, 99);
    const auto csv = environment_csv(env);
    CHECK(csv.find("i,j,weight") == 0);
    CHECK(environment_header_json(env).find("\"gamma\": 2.0") != std::string::npos);
    const auto arr = z_array(env, 1, 2);
    const auto acsv = triangular_array_csv(arr);
    CHECK(acsv.find("undefined") != std::string::npos);  // entry (2,2) at n=1
}

TEST_CASE("svg plots: validity and byte determinism") {
    PlotSeries s{"series", {1.0}, {2.0}, {}, {}};
    const auto svg = emit_plot({s}, {"one point", "x", "y", false, false});
    CHECK(svg.find("<svg") == 0);
    CHECK(svg.find("<circle") != std::string::npos);
    CHECK(svg.rfind("</svg>\n") == svg.size() - 7);

    PlotSeries t{"trend", {1.0, 2.0, kInf}, {2.0, 3.0, 4.0}, {}, {}};
    const auto a = emit_plot({t}, {"t", "x", "y", false, true});
    const auto b = emit_plot({t}, {"t", "x", "y", false, true});
    CHECK(a == b);
    CHECK(a.find("(1 dropped)") != std::string::npos);
    CHECK_THROWS(emit_plot({}, {"none", "x", "y", false, false}));
}

TEST_CASE("config parsing rejects bad fields by name") {
    RunOptions opts;
    TempDir dir("gl-test-cfg");
    opts.out_dir = dir.path.string();

    nlohmann::json cfg{{"experiment", "verify-A1"}, {"trials", 0}};
    CHECK_THROWS_WITH_AS(run_experiment(cfg, opts), doctest::Contains("trials"),
                         ConfigError);

    cfg = {{"experiment", "verify-A1"}, {"bogus_key", 1}};
    CHECK_THROWS_WITH_AS(run_experiment(cfg, opts), doctest::Contains("bogus_key"),
                         ConfigError);

    cfg = {{"experiment", "unknown-kind"}};
    CHECK_THROWS_AS(run_experiment(cfg, opts), ConfigError);

    CHECK_THROWS_AS(run_oracle({{"experiment", "verify-A2"}}, opts), ConfigError);
}

TEST_CASE("experiments are byte-deterministic and manifests round-trip") {
    const nlohmann::json cfg{{"experiment", "polymer-build"},
                             {"gamma", 2.0},
                             {"n", 4},
                             {"K", 3},
                             {"seed", 12345},
                             {"oracle", true}};
    TempDir d1("gl-run1"), d2("gl-run2"), d3("gl-run3");
    RunOptions o1, o2, o3;
    o1.out_dir = d1.path.string();
    o2.out_dir = d2.path.string();
    o3.out_dir = d3.path.string();
    CHECK(run_experiment(cfg, o1) == 0);
    CHECK(run_experiment(cfg, o2) == 0);
    for (const auto& name :
         {"manifest.json", "environment.csv", "environment.json", "z_array.csv",
          "reports.json"}) {
        CHECK(slurp(d1.path / name) == slurp(d2.path / name));
    }

    // re-running from the manifest alone reproduces the experiment
    const auto manifest = load_config_file((d1.path / "manifest.json").string());
    CHECK(run_experiment(manifest, o3) == 0);
    CHECK(slurp(d1.path / "environment.csv") == slurp(d3.path / "environment.csv"));
    CHECK(slurp(d1.path / "z_array.csv") == slurp(d3.path / "z_array.csv"));
}

TEST_CASE("seed override changes artifacts; workers do not") {
    const nlohmann::json cfg{{"experiment", "polymer-build"},
                             {"gamma", 1.5},
                             {"n", 3},
                             {"K", 2},
                             {"seed", 7}};
    TempDir d1("gl-seed1"), d2("gl-seed2");
    RunOptions o1, o2;
    o1.out_dir = d1.path.string();
    o2.out_dir = d2.path.string();
    o2.seed_override = 8;
    run_experiment(cfg, o1);
    run_experiment(cfg, o2);
    CHECK(slurp(d1.path / "environment.csv") != slurp(d2.path / "environment.csv"));

    // worker count must not change the bytes of a parallel experiment
    const nlohmann::json a1{{"experiment", "verify-A4"},
                            {"N_values", {64, 128, 256}},
                            {"samples", 300},
                            {"seed", 5}};
    TempDir w1("gl-w1"), w2("gl-w2");
    RunOptions ow1, ow2;
    ow1.out_dir = w1.path.string();
    ow1.workers = 1;
    ow2.out_dir = w2.path.string();
    ow2.workers = 2;
    run_experiment(a1, ow1);
    run_experiment(a1, ow2);
    CHECK(slurp(w1.path / "a4_quantiles.csv") == slurp(w2.path / "a4_quantiles.csv"));
}

TEST_CASE("oracle subcommand runs the enumeration oracles") {
    TempDir dir("gl-oracle");
    RunOptions opts;
    opts.out_dir = dir.path.string();
    const nlohmann::json poly{{"experiment", "polymer-build"},
                              {"gamma", 3.0},
                              {"n", 4},
                              {"K", 2},
                              {"seed", 3}};
    CHECK(run_oracle(poly, opts) == 0);
    const auto reports = slurp(dir.path / "reports.json");
    CHECK(reports.find("lgv-enumeration-oracle") != std::string::npos);

    const nlohmann::json gibbs{{"experiment", "gibbs-sample"},
                               {"N", 64},
                               {"curves", 1},
                               {"interior_sites", 2},
                               {"delta", 0.3},
                               {"M", 0.9},
                               {"seed", 4}};
    TempDir dir2("gl-oracle2");
    RunOptions opts2;
    opts2.out_dir = dir2.path.string();
    CHECK(run_oracle(gibbs, opts2) == 0);
    CHECK(slurp(dir2.path / "reports.json").find("detailed-balance-oracle") !=
          std::string::npos);
}

TEST_CASE("monotone coupling experiment reports zero violations") {
    TempDir dir("gl-coupling");
    RunOptions opts;
    opts.out_dir = dir.path.string();
    const nlohmann::json cfg{{"experiment", "monotone-coupling"},
                             {"N", 64},
                             {"curves", 2},
                             {"interior_sites", 4},
                             {"updates", 20000},
                             {"seed", 11}};
    CHECK(run_experiment(cfg, opts) == 0);
    const auto manifest = nlohmann::json::parse(slurp(dir.path / "manifest.json"));
    CHECK(manifest["pass"] == true);
}

TEST_CASE("scaled ensemble serialization carries the defined-region mask") {
    const auto env = sample_environment(4.0, 4, 2, 77);
    const auto poly = build_line_ensemble(env, 2, 1, 4);
    const auto scaled = scale_ensemble(poly, 16, 1.0, -1, 2);
    const auto csv = scaled_ensemble_csv(scaled);
    CHECK(csv.find("i,x,value,defined") == 0);
    CHECK(csv.find("undefined,0") != std::string::npos);
    const auto meta = scaled_ensemble_metadata_json(scaled);
    CHECK(meta.find("\"N\": 16") != std::string::npos);
    CHECK(meta.find("center_slope") != std::string::npos);
}
