#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "experiment.hpp"
#include "json.hpp"

using namespace smoothnet;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& leaf) {
    const fs::path dir = fs::temp_directory_path() / "smoothnet_experiment_test" / leaf;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

ExperimentSpec tiny_train_spec() {
    ExperimentSpec spec;
    spec.name = "tiny";
    spec.function = "cubic";
    spec.grid_step = 0.1;
    spec.mode = RunMode::Train;
    spec.seeds = {1, 2, 3, 4, 5};
    spec.train.theta = 3;
    spec.train.steps = 50;
    spec.train.lr = 0.05;
    return spec;
}

} // namespace

TEST_CASE("catalog tags resolve to their expressions") {
    CHECK(resolve_function("cubic")(1.0) == 4.0);
    CHECK(resolve_function("cubic32")(0.5) == 7.0);
    CHECK(resolve_function("sin15")(0.0) == 30.0);
    CHECK(resolve_function("cubic2d")(0.5, 0.5) == 7.0);
    CHECK(resolve_function("cubic2d").input_dim() == 2);
    // anything not in the catalog is read as an expression
    CHECK(resolve_function("x^2+1")(3.0) == 10.0);
    CHECK_THROWS_AS(resolve_function("not a function"), std::invalid_argument);
}

TEST_CASE("spec validation") {
    ExperimentSpec spec = tiny_train_spec();
    CHECK_NOTHROW(validate(spec));
    spec.seeds.clear();
    CHECK_THROWS_AS(validate(spec), std::invalid_argument);
    spec = tiny_train_spec();
    spec.grid_step = 0.0;
    CHECK_THROWS_AS(validate(spec), std::invalid_argument);
    spec = tiny_train_spec();
    spec.mode = RunMode::Analyze;
    CHECK_THROWS_AS(validate(spec), std::invalid_argument); // no network file
    spec = tiny_train_spec();
    spec.function = "x+y";
    spec.dim = 1;
    CHECK_THROWS_AS(validate(spec), std::invalid_argument);
    spec = tiny_train_spec();
    spec.synth.pieces = 0;
    CHECK_THROWS_AS(validate(spec), std::invalid_argument);
    spec = tiny_train_spec();
    spec.train.theta = 0;
    CHECK_THROWS_AS(validate(spec), std::invalid_argument);
    spec = tiny_train_spec();
    spec.thresholds.gamma1 = 0.0;
    CHECK_THROWS_AS(validate(spec), std::invalid_argument);
}

TEST_CASE("spec json mirrors the struct") {
    ExperimentSpec spec = tiny_train_spec();
    spec.thresholds.gamma3 = 0.05;
    spec.normalize = true;
    spec.train.kind = ActivationKind::tanh_kind();
    ExperimentSpec back = spec_from_json(spec_to_json(spec));
    CHECK(back.name == spec.name);
    CHECK(back.function == spec.function);
    CHECK(back.grid_step == spec.grid_step);
    CHECK(back.normalize == spec.normalize);
    CHECK(back.mode == spec.mode);
    CHECK(back.seeds == spec.seeds);
    CHECK(back.train.theta == spec.train.theta);
    CHECK(back.train.steps == spec.train.steps);
    CHECK(back.train.kind.tag == spec.train.kind.tag);
    CHECK(back.thresholds.gamma3 == spec.thresholds.gamma3);
    CHECK(back.synth.pieces == spec.synth.pieces);

    CHECK_THROWS_AS(spec_from_json("[1,2]"), std::invalid_argument);
    CHECK_THROWS_AS(spec_from_json(R"({"frobnicate":1})"), std::invalid_argument);
    CHECK_THROWS_AS(spec_from_json(R"({"train":{"momentum":0.9}})"), std::invalid_argument);
    CHECK_THROWS_AS(spec_from_json(R"({"mode":"dance"})"), std::invalid_argument);
    // partial documents keep defaults elsewhere
    ExperimentSpec sparse = spec_from_json(R"({"function":"sin15","train":{"theta":7}})");
    CHECK(sparse.function == "sin15");
    CHECK(sparse.train.theta == 7);
    CHECK(sparse.train.steps == 5000);
    CHECK(sparse.seeds.size() == 10);
}

TEST_CASE("synthesize mode emits a network and its construction report") {
    ExperimentSpec spec;
    spec.name = "build";
    spec.function = "cubic";
    spec.mode = RunMode::Synthesize;
    spec.synth.order = 3;
    spec.synth.pieces = 5;
    spec.synth.tol = 0.05;
    const fs::path dir = fresh_dir("synth");
    RunSummary summary = run(spec, dir.string());
    REQUIRE(summary.outcomes.size() == 1);
    CHECK(!summary.outcomes[0].failed);
    CHECK(summary.failed_runs == 0);
    for (const char* name : {"spec.json", "metadata.json", "dataset.csv", "network.json",
                             "build_report.json", "summary.json"})
        CHECK(fs::exists(dir / name));
    // a five-piece cubic build carries m+1 whole-domain units plus one per
    // interior knot
    TwoLayerNet net = read_network_json((dir / "network.json").string());
    CHECK(net.units.size() == 8);
}

TEST_CASE("seed sweeps write per-seed artifacts deterministically") {
    ExperimentSpec spec = tiny_train_spec();
    const fs::path a = fresh_dir("train_a");
    const fs::path b = fresh_dir("train_b");
    RunSummary ra = run(spec, a.string());
    RunSummary rb = run(spec, b.string());
    REQUIRE(ra.outcomes.size() == 5);
    CHECK(ra.diverged_runs == 0);
    CHECK(ra.failed_runs == 0);
    for (std::uint64_t seed : spec.seeds) {
        const fs::path sa = a / ("seed_" + std::to_string(seed));
        CHECK(fs::exists(sa / "network.json"));
        CHECK(fs::exists(sa / "trace.csv"));
        // reruns reproduce every artifact byte for byte
        const fs::path sb = b / ("seed_" + std::to_string(seed));
        CHECK(read_text_file((sa / "network.json").string()) ==
              read_text_file((sb / "network.json").string()));
        CHECK(read_text_file((sa / "trace.csv").string()) ==
              read_text_file((sb / "trace.csv").string()));
    }
    CHECK(read_text_file((a / "summary.json").string()) ==
          read_text_file((b / "summary.json").string()));
    // the trace has one row per step plus the starting point
    std::ifstream in(a / "seed_1" / "trace.csv");
    std::string line;
    int rows = 0;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 52); // header + 51 entries
    // outcomes arrive in seed order regardless of worker scheduling
    for (std::size_t i = 0; i < ra.outcomes.size(); ++i)
        CHECK(ra.outcomes[i].seed == spec.seeds[i]);
}

TEST_CASE("full mode analyzes each trained net") {
    ExperimentSpec spec = tiny_train_spec();
    spec.mode = RunMode::Full;
    spec.seeds = {1, 2, 3};
    const fs::path dir = fresh_dir("full");
    RunSummary summary = run(spec, dir.string());
    REQUIRE(summary.outcomes.size() == 3);
    int mode_total = 0;
    for (const auto& [label, count] : summary.mode_counts) mode_total += count;
    CHECK(mode_total == 3);
    for (const SeedOutcome& o : summary.outcomes) {
        CHECK(!o.failed);
        int verdict_total = 0;
        for (const auto& [name, count] : o.verdict_counts) verdict_total += count;
        CHECK(verdict_total == spec.train.theta);
        CHECK((o.solution_mode == "local" || o.solution_mode == "global"));
        const fs::path sd = dir / ("seed_" + std::to_string(o.seed));
        CHECK(fs::exists(sd / "report.json"));
        CHECK(fs::exists(sd / "plot.csv"));
    }

    // re-aggregation from the files alone reproduces the fold
    RunSummary again = reaggregate(spec, dir.string());
    REQUIRE(again.outcomes.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(again.outcomes[i].seed == summary.outcomes[i].seed);
        CHECK(again.outcomes[i].eps == summary.outcomes[i].eps);
        CHECK(again.outcomes[i].solution_mode == summary.outcomes[i].solution_mode);
        CHECK(again.outcomes[i].verdict_counts == summary.outcomes[i].verdict_counts);
    }
    CHECK(again.mode_counts == summary.mode_counts);
}

TEST_CASE("divergence is recorded and keeps partial artifacts") {
    ExperimentSpec spec = tiny_train_spec();
    spec.seeds = {1, 2};
    spec.mode = RunMode::Full;
    spec.train.lr = 1e6;
    spec.train.steps = 30;
    const fs::path dir = fresh_dir("diverge");
    RunSummary summary = run(spec, dir.string());
    CHECK(summary.diverged_runs == 2);
    CHECK(summary.failed_runs == 0);
    for (const SeedOutcome& o : summary.outcomes) {
        CHECK(o.diverged);
        CHECK(o.artifacts.at("trace.csv") == "ok");
        CHECK(o.artifacts.at("network.json") != "ok");
        CHECK(o.artifacts.at("report.json") != "ok");
        const fs::path sd = dir / ("seed_" + std::to_string(o.seed));
        CHECK(fs::exists(sd / "trace.csv"));
        CHECK(!fs::exists(sd / "network.json"));
    }
}

TEST_CASE("analyze mode reads a stored network") {
    // build something to look at, then analyze it against its target
    ExperimentSpec build;
    build.function = "cubic";
    build.mode = RunMode::Synthesize;
    const fs::path bdir = fresh_dir("analyze_build");
    run(build, bdir.string());

    ExperimentSpec spec;
    spec.name = "look";
    spec.function = "cubic";
    spec.grid_step = 0.01;
    spec.mode = RunMode::Analyze;
    spec.network_path = (bdir / "network.json").string();
    const fs::path dir = fresh_dir("analyze");
    RunSummary summary = run(spec, dir.string());
    REQUIRE(summary.outcomes.size() == 1);
    CHECK(!summary.outcomes[0].failed);
    CHECK(fs::exists(dir / "report.json"));
    CHECK(fs::exists(dir / "plot.csv"));
    int verdict_total = 0;
    for (const auto& [name, count] : summary.outcomes[0].verdict_counts) verdict_total += count;
    CHECK(verdict_total == 8);
}

TEST_CASE("normalization divides targets by their largest magnitude") {
    ExperimentSpec spec = tiny_train_spec();
    spec.function = "sin15";
    spec.normalize = true;
    spec.seeds = {1};
    const fs::path dir = fresh_dir("normalize");
    run(spec, dir.string());
    std::ifstream in(dir / "dataset.csv");
    std::string line;
    std::getline(in, line); // header
    double max_abs = 0.0;
    while (std::getline(in, line)) {
        const auto comma = line.rfind(',');
        REQUIRE(comma != std::string::npos);
        max_abs = std::max(max_abs, std::fabs(std::stod(line.substr(comma + 1))));
    }
    CHECK(max_abs == doctest::Approx(1.0));
}
