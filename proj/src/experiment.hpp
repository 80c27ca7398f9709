#ifndef SMOOTHNET_EXPERIMENT_HPP
#define SMOOTHNET_EXPERIMENT_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "analyzer.hpp"
#include "expression.hpp"
#include "serialize.hpp"
#include "trainer.hpp"

namespace smoothnet {

enum class RunMode { Synthesize, Train, Analyze, Full };

const char* run_mode_name(RunMode mode);
RunMode run_mode_from_string(const std::string& name);

// Named targets the command line accepts as shorthand; values are ordinary
// expression strings, so anything here could equally be passed verbatim.
const std::map<std::string, std::string>& function_catalog();

// Catalog tag or raw expression text, in that order of interpretation.
Expression resolve_function(const std::string& text);

struct SynthOptions {
    int order = 3;  // truncated-power degree m
    int pieces = 5; // zeta, uniform interior knots
    double tol = 0.05;
};

struct ExperimentSpec {
    std::string name = "experiment";
    std::string function = "x^3+3";
    double grid_step = 0.01;
    int dim = 0; // 0 infers from the expression
    bool normalize = false;
    RunMode mode = RunMode::Full;
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    TrainConfig train;
    Thresholds thresholds;
    SynthOptions synth;
    std::string network_path; // Analyze mode input
};

// Seeds must be nonempty, the step in (0,1], dim in {0,1,2} and consistent
// with the expression, Analyze mode needs a network path; train and
// threshold blocks validate through their own modules.
void validate(const ExperimentSpec& spec);

// Single JSON document mirroring the struct; unknown keys are errors.
ExperimentSpec spec_from_json(const std::string& text);
std::string spec_to_json(const ExperimentSpec& spec);

struct SeedOutcome {
    std::uint64_t seed = 0;
    bool diverged = false;
    bool failed = false;
    double eps = 0.0;
    std::string solution_mode;                    // "local", "global", "" when absent
    std::map<std::string, int> verdict_counts;    // verdict name -> unit count
    std::map<std::string, std::string> artifacts; // file -> "ok" or reason
};

struct RunSummary {
    std::string name;
    std::string function;
    std::string mode;
    std::vector<SeedOutcome> outcomes; // seed order, independent of scheduling
    int diverged_runs = 0;
    int failed_runs = 0;
    std::map<std::string, int> mode_counts;
};

std::string summary_to_json(const RunSummary& summary);

// Executes the spec into out_dir: spec.json, dataset.csv, metadata.json
// (timestamps live only there), per-seed subdirectories with network JSON,
// loss trace, analysis report, and plot data, then summary.json. Training
// divergence is recorded per seed and keeps the partial artifacts.
RunSummary run(const ExperimentSpec& spec, const std::string& out_dir);

// Rebuilds the summary from per-seed report files already on disk.
RunSummary reaggregate(const ExperimentSpec& spec, const std::string& out_dir);

} // namespace smoothnet

#endif
