// Command-line front end: maps subcommands and flags onto experiment specs
// and drives them through the shared-library interface.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "smoothnet/smoothnet.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

struct Flags {
    std::string spec_path;
    std::string out_dir = "out";
    std::string function;
    std::string name;
    std::string kind;
    std::string network;
    std::vector<std::uint64_t> seeds;
    double lr = -1.0;
    double grid_step = -1.0;
    double scan_step = -1.0;
    double gamma1 = -1.0, gamma2 = -1.0, gamma3 = -1.0, gamma4 = -1.0;
    double synth_tol = -1.0;
    int theta = -1;
    int steps = -1;
    int dim = -1;
    int synth_order = -1;
    int synth_pieces = -1;
    bool normalize = false;
};

void add_common_flags(CLI::App* cmd, Flags& flags) {
    cmd->add_option("--spec", flags.spec_path, "JSON spec file; flags override its values");
    cmd->add_option("--out", flags.out_dir, "output directory (default: out)");
    cmd->add_option("--function", flags.function, "catalog tag or expression in x (and y)");
    cmd->add_option("--name", flags.name, "experiment name");
    cmd->add_option("--seed,--seeds", flags.seeds, "seed list for the sweep")
        ->delimiter(',');
    cmd->add_option("--theta", flags.theta, "hidden units");
    cmd->add_option("--lr", flags.lr, "learning rate");
    cmd->add_option("--steps", flags.steps, "descent steps");
    cmd->add_option("--kind", flags.kind, "activation: logistic or tanh");
    cmd->add_option("--dim", flags.dim, "input dimension")->check(CLI::Range(1, 2));
    cmd->add_option("--grid-step", flags.grid_step, "dataset discretization step");
    cmd->add_option("--step", flags.scan_step, "zero-error scan step");
    cmd->add_option("--gamma1", flags.gamma1, "zero-error feasibility threshold");
    cmd->add_option("--gamma2", flags.gamma2, "endpoint magnitude threshold");
    cmd->add_option("--gamma3", flags.gamma3, "inactivation threshold");
    cmd->add_option("--gamma4", flags.gamma4, "constant-term flatness threshold");
    cmd->add_option("--synth-order", flags.synth_order, "spline degree for synthesis");
    cmd->add_option("--synth-pieces", flags.synth_pieces, "spline piece count for synthesis");
    cmd->add_option("--synth-tol", flags.synth_tol, "synthesis tolerance");
    cmd->add_flag("--normalize", flags.normalize, "divide targets by their largest magnitude");
}

int report_error(const char* stage, smoothnet_status status) {
    std::fprintf(stderr, "smoothnet: %s: %s: %s\n", stage, smoothnet_status_name(status),
                 smoothnet_last_error());
    return status == SMOOTHNET_INVALID_ARGUMENT ? kExitUsage : kExitNumeric;
}

// Builds the spec from the optional file plus the flag overrides. Returns
// null on failure with *exit_code set.
smoothnet_spec* build_spec(const Flags& flags, const char* mode, int* exit_code) {
    smoothnet_spec* spec = nullptr;
    smoothnet_status status;
    if (!flags.spec_path.empty()) {
        std::ifstream in(flags.spec_path, std::ios::binary);
        if (!in) {
            std::fprintf(stderr, "smoothnet: cannot open spec file: %s\n",
                         flags.spec_path.c_str());
            *exit_code = kExitUsage;
            return nullptr;
        }
        std::ostringstream text;
        text << in.rdbuf();
        status = smoothnet_spec_parse(text.str().c_str(), &spec);
    } else {
        status = smoothnet_spec_create(&spec);
    }
    if (status != SMOOTHNET_OK) {
        *exit_code = report_error("spec", status);
        return nullptr;
    }

    auto set_string = [&](const char* key, const std::string& value) {
        if (status == SMOOTHNET_OK && !value.empty())
            status = smoothnet_spec_set_string(spec, key, value.c_str());
    };
    auto set_number = [&](const char* key, double value, bool given) {
        if (status == SMOOTHNET_OK && given) status = smoothnet_spec_set_number(spec, key, value);
    };

    set_string("mode", mode);
    set_string("name", flags.name);
    set_string("function", flags.function);
    set_string("kind", flags.kind);
    set_string("network", flags.network);
    set_number("theta", flags.theta, flags.theta >= 0);
    set_number("lr", flags.lr, flags.lr >= 0);
    set_number("steps", flags.steps, flags.steps >= 0);
    set_number("dim", flags.dim, flags.dim >= 0);
    set_number("grid_step", flags.grid_step, flags.grid_step >= 0);
    set_number("scan_step", flags.scan_step, flags.scan_step >= 0);
    set_number("gamma1", flags.gamma1, flags.gamma1 >= 0);
    set_number("gamma2", flags.gamma2, flags.gamma2 >= 0);
    set_number("gamma3", flags.gamma3, flags.gamma3 >= 0);
    set_number("gamma4", flags.gamma4, flags.gamma4 >= 0);
    set_number("synth_order", flags.synth_order, flags.synth_order >= 0);
    set_number("synth_pieces", flags.synth_pieces, flags.synth_pieces >= 0);
    set_number("synth_tol", flags.synth_tol, flags.synth_tol >= 0);
    set_number("normalize", 1.0, flags.normalize);
    if (status == SMOOTHNET_OK && !flags.seeds.empty())
        status = smoothnet_spec_set_seeds(spec, flags.seeds.data(), flags.seeds.size());
    if (status != SMOOTHNET_OK) {
        *exit_code = report_error("flags", status);
        smoothnet_spec_destroy(spec);
        return nullptr;
    }
    *exit_code = kExitOk;
    return spec;
}

int run_command(const Flags& flags, const char* mode, bool aggregate_only) {
    int exit_code = kExitOk;
    smoothnet_spec* spec = build_spec(flags, mode, &exit_code);
    if (!spec) return exit_code;

    smoothnet_summary* summary = nullptr;
    const smoothnet_status status =
        aggregate_only ? smoothnet_reaggregate(spec, flags.out_dir.c_str(), &summary)
                       : smoothnet_run(spec, flags.out_dir.c_str(), &summary);
    if (status != SMOOTHNET_OK) {
        smoothnet_spec_destroy(spec);
        return report_error("run", status);
    }

    char* text = nullptr;
    if (smoothnet_summary_format(summary, &text) == SMOOTHNET_OK) {
        std::fputs(text, stdout);
        smoothnet_string_free(text);
    }
    const size_t runs = smoothnet_summary_runs(summary);
    const size_t failed = smoothnet_summary_failed(summary);
    const size_t diverged = smoothnet_summary_diverged(summary);
    if (diverged > 0)
        std::fprintf(stderr, "smoothnet: %zu of %zu runs diverged; partial artifacts kept\n",
                     diverged, runs);
    if (failed > 0)
        std::fprintf(stderr, "smoothnet: %zu of %zu runs failed\n", failed, runs);
    smoothnet_summary_destroy(summary);
    smoothnet_spec_destroy(spec);
    // partial failures are recorded in the summary; only a fully failed run
    // is a hard error
    return (runs > 0 && failed == runs) ? kExitNumeric : kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"two-layer network synthesis, training, and unit classification"};
    app.require_subcommand(1);
    Flags flags;

    CLI::App* synthesize =
        app.add_subcommand("synthesize", "realize a spline target as a network");
    add_common_flags(synthesize, flags);

    CLI::App* train = app.add_subcommand("train", "gradient-descent seed sweep");
    add_common_flags(train, flags);

    CLI::App* analyze = app.add_subcommand("analyze", "classify the units of a stored network");
    add_common_flags(analyze, flags);
    analyze->add_option("network", flags.network, "network JSON file")->required(false);
    analyze->add_option("--net", flags.network, "network JSON file");

    CLI::App* experiment = app.add_subcommand("experiment", "train then analyze, full pipeline");
    add_common_flags(experiment, flags);

    CLI::App* report = app.add_subcommand("report", "re-aggregate artifacts already on disk");
    add_common_flags(report, flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    if (synthesize->parsed()) return run_command(flags, "synthesize", false);
    if (train->parsed()) return run_command(flags, "train", false);
    if (analyze->parsed()) return run_command(flags, "analyze", false);
    if (experiment->parsed()) return run_command(flags, "full", false);
    if (report->parsed()) return run_command(flags, "", true);
    return kExitUsage;
}
