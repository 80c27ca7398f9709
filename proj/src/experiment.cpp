#include "experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "polyspline.hpp"
#include "synth.hpp"

namespace smoothnet {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::size_t kSeedWorkers = 4;

const char* kind_file_name(const ActivationKind& kind) {
    switch (kind.tag) {
        case ActTag::Logistic: return "logistic";
        case ActTag::Tanh: return "tanh";
        case ActTag::Custom: break;
    }
    throw std::invalid_argument("custom activations cannot appear in experiment specs");
}

std::string iso_utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

const char* mode_label(SolutionMode mode) {
    return mode == SolutionMode::LocalApproximation ? "local" : "global";
}

std::vector<double> uniform_interior_knots(int pieces) {
    std::vector<double> ks;
    for (int q = 1; q < pieces; ++q) ks.push_back(static_cast<double>(q) / pieces);
    return ks;
}

void count_verdicts(const AnalysisReport& rep, SeedOutcome& out) {
    for (const UnitReport& u : rep.units) ++out.verdict_counts[verdict_name(u.verdict)];
    out.solution_mode = mode_label(rep.mode);
}

} // namespace

const char* run_mode_name(RunMode mode) {
    switch (mode) {
        case RunMode::Synthesize: return "synthesize";
        case RunMode::Train: return "train";
        case RunMode::Analyze: return "analyze";
        case RunMode::Full: return "full";
    }
    return "full";
}

RunMode run_mode_from_string(const std::string& name) {
    if (name == "synthesize") return RunMode::Synthesize;
    if (name == "train") return RunMode::Train;
    if (name == "analyze") return RunMode::Analyze;
    if (name == "full") return RunMode::Full;
    throw std::invalid_argument("unknown run mode: " + name);
}

const std::map<std::string, std::string>& function_catalog() {
    static const std::map<std::string, std::string> catalog = {
        {"cubic", "x^3+3"},
        {"cubic32", "32*x^3+3"},
        {"exp2", "exp(2*x)"},
        {"exp8", "exp(8*x)"},
        {"sin15", "30*(sin(15*x)+1)"},
        {"sin6", "30*sin(6*x+3)+3"},
        {"sin20", "sin(20*x)"},
        {"cubic2d", "16*(x^3+y^3)+3"},
        {"sin2d", "sin(3*(x+y+1))+3"},
    };
    return catalog;
}

Expression resolve_function(const std::string& text) {
    auto it = function_catalog().find(text);
    return parse_expression(it != function_catalog().end() ? it->second : text);
}

void validate(const ExperimentSpec& spec) {
    if (spec.name.empty()) throw std::invalid_argument("experiment name must be nonempty");
    if (spec.seeds.empty()) throw std::invalid_argument("seed list must be nonempty");
    if (!(spec.grid_step > 0.0) || spec.grid_step > 1.0)
        throw std::invalid_argument("grid step must lie in (0,1]");
    if (spec.dim < 0 || spec.dim > 2) throw std::invalid_argument("dim must be 0, 1, or 2");
    Expression f = resolve_function(spec.function);
    if (spec.dim != 0 && spec.dim < f.input_dim())
        throw std::invalid_argument("expression mentions y but dim is 1");
    if (spec.mode == RunMode::Analyze && spec.network_path.empty())
        throw std::invalid_argument("analyze mode needs a network file");
    if (spec.synth.order < 1 || spec.synth.order > 3)
        throw std::invalid_argument("spline order must lie in 1..3");
    if (spec.synth.pieces < 1) throw std::invalid_argument("piece count must be positive");
    if (!(spec.synth.tol > 0.0)) throw std::invalid_argument("synthesis tolerance must be positive");
    validate(spec.train);
    validate(spec.thresholds);
}

ExperimentSpec spec_from_json(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("spec is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw std::invalid_argument("spec must be a JSON object");
    ExperimentSpec spec;
    try {
        for (const auto& [key, value] : root.items()) {
            if (key == "name")
                spec.name = value.get<std::string>();
            else if (key == "function")
                spec.function = value.get<std::string>();
            else if (key == "grid_step")
                spec.grid_step = value.get<double>();
            else if (key == "dim")
                spec.dim = value.get<int>();
            else if (key == "normalize")
                spec.normalize = value.get<bool>();
            else if (key == "mode")
                spec.mode = run_mode_from_string(value.get<std::string>());
            else if (key == "seeds")
                spec.seeds = value.get<std::vector<std::uint64_t>>();
            else if (key == "network")
                spec.network_path = value.get<std::string>();
            else if (key == "train") {
                for (const auto& [tk, tv] : value.items()) {
                    if (tk == "theta")
                        spec.train.theta = tv.get<int>();
                    else if (tk == "lr")
                        spec.train.lr = tv.get<double>();
                    else if (tk == "steps")
                        spec.train.steps = tv.get<int>();
                    else if (tk == "seed")
                        spec.train.seed = tv.get<unsigned long long>();
                    else if (tk == "init_lo")
                        spec.train.init_lo = tv.get<double>();
                    else if (tk == "init_hi")
                        spec.train.init_hi = tv.get<double>();
                    else if (tk == "kind")
                        spec.train.kind = activation_kind_from_string(tv.get<std::string>());
                    else if (tk == "train_output_bias")
                        spec.train.train_output_bias = tv.get<bool>();
                    else
                        throw std::invalid_argument("unknown train key: " + tk);
                }
            } else if (key == "thresholds") {
                for (const auto& [gk, gv] : value.items()) {
                    if (gk == "gamma1")
                        spec.thresholds.gamma1 = gv.get<double>();
                    else if (gk == "gamma2")
                        spec.thresholds.gamma2 = gv.get<double>();
                    else if (gk == "gamma3")
                        spec.thresholds.gamma3 = gv.get<double>();
                    else if (gk == "gamma4")
                        spec.thresholds.gamma4 = gv.get<double>();
                    else if (gk == "scan_step")
                        spec.thresholds.scan_step = gv.get<double>();
                    else
                        throw std::invalid_argument("unknown thresholds key: " + gk);
                }
            } else if (key == "synth") {
                for (const auto& [sk, sv] : value.items()) {
                    if (sk == "order")
                        spec.synth.order = sv.get<int>();
                    else if (sk == "pieces")
                        spec.synth.pieces = sv.get<int>();
                    else if (sk == "tol")
                        spec.synth.tol = sv.get<double>();
                    else
                        throw std::invalid_argument("unknown synth key: " + sk);
                }
            } else {
                throw std::invalid_argument("unknown spec key: " + key);
            }
        }
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("malformed spec value: ") + e.what());
    }
    return spec;
}

std::string spec_to_json(const ExperimentSpec& spec) {
    json root;
    root["name"] = spec.name;
    root["function"] = spec.function;
    root["grid_step"] = spec.grid_step;
    root["dim"] = spec.dim;
    root["normalize"] = spec.normalize;
    root["mode"] = run_mode_name(spec.mode);
    root["seeds"] = spec.seeds;
    if (!spec.network_path.empty()) root["network"] = spec.network_path;
    root["train"] = {{"theta", spec.train.theta},
                     {"lr", spec.train.lr},
                     {"steps", spec.train.steps},
                     {"seed", spec.train.seed},
                     {"init_lo", spec.train.init_lo},
                     {"init_hi", spec.train.init_hi},
                     {"kind", kind_file_name(spec.train.kind)},
                     {"train_output_bias", spec.train.train_output_bias}};
    root["thresholds"] = {{"gamma1", spec.thresholds.gamma1},
                          {"gamma2", spec.thresholds.gamma2},
                          {"gamma3", spec.thresholds.gamma3},
                          {"gamma4", spec.thresholds.gamma4},
                          {"scan_step", spec.thresholds.scan_step}};
    root["synth"] = {{"order", spec.synth.order},
                     {"pieces", spec.synth.pieces},
                     {"tol", spec.synth.tol}};
    return root.dump(2) + "\n";
}

std::string summary_to_json(const RunSummary& summary) {
    json seeds = json::array();
    for (const SeedOutcome& o : summary.outcomes) {
        json jo;
        jo["seed"] = o.seed;
        jo["diverged"] = o.diverged;
        jo["failed"] = o.failed;
        jo["eps"] = o.eps;
        jo["solution_mode"] = o.solution_mode;
        jo["verdicts"] = o.verdict_counts;
        jo["artifacts"] = o.artifacts;
        seeds.push_back(std::move(jo));
    }
    json root;
    root["name"] = summary.name;
    root["function"] = summary.function;
    root["mode"] = summary.mode;
    root["runs"] = summary.outcomes.size();
    root["diverged_runs"] = summary.diverged_runs;
    root["failed_runs"] = summary.failed_runs;
    root["mode_counts"] = summary.mode_counts;
    root["seeds"] = std::move(seeds);
    return root.dump(2) + "\n";
}

namespace {

Dataset build_dataset(const ExperimentSpec& spec, const Expression& f, int dim) {
    Dataset data;
    if (dim == 1)
        data = tabulate([&](double x) { return f(x); }, spec.grid_step);
    else
        data = tabulate2([&](double x, double y) { return f(x, y); }, spec.grid_step);
    if (spec.normalize) normalize_targets(data);
    return data;
}

SeedOutcome run_training_seed(const ExperimentSpec& spec, const Dataset& data, int dim,
                              std::uint64_t seed, const fs::path& out_dir) {
    SeedOutcome out;
    out.seed = seed;
    const fs::path sd = out_dir / ("seed_" + std::to_string(seed));
    try {
        fs::create_directories(sd);
        TrainConfig cfg = spec.train;
        cfg.seed = seed;
        TrainResult res = train(init_net(cfg, dim), data, cfg);
        out.diverged = res.diverged;
        out.eps = res.trace.empty() ? std::numeric_limits<double>::quiet_NaN() : res.trace.back();
        write_trace_csv((sd / "trace.csv").string(), res.trace);
        out.artifacts["trace.csv"] = "ok";
        if (res.diverged) {
            // non-finite parameters have no file form; the trace keeps the
            // finite prefix as the record of the run
            out.artifacts["network.json"] = "skipped: training diverged";
        } else {
            write_network_json((sd / "network.json").string(), res.net);
            out.artifacts["network.json"] = "ok";
        }
        if (spec.mode == RunMode::Full) {
            if (res.diverged) {
                out.artifacts["report.json"] = "skipped: training diverged";
                out.artifacts["plot.csv"] = "skipped: training diverged";
            } else {
                AnalysisReport rep = analyze(res.net, data, spec.thresholds);
                write_report_json((sd / "report.json").string(), rep, res.net);
                out.artifacts["report.json"] = "ok";
                write_plot_csv((sd / "plot.csv").string(), res.net, rep,
                               spec.thresholds.scan_step);
                out.artifacts["plot.csv"] = "ok";
                count_verdicts(rep, out);
            }
        }
    } catch (const std::exception& e) {
        out.failed = true;
        out.artifacts["run"] = std::string("failed: ") + e.what();
    }
    return out;
}

SeedOutcome run_synthesize(const ExperimentSpec& spec, const Expression& f, int dim,
                           const fs::path& out_dir) {
    SeedOutcome out;
    out.seed = spec.seeds.front();
    try {
        SplineBuild built;
        if (dim == 1) {
            Spline1D s = construct_spline_from_derivative(
                [&](double x) { return f(x); }, spec.synth.order,
                KnotSet1D{uniform_interior_knots(spec.synth.pieces)});
            built = implement_spline_1d(s, spec.train.kind, spec.synth.tol);
        } else {
            const std::vector<double> ks = uniform_interior_knots(spec.synth.pieces);
            StandardPartitionSpline s = construct_spline_nd(
                [&](const std::vector<double>& x) { return f(x[0], x[1]); }, spec.synth.order,
                {ks, ks});
            built = implement_spline_nd(s, spec.train.kind, spec.synth.tol);
        }
        write_network_json((out_dir / "network.json").string(), built.net);
        out.artifacts["network.json"] = "ok";
        write_build_report_json((out_dir / "build_report.json").string(), built.report);
        out.artifacts["build_report.json"] = "ok";
        out.eps = built.report.dense_l2;
    } catch (const std::exception& e) {
        out.failed = true;
        out.artifacts["run"] = std::string("failed: ") + e.what();
    }
    return out;
}

SeedOutcome run_analyze(const ExperimentSpec& spec, const Dataset& data, const fs::path& out_dir) {
    SeedOutcome out;
    out.seed = spec.seeds.front();
    try {
        TwoLayerNet net = read_network_json(spec.network_path);
        AnalysisReport rep = analyze(net, data, spec.thresholds);
        out.eps = rep.eps;
        write_report_json((out_dir / "report.json").string(), rep, net);
        out.artifacts["report.json"] = "ok";
        write_plot_csv((out_dir / "plot.csv").string(), net, rep, spec.thresholds.scan_step);
        out.artifacts["plot.csv"] = "ok";
        count_verdicts(rep, out);
    } catch (const std::exception& e) {
        out.failed = true;
        out.artifacts["run"] = std::string("failed: ") + e.what();
    }
    return out;
}

void fold_summary(RunSummary& summary) {
    for (const SeedOutcome& o : summary.outcomes) {
        summary.diverged_runs += o.diverged;
        summary.failed_runs += o.failed;
        if (!o.solution_mode.empty()) ++summary.mode_counts[o.solution_mode];
    }
}

} // namespace

RunSummary run(const ExperimentSpec& spec, const std::string& out_dir) {
    validate(spec);
    const Expression f = resolve_function(spec.function);
    const int dim = spec.dim == 0 ? f.input_dim() : spec.dim;
    const fs::path root(out_dir);
    fs::create_directories(root);

    write_text_file((root / "spec.json").string(), spec_to_json(spec));
    json meta;
    meta["created"] = iso_utc_now();
    meta["name"] = spec.name;
    write_text_file((root / "metadata.json").string(), meta.dump(2) + "\n");

    Dataset data = build_dataset(spec, f, dim);
    write_dataset_csv((root / "dataset.csv").string(), data);

    RunSummary summary;
    summary.name = spec.name;
    summary.function = spec.function;
    summary.mode = run_mode_name(spec.mode);

    if (spec.mode == RunMode::Synthesize) {
        summary.outcomes.push_back(run_synthesize(spec, f, dim, root));
    } else if (spec.mode == RunMode::Analyze) {
        summary.outcomes.push_back(run_analyze(spec, data, root));
    } else {
        // seed sweep: workers pull the next index, results land in seed
        // order so aggregation never depends on scheduling
        summary.outcomes.resize(spec.seeds.size());
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= spec.seeds.size()) return;
                summary.outcomes[i] = run_training_seed(spec, data, dim, spec.seeds[i], root);
            }
        };
        std::vector<std::thread> pool;
        const std::size_t n_workers = std::min(kSeedWorkers, spec.seeds.size());
        pool.reserve(n_workers);
        for (std::size_t t = 0; t < n_workers; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    fold_summary(summary);
    write_text_file((root / "summary.json").string(), summary_to_json(summary));
    return summary;
}

RunSummary reaggregate(const ExperimentSpec& spec, const std::string& out_dir) {
    validate(spec);
    const fs::path root(out_dir);
    RunSummary summary;
    summary.name = spec.name;
    summary.function = spec.function;
    summary.mode = run_mode_name(spec.mode);

    auto outcome_from_report = [](SeedOutcome& out, const fs::path& report_path) {
        json rep = json::parse(read_text_file(report_path.string()));
        out.eps = rep.at("eps").get<double>();
        out.solution_mode = rep.at("mode").get<std::string>();
        for (const json& ju : rep.at("units"))
            ++out.verdict_counts[ju.at("verdict").get<std::string>()];
        out.artifacts["report.json"] = "ok";
    };

    if (spec.mode == RunMode::Synthesize || spec.mode == RunMode::Analyze) {
        SeedOutcome out;
        out.seed = spec.seeds.front();
        try {
            if (spec.mode == RunMode::Synthesize) {
                read_network_json((root / "network.json").string());
                out.artifacts["network.json"] = "ok";
            } else {
                outcome_from_report(out, root / "report.json");
            }
        } catch (const std::exception& e) {
            out.failed = true;
            out.artifacts["run"] = std::string("failed: ") + e.what();
        }
        summary.outcomes.push_back(std::move(out));
    } else {
        for (std::uint64_t seed : spec.seeds) {
            SeedOutcome out;
            out.seed = seed;
            const fs::path sd = root / ("seed_" + std::to_string(seed));
            try {
                if (spec.mode == RunMode::Full && fs::exists(sd / "report.json")) {
                    outcome_from_report(out, sd / "report.json");
                } else if (fs::exists(sd / "network.json")) {
                    // trained but unanalyzed: the trace tail carries the
                    // final residual
                    out.artifacts["network.json"] = "ok";
                    std::ifstream in(sd / "trace.csv");
                    std::string line, last;
                    std::getline(in, line); // header
                    while (std::getline(in, line))
                        if (!line.empty()) last = line;
                    const auto comma = last.find(',');
                    if (comma != std::string::npos)
                        out.eps = std::stod(last.substr(comma + 1));
                } else {
                    out.diverged = true;
                    out.artifacts["network.json"] = "missing";
                }
            } catch (const std::exception& e) {
                out.failed = true;
                out.artifacts["run"] = std::string("failed: ") + e.what();
            }
            summary.outcomes.push_back(std::move(out));
        }
    }

    fold_summary(summary);
    write_text_file((root / "summary.json").string(), summary_to_json(summary));
    return summary;
}

} // namespace smoothnet
