#include "smoothnet/smoothnet.h"

#include <cstring>
#include <new>
#include <stdexcept>
#include <string>

#include "experiment.hpp"

using namespace smoothnet;

struct smoothnet_spec {
    ExperimentSpec spec;
};

struct smoothnet_summary {
    RunSummary summary;
};

namespace {

thread_local std::string g_last_error;

smoothnet_status fail(smoothnet_status status, const char* what) {
    g_last_error = what ? what : "";
    return status;
}

// Exceptions carry the failure class: rejected inputs arrive as
// invalid_argument, capability limits as out_of_range, evaluation-domain
// violations as domain_error, and numerical trouble as runtime_error.
template <typename Fn>
smoothnet_status guarded(Fn&& fn) {
    try {
        fn();
    } catch (const std::invalid_argument& e) {
        return fail(SMOOTHNET_INVALID_ARGUMENT, e.what());
    } catch (const std::domain_error& e) {
        return fail(SMOOTHNET_DOMAIN, e.what());
    } catch (const std::out_of_range& e) {
        return fail(SMOOTHNET_CAPABILITY, e.what());
    } catch (const std::runtime_error& e) {
        return fail(SMOOTHNET_NUMERIC, e.what());
    } catch (const std::bad_alloc& e) {
        return fail(SMOOTHNET_NUMERIC, e.what());
    } catch (const std::exception& e) {
        return fail(SMOOTHNET_NUMERIC, e.what());
    }
    g_last_error.clear();
    return SMOOTHNET_OK;
}

char* copy_string(const std::string& text) {
    char* out = new char[text.size() + 1];
    std::memcpy(out, text.c_str(), text.size() + 1);
    return out;
}

void require(const void* p, const char* what) {
    if (!p) throw std::invalid_argument(std::string(what) + " must not be null");
}

} // namespace

extern "C" {

const char* smoothnet_status_name(smoothnet_status status) {
    switch (status) {
        case SMOOTHNET_OK: return "ok";
        case SMOOTHNET_INVALID_ARGUMENT: return "invalid argument";
        case SMOOTHNET_CAPABILITY: return "capability";
        case SMOOTHNET_DOMAIN: return "domain";
        case SMOOTHNET_NUMERIC: return "numeric";
    }
    return "unknown";
}

const char* smoothnet_last_error(void) { return g_last_error.c_str(); }

smoothnet_status smoothnet_spec_create(smoothnet_spec** out) {
    return guarded([&] {
        require(out, "out");
        *out = new smoothnet_spec{};
    });
}

smoothnet_status smoothnet_spec_parse(const char* text, smoothnet_spec** out) {
    return guarded([&] {
        require(text, "text");
        require(out, "out");
        *out = new smoothnet_spec{spec_from_json(text)};
    });
}

void smoothnet_spec_destroy(smoothnet_spec* spec) { delete spec; }

smoothnet_status smoothnet_spec_format(const smoothnet_spec* spec, char** out) {
    return guarded([&] {
        require(spec, "spec");
        require(out, "out");
        *out = copy_string(spec_to_json(spec->spec));
    });
}

smoothnet_status smoothnet_spec_set_string(smoothnet_spec* spec, const char* key,
                                           const char* value) {
    return guarded([&] {
        require(spec, "spec");
        require(key, "key");
        require(value, "value");
        const std::string k(key);
        if (k == "name")
            spec->spec.name = value;
        else if (k == "function")
            spec->spec.function = value;
        else if (k == "mode")
            spec->spec.mode = run_mode_from_string(value);
        else if (k == "network")
            spec->spec.network_path = value;
        else if (k == "kind")
            spec->spec.train.kind = activation_kind_from_string(value);
        else
            throw std::invalid_argument("unknown string field: " + k);
    });
}

smoothnet_status smoothnet_spec_set_number(smoothnet_spec* spec, const char* key, double value) {
    return guarded([&] {
        require(spec, "spec");
        require(key, "key");
        const std::string k(key);
        ExperimentSpec& s = spec->spec;
        if (k == "grid_step")
            s.grid_step = value;
        else if (k == "dim")
            s.dim = static_cast<int>(value);
        else if (k == "normalize")
            s.normalize = value != 0.0;
        else if (k == "theta")
            s.train.theta = static_cast<int>(value);
        else if (k == "lr")
            s.train.lr = value;
        else if (k == "steps")
            s.train.steps = static_cast<int>(value);
        else if (k == "init_lo")
            s.train.init_lo = value;
        else if (k == "init_hi")
            s.train.init_hi = value;
        else if (k == "train_output_bias")
            s.train.train_output_bias = value != 0.0;
        else if (k == "gamma1")
            s.thresholds.gamma1 = value;
        else if (k == "gamma2")
            s.thresholds.gamma2 = value;
        else if (k == "gamma3")
            s.thresholds.gamma3 = value;
        else if (k == "gamma4")
            s.thresholds.gamma4 = value;
        else if (k == "scan_step")
            s.thresholds.scan_step = value;
        else if (k == "synth_order")
            s.synth.order = static_cast<int>(value);
        else if (k == "synth_pieces")
            s.synth.pieces = static_cast<int>(value);
        else if (k == "synth_tol")
            s.synth.tol = value;
        else
            throw std::invalid_argument("unknown numeric field: " + k);
    });
}

smoothnet_status smoothnet_spec_set_seeds(smoothnet_spec* spec, const uint64_t* seeds,
                                          size_t count) {
    return guarded([&] {
        require(spec, "spec");
        if (count > 0) require(seeds, "seeds");
        spec->spec.seeds.assign(seeds, seeds + count);
    });
}

smoothnet_status smoothnet_run(const smoothnet_spec* spec, const char* out_dir,
                               smoothnet_summary** out) {
    return guarded([&] {
        require(spec, "spec");
        require(out_dir, "out_dir");
        require(out, "out");
        *out = new smoothnet_summary{run(spec->spec, out_dir)};
    });
}

smoothnet_status smoothnet_reaggregate(const smoothnet_spec* spec, const char* out_dir,
                                       smoothnet_summary** out) {
    return guarded([&] {
        require(spec, "spec");
        require(out_dir, "out_dir");
        require(out, "out");
        *out = new smoothnet_summary{reaggregate(spec->spec, out_dir)};
    });
}

void smoothnet_summary_destroy(smoothnet_summary* summary) { delete summary; }

smoothnet_status smoothnet_summary_format(const smoothnet_summary* summary, char** out) {
    return guarded([&] {
        require(summary, "summary");
        require(out, "out");
        *out = copy_string(summary_to_json(summary->summary));
    });
}

size_t smoothnet_summary_runs(const smoothnet_summary* summary) {
    return summary ? summary->summary.outcomes.size() : 0;
}

size_t smoothnet_summary_diverged(const smoothnet_summary* summary) {
    return summary ? static_cast<size_t>(summary->summary.diverged_runs) : 0;
}

size_t smoothnet_summary_failed(const smoothnet_summary* summary) {
    return summary ? static_cast<size_t>(summary->summary.failed_runs) : 0;
}

smoothnet_status smoothnet_expression_check(const char* text, int* input_dim) {
    return guarded([&] {
        require(text, "text");
        Expression e = parse_expression(text);
        if (input_dim) *input_dim = e.input_dim();
    });
}

smoothnet_status smoothnet_expression_eval(const char* text, const double* point, size_t dim,
                                           double* out) {
    return guarded([&] {
        require(text, "text");
        require(point, "point");
        require(out, "out");
        Expression e = parse_expression(text);
        *out = e.eval(std::vector<double>(point, point + dim));
    });
}

void smoothnet_string_free(char* text) { delete[] text; }

} // extern "C"
