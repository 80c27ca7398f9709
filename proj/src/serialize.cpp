#include "serialize.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace smoothnet {

namespace {

using nlohmann::json;

const char* kind_name_for_file(const ActivationKind& kind) {
    switch (kind.tag) {
        case ActTag::Logistic: return "logistic";
        case ActTag::Tanh: return "tanh";
        case ActTag::Custom: break;
    }
    throw std::invalid_argument("custom activations have no file representation");
}

double finite_number(const json& j, const char* what) {
    if (!j.is_number()) throw std::invalid_argument(std::string(what) + " must be a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be finite");
    return v;
}

} // namespace

std::string network_to_json(const TwoLayerNet& net) {
    json units = json::array();
    for (const NetUnit& u : net.units) {
        json ju;
        ju["w"] = u.w;
        ju["b"] = u.b;
        ju["lambda"] = u.lambda;
        ju["kind"] = kind_name_for_file(u.kind);
        units.push_back(std::move(ju));
    }
    json root;
    root["units"] = std::move(units);
    root["output_bias"] = net.output_bias;
    return root.dump(2) + "\n";
}

TwoLayerNet network_from_json(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("network file is not valid JSON: ") + e.what());
    }
    if (!root.is_object() || !root.contains("units") || !root["units"].is_array())
        throw std::invalid_argument("network file needs a units array");
    TwoLayerNet net;
    try {
        for (const json& ju : root["units"]) {
            if (!ju.is_object() || !ju.contains("w") || !ju["w"].is_array() || ju["w"].empty())
                throw std::invalid_argument("each unit needs a nonempty weight array");
            NetUnit u;
            for (const json& jw : ju["w"]) u.w.push_back(finite_number(jw, "weight"));
            u.b = finite_number(ju.at("b"), "bias");
            u.lambda = finite_number(ju.at("lambda"), "output weight");
            u.kind = activation_kind_from_string(ju.at("kind").get<std::string>());
            net.units.push_back(std::move(u));
        }
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("malformed unit entry: ") + e.what());
    }
    for (const NetUnit& u : net.units)
        if (u.w.size() != net.units.front().w.size())
            throw std::invalid_argument("units disagree on input dimension");
    net.output_bias = root.value("output_bias", 0.0);
    if (!std::isfinite(net.output_bias))
        throw std::invalid_argument("output bias must be finite");
    return net;
}

std::string report_to_json(const AnalysisReport& rep, const TwoLayerNet& net) {
    const int dim = net.input_dim();
    json units = json::array();
    for (const UnitReport& u : rep.units) {
        json ju;
        ju["index"] = u.index;
        ju["verdict"] = verdict_name(u.verdict);
        if (u.zero_error && dim == 1) {
            ju["z"] = *u.zero_error;
            ju["line"] = nullptr;
        } else if (u.zero_error) {
            ju["z"] = nullptr;
            json line;
            line["w"] = net.units[static_cast<std::size_t>(u.index)].w;
            line["b0"] = *u.zero_error;
            ju["line"] = std::move(line);
        } else {
            ju["z"] = nullptr;
            ju["line"] = nullptr;
        }
        units.push_back(std::move(ju));
    }
    json root;
    root["eps"] = rep.eps;
    root["mode"] = rep.mode == SolutionMode::LocalApproximation ? "local" : "global";
    root["units"] = std::move(units);
    if (rep.exact_fit) {
        // a zero-residual baseline ran against the absolute floor; say so,
        // and with which substitute
        root["exact_fit"] = true;
        root["eps_used"] = rep.eps_used;
    }
    return root.dump(2) + "\n";
}

std::string build_report_to_json(const SplineBuildReport& rep) {
    json knots = json::array();
    for (const KnotBuildInfo& k : rep.knots) {
        json jk;
        jk["knot"] = k.knot;
        jk["rho"] = k.rho;
        jk["gamma"] = k.gamma;
        jk["c_k"] = k.c_k;
        jk["zero_part_l2"] = k.zero_part_l2;
        jk["tail_misfit_l2"] = k.tail_misfit_l2;
        jk["axis"] = k.axis;
        knots.push_back(std::move(jk));
    }
    json root;
    root["dense_l2"] = rep.dense_l2;
    root["tol_met"] = rep.tol_met;
    root["limiting_knot"] = rep.limiting_knot;
    root["knots"] = std::move(knots);
    return root.dump(2) + "\n";
}

std::string plot_csv(const TwoLayerNet& net, const AnalysisReport& rep, double step) {
    if (!(step > 0.0) || step > 1.0) throw std::invalid_argument("plot step must lie in (0,1]");
    const int dim = net.input_dim();
    const long n = std::lround(1.0 / step);
    std::ostringstream out;
    out << "kind,series,x,y\n";
    for (std::size_t j = 0; j < net.units.size(); ++j) {
        const NetUnit& u = net.units[j];
        const std::string series = "u" + std::to_string(j);
        if (dim == 1) {
            for (long i = 0; i <= n; ++i) {
                const double x = std::min(1.0, static_cast<double>(i) / n);
                const double y = u.lambda * activation_eval(u.kind, u.argument(x));
                out << "curve," << series << ',' << canonical_double(x) << ','
                    << canonical_double(y) << '\n';
            }
        } else {
            // several inputs: plot against the offset s = w.x across the
            // range where the plane meets the cube
            double lo = 0.0, hi = 0.0;
            for (double wq : u.w) {
                lo += std::min(wq, 0.0);
                hi += std::max(wq, 0.0);
            }
            for (long i = 0; i <= 100; ++i) {
                const double s = lo + (hi - lo) * static_cast<double>(i) / 100.0;
                const double y = u.lambda * activation_eval(u.kind, s + u.b);
                out << "curve," << series << ',' << canonical_double(s) << ','
                    << canonical_double(y) << '\n';
            }
        }
    }
    if (dim == 1) {
        for (long i = 0; i <= n; ++i) {
            const double x = std::min(1.0, static_cast<double>(i) / n);
            out << "curve,net," << canonical_double(x) << ',' << canonical_double(net.eval(x))
                << '\n';
        }
    }
    for (const UnitReport& u : rep.units) {
        if (!u.zero_error) continue;
        out << "marker,u" << u.index << ',' << canonical_double(*u.zero_error) << ",0\n";
    }
    return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_network_json(const std::string& path, const TwoLayerNet& net) {
    write_text_file(path, network_to_json(net));
}

TwoLayerNet read_network_json(const std::string& path) {
    return network_from_json(read_text_file(path));
}

void write_report_json(const std::string& path, const AnalysisReport& rep,
                       const TwoLayerNet& net) {
    write_text_file(path, report_to_json(rep, net));
}

void write_build_report_json(const std::string& path, const SplineBuildReport& rep) {
    write_text_file(path, build_report_to_json(rep));
}

void write_plot_csv(const std::string& path, const TwoLayerNet& net, const AnalysisReport& rep,
                    double step) {
    write_text_file(path, plot_csv(net, rep, step));
}

} // namespace smoothnet
