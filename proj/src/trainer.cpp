#include "trainer.hpp"

#include <cmath>
#include <cstddef>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "serialize.hpp"

namespace smoothnet {

int Dataset::dim() const {
    if (inputs.empty()) return 0;
    return static_cast<int>(inputs.front().size());
}

void validate(const TrainConfig& cfg) {
    if (cfg.theta < 1) throw std::invalid_argument("trainer: theta must be at least 1");
    if (!(cfg.lr >= 0.0) || !std::isfinite(cfg.lr))
        throw std::invalid_argument("trainer: learning rate must be finite and non-negative");
    if (cfg.steps < 1) throw std::invalid_argument("trainer: steps must be at least 1");
    if (!(cfg.init_lo < cfg.init_hi))
        throw std::invalid_argument("trainer: init range must satisfy lo < hi");
}

void validate(const Dataset& data) {
    if (data.inputs.size() != data.targets.size())
        throw std::invalid_argument("dataset: inputs and targets differ in length");
    if (data.inputs.empty()) throw std::invalid_argument("dataset: empty");
    const std::size_t n = data.inputs.front().size();
    if (n == 0) throw std::invalid_argument("dataset: zero-dimensional points");
    for (std::size_t i = 0; i < data.inputs.size(); ++i) {
        if (data.inputs[i].size() != n)
            throw std::invalid_argument("dataset: ragged input dimensions");
        for (double c : data.inputs[i]) {
            if (!std::isfinite(c) || c < 0.0 || c > 1.0)
                throw std::invalid_argument("dataset: input outside the unit cube");
        }
        if (!std::isfinite(data.targets[i]))
            throw std::invalid_argument("dataset: non-finite target");
    }
}

Dataset tabulate(const std::function<double(double)>& f, double step) {
    if (!(step > 0.0) || step > 1.0) throw std::invalid_argument("tabulate: bad step");
    Dataset d;
    const int count = static_cast<int>(std::llround(1.0 / step));
    for (int i = 0; i <= count; ++i) {
        const double x = std::min(1.0, i * step);
        d.inputs.push_back({x});
        d.targets.push_back(f(x));
    }
    validate(d);
    return d;
}

Dataset tabulate2(const std::function<double(double, double)>& f, double step) {
    if (!(step > 0.0) || step > 1.0) throw std::invalid_argument("tabulate2: bad step");
    Dataset d;
    const int count = static_cast<int>(std::llround(1.0 / step));
    for (int i = 0; i <= count; ++i) {
        for (int j = 0; j <= count; ++j) {
            const double x = std::min(1.0, i * step);
            const double y = std::min(1.0, j * step);
            d.inputs.push_back({x, y});
            d.targets.push_back(f(x, y));
        }
    }
    validate(d);
    return d;
}

void normalize_targets(Dataset& data) {
    double peak = 0.0;
    for (double y : data.targets) peak = std::max(peak, std::fabs(y));
    if (peak == 0.0) return;
    for (double& y : data.targets) y /= peak;
    data.normalization = peak;
}

void denormalize_targets(Dataset& data) {
    if (!data.normalization) return;
    for (double& y : data.targets) y *= *data.normalization;
    data.normalization.reset();
}

TwoLayerNet init_net(const TrainConfig& cfg, int n) {
    validate(cfg);
    if (n < 1) throw std::invalid_argument("init_net: dimension must be at least 1");
    std::mt19937_64 gen(cfg.seed);
    std::uniform_real_distribution<double> u(cfg.init_lo, cfg.init_hi);
    TwoLayerNet net;
    net.units.resize(cfg.theta);
    for (auto& unit : net.units) {
        unit.kind = cfg.kind;
        unit.w.resize(n);
        for (double& c : unit.w) c = u(gen);
        unit.b = u(gen);
        unit.lambda = u(gen);
    }
    return net;
}

double loss(const TwoLayerNet& net, const Dataset& data) {
    double ss = 0.0;
    for (std::size_t i = 0; i < data.inputs.size(); ++i) {
        const double r = net.eval(data.inputs[i]) - data.targets[i];
        ss += r * r;
    }
    return std::sqrt(ss);
}

double objective(const TwoLayerNet& net, const Dataset& data) {
    double ss = 0.0;
    for (std::size_t i = 0; i < data.inputs.size(); ++i) {
        const double r = net.eval(data.inputs[i]) - data.targets[i];
        ss += r * r;
    }
    return ss / static_cast<double>(data.inputs.size());
}

std::vector<double> pack_parameters(const TwoLayerNet& net, bool with_output_bias) {
    std::vector<double> p;
    for (const auto& unit : net.units) {
        p.insert(p.end(), unit.w.begin(), unit.w.end());
        p.push_back(unit.b);
        p.push_back(unit.lambda);
    }
    if (with_output_bias) p.push_back(net.output_bias);
    return p;
}

void unpack_parameters(TwoLayerNet& net, const std::vector<double>& p, bool with_output_bias) {
    std::size_t k = 0;
    for (auto& unit : net.units) {
        for (double& c : unit.w) c = p.at(k++);
        unit.b = p.at(k++);
        unit.lambda = p.at(k++);
    }
    if (with_output_bias) net.output_bias = p.at(k++);
    if (k != p.size()) throw std::invalid_argument("unpack_parameters: length mismatch");
}

std::vector<double> loss_gradient(const TwoLayerNet& net, const Dataset& data,
                                  bool with_output_bias) {
    const std::size_t m = data.inputs.size();
    const std::size_t theta = net.units.size();
    const int n = net.input_dim();
    const std::size_t per_unit = static_cast<std::size_t>(n) + 2;
    std::vector<double> grad(theta * per_unit + (with_output_bias ? 1 : 0), 0.0);

    // One derivative oracle per distinct activation object would be wasted
    // work here; units of a trained net share a single kind.
    DerivativeOracle oracle(net.units.empty() ? ActivationKind::logistic() : net.units[0].kind,
                            1);

    // Samples accumulate in index order, so the reduction is deterministic.
    for (std::size_t i = 0; i < m; ++i) {
        const auto& x = data.inputs[i];
        const double r = net.eval(x) - data.targets[i];
        for (std::size_t j = 0; j < theta; ++j) {
            const auto& unit = net.units[j];
            const double z = unit.argument(x);
            const double s = activation_eval(unit.kind, z);
            const double sp = oracle.derivative(1, z);
            const double common = r * unit.lambda * sp;
            double* gj = grad.data() + j * per_unit;
            for (int q = 0; q < n; ++q) gj[q] += common * x[q];
            gj[n] += common;
            gj[n + 1] += r * s;
        }
        if (with_output_bias) grad.back() += r;
    }
    const double scale = 2.0 / static_cast<double>(m);
    for (double& g : grad) g *= scale;
    return grad;
}

TrainResult train(const TwoLayerNet& net, const Dataset& data, const TrainConfig& cfg) {
    validate(cfg);
    validate(data);
    if (net.input_dim() != data.dim())
        throw std::invalid_argument("train: net and dataset dimensions differ");

    TrainResult out;
    out.net = net;
    out.trace.reserve(cfg.steps + 1);

    double eps = loss(out.net, data);
    out.trace.push_back(eps);
    if (!std::isfinite(eps)) {
        out.diverged = true;
        return out;
    }

    std::vector<double> p = pack_parameters(out.net, cfg.train_output_bias);
    for (int step = 0; step < cfg.steps; ++step) {
        const std::vector<double> g = loss_gradient(out.net, data, cfg.train_output_bias);
        for (std::size_t k = 0; k < p.size(); ++k) p[k] -= cfg.lr * g[k];
        unpack_parameters(out.net, p, cfg.train_output_bias);
        eps = loss(out.net, data);
        out.trace.push_back(eps);
        if (!std::isfinite(eps)) {
            out.diverged = true;
            break;
        }
    }
    return out;
}

void write_dataset_csv(const std::string& path, const Dataset& data) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    const int n = data.dim();
    for (int q = 1; q <= n; ++q) f << 'x' << q << ',';
    f << "y\n";
    for (std::size_t i = 0; i < data.inputs.size(); ++i) {
        for (double c : data.inputs[i]) f << canonical_double(c) << ',';
        f << canonical_double(data.targets[i]) << '\n';
    }
    if (!f) throw std::runtime_error("short write to " + path);
}

Dataset read_dataset_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(f, line)) throw std::runtime_error(path + ": empty file");
    Dataset d;
    std::size_t row = 1;
    while (std::getline(f, line)) {
        ++row;
        if (line.empty()) continue;
        std::vector<double> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                cells.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw std::runtime_error(path + ": bad number at row " + std::to_string(row));
            }
        }
        if (cells.size() < 2)
            throw std::runtime_error(path + ": too few columns at row " + std::to_string(row));
        d.targets.push_back(cells.back());
        cells.pop_back();
        d.inputs.push_back(std::move(cells));
    }
    validate(d);
    return d;
}

void write_trace_csv(const std::string& path, const std::vector<double>& trace) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << "step,eps\n";
    for (std::size_t i = 0; i < trace.size(); ++i)
        f << i << ',' << canonical_double(trace[i]) << '\n';
    if (!f) throw std::runtime_error("short write to " + path);
}

} // namespace smoothnet
