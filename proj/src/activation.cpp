#include "activation.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>

#include "numeric.hpp"

namespace smoothnet {

namespace {

// Derivatives of the logistic function are polynomials in sigma itself
// (sigma' = sigma - sigma^2), and tanh derivatives are polynomials in tanh
// (tanh' = 1 - tanh^2). We keep one coefficient table per family and extend it
// on demand: P_{k+1} = P_k'(s) * g(s) with g the first-derivative polynomial.
std::vector<double> poly_derivative(const std::vector<double>& p) {
    if (p.size() <= 1) return {0.0};
    std::vector<double> d(p.size() - 1);
    for (size_t i = 1; i < p.size(); ++i) d[i - 1] = p[i] * static_cast<double>(i);
    return d;
}

std::vector<double> poly_mul(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> r(a.size() + b.size() - 1, 0.0);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

double poly_eval(const std::vector<double>& p, double s) {
    double acc = 0.0;
    for (size_t i = p.size(); i-- > 0;) acc = acc * s + p[i];
    return acc;
}

const std::vector<double>& derivative_poly(ActTag tag, int order) {
    static std::mutex mu;
    static std::vector<std::vector<double>> logistic_tab{{0.0, 1.0}};
    static std::vector<std::vector<double>> tanh_tab{{0.0, 1.0}};

    std::lock_guard<std::mutex> lock(mu);
    auto& tab = (tag == ActTag::Logistic) ? logistic_tab : tanh_tab;
    const std::vector<double> chain = (tag == ActTag::Logistic)
                                          ? std::vector<double>{0.0, 1.0, -1.0}  // s - s^2
                                          : std::vector<double>{1.0, 0.0, -1.0}; // 1 - t^2
    while (static_cast<int>(tab.size()) <= order) {
        tab.push_back(poly_mul(poly_derivative(tab.back()), chain));
    }
    return tab[order];
}

} // namespace

ActivationKind ActivationKind::logistic() {
    ActivationKind k;
    k.tag = ActTag::Logistic;
    k.name = "logistic";
    return k;
}

ActivationKind ActivationKind::tanh_kind() {
    ActivationKind k;
    k.tag = ActTag::Tanh;
    k.name = "tanh";
    return k;
}

ActivationKind ActivationKind::custom(const std::string& name, std::function<double(double)> fn,
                                      int smoothness) {
    if (!fn) throw std::invalid_argument("custom activation needs a value function");
    if (smoothness < 1) throw std::invalid_argument("custom activation must declare smoothness >= 1");

    // Monotonicity spot-check on (-inf, 0], sampled through x = 1 - 1/t.
    double prev = -std::numeric_limits<double>::infinity();
    for (int j = 1; j <= 60; ++j) {
        const double t = static_cast<double>(j) / 60.0;
        const double x = 1.0 - 1.0 / t; // ranges over [-59, 0]
        const double v = fn(x);
        if (!std::isfinite(v)) throw std::invalid_argument("custom activation returned non-finite value");
        if (v < prev - 1e-12) {
            throw std::invalid_argument("custom activation fails monotonicity on (-inf, 0]");
        }
        prev = v;
    }

    ActivationKind k;
    k.tag = ActTag::Custom;
    k.name = "custom:" + name;
    k.fn = std::move(fn);
    k.smoothness = smoothness;
    return k;
}

double activation_eval(const ActivationKind& kind, double x) {
    if (!std::isfinite(x)) throw std::domain_error("activation input must be finite");
    switch (kind.tag) {
    case ActTag::Logistic: return logistic(x);
    case ActTag::Tanh: return std::tanh(x);
    case ActTag::Custom: return kind.fn(x);
    }
    throw std::invalid_argument("unknown activation tag");
}

ActivationKind activation_kind_from_string(const std::string& tag) {
    if (tag == "logistic") return ActivationKind::logistic();
    if (tag == "tanh") return ActivationKind::tanh_kind();
    if (tag.rfind("custom:", 0) == 0) {
        throw std::invalid_argument("custom activation '" + tag + "' cannot be restored from its tag");
    }
    throw std::invalid_argument("unknown activation tag '" + tag + "'");
}

DerivativeOracle::DerivativeOracle(ActivationKind kind, int max_order, DerivMode mode, double fd_step)
    : kind_(std::move(kind)), max_order_(max_order), mode_(mode), fd_step_(fd_step) {
    if (max_order_ < 1) throw std::invalid_argument("max_order must be >= 1");
    if (kind_.tag == ActTag::Custom) {
        mode_ = DerivMode::FiniteDifference;
        max_order_ = std::min(max_order_, kind_.smoothness);
    }
}

double DerivativeOracle::eval(double x) const { return activation_eval(kind_, x); }

double DerivativeOracle::derivative(int order, double x) const {
    if (order < 0) throw std::invalid_argument("derivative order must be >= 0");
    if (order > max_order_) throw std::out_of_range("derivative order beyond oracle cap");
    if (order == 0) return eval(x);

    if (mode_ == DerivMode::Analytic && kind_.tag != ActTag::Custom) {
        const double s = eval(x);
        return poly_eval(derivative_poly(kind_.tag, order), s);
    }
    if (fd_step_ > 0.0) {
        return central_diff([this](double t) { return eval(t); }, x, order, fd_step_);
    }
    switch (kind_.tag) {
    case ActTag::Logistic:
        return static_cast<double>(central_diff_rich_l(
            [](long double t) {
                if (t >= 0.0L) return 1.0L / (1.0L + std::exp(-t));
                const long double e = std::exp(t);
                return e / (1.0L + e);
            },
            x, order));
    case ActTag::Tanh:
        return static_cast<double>(
            central_diff_rich_l([](long double t) { return std::tanh(t); }, x, order));
    case ActTag::Custom:
        break;
    }
    return central_diff_rich([this](double t) { return eval(t); }, x, order);
}

double DerivativeOracle::composed(const std::vector<int>& alpha, const std::vector<double>& w,
                                  double b, const std::vector<double>& x) const {
    if (alpha.size() != w.size() || w.size() != x.size()) {
        throw std::invalid_argument("composed derivative: dimension mismatch");
    }
    int total = 0;
    double scale = 1.0;
    double y = b;
    for (size_t j = 0; j < w.size(); ++j) {
        if (alpha[j] < 0) throw std::invalid_argument("multi-index entries must be >= 0");
        total += alpha[j];
        scale *= std::pow(w[j], alpha[j]);
        y += w[j] * x[j];
    }
    return derivative(total, y) * scale;
}

double DerivativeOracle::composed(int order, double w, double b, double x) const {
    return derivative(order, w * x + b) * std::pow(w, order);
}

} // namespace smoothnet
