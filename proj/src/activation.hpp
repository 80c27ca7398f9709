#ifndef SMOOTHNET_ACTIVATION_HPP
#define SMOOTHNET_ACTIVATION_HPP

#include <functional>
#include <string>
#include <vector>

namespace smoothnet {

enum class ActTag { Logistic, Tanh, Custom };

// Activation family. Logistic and tanh come with analytic derivative
// recurrences; custom activations supply a value function plus a declared
// smoothness order and get all derivatives by finite differences.
struct ActivationKind {
    ActTag tag = ActTag::Logistic;
    std::string name = "logistic";
    std::function<double(double)> fn; // custom only
    int smoothness = 6;               // custom only: declared order

    static ActivationKind logistic();
    static ActivationKind tanh_kind();
    // Validates a monotonicity spot-check on (-inf, 0] (compactified grid);
    // throws std::invalid_argument on failure or smoothness < 1.
    static ActivationKind custom(const std::string& name, std::function<double(double)> fn,
                                 int smoothness);
};

// sigma(x) for the given kind; throws std::domain_error on non-finite x.
double activation_eval(const ActivationKind& kind, double x);

ActivationKind activation_kind_from_string(const std::string& tag);

enum class DerivMode { Analytic, FiniteDifference };

class DerivativeOracle {
public:
    explicit DerivativeOracle(ActivationKind kind, int max_order = 6,
                              DerivMode mode = DerivMode::Analytic, double fd_step = 0.0);

    const ActivationKind& kind() const { return kind_; }
    int max_order() const { return max_order_; }
    DerivMode mode() const { return mode_; }

    double eval(double x) const;

    // d^order sigma / dx^order at x. Order 0 is eval. Orders beyond the cap
    // throw std::out_of_range; negative orders std::invalid_argument.
    double derivative(int order, double x) const;

    // Mixed partial of sigma(w.x + b) for the exponent multi-index alpha:
    // sigma^(|alpha|)(w.x + b) * prod_j w_j^alpha_j.
    double composed(const std::vector<int>& alpha, const std::vector<double>& w, double b,
                    const std::vector<double>& x) const;

    // Univariate convenience: sigma^(order)(w x + b) * w^order.
    double composed(int order, double w, double b, double x) const;

private:
    ActivationKind kind_;
    int max_order_;
    DerivMode mode_;
    double fd_step_;
};

} // namespace smoothnet

#endif
