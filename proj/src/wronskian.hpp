#ifndef SMOOTHNET_WRONSKIAN_HPP
#define SMOOTHNET_WRONSKIAN_HPP

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "activation.hpp"
#include "polyspline.hpp"

namespace smoothnet {

// Raised when the assembled system's condition estimate exceeds the cap; a
// larger delta-t usually fixes it.
struct IllConditionedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised when no feasible weight exponents exist for some schedule row.
struct ScheduleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Multi-indices |alpha| <= m in canonical order: ascending total degree, and
// within a degree the term with the larger exponent on the earliest differing
// variable comes first.
struct TermOrder {
    int n = 1;
    int m = 0;
    std::vector<std::vector<int>> terms; // length C(n+m, m)
};

TermOrder term_order(int n, int m);

struct SchedUnit {
    std::vector<double> w;
    double b = 0.0;
};

// Weight rows plus the activation argument each row's bias should land on.
// Biases are stored for x0 = 0; units_at shifts them to a concrete point.
struct ScalingSchedule {
    int n = 1;
    int m = 0;
    double delta_t = 0.1;
    std::vector<std::vector<double>> weights;
    std::vector<double> y_targets;
    std::vector<double> biases;
    std::vector<double> c_params; // per-row exponent margins, all positive

    std::vector<SchedUnit> units_at(double x0) const;
    std::vector<SchedUnit> units_at(const std::vector<double>& x0) const;
};

// Argument in [-6, 6] maximizing |sigma^{(order)}|, scanned in steps of 0.01;
// ties prefer the smaller magnitude, then the positive sign.
double peak_argument(const ActivationKind& kind, int order);

ScalingSchedule univariate_schedule(int m, double delta_t, double c,
                                    const ActivationKind& kind = ActivationKind::logistic());
ScalingSchedule multivariate_schedule(int n, int m, double delta_t,
                                      const ActivationKind& kind = ActivationKind::logistic());

struct WronskianMatrix {
    Eigen::MatrixXd entries; // rows = units, cols = TermOrder
    std::vector<SchedUnit> units;
    std::vector<double> x0;
    int m = 0;
    TermOrder order;
};

WronskianMatrix assemble(const std::vector<SchedUnit>& units, const std::vector<double>& x0,
                         int m, const ActivationKind& kind);
WronskianMatrix assemble(const std::vector<SchedUnit>& units, double x0, int m,
                         const ActivationKind& kind);

struct RealizeDiagnostics {
    double delta_t = 0.0;
    double cond_estimate = 0.0;
    double residual = 0.0;
    double max_abs_lambda = 0.0;
};

struct RealizeResult {
    std::vector<double> lambda;
    std::vector<SchedUnit> units;
    RealizeDiagnostics diag;
};

// Solve W^T lambda = a for the Taylor coefficient vector of the target at x0
// (coefficients carry the factorial normalization). Rectangular systems with
// more units than terms are solved in the least-squares sense.
RealizeResult realize_polynomial(const Poly1D& target, double x0, const ScalingSchedule& schedule,
                                 const ActivationKind& kind);
RealizeResult realize_polynomial(const PolyND& target, const std::vector<double>& x0,
                                 const ScalingSchedule& schedule, const ActivationKind& kind);

struct SweepOptions {
    double dt_hi = 0.3;
    double dt_lo = 1e-3;
    int count = 12;
    double residual_cap = 1e-8;
};

// Try a geometric delta-t grid and keep the best-conditioned candidate whose
// residual passes; rethrows the last failure when nothing passes.
RealizeResult realize_with_sweep(const Poly1D& target, double x0, int m,
                                 const ActivationKind& kind, const SweepOptions& opts = {});
RealizeResult realize_with_sweep(const PolyND& target, const std::vector<double>& x0, int m,
                                 const ActivationKind& kind, const SweepOptions& opts = {});

} // namespace smoothnet

#endif
