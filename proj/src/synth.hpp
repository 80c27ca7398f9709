#ifndef SMOOTHNET_SYNTH_HPP
#define SMOOTHNET_SYNTH_HPP

#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "activation.hpp"
#include "polyspline.hpp"
#include "wronskian.hpp"

namespace smoothnet {

struct NetUnit {
    std::vector<double> w;
    double b = 0.0;
    double lambda = 0.0;
    ActivationKind kind = ActivationKind::logistic();

    double argument(double x) const;
    double argument(const std::vector<double>& x) const;
    // sigma(w.x + b), without the output weight.
    double activation(double x) const;
    double activation(const std::vector<double>& x) const;
};

struct TwoLayerNet {
    std::vector<NetUnit> units;
    double output_bias = 0.0;

    int input_dim() const;
    double eval(double x) const;
    double eval(const std::vector<double>& x) const;
};

// Numeric left-tail limit of the activation (0 for the logistic family, -1
// for tanh); shifted activations phi - limit vanish on the zero part.
double activation_lower_limit(const ActivationKind& kind);

// Interval-activity threshold used by the builders when they assemble their
// own spline matrix; round-trip checks must pass the same value.
inline constexpr double kSplineMaskEps = 2e-2;

// One sharpening step. The returned unit keeps the input unit's output
// weight; phi_a(x_k) equals eps_applied by construction.
struct SharpenResult {
    NetUnit unit;
    double rho = 1.0;
    double gamma = 0.0; // total bias shift on top of the rho-scaled argument
    double c_k = 0.0;   // truncated-power coefficient fitted past the knot
    double zero_part_l2 = 0.0;
    double eps_applied = 0.0;
};

// Scales the weight by rho (value at the knot pinned), then lowers the knot
// value to eps_level/rho. c_k is fitted on (x_k, x_next], the zero part is
// measured on [0, x_k].
SharpenResult sharpen(const NetUnit& unit, double x_k, double rho, double eps_level, int m = 2,
                      double x_next = 1.0);
// eps_level defaults to half the activation's height at argument zero.
SharpenResult sharpen(const NetUnit& unit, double x_k, double rho);

TwoLayerNet local_approx(const std::function<double(double)>& f, double x0, int m,
                         const ActivationKind& kind = ActivationKind::logistic());
TwoLayerNet local_approx(const std::function<double(const std::vector<double>&)>& f,
                         const std::vector<double>& x0, int m,
                         const ActivationKind& kind = ActivationKind::logistic());

struct KnotBuildInfo {
    double knot = 0.0;
    double rho = 1.0;
    double gamma = 0.0;
    double c_k = 0.0;
    double zero_part_l2 = 0.0;
    double tail_misfit_l2 = 0.0; // distance of the activation to its fitted power
    int axis = 0;                // grid axis for partition builds, 0 in one dimension
};

struct SplineBuildReport {
    std::vector<KnotBuildInfo> knots;
    RealizeDiagnostics global_diag;
    double dense_l2 = 0.0;
    bool tol_met = false;
    double limiting_knot = 0.0; // largest residual share when the tolerance is missed
};

struct SplineBuild {
    TwoLayerNet net;
    SplineBuildReport report;
};

// One-sided realization: m+1 whole-domain units realize the first piece, one
// sharpened unit is added per interior knot, and the output weights come from
// solving the spline-matrix system of the assembled basis. Tanh builds append
// one near-constant unit compensating the shifted-activation constant.
// local_min_slope, when positive, floors the final slope of every knot
// unit; steep transitions localize each unit's bend in x at the cost of a
// coarser power fit, which is what zero-error scans need.
SplineBuild implement_spline_1d(const Spline1D& s, const ActivationKind& kind, double tol,
                                double local_min_slope = 0.0);

SplineBuild implement_spline_nd(const StandardPartitionSpline& s, const ActivationKind& kind,
                                double tol);

// Piecewise-fit representation of a network over a knot set. Columns follow
// unit order through col_of_unit: units active on the first interval first
// (their count is mu), then the rest. Entries use the shifted activation
// phi - lower_limit so zero parts mask cleanly.
struct SplineMatrix {
    Eigen::MatrixXd A1; // first-piece coefficient rows, active columns
    Eigen::MatrixXd B;  // first-piece coefficient rows, masked columns
    Eigen::MatrixXd C;  // knot increment rows, active columns
    Eigen::MatrixXd D;  // knot increment rows, masked-first-interval columns
    Eigen::VectorXd rhs; // b vector of the spline the net itself realizes
    std::vector<std::vector<int>> indicator; // activity per unit per interval
    std::vector<std::vector<double>> fit_residuals; // relative, per unit per interval
    std::vector<int> col_of_unit;
    std::vector<double> knots;
    int m = 0;
    int zeta = 0;
    int mu = 0;
    double cond_estimate = 0.0;
    int rank = 0;

    // Assembled (zeta+m) x unit-count matrix in column order.
    Eigen::MatrixXd full() const;
};

SplineMatrix spline_matrix(const TwoLayerNet& net, const KnotSet1D& knots, int m, double eps);

// Solves the assembled system against the target's first-piece coefficients
// and knot jumps; least-norm when rectangular. Output weights return in unit
// order. Throws when the basis is rank deficient.
std::vector<double> solve_spline_matrix(const SplineMatrix& M, const Spline1D& target);

// Appends a mirrored (w < 0) sharpened unit whose zero part lies right of the
// knot, holding its output weight at lambda_free and re-solving the rest so
// the realized function is preserved.
TwoLayerNet add_negative_unit(const TwoLayerNet& net, const Spline1D& target, double knot,
                              double lambda_free);

// Appends one near-constant unit cancelling the constant offset that the
// shifted-activation substitution leaves in an all-tanh network.
TwoLayerNet tanh_constant_compensation(const TwoLayerNet& net);

} // namespace smoothnet

#endif
