#ifndef SMOOTHNET_ANALYZER_HPP
#define SMOOTHNET_ANALYZER_HPP

#include <optional>
#include <string>
#include <vector>

#include "trainer.hpp"

namespace smoothnet {

// Relative thresholds for the unit classification scans. gamma1 gates the
// zero-error feasibility test, gamma2 the endpoint magnitude, gamma3 the
// inactivation test, gamma4 the tanh constant-term flatness test.
struct Thresholds {
    double gamma1 = 0.01;
    double gamma2 = 0.01;
    double gamma3 = 0.01;
    double gamma4 = 0.05;
    double scan_step = 0.01;
};

// Gammas must lie in (0,1), the scan step in (0,1]; throws
// std::invalid_argument otherwise.
void validate(const Thresholds& th);

enum class Verdict { Local, Global, Inactivated, ConstantTerm };
enum class SolutionMode { LocalApproximation, GlobalApproximation };

const char* verdict_name(Verdict v);

struct UnitReport {
    int index = 0;
    Verdict verdict = Verdict::Global;
    // Zero-error point z for one input, hyperplane offset b0 (the line
    // w.x = b0) for several; absent when no candidate was feasible.
    std::optional<double> zero_error;
    double eps_baseline = 0.0;
    double eps_truncated = 0.0; // eps' at the reported zero-error position
    double eps_without = 0.0;   // eps with the unit removed outright
};

struct AnalysisReport {
    double eps = 0.0;
    // A zero-residual baseline leaves every relative test undefined; the
    // classification then runs against an absolute floor and says so.
    bool exact_fit = false;
    double eps_used = 0.0;
    std::vector<UnitReport> units;
    SolutionMode mode = SolutionMode::LocalApproximation;
};

// Root of summed squared residuals; the same quantity the trainer reports.
double baseline_eps(const TwoLayerNet& net, const Dataset& data);

// Largest grid point x_k in {0, step, ..., 1} such that dropping unit nu's
// contribution on the vanishing side (x < x_k for positive weight, x > x_k
// for negative, then inf instead of sup) moves eps by less than gamma1
// relative. Requires one-dimensional data.
std::optional<double> zero_error_point(const TwoLayerNet& net, int unit_index,
                                       const Dataset& data, const Thresholds& th);

// n-dimensional analog over hyperplanes w.x = b'. Scans 101 uniform offsets
// across the exact interval where the plane meets the unit cube and returns
// the sup feasible offset. Requires dimension at least two.
std::optional<double> zero_error_hyperplane(const TwoLayerNet& net, int unit_index,
                                            const Dataset& data, const Thresholds& th);

struct ConstantTermScan {
    std::vector<int> indices;          // units flat near their own max at every corner
    std::vector<int> excluded_zero_max; // units skipped because their max vanishes
};

// Flatness test for tanh nets: a unit whose activation stays within gamma4
// relative of its own maximum at both endpoints (all 2^n corners in n
// dimensions) produces a constant term. Throws std::invalid_argument for
// non-tanh nets.
ConstantTermScan constant_term_units(const TwoLayerNet& net, const Dataset& data,
                                     const Thresholds& th);

// Decision order: inactivation, then (tanh only) the constant-term test,
// then the zero-error scan with the endpoint-magnitude check.
UnitReport classify_unit(const TwoLayerNet& net, int unit_index, const Dataset& data,
                         const Thresholds& th);

// LocalApproximation exactly when no unit is Local.
SolutionMode solution_mode(const std::vector<UnitReport>& reports);

AnalysisReport analyze(const TwoLayerNet& net, const Dataset& data, const Thresholds& th);

} // namespace smoothnet

#endif
