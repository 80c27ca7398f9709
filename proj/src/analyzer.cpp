#include "analyzer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace smoothnet {

namespace {

void check_unit(const TwoLayerNet& net, int unit_index) {
    if (unit_index < 0 || unit_index >= static_cast<int>(net.units.size()))
        throw std::invalid_argument("analyzer: unit index out of range");
}

// Residuals of the full net and the indexed unit's own contributions,
// computed once per classification.
struct Decomposition {
    std::vector<double> residual;
    std::vector<double> contribution;
};

Decomposition decompose(const TwoLayerNet& net, int unit_index, const Dataset& data) {
    Decomposition d;
    d.residual.reserve(data.size());
    d.contribution.reserve(data.size());
    const auto& unit = net.units[unit_index];
    for (std::size_t i = 0; i < data.size(); ++i) {
        d.residual.push_back(net.eval(data.inputs[i]) - data.targets[i]);
        d.contribution.push_back(unit.lambda * unit.activation(data.inputs[i]));
    }
    return d;
}

double eps_of(const std::vector<double>& r) {
    double ss = 0.0;
    for (double v : r) ss += v * v;
    return std::sqrt(ss);
}

// eps with the unit's contribution removed wherever drop(i) holds.
template <class Pred>
double eps_dropped(const Decomposition& d, Pred&& drop) {
    double ss = 0.0;
    for (std::size_t i = 0; i < d.residual.size(); ++i) {
        const double r = drop(i) ? d.residual[i] - d.contribution[i] : d.residual[i];
        ss += r * r;
    }
    return std::sqrt(ss);
}

// Relative thresholds break down on a perfectly interpolated dataset; the
// substitute is an absolute floor proportional to the target magnitude.
double effective_eps(double eps, const Dataset& data) {
    if (eps > 0.0) return eps;
    double ss = 0.0;
    for (double y : data.targets) ss += y * y;
    const double norm = std::sqrt(ss);
    return 1e-12 * (norm > 0.0 ? norm : 1.0);
}

std::vector<double> scan_grid(double step) {
    std::vector<double> xs;
    const int count = static_cast<int>(std::floor(1.0 / step + 1e-9));
    for (int k = 0; k <= count; ++k) xs.push_back(std::min(1.0, k * step));
    if (xs.back() < 1.0) xs.push_back(1.0);
    return xs;
}

void offset_range(const std::vector<double>& w, double& lo, double& hi) {
    lo = 0.0;
    hi = 0.0;
    for (double c : w) {
        lo += std::min(c, 0.0);
        hi += std::max(c, 0.0);
    }
}

// Flatness of one tanh unit against its own maximum; corners is the
// endpoint set {0,1}^n.
bool unit_is_flat(const NetUnit& unit, const Dataset& data, const Thresholds& th,
                  bool& zero_max) {
    const int n = static_cast<int>(unit.w.size());
    std::vector<std::vector<double>> corners;
    for (int mask = 0; mask < (1 << n); ++mask) {
        std::vector<double> corner(n);
        for (int q = 0; q < n; ++q) corner[q] = (mask >> q) & 1 ? 1.0 : 0.0;
        corners.push_back(std::move(corner));
    }
    double peak = -1e300;
    if (n == 1) {
        for (double x : scan_grid(th.scan_step)) peak = std::max(peak, unit.activation(x));
    } else {
        for (const auto& x : data.inputs) peak = std::max(peak, unit.activation(x));
        for (const auto& x : corners) peak = std::max(peak, unit.activation(x));
    }
    zero_max = std::fabs(peak) < 1e-12;
    if (zero_max) return false;
    for (const auto& x : corners) {
        if (std::fabs((unit.activation(x) - peak) / peak) >= th.gamma4) return false;
    }
    return true;
}

} // namespace

void validate(const Thresholds& th) {
    auto in_unit = [](double g) { return g > 0.0 && g < 1.0; };
    if (!in_unit(th.gamma1) || !in_unit(th.gamma2) || !in_unit(th.gamma3) || !in_unit(th.gamma4))
        throw std::invalid_argument("analyzer: thresholds must lie in (0,1)");
    if (!(th.scan_step > 0.0) || th.scan_step > 1.0)
        throw std::invalid_argument("analyzer: scan step must lie in (0,1]");
}

const char* verdict_name(Verdict v) {
    switch (v) {
    case Verdict::Local: return "Local";
    case Verdict::Global: return "Global";
    case Verdict::Inactivated: return "Inactivated";
    case Verdict::ConstantTerm: return "ConstantTerm";
    }
    return "Global";
}

double baseline_eps(const TwoLayerNet& net, const Dataset& data) { return loss(net, data); }

std::optional<double> zero_error_point(const TwoLayerNet& net, int unit_index,
                                       const Dataset& data, const Thresholds& th) {
    validate(th);
    validate(data);
    check_unit(net, unit_index);
    if (data.dim() != 1)
        throw std::invalid_argument("zero_error_point: one-dimensional data required");

    const Decomposition d = decompose(net, unit_index, data);
    const double eps = eps_of(d.residual);
    const double gate = th.gamma1 * effective_eps(eps, data);
    const bool positive = net.units[unit_index].w[0] >= 0.0;

    std::optional<double> best;
    for (double xk : scan_grid(th.scan_step)) {
        const double ep = eps_dropped(d, [&](std::size_t i) {
            const double x = data.inputs[i][0];
            return positive ? x <= xk : x >= xk;
        });
        if (std::fabs(ep - eps) < gate) {
            if (!best || (positive ? xk > *best : xk < *best)) best = xk;
        }
    }
    return best;
}

std::optional<double> zero_error_hyperplane(const TwoLayerNet& net, int unit_index,
                                            const Dataset& data, const Thresholds& th) {
    validate(th);
    validate(data);
    check_unit(net, unit_index);
    if (data.dim() < 2)
        throw std::invalid_argument("zero_error_hyperplane: dimension at least two required");

    const auto& unit = net.units[unit_index];
    double lo = 0.0, hi = 0.0;
    offset_range(unit.w, lo, hi);
    if (!(hi > lo)) return std::nullopt; // zero weight: no transition inside the cube

    const Decomposition d = decompose(net, unit_index, data);
    const double eps = eps_of(d.residual);
    const double gate = th.gamma1 * effective_eps(eps, data);

    std::vector<double> proj(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        double s = 0.0;
        for (std::size_t q = 0; q < unit.w.size(); ++q) s += unit.w[q] * data.inputs[i][q];
        proj[i] = s;
    }

    std::optional<double> best;
    for (int j = 0; j <= 100; ++j) {
        const double b = lo + (hi - lo) * j / 100.0;
        std::size_t dropped = 0;
        for (double s : proj)
            if (s < b) ++dropped;
        if (dropped == 0) continue; // no data on the vanishing side of this plane
        const double ep = eps_dropped(d, [&](std::size_t i) { return proj[i] < b; });
        if (std::fabs(ep - eps) < gate) {
            if (!best || b > *best) best = b;
        }
    }
    return best;
}

ConstantTermScan constant_term_units(const TwoLayerNet& net, const Dataset& data,
                                     const Thresholds& th) {
    validate(th);
    validate(data);
    for (const auto& unit : net.units) {
        if (unit.kind.tag != ActTag::Tanh)
            throw std::invalid_argument("constant_term_units: tanh nets only");
    }
    if (data.dim() > 3)
        throw std::invalid_argument("constant_term_units: corner set limited to dimension 3");
    ConstantTermScan scan;
    for (int j = 0; j < static_cast<int>(net.units.size()); ++j) {
        bool zero_max = false;
        if (unit_is_flat(net.units[j], data, th, zero_max)) {
            scan.indices.push_back(j);
        } else if (zero_max) {
            scan.excluded_zero_max.push_back(j);
        }
    }
    return scan;
}

UnitReport classify_unit(const TwoLayerNet& net, int unit_index, const Dataset& data,
                         const Thresholds& th) {
    validate(th);
    validate(data);
    check_unit(net, unit_index);

    const auto& unit = net.units[unit_index];
    const Decomposition d = decompose(net, unit_index, data);

    UnitReport report;
    report.index = unit_index;
    report.eps_baseline = eps_of(d.residual);
    report.eps_without = eps_dropped(d, [](std::size_t) { return true; });
    report.eps_truncated = report.eps_baseline;
    const double eps_eff = effective_eps(report.eps_baseline, data);

    if (std::fabs(report.eps_without - report.eps_baseline) < th.gamma3 * eps_eff) {
        report.verdict = Verdict::Inactivated;
        return report;
    }

    if (unit.kind.tag == ActTag::Tanh) {
        bool zero_max = false;
        if (unit_is_flat(unit, data, th, zero_max)) {
            report.verdict = Verdict::ConstantTerm;
            return report;
        }
    }

    const int n = data.dim();
    bool local = false;
    if (n == 1) {
        const bool positive = unit.w[0] >= 0.0;
        const auto z = zero_error_point(net, unit_index, data, th);
        if (z) {
            report.zero_error = *z;
            report.eps_truncated = eps_dropped(d, [&](std::size_t i) {
                const double x = data.inputs[i][0];
                return positive ? x <= *z : x >= *z;
            });
            const double endpoint = positive ? 0.0 : 1.0;
            const double edge = unit.lambda * unit.activation(endpoint);
            local = *z > 0.0 && *z < 1.0 && std::fabs(edge) < th.gamma2 * eps_eff;
        }
    } else {
        double lo = 0.0, hi = 0.0;
        offset_range(unit.w, lo, hi);
        const auto b0 = zero_error_hyperplane(net, unit_index, data, th);
        if (b0) {
            report.zero_error = *b0;
            std::vector<double> proj(data.size());
            for (std::size_t i = 0; i < data.size(); ++i) {
                double s = 0.0;
                for (std::size_t q = 0; q < unit.w.size(); ++q)
                    s += unit.w[q] * data.inputs[i][q];
                proj[i] = s;
            }
            report.eps_truncated = eps_dropped(d, [&](std::size_t i) { return proj[i] < *b0; });
            // Endpoint analog: contributions near the extreme corner plane on
            // the vanishing side must stay below the gamma2 gate.
            double wnorm = 0.0;
            for (double c : unit.w) wnorm += c * c;
            wnorm = std::sqrt(wnorm);
            double boundary = 0.0;
            for (std::size_t i = 0; i < data.size(); ++i) {
                if (std::fabs(proj[i] - lo) <= th.scan_step * wnorm)
                    boundary += std::fabs(d.contribution[i]);
            }
            local = *b0 > lo && *b0 < hi && boundary < th.gamma2 * eps_eff;
        }
    }
    report.verdict = local ? Verdict::Local : Verdict::Global;
    return report;
}

SolutionMode solution_mode(const std::vector<UnitReport>& reports) {
    for (const auto& r : reports)
        if (r.verdict == Verdict::Local) return SolutionMode::GlobalApproximation;
    return SolutionMode::LocalApproximation;
}

AnalysisReport analyze(const TwoLayerNet& net, const Dataset& data, const Thresholds& th) {
    validate(th);
    validate(data);
    if (net.input_dim() != data.dim())
        throw std::invalid_argument("analyze: net and dataset dimensions differ");

    AnalysisReport out;
    out.eps = baseline_eps(net, data);
    out.eps_used = effective_eps(out.eps, data);
    out.exact_fit = out.eps == 0.0;
    for (int j = 0; j < static_cast<int>(net.units.size()); ++j)
        out.units.push_back(classify_unit(net, j, data, th));
    out.mode = solution_mode(out.units);
    return out;
}

} // namespace smoothnet
