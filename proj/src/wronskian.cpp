#include "wronskian.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <sstream>

#include "numeric.hpp"

namespace smoothnet {

namespace {

constexpr double kConditionCap = 1e12;

void enumerate_terms(int n, int m, int pos, int left, std::vector<int>& cur,
                     std::vector<std::vector<int>>& out) {
    if (pos == n) {
        out.push_back(cur);
        return;
    }
    for (int k = 0; k <= left; ++k) {
        cur[pos] = k;
        enumerate_terms(n, m, pos + 1, left - k, cur, out);
    }
    cur[pos] = 0;
}

int total_degree(const std::vector<int>& a) {
    int d = 0;
    for (int k : a) d += k;
    return d;
}

bool term_before(const std::vector<int>& a, const std::vector<int>& b) {
    const int da = total_degree(a), db = total_degree(b);
    if (da != db) return da < db;
    for (size_t j = 0; j < a.size(); ++j) {
        if (a[j] != b[j]) return a[j] > b[j];
    }
    return false;
}

// Exponent sum of a column term under a row's per-variable exponents.
double column_exponent(const std::vector<int>& term, const std::vector<double>& expo) {
    double s = 0.0;
    for (size_t j = 0; j < term.size(); ++j) s += term[j] * expo[j];
    return s;
}

// Smallest exponent surplus of the columns after `row` over the row's
// diagonal column; positive means every later entry shrinks faster.
double row_margin(const TermOrder& order, int row, const std::vector<double>& expo) {
    const double base = column_exponent(order.terms[row], expo);
    double margin = std::numeric_limits<double>::infinity();
    for (size_t c = row + 1; c < order.terms.size(); ++c) {
        margin = std::min(margin, column_exponent(order.terms[c], expo) - base);
    }
    return margin;
}

constexpr double kPadExponent = 2.0;
constexpr double kMarginCap = 0.6;
constexpr double kExponentFloor = 0.05;

struct RowChoice {
    std::vector<double> expo;
    double margin = -1.0;
};

// Mixed diagonal term on two variables: one free exponent after the
// normalization prod w_j^{k_j} = dt. Scan it, preferring margins up to the
// cap and then the most balanced split.
RowChoice mix_two(const TermOrder& order, int row, int va, int vb) {
    const auto& diag = order.terms[row];
    const int ka = diag[va], kb = diag[vb];
    RowChoice best;
    double best_key1 = -std::numeric_limits<double>::infinity();
    double best_key2 = best_key1;
    std::vector<double> expo(order.n, kPadExponent);
    for (double s = kExponentFloor; s < 0.96; s += 5e-4) {
        const double eb = (1.0 - ka * s) / kb;
        if (eb <= 0.01) break;
        expo[va] = s;
        expo[vb] = eb;
        const double margin = row_margin(order, row, expo);
        const double key1 = std::min(margin, kMarginCap);
        const double key2 = std::min(s, eb);
        if (key1 > best_key1 + 1e-12 ||
            (std::fabs(key1 - best_key1) <= 1e-12 && key2 > best_key2)) {
            best_key1 = key1;
            best_key2 = key2;
            best.expo = expo;
            best.margin = margin;
        }
    }
    return best;
}

RowChoice mix_three(const TermOrder& order, int row, int va, int vb, int vc) {
    const auto& diag = order.terms[row];
    const int ka = diag[va], kb = diag[vb], kc = diag[vc];
    RowChoice best;
    double best_key1 = -std::numeric_limits<double>::infinity();
    double best_key2 = best_key1;
    std::vector<double> expo(order.n, kPadExponent);
    auto consider = [&](double s, double u) {
        const double ec = (1.0 - ka * s - kb * u) / kc;
        if (ec <= 0.01) return;
        expo[va] = s;
        expo[vb] = u;
        expo[vc] = ec;
        const double margin = row_margin(order, row, expo);
        const double key1 = std::min(margin, kMarginCap);
        const double key2 = std::min({s, u, ec});
        if (key1 > best_key1 + 1e-12 ||
            (std::fabs(key1 - best_key1) <= 1e-12 && key2 > best_key2)) {
            best_key1 = key1;
            best_key2 = key2;
            best.expo = expo;
            best.margin = margin;
        }
    };
    for (double s = kExponentFloor; s < 0.96; s += 0.01) {
        for (double u = kExponentFloor; u < 0.96; u += 0.01) consider(s, u);
    }
    if (!best.expo.empty()) {
        const double s0 = best.expo[va], u0 = best.expo[vb];
        for (double s = std::max(kExponentFloor, s0 - 0.01); s <= s0 + 0.01; s += 1e-3) {
            for (double u = std::max(kExponentFloor, u0 - 0.01); u <= u0 + 0.01; u += 1e-3) {
                consider(s, u);
            }
        }
    }
    return best;
}

// Paper-style ladder for rows involving four or more variables: first
// involved variable gets (1+c1)/(k+1), the rest (1+c_j)/k with strictly
// increasing c_j, shrinking c1 until the ordering constraint holds.
RowChoice mix_ladder(const TermOrder& order, int row, const std::vector<int>& vars) {
    const auto& diag = order.terms[row];
    const int k = total_degree(diag);
    double c1 = 0.1;
    for (int iter = 0; iter < 100; ++iter) {
        // solve for the base of the c_j ladder from the normalization
        const int k1 = diag[vars[0]];
        double denom = 0.0;
        for (size_t r = 1; r < vars.size(); ++r) {
            denom += (1.0 + 0.05 * r) * diag[vars[r]] / static_cast<double>(k);
        }
        const double rhs = k1 * (1.0 - c1 * k) / (static_cast<double>(k) * (k + 1));
        const double c_base = rhs / denom;
        if (c_base > 0.0 && c_base * 1.05 > c1) {
            std::vector<double> expo(order.n, kPadExponent);
            expo[vars[0]] = (1.0 + c1) / (k + 1);
            for (size_t r = 1; r < vars.size(); ++r) {
                expo[vars[r]] = (1.0 + c_base * (1.0 + 0.05 * r)) / k;
            }
            RowChoice out;
            out.expo = expo;
            out.margin = row_margin(order, row, expo);
            return out;
        }
        c1 *= 0.5;
    }
    return {};
}

ScalingSchedule finish_schedule(int n, int m, double delta_t,
                                std::vector<std::vector<double>> exponents,
                                std::vector<double> margins, const TermOrder& order,
                                const ActivationKind& kind) {
    ScalingSchedule s;
    s.n = n;
    s.m = m;
    s.delta_t = delta_t;
    s.c_params = std::move(margins);
    for (size_t i = 0; i < exponents.size(); ++i) {
        std::vector<double> w(exponents[i].size());
        for (size_t j = 0; j < w.size(); ++j) w[j] = std::pow(delta_t, exponents[i][j]);
        s.weights.push_back(std::move(w));
        s.y_targets.push_back(peak_argument(kind, total_degree(order.terms[i])));
    }
    s.biases = s.y_targets;
    return s;
}

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    for (size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
    return out;
}

RealizeResult solve_system(const WronskianMatrix& W, const Eigen::VectorXd& a, double delta_t) {
    const Eigen::MatrixXd M = W.entries.transpose();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    const auto& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    const double cond = smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
    if (!(cond < kConditionCap)) {
        std::ostringstream msg;
        msg << "Wronskian system condition " << cond << " exceeds " << kConditionCap
            << " at delta-t " << delta_t << "; try a larger delta-t";
        throw IllConditionedError(msg.str());
    }

    Eigen::VectorXd lambda;
    if (M.rows() == M.cols()) {
        lambda = M.fullPivLu().solve(a);
    } else {
        lambda = M.completeOrthogonalDecomposition().solve(a);
    }

    RealizeResult r;
    r.units = W.units;
    r.lambda.assign(lambda.data(), lambda.data() + lambda.size());
    r.diag.delta_t = delta_t;
    r.diag.cond_estimate = cond;
    r.diag.residual = (M * lambda - a).norm();
    for (double l : r.lambda) r.diag.max_abs_lambda = std::max(r.diag.max_abs_lambda, std::fabs(l));
    return r;
}

template <typename Make>
RealizeResult sweep_impl(const SweepOptions& opts, const Make& make) {
    std::exception_ptr last_error;
    bool have_best = false;
    RealizeResult best;
    for (int i = 0; i < opts.count; ++i) {
        const double t = opts.count > 1 ? static_cast<double>(i) / (opts.count - 1) : 0.0;
        const double dt = opts.dt_hi * std::pow(opts.dt_lo / opts.dt_hi, t);
        try {
            RealizeResult r = make(dt);
            if (r.diag.residual < opts.residual_cap &&
                (!have_best || r.diag.cond_estimate < best.diag.cond_estimate)) {
                best = std::move(r);
                have_best = true;
            }
        } catch (const std::exception&) {
            last_error = std::current_exception();
        }
    }
    if (have_best) return best;
    if (last_error) std::rethrow_exception(last_error);
    throw IllConditionedError("no delta-t candidate met the residual cap");
}

} // namespace

TermOrder term_order(int n, int m) {
    if (n < 1 || m < 0) throw std::invalid_argument("term order needs n >= 1 and m >= 0");
    TermOrder order;
    order.n = n;
    order.m = m;
    std::vector<int> cur(n, 0);
    enumerate_terms(n, m, 0, m, cur, order.terms);
    std::sort(order.terms.begin(), order.terms.end(), term_before);
    return order;
}

double peak_argument(const ActivationKind& kind, int order) {
    DerivativeOracle oracle(kind, std::max(order, 1));
    double best_v = -1.0, best_y = 0.0;
    for (int i = 0; i <= 1200; ++i) {
        const double y = -6.0 + 0.01 * i;
        const double v = std::fabs(oracle.derivative(order, y));
        bool take = false;
        if (v > best_v + 1e-12) {
            take = true;
        } else if (v > best_v - 1e-12) {
            const double ay = std::fabs(y), aby = std::fabs(best_y);
            if (ay < aby - 1e-9) {
                take = true;
            } else if (ay < aby + 1e-9 && y > best_y) {
                take = true;
            }
        }
        if (take) {
            best_v = v;
            best_y = y;
        }
    }
    return best_y;
}

ScalingSchedule univariate_schedule(int m, double delta_t, double c, const ActivationKind& kind) {
    if (!(delta_t > 0.0 && delta_t < 1.0)) {
        throw std::invalid_argument("delta-t must lie in (0, 1)");
    }
    if (!(c > 0.0)) throw std::invalid_argument("scaling parameter c must be positive");
    if (m < 0) throw std::invalid_argument("degree must be nonnegative");

    const TermOrder order = term_order(1, m);
    std::vector<std::vector<double>> exponents;
    exponents.push_back({1.0 + c});
    for (int i = 1; i < m; ++i) exponents.push_back({1.0 / i});
    if (m >= 1) exponents.push_back({-static_cast<double>(m - 1)});

    ScalingSchedule s = finish_schedule(1, m, delta_t, std::move(exponents),
                                        std::vector<double>(m + 1, c), order, kind);
    return s;
}

ScalingSchedule multivariate_schedule(int n, int m, double delta_t, const ActivationKind& kind) {
    if (n < 2) throw std::invalid_argument("multivariate schedule needs n >= 2");
    if (m < 1) throw std::invalid_argument("multivariate schedule needs m >= 1");
    if (!(delta_t > 0.0 && delta_t < 1.0)) {
        throw std::invalid_argument("delta-t must lie in (0, 1)");
    }

    const TermOrder order = term_order(n, m);
    const int tau = static_cast<int>(order.terms.size());
    std::vector<std::vector<double>> exponents;
    std::vector<double> margins;

    for (int i = 0; i < tau; ++i) {
        const auto& diag = order.terms[i];
        std::vector<int> vars;
        for (int j = 0; j < n; ++j) {
            if (diag[j] > 0) vars.push_back(j);
        }

        std::vector<double> expo(n, kPadExponent);
        if (i == 0) {
            expo.assign(n, 1.05);
        } else if (i == tau - 1) {
            // realizes W(tau, tau) = dt^{-(tau-2)}
            expo[n - 1] = -static_cast<double>(tau - 2) / m;
        } else if (vars.size() == 1) {
            expo[vars[0]] = 1.0 / diag[vars[0]];
        } else {
            RowChoice choice;
            if (vars.size() == 2) {
                choice = mix_two(order, i, vars[0], vars[1]);
            } else if (vars.size() == 3) {
                choice = mix_three(order, i, vars[0], vars[1], vars[2]);
            } else {
                choice = mix_ladder(order, i, vars);
            }
            if (choice.expo.empty() || choice.margin <= 1e-9) {
                std::ostringstream msg;
                msg << "no feasible weight exponents for schedule row " << i + 1 << " (term";
                for (int k : diag) msg << " " << k;
                msg << ")";
                throw ScheduleError(msg.str());
            }
            expo = choice.expo;
        }
        margins.push_back(i + 1 < tau ? row_margin(order, i, expo) : 1.0);
        exponents.push_back(std::move(expo));
    }

    return finish_schedule(n, m, delta_t, std::move(exponents), std::move(margins), order, kind);
}

std::vector<SchedUnit> ScalingSchedule::units_at(const std::vector<double>& x0) const {
    if (static_cast<int>(x0.size()) != n) {
        throw std::invalid_argument("expansion point dimension mismatch");
    }
    std::vector<SchedUnit> units;
    units.reserve(weights.size());
    for (size_t i = 0; i < weights.size(); ++i) {
        double dot = 0.0;
        for (int j = 0; j < n; ++j) dot += weights[i][j] * x0[j];
        units.push_back(SchedUnit{weights[i], y_targets[i] - dot});
    }
    return units;
}

std::vector<SchedUnit> ScalingSchedule::units_at(double x0) const {
    return units_at(std::vector<double>{x0});
}

WronskianMatrix assemble(const std::vector<SchedUnit>& units, const std::vector<double>& x0,
                         int m, const ActivationKind& kind) {
    if (units.empty()) throw std::invalid_argument("at least one unit is required");
    const int n = static_cast<int>(units[0].w.size());
    if (static_cast<int>(x0.size()) != n) {
        throw std::invalid_argument("expansion point dimension mismatch");
    }
    TermOrder order = term_order(n, m);
    const int tau = static_cast<int>(order.terms.size());
    if (static_cast<int>(units.size()) < tau) {
        std::ostringstream msg;
        msg << "need at least " << tau << " units for degree " << m << " in dimension " << n
            << ", got " << units.size();
        throw std::invalid_argument(msg.str());
    }

    DerivativeOracle oracle(kind, std::max(m, 1));
    WronskianMatrix W;
    W.entries.resize(static_cast<Eigen::Index>(units.size()), tau);
    for (size_t i = 0; i < units.size(); ++i) {
        if (static_cast<int>(units[i].w.size()) != n) {
            throw std::invalid_argument("unit weight dimension mismatch");
        }
        for (int j = 0; j < tau; ++j) {
            W.entries(static_cast<Eigen::Index>(i), j) =
                oracle.composed(order.terms[j], units[i].w, units[i].b, x0);
        }
    }
    W.units = units;
    W.x0 = x0;
    W.m = m;
    W.order = std::move(order);
    return W;
}

WronskianMatrix assemble(const std::vector<SchedUnit>& units, double x0, int m,
                         const ActivationKind& kind) {
    return assemble(units, std::vector<double>{x0}, m, kind);
}

RealizeResult realize_polynomial(const Poly1D& target, double x0, const ScalingSchedule& schedule,
                                 const ActivationKind& kind) {
    if (schedule.n != 1) throw std::invalid_argument("univariate realization needs a 1-D schedule");
    if (target.degree() > schedule.m) {
        throw std::invalid_argument("target degree exceeds the schedule order");
    }
    const std::vector<double> shifted = target.taylor_coeffs_at(x0);
    Eigen::VectorXd a = Eigen::VectorXd::Zero(schedule.m + 1);
    for (int k = 0; k <= schedule.m && k < static_cast<int>(shifted.size()); ++k) {
        a(k) = factorial(k) * shifted[k];
    }
    const WronskianMatrix W = assemble(schedule.units_at(x0), x0, schedule.m, kind);
    return solve_system(W, a, schedule.delta_t);
}

RealizeResult realize_polynomial(const PolyND& target, const std::vector<double>& x0,
                                 const ScalingSchedule& schedule, const ActivationKind& kind) {
    if (schedule.n != target.n || static_cast<int>(x0.size()) != target.n) {
        throw std::invalid_argument("target, point, and schedule dimensions must agree");
    }
    if (target.m > schedule.m) {
        throw std::invalid_argument("target degree exceeds the schedule order");
    }
    const WronskianMatrix W = assemble(schedule.units_at(x0), x0, schedule.m, kind);
    Eigen::VectorXd a(static_cast<Eigen::Index>(W.order.terms.size()));
    for (size_t j = 0; j < W.order.terms.size(); ++j) {
        a(static_cast<Eigen::Index>(j)) = target.partial_at(W.order.terms[j], x0);
    }
    return solve_system(W, a, schedule.delta_t);
}

RealizeResult realize_with_sweep(const Poly1D& target, double x0, int m,
                                 const ActivationKind& kind, const SweepOptions& opts) {
    return sweep_impl(opts, [&](double dt) {
        return realize_polynomial(target, x0, univariate_schedule(m, dt, 1.0, kind), kind);
    });
}

RealizeResult realize_with_sweep(const PolyND& target, const std::vector<double>& x0, int m,
                                 const ActivationKind& kind, const SweepOptions& opts) {
    return sweep_impl(opts, [&](double dt) {
        return realize_polynomial(target, x0, multivariate_schedule(target.n, m, dt, kind), kind);
    });
}

} // namespace smoothnet
