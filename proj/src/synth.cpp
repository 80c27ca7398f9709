#include "synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "numeric.hpp"

namespace smoothnet {

namespace {

double checked_dot(const std::vector<double>& w, const std::vector<double>& x) {
    if (w.size() != x.size()) {
        throw std::invalid_argument("input dimension does not match the unit weight");
    }
    double acc = 0.0;
    for (size_t i = 0; i < w.size(); ++i) acc += w[i] * x[i];
    return acc;
}

// Shifted activation value phi - lower_limit at argument y.
double eff_at(const ActivationKind& kind, double lim, double y) {
    return activation_eval(kind, y) - lim;
}

// Inverse of the shifted activation on its increasing left branch.
double invert_level(const ActivationKind& kind, double lim, double level) {
    double lo = -60.0, hi = 0.0;
    if (!(level > 0.0) || level > eff_at(kind, lim, hi)) {
        throw std::invalid_argument("level outside the activation's left branch");
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (eff_at(kind, lim, mid) < level)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

// Least-squares coefficient of c * (t)^m for g(knot + t) over (0, L].
double tail_power_coef(const std::function<double(double)>& g, double knot, double L, int m) {
    const double num =
        simpson([&](double t) { return g(knot + t) * std::pow(t, m); }, 0.0, L, 400);
    const double den = std::pow(L, 2 * m + 1) / (2 * m + 1);
    return num / den;
}

// Degree-m least-squares polynomial of f over [a, b] on Chebyshev-placed
// samples; optionally reports the relative sample residual.
Poly1D fit_poly_on(const std::function<double(double)>& f, double a, double b, int m,
                   double* rel_residual) {
    const int npts = 10 * (m + 1);
    const std::vector<double> xs = chebyshev_points(a, b, npts);
    const double mid = 0.5 * (a + b);
    Eigen::MatrixXd V(npts, m + 1);
    Eigen::VectorXd y(npts);
    for (int i = 0; i < npts; ++i) {
        const double t = xs[i] - mid;
        double p = 1.0;
        for (int k = 0; k <= m; ++k) {
            V(i, k) = p;
            p *= t;
        }
        y(i) = f(xs[i]);
    }
    const Eigen::VectorXd sol = V.colPivHouseholderQr().solve(y);
    if (rel_residual != nullptr) {
        const double num = (V * sol - y).norm();
        const double den = std::max(y.norm(), 1e-12);
        *rel_residual = num / den;
    }
    std::vector<double> shifted(sol.data(), sol.data() + m + 1);
    Poly1D p = Poly1D::from_shifted(shifted, mid);
    p.coeffs.resize(m + 1, 0.0);
    return p;
}

struct GlobalBlock {
    std::vector<NetUnit> units;
    RealizeDiagnostics diag;
    double err = std::numeric_limits<double>::infinity();
    double scale = 0.0;
};

// Activation argument at which every derivative order up to m is bounded away
// from zero, so a one-point solve is well posed.
double pick_anchor_argument(const ActivationKind& kind, int m) {
    const DerivativeOracle oracle(kind, std::max(m, 1) + 1);
    for (double y0 : {0.5, 0.35, 0.8, -0.4, 1.1}) {
        bool ok = true;
        for (int k = 0; k <= m; ++k) {
            if (std::fabs(oracle.derivative(k, y0)) < 1e-8) {
                ok = false;
                break;
            }
        }
        if (ok) return y0;
    }
    throw std::invalid_argument("no well-posed anchor argument for this activation");
}

// Whole-domain realization of one polynomial piece: m+1 units with distinct
// small weights sharing one anchor argument, solved through the scaling
// machinery; the weight scale is swept and selected by dense error. Candidates
// are kept sorted by error so callers can retry when a later solve finds the
// basis too flat.
std::vector<GlobalBlock> gentle_candidates_1d(const Poly1D& piece, int m,
                                              const ActivationKind& kind) {
    const double y0 = pick_anchor_argument(kind, m);
    const double x0 = 0.5;
    std::vector<GlobalBlock> out;
    double scale = 0.5;
    for (int step = 0; step < 25; ++step, scale *= 0.7) {
        ScalingSchedule sch;
        sch.n = 1;
        sch.m = m;
        sch.delta_t = scale;
        for (int i = 0; i <= m; ++i) {
            sch.weights.push_back({scale * (i + 1) / (m + 1)});
            sch.y_targets.push_back(y0);
            sch.biases.push_back(y0);
            sch.c_params.push_back(1.0);
        }
        try {
            const RealizeResult r = realize_polynomial(piece, x0, sch, kind);
            GlobalBlock cand;
            cand.diag = r.diag;
            cand.scale = scale;
            for (size_t i = 0; i < r.units.size(); ++i) {
                cand.units.push_back(NetUnit{r.units[i].w, r.units[i].b, r.lambda[i], kind});
            }
            cand.err = l2_norm_on(
                [&](double x) {
                    double acc = 0.0;
                    for (const NetUnit& u : cand.units) acc += u.lambda * u.activation(x);
                    return acc - piece.eval(x);
                },
                0.0, 1.0, 400);
            if (std::isfinite(cand.err)) out.push_back(std::move(cand));
        } catch (const IllConditionedError&) {
        } catch (const ScheduleError&) {
        }
    }
    if (out.empty()) {
        throw std::runtime_error("whole-domain realization failed at every weight scale");
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const GlobalBlock& a, const GlobalBlock& b) { return a.err < b.err; });
    return out;
}

struct LocalPick {
    SharpenResult sharp;
    double c_tail = 0.0; // power coefficient fitted over the whole remaining domain
    double misfit = 0.0;
    double quality = std::numeric_limits<double>::infinity();
    bool budget_met = false;
    bool audible = false;
};

// Per-knot unit selection: scan base weights, sharpen each through the
// doubling ladder until the zero-part budget (and the masking margin) is met,
// and keep the candidate with the smallest jump-scaled total deviation. The
// output weight the unit will eventually carry is alpha over its whole-tail
// power coefficient, so both the budget test and the quality ranking use that
// coefficient; the short-window c_k on the sharpen record is diagnostic.
LocalPick pick_local_unit(const ActivationKind& kind, double knot, double alpha, double budget,
                          int m, double x_next, double min_slope = 0.0) {
    const double lim = activation_lower_limit(kind);
    const double eps_level = 0.5 * eff_at(kind, lim, 0.0);
    const double ybar = invert_level(kind, lim, eps_level);

    LocalPick best;
    LocalPick fallback; // smallest zero-part error when the budget is unreachable
    double fallback_zero = std::numeric_limits<double>::infinity();

    const auto measure = [&](const SharpenResult& r, LocalPick& out) {
        const auto phi_eff = [&](double x) { return eff_at(kind, lim, r.unit.argument(x)); };
        out.sharp = r;
        out.c_tail = tail_power_coef(phi_eff, knot, 1.0 - knot, m);
        out.misfit = l2_norm_on(
            [&](double x) {
                return phi_eff(x) - out.c_tail * std::pow(std::max(x - knot, 0.0), m);
            },
            knot, 1.0, 400);
        const double lam_est = std::fabs(alpha) / std::max(std::fabs(out.c_tail), 1e-12);
        out.quality = lam_est * std::hypot(r.zero_part_l2, out.misfit);
        // the unit must register as active on its own first interval, with
        // margin, or its bend would be booked at the wrong knot
        out.audible = l2_norm_on(phi_eff, knot, x_next, 200) >= 1.2 * kSplineMaskEps;
        return lam_est;
    };

    // the base weight grid reaches well below one: the budget quantizes the
    // knot level in powers of two, so pairing a deep level with a moderate
    // final slope needs fractional base weights
    double W = 0.05;
    const double ratio = std::pow(64.0 / 0.05, 1.0 / 31.0);
    for (int wi = 0; wi < 32; ++wi, W *= ratio) {
        NetUnit base{{W}, ybar - W * knot, 0.0, kind};
        for (int k = 0; k <= 26; ++k) {
            const double rho = std::pow(2.0, k);
            SharpenResult r;
            try {
                r = sharpen(base, knot, rho, eps_level, m, x_next);
            } catch (const std::invalid_argument&) {
                break;
            }
            LocalPick cand;
            measure(r, cand);
            if (!cand.audible) continue; // sharper rungs will clear the threshold
            // steepness floor for transition-localized builds: keep climbing
            // the ladder until the final slope clears it
            if (std::fabs(r.unit.w[0]) < min_slope) continue;
            if (r.zero_part_l2 < fallback_zero) {
                fallback_zero = r.zero_part_l2;
                fallback = cand;
                fallback.budget_met = false;
            }
            if (r.zero_part_l2 <= budget && r.zero_part_l2 <= kSplineMaskEps / 3.0) {
                cand.budget_met = true;
                if (cand.quality < best.quality) best = cand;
                break;
            }
        }
    }
    if (best.budget_met) return best;
    if (!fallback.audible) throw std::runtime_error("no admissible sharpened unit at this knot");
    return fallback;
}

// Least-squares coefficient of c * (x_k - x)^m for g left of x_k, the
// mirrored counterpart of tail_power_coef.
double head_power_coef(const std::function<double(double)>& g, double x_k, int m) {
    const double num =
        simpson([&](double t) { return g(x_k - t) * std::pow(t, m); }, 0.0, x_k, 400);
    const double den = std::pow(x_k, 2 * m + 1) / (2 * m + 1);
    return num / den;
}

// Right-hand side of the assembled system for a concrete target spline.
Eigen::VectorXd rhs_for_target(const SplineMatrix& M, const Spline1D& target) {
    if (target.m != M.m) throw std::invalid_argument("target degree does not match the matrix");
    const std::vector<double>& tk = target.knots.knots;
    if (static_cast<int>(tk.size()) != M.zeta - 1) {
        throw std::invalid_argument("target knot count does not match the matrix");
    }
    for (size_t i = 0; i < tk.size(); ++i) {
        if (std::fabs(tk[i] - M.knots[i]) > 1e-12) {
            throw std::invalid_argument("target knots do not match the matrix");
        }
    }
    const Poly1D first = target.piece(0);
    if (first.degree() > M.m) {
        throw std::invalid_argument("first piece exceeds the matrix degree");
    }
    Eigen::VectorXd b = Eigen::VectorXd::Zero(M.m + 1 + M.zeta - 1);
    for (size_t k = 0; k < first.coeffs.size(); ++k) b(static_cast<int>(k)) = first.coeffs[k];
    for (int nu = 0; nu + 1 < M.zeta; ++nu) b(M.m + 1 + nu) = target.alphas[nu];
    return b;
}

std::vector<double> solve_system(const SplineMatrix& M, const Eigen::VectorXd& b) {
    const Eigen::MatrixXd F = M.full();
    const int rows = static_cast<int>(F.rows());
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(F);
    if (cod.rank() < rows) {
        throw std::runtime_error("spline basis is rank deficient over these knots");
    }
    Eigen::VectorXd x;
    if (F.cols() == rows) {
        const Eigen::FullPivLU<Eigen::MatrixXd> lu(F);
        x = lu.solve(b);
        // a couple of refinement passes; the huge output weights of the
        // whole-domain block otherwise leave a visible backward error
        for (int it = 0; it < 2; ++it) x += lu.solve(b - F * x);
    } else {
        x = cod.solve(b); // least-norm for a wide basis
        for (int it = 0; it < 2; ++it) x += cod.solve(b - F * x);
    }
    std::vector<double> lam(M.col_of_unit.size(), 0.0);
    for (size_t u = 0; u < M.col_of_unit.size(); ++u) lam[u] = x(M.col_of_unit[u]);
    return lam;
}

// Sum of the output weights of units whose activation vanishes at the left
// end of the domain; those are the sharpened (shifted-substitution) units.
double shifted_weight_sum(const TwoLayerNet& net) {
    const int n = net.input_dim();
    const std::vector<double> origin(n, 0.0);
    double acc = 0.0;
    for (const NetUnit& u : net.units) {
        const double lim = activation_lower_limit(u.kind);
        if (u.activation(origin) - lim < 0.2) acc += u.lambda;
    }
    return acc;
}

} // namespace

double NetUnit::argument(double x) const {
    if (w.size() != 1) throw std::invalid_argument("scalar evaluation of a multivariate unit");
    return w[0] * x + b;
}

double NetUnit::argument(const std::vector<double>& x) const { return checked_dot(w, x) + b; }

double NetUnit::activation(double x) const { return activation_eval(kind, argument(x)); }

double NetUnit::activation(const std::vector<double>& x) const {
    return activation_eval(kind, argument(x));
}

int TwoLayerNet::input_dim() const {
    if (units.empty()) return 1;
    return static_cast<int>(units[0].w.size());
}

double TwoLayerNet::eval(double x) const {
    double acc = output_bias;
    for (const NetUnit& u : units) acc += u.lambda * u.activation(x);
    return acc;
}

double TwoLayerNet::eval(const std::vector<double>& x) const {
    double acc = output_bias;
    for (const NetUnit& u : units) acc += u.lambda * u.activation(x);
    return acc;
}

double activation_lower_limit(const ActivationKind& kind) {
    return activation_eval(kind, -40.0);
}

SharpenResult sharpen(const NetUnit& unit, double x_k, double rho, double eps_level, int m,
                      double x_next) {
    if (unit.w.size() != 1) throw std::invalid_argument("sharpening expects a univariate unit");
    const double w = unit.w[0];
    if (!(w > 0.0)) throw std::invalid_argument("sharpening expects a positive weight");
    if (!(rho >= 1.0)) throw std::invalid_argument("rho must be at least one");
    if (!(x_k > 0.0) || !(x_next > x_k)) {
        throw std::invalid_argument("knot must lie inside (0, x_next)");
    }
    if (m < 1) throw std::invalid_argument("power degree must be positive");

    const double lim = activation_lower_limit(unit.kind);
    const double yk = w * x_k + unit.b;
    if (yk > 0.0) {
        throw std::invalid_argument("knot lies right of the unit's sign change");
    }
    const double phi_k = eff_at(unit.kind, lim, yk);
    const double sigma0 = eff_at(unit.kind, lim, 0.0);
    if (phi_k > eps_level * (1.0 + 1e-12) || eps_level > sigma0 * (1.0 + 1e-12)) {
        throw std::invalid_argument("level must satisfy phi(x_k) <= eps_level <= sigma(0)");
    }
    if (!(phi_k > 0.0)) {
        throw std::invalid_argument("activation already vanished at the knot");
    }

    SharpenResult out;
    out.rho = rho;
    out.unit = unit;
    if (rho == 1.0) {
        out.gamma = 0.0;
        out.eps_applied = phi_k;
    } else {
        const double reduced = phi_k / rho;
        const double ystar = invert_level(unit.kind, lim, reduced);
        out.gamma = ystar - rho * yk;
        out.unit.w[0] = rho * w;
        out.unit.b = rho * unit.b + out.gamma;
        out.eps_applied = eff_at(unit.kind, lim, ystar);
    }

    const auto phi_eff = [&](double x) {
        return eff_at(unit.kind, lim, out.unit.argument(x));
    };
    out.c_k = tail_power_coef(phi_eff, x_k, x_next - x_k, m);
    out.zero_part_l2 = l2_norm_on(phi_eff, 0.0, x_k, 400);
    return out;
}

SharpenResult sharpen(const NetUnit& unit, double x_k, double rho) {
    const double lim = activation_lower_limit(unit.kind);
    const double eps_level = 0.5 * eff_at(unit.kind, lim, 0.0);
    return sharpen(unit, x_k, rho, eps_level, 2, 1.0);
}

TwoLayerNet local_approx(const std::function<double(double)>& f, double x0, int m,
                         const ActivationKind& kind) {
    if (m < 0) throw std::invalid_argument("negative approximation order");
    std::vector<double> jet(m + 1, 0.0);
    jet[0] = f(x0);
    for (int k = 1; k <= m; ++k) jet[k] = central_diff_rich(f, x0, k) / factorial(k);
    const Poly1D target = Poly1D::from_shifted(jet, x0);
    const RealizeResult r = realize_with_sweep(target, x0, m, kind);
    TwoLayerNet net;
    for (size_t i = 0; i < r.units.size(); ++i) {
        net.units.push_back(NetUnit{r.units[i].w, r.units[i].b, r.lambda[i], kind});
    }
    return net;
}

TwoLayerNet local_approx(const std::function<double(const std::vector<double>&)>& f,
                         const std::vector<double>& x0, int m, const ActivationKind& kind) {
    if (m < 0) throw std::invalid_argument("negative approximation order");
    if (x0.empty()) throw std::invalid_argument("empty expansion point");
    const int n = static_cast<int>(x0.size());
    const TermOrder order = term_order(n, m);
    std::map<std::vector<int>, double> shifted;
    for (const std::vector<int>& a : order.terms) {
        double fact = 1.0;
        for (int e : a) fact *= factorial(e);
        shifted[a] = field_mixed_partial(f, a, x0) / fact;
    }
    const PolyND target = PolyND::from_shifted(n, m, x0, shifted);
    const RealizeResult r = realize_with_sweep(target, x0, m, kind);
    TwoLayerNet net;
    for (size_t i = 0; i < r.units.size(); ++i) {
        net.units.push_back(NetUnit{r.units[i].w, r.units[i].b, r.lambda[i], kind});
    }
    return net;
}

SplineMatrix spline_matrix(const TwoLayerNet& net, const KnotSet1D& knots, int m, double eps) {
    if (net.units.empty()) throw std::invalid_argument("empty network");
    if (m < 1) throw std::invalid_argument("degree must be positive");
    if (!(eps > 0.0)) throw std::invalid_argument("activity threshold must be positive");
    for (const NetUnit& u : net.units) {
        if (u.w.size() != 1) throw std::invalid_argument("spline matrix expects univariate units");
    }

    const int theta = static_cast<int>(net.units.size());
    const int zeta = knots.pieces();
    const int rows = m + 1 + zeta - 1;

    SplineMatrix M;
    M.m = m;
    M.zeta = zeta;
    M.knots = knots.knots;

    // per-unit activity, interval fits, and the shifted-activation choice
    std::vector<std::vector<Poly1D>> fits(theta);
    std::vector<char> shifted(theta, 0);
    std::vector<std::function<double(double)>> eff(theta);
    M.indicator.assign(theta, std::vector<int>(zeta, 1));
    M.fit_residuals.assign(theta, std::vector<double>(zeta, 0.0));

    for (int j = 0; j < theta; ++j) {
        const NetUnit& u = net.units[j];
        const double lim = activation_lower_limit(u.kind);
        std::vector<double> norms(zeta, 0.0);
        double min_norm = std::numeric_limits<double>::infinity();
        for (int i = 0; i < zeta; ++i) {
            const auto [a, b] = knots.interval_bounds(i);
            norms[i] = l2_norm_on([&](double x) { return u.activation(x) - lim; }, a, b, 200);
            min_norm = std::min(min_norm, norms[i]);
        }
        // a unit with a genuine zero part enters through its shifted
        // activation so that part masks exactly
        shifted[j] = min_norm < eps ? 1 : 0;
        const double shift = shifted[j] ? lim : 0.0;
        eff[j] = [u, shift](double x) { return u.activation(x) - shift; };
        fits[j].resize(zeta);
        for (int i = 0; i < zeta; ++i) {
            M.indicator[j][i] = shifted[j] ? (norms[i] >= eps ? 1 : 0) : 1;
            if (M.indicator[j][i] == 1) {
                fits[j][i] = fit_poly_on(eff[j], knots.interval_bounds(i).first,
                                         knots.interval_bounds(i).second, m,
                                         &M.fit_residuals[j][i]);
            } else {
                fits[j][i].coeffs.assign(m + 1, 0.0);
            }
        }
    }

    // column order: units active on the first interval first
    std::vector<int> active_cols, masked_cols;
    for (int j = 0; j < theta; ++j) {
        (M.indicator[j][0] == 1 ? active_cols : masked_cols).push_back(j);
    }
    M.mu = static_cast<int>(active_cols.size());
    M.col_of_unit.assign(theta, 0);
    {
        int c = 0;
        for (int j : active_cols) M.col_of_unit[j] = c++;
        for (int j : masked_cols) M.col_of_unit[j] = c++;
    }

    M.A1 = Eigen::MatrixXd::Zero(m + 1, M.mu);
    M.B = Eigen::MatrixXd::Zero(m + 1, theta - M.mu);
    M.C = Eigen::MatrixXd::Zero(zeta - 1, M.mu);
    M.D = Eigen::MatrixXd::Zero(zeta - 1, theta - M.mu);

    for (int c = 0; c < M.mu; ++c) {
        const int j = active_cols[c];
        for (int k = 0; k <= m; ++k) M.A1(k, c) = fits[j][0].coeffs[k];
    }

    // knot rows: a unit acquires its truncated-power bend once, where its
    // activity flips. A unit waking up at the knot contributes the fitted
    // coefficient of its rise against (x - x_k)^m over the rest of the
    // domain; one dying there sheds its mirrored power, which reads as a
    // signed head coefficient. Cells where the unit is active on both sides
    // stay zero: the bend was already accounted for at its own knot.
    for (int nu = 1; nu < zeta; ++nu) {
        const double xk = knots.knots[nu - 1];
        for (int j = 0; j < theta; ++j) {
            const int left = M.indicator[j][nu - 1];
            const int right = M.indicator[j][nu];
            double entry = 0.0;
            if (left == 0 && right == 1) {
                entry = tail_power_coef(eff[j], xk, 1.0 - xk, m);
            } else if (left == 1 && right == 0) {
                const double c_head = head_power_coef(eff[j], xk, m);
                entry = (m % 2 == 1) ? c_head : -c_head;
            }
            const int col = M.col_of_unit[j];
            if (col < M.mu) {
                M.C(nu - 1, col) = entry;
            } else {
                M.D(nu - 1, col - M.mu) = entry;
            }
        }
    }

    const Eigen::MatrixXd F = M.full();
    Eigen::VectorXd lam(theta);
    for (int j = 0; j < theta; ++j) lam(M.col_of_unit[j]) = net.units[j].lambda;
    M.rhs = F * lam;

    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(F);
    M.rank = static_cast<int>(cod.rank());
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(F);
    const double smin = svd.singularValues()(svd.singularValues().size() - 1);
    M.cond_estimate = smin > 0.0 ? svd.singularValues()(0) / smin
                                 : std::numeric_limits<double>::infinity();
    (void)rows;
    return M;
}

Eigen::MatrixXd SplineMatrix::full() const {
    const int theta = static_cast<int>(col_of_unit.size());
    const int rows = m + 1 + zeta - 1;
    Eigen::MatrixXd F = Eigen::MatrixXd::Zero(rows, theta);
    F.block(0, 0, m + 1, mu) = A1;
    F.block(0, mu, m + 1, theta - mu) = B;
    if (zeta > 1) {
        F.block(m + 1, 0, zeta - 1, mu) = C;
        F.block(m + 1, mu, zeta - 1, theta - mu) = D;
    }
    return F;
}

std::vector<double> solve_spline_matrix(const SplineMatrix& M, const Spline1D& target) {
    return solve_system(M, rhs_for_target(M, target));
}

SplineBuild implement_spline_1d(const Spline1D& s, const ActivationKind& kind, double tol,
                                double local_min_slope) {
    if (s.m < 1) throw std::invalid_argument("spline degree must be positive");
    if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
    const int m = s.m;
    const int zeta = s.knots.pieces();
    if (static_cast<int>(s.alphas.size()) != zeta - 1) {
        throw std::invalid_argument("one jump coefficient per knot is required");
    }
    const Poly1D p1 = s.piece(0);
    if (p1.degree() > m) throw std::invalid_argument("first piece exceeds the spline degree");

    const double budget = tol / (2.0 * zeta + 1.0);
    const double lim = activation_lower_limit(kind);

    std::vector<LocalPick> picks;
    for (int nu = 0; nu + 1 < zeta; ++nu) {
        const double x_next = nu + 2 < zeta ? s.knots.knots[nu + 1] : 1.0;
        picks.push_back(pick_local_unit(kind, s.knots.knots[nu], s.alphas[nu], budget, m,
                                        x_next, local_min_slope));
    }

    std::vector<GlobalBlock> cands = gentle_candidates_1d(p1, m, kind);

    // every weight scale is solved through the full system and judged by the
    // dense error of the solved network; the solve redistributes the output
    // weights, so the scale that realizes the first piece best on its own is
    // not necessarily the one that solves best
    SplineBuild out;
    double best_err = std::numeric_limits<double>::infinity();
    std::string last_error = "no candidates";
    for (const GlobalBlock& cand : cands) {
        TwoLayerNet net;
        for (const NetUnit& u : cand.units) net.units.push_back(u);
        for (const LocalPick& p : picks) net.units.push_back(p.sharp.unit);
        try {
            const SplineMatrix M = spline_matrix(net, s.knots, m, kSplineMaskEps);
            const std::vector<double> lam = solve_spline_matrix(M, s);
            for (size_t j = 0; j < net.units.size(); ++j) net.units[j].lambda = lam[j];
            if (std::fabs(lim) > 1e-6) net = tanh_constant_compensation(net);
            const double err = l2_norm_on(
                [&](double x) { return net.eval(x) - s.eval(x); }, 0.0, 1.0, 400);
            if (err < best_err) {
                best_err = err;
                out.net = net;
                out.report.global_diag = cand.diag;
            }
        } catch (const std::runtime_error& e) {
            last_error = e.what();
        }
    }
    if (!std::isfinite(best_err)) {
        throw std::runtime_error("spline system could not be solved: " + last_error);
    }

    double worst_share = -1.0;
    for (int nu = 0; nu + 1 < zeta; ++nu) {
        const LocalPick& p = picks[nu];
        KnotBuildInfo info;
        info.knot = s.knots.knots[nu];
        info.rho = p.sharp.rho;
        info.gamma = p.sharp.gamma;
        info.c_k = p.sharp.c_k;
        info.zero_part_l2 = p.sharp.zero_part_l2;
        info.tail_misfit_l2 = p.misfit;
        out.report.knots.push_back(info);
        const double share = std::fabs(out.net.units[m + 1 + nu].lambda) *
                             std::hypot(p.sharp.zero_part_l2, p.misfit);
        if (share > worst_share) {
            worst_share = share;
            out.report.limiting_knot = info.knot;
        }
    }

    out.report.dense_l2 =
        l2_norm_on([&](double x) { return out.net.eval(x) - s.eval(x); }, 0.0, 1.0, 800);
    out.report.tol_met = out.report.dense_l2 <= tol;
    return out;
}

TwoLayerNet add_negative_unit(const TwoLayerNet& net, const Spline1D& target, double knot,
                              double lambda_free) {
    if (net.units.empty()) throw std::invalid_argument("empty network");
    const int m = target.m;
    bool found = false;
    for (double k : target.knots.knots) {
        if (std::fabs(k - knot) < 1e-9) found = true;
    }
    if (!found) throw std::invalid_argument("knot is not a knot of the realized spline");

    const ActivationKind kind = net.units[0].kind;
    const double lim = activation_lower_limit(kind);
    const double eps_level = 0.5 * eff_at(kind, lim, 0.0);
    const double ybar = invert_level(kind, lim, eps_level);

    // mirrored scan: zero part on the right, truncated power opening leftward
    NetUnit best;
    double best_quality = std::numeric_limits<double>::infinity();
    double W = 0.05;
    const double ratio = std::pow(64.0 / 0.05, 1.0 / 31.0);
    for (int wi = 0; wi < 32; ++wi, W *= ratio) {
        for (int k = 0; k <= 26; ++k) {
            const double rho = std::pow(2.0, k);
            const double reduced = eps_level / rho;
            double ystar;
            try {
                ystar = invert_level(kind, lim, reduced);
            } catch (const std::invalid_argument&) {
                break;
            }
            NetUnit cand{{-rho * W}, rho * W * knot + ystar, 0.0, kind};
            const auto phi = [&](double x) { return eff_at(kind, lim, cand.argument(x)); };
            const double zero = l2_norm_on(phi, knot, 1.0, 400);
            if (zero > kSplineMaskEps / 3.0) continue;
            const double c = head_power_coef(phi, knot, m);
            if (std::fabs(c) < 1e-12) break;
            const double misfit = l2_norm_on(
                [&](double x) { return phi(x) - c * std::pow(std::max(knot - x, 0.0), m); }, 0.0,
                knot, 400);
            // the output weight is prescribed, so a large head coefficient
            // inflates the re-solve's compensation rather than amortizing the
            // deviation; prefer small, faithful bends
            const double quality = std::hypot(zero, misfit) * (1.0 + std::fabs(c));
            if (quality < best_quality) {
                best_quality = quality;
                best = cand;
            }
            break; // first admissible rho per base weight
        }
    }
    if (!std::isfinite(best_quality)) {
        throw std::runtime_error("no admissible mirrored unit at this knot");
    }

    TwoLayerNet extended = net;
    best.lambda = lambda_free;
    extended.units.push_back(best);

    const SplineMatrix M = spline_matrix(extended, target.knots, m, kSplineMaskEps);
    const Eigen::MatrixXd F = M.full();
    const int rows = static_cast<int>(F.rows());
    const int neg_col = M.col_of_unit.back();

    Eigen::VectorXd b = rhs_for_target(M, target) - lambda_free * F.col(neg_col);
    Eigen::MatrixXd Fred(rows, F.cols() - 1);
    for (int c = 0, o = 0; c < F.cols(); ++c) {
        if (c == neg_col) continue;
        Fred.col(o++) = F.col(c);
    }
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(Fred);
    if (cod.rank() < rows) {
        throw std::runtime_error("re-solve failed: reduced basis is rank deficient");
    }
    Eigen::VectorXd x;
    if (Fred.cols() == rows) {
        Eigen::FullPivLU<Eigen::MatrixXd> lu(Fred);
        x = lu.solve(b);
        for (int pass = 0; pass < 2; ++pass) x += lu.solve(b - Fred * x);
    } else {
        x = cod.solve(b);
        for (int pass = 0; pass < 2; ++pass) x += cod.solve(b - Fred * x);
    }
    for (size_t j = 0; j + 1 < extended.units.size(); ++j) {
        const int col = M.col_of_unit[j];
        extended.units[j].lambda = x(col < neg_col ? col : col - 1);
    }
    return extended;
}

TwoLayerNet tanh_constant_compensation(const TwoLayerNet& net) {
    if (net.units.empty()) throw std::invalid_argument("empty network");
    for (const NetUnit& u : net.units) {
        if (u.kind.tag != ActTag::Tanh) {
            throw std::invalid_argument("constant compensation expects an all-tanh network");
        }
    }
    const int n = net.input_dim();
    const double S = shifted_weight_sum(net);

    NetUnit comp;
    comp.kind = net.units[0].kind;
    comp.w.assign(n, 0.0);
    comp.w[0] = 1e-8;
    comp.b = 3.0;
    const double beta =
        simpson([&](double t) { return activation_eval(comp.kind, comp.w[0] * t + comp.b); }, 0.0,
                1.0, 200);
    if (std::fabs(beta) < 1e-3) {
        throw std::runtime_error("compensation level is below the numeric floor");
    }
    comp.lambda = S / beta;

    TwoLayerNet out = net;
    out.units.push_back(comp);
    return out;
}

SplineBuild implement_spline_nd(const StandardPartitionSpline& s, const ActivationKind& kind,
                                double tol) {
    const int n = s.n;
    const int m = s.m;
    if (n < 2 || n > 3) throw std::invalid_argument("partition synthesis supports n in {2, 3}");
    if (m < 1) throw std::invalid_argument("spline degree must be positive");
    if (static_cast<int>(s.grid.size()) != n) {
        throw std::invalid_argument("one knot list per axis is required");
    }
    const size_t per_axis = s.grid[0].size();
    for (const std::vector<double>& g : s.grid) {
        if (g.size() != per_axis) {
            throw std::invalid_argument("standard partitions use matching per-axis knot counts");
        }
    }
    int zeta = 1;
    for (int a = 0; a < n; ++a) zeta *= static_cast<int>(per_axis) + 1;
    const double budget = tol / (2.0 * zeta + 1.0);
    const double lim = activation_lower_limit(kind);

    // whole-domain block: schedule directions, gentle magnitudes, one anchor
    const TermOrder order = term_order(n, m);
    const int tau = static_cast<int>(order.terms.size());
    const double y0 = pick_anchor_argument(kind, m);
    const std::vector<double> center(n, 0.5);

    std::vector<std::vector<double>> dirs;
    {
        const ScalingSchedule ref = multivariate_schedule(n, m, 0.3, kind);
        for (const std::vector<double>& row : ref.weights) {
            double norm = 0.0;
            for (double v : row) norm += v * v;
            norm = std::sqrt(norm);
            if (!(norm > 0.0)) throw std::runtime_error("degenerate schedule direction");
            std::vector<double> d(row);
            for (double& v : d) v /= norm;
            dirs.push_back(d);
        }
    }

    struct NdGlobal {
        std::vector<NetUnit> units;
        RealizeDiagnostics diag;
        double err = std::numeric_limits<double>::infinity();
    };
    std::vector<NdGlobal> cands;
    double scale = 0.5;
    for (int step = 0; step < 25; ++step, scale *= 0.7) {
        ScalingSchedule sch;
        sch.n = n;
        sch.m = m;
        sch.delta_t = scale;
        bool inside = true;
        for (int i = 0; i < tau; ++i) {
            std::vector<double> w(dirs[i]);
            const double mag = scale * (1.0 + static_cast<double>(i) / (2.0 * tau));
            for (double& v : w) v *= mag;
            // universal hyperplane: the whole cube must sit on the positive side
            double worst = y0;
            for (int a = 0; a < n; ++a) worst -= std::fabs(w[a]) * 0.5;
            if (!(worst > 0.0)) inside = false;
            sch.weights.push_back(w);
            sch.y_targets.push_back(y0);
            sch.biases.push_back(y0);
            sch.c_params.push_back(1.0);
        }
        if (!inside) continue;
        try {
            const RealizeResult r = realize_polynomial(s.base_piece, center, sch, kind);
            NdGlobal cand;
            cand.diag = r.diag;
            for (size_t i = 0; i < r.units.size(); ++i) {
                cand.units.push_back(NetUnit{r.units[i].w, r.units[i].b, r.lambda[i], kind});
            }
            double acc = 0.0;
            int cnt = 0;
            const int g = 12;
            std::vector<double> x(n, 0.0);
            std::vector<int> idx(n, 0);
            for (;;) {
                for (int a = 0; a < n; ++a) x[a] = static_cast<double>(idx[a]) / g;
                double val = 0.0;
                for (const NetUnit& u : cand.units) val += u.lambda * u.activation(x);
                const double d = val - s.base_piece.eval(x);
                acc += d * d;
                ++cnt;
                int a = 0;
                while (a < n && ++idx[a] > g) idx[a++] = 0;
                if (a == n) break;
            }
            cand.err = std::sqrt(acc / cnt);
            if (std::isfinite(cand.err)) cands.push_back(std::move(cand));
        } catch (const IllConditionedError&) {
        } catch (const ScheduleError&) {
        }
    }
    if (cands.empty()) {
        throw std::runtime_error("base-piece realization failed at every weight scale");
    }
    std::stable_sort(cands.begin(), cands.end(),
                     [](const NdGlobal& a, const NdGlobal& b) { return a.err < b.err; });

    SplineBuild out;
    for (const NetUnit& u : cands[0].units) out.net.units.push_back(u);
    out.report.global_diag = cands[0].diag;

    // one sharpened unit per grid hyperplane. A unit bends once, at its own
    // hyperplane; the whole-domain block and the earlier locals are smooth or
    // already accounted for there, so the per-axis recurrence reduces to the
    // hyperplane's own coefficient jump over the unit's whole-tail increment.
    double worst_share = -1.0;
    for (int a = 0; a < n; ++a) {
        for (size_t g = 0; g < per_axis; ++g) {
            const double knot = s.grid[a][g];
            const double alpha = s.axis_alphas[a][g];
            const double x_next = g + 1 < per_axis ? s.grid[a][g + 1] : 1.0;
            const LocalPick pick = pick_local_unit(kind, knot, alpha, budget, m, x_next);

            const double beta = pick.c_tail;
            if (std::fabs(beta) < 1e-8) {
                throw std::runtime_error("fitted increment vanished at a grid hyperplane");
            }
            NetUnit unit;
            unit.kind = kind;
            unit.w.assign(n, 0.0);
            unit.w[a] = pick.sharp.unit.w[0];
            unit.b = pick.sharp.unit.b;
            unit.lambda = alpha / beta;
            out.net.units.push_back(unit);

            KnotBuildInfo info;
            info.knot = knot;
            info.axis = a;
            info.rho = pick.sharp.rho;
            info.gamma = pick.sharp.gamma;
            info.c_k = pick.sharp.c_k;
            info.zero_part_l2 = pick.sharp.zero_part_l2;
            info.tail_misfit_l2 = pick.misfit;
            out.report.knots.push_back(info);
            const double share =
                std::fabs(unit.lambda) * std::hypot(pick.sharp.zero_part_l2, pick.misfit);
            if (share > worst_share) {
                worst_share = share;
                out.report.limiting_knot = knot;
            }
        }
    }

    if (std::fabs(lim) > 1e-6) {
        out.net = tanh_constant_compensation(out.net);
    }

    // dense-grid error
    {
        const int g = n == 2 ? 40 : 16;
        double acc = 0.0;
        int cnt = 0;
        std::vector<double> x(n, 0.0);
        std::vector<int> idx(n, 0);
        for (;;) {
            for (int a = 0; a < n; ++a) x[a] = static_cast<double>(idx[a]) / g;
            const double d = out.net.eval(x) - s.eval(x);
            acc += d * d;
            ++cnt;
            int a = 0;
            while (a < n && ++idx[a] > g) idx[a++] = 0;
            if (a == n) break;
        }
        out.report.dense_l2 = std::sqrt(acc / cnt);
    }
    out.report.tol_met = out.report.dense_l2 <= tol;
    return out;
}

} // namespace smoothnet
