#include "polyspline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "numeric.hpp"

namespace smoothnet {

namespace {

// Derivative sampling step for black-box functions. Large enough that the
// roundoff floor stays below 1e-9 at order 3, small enough that the O(h^4)
// truncation of the extrapolated stencil is negligible against spline model
// error.
constexpr double kFieldStep = 0.02;

double sample_derivative(const std::function<double(double)>& f, int order, double x) {
    if (order == 0) return f(x);
    return central_diff_rich(f, x, order, kFieldStep * std::max(1.0, std::fabs(x)));
}

} // namespace

double Poly1D::eval(double x) const {
    double acc = 0.0;
    for (size_t i = coeffs.size(); i-- > 0;) acc = acc * x + coeffs[i];
    return acc;
}

Poly1D Poly1D::derivative() const {
    if (coeffs.size() <= 1) return Poly1D{{0.0}};
    Poly1D d;
    d.coeffs.resize(coeffs.size() - 1);
    for (size_t i = 1; i < coeffs.size(); ++i) d.coeffs[i - 1] = coeffs[i] * static_cast<double>(i);
    return d;
}

std::vector<double> Poly1D::taylor_coeffs_at(double x0) const {
    std::vector<double> out;
    Poly1D cur = *this;
    double fact = 1.0;
    for (size_t k = 0; k < coeffs.size(); ++k) {
        if (k > 0) fact *= static_cast<double>(k);
        out.push_back(cur.eval(x0) / fact);
        cur = cur.derivative();
    }
    return out;
}

Poly1D Poly1D::from_shifted(const std::vector<double>& shifted, double x0) {
    Poly1D p;
    p.coeffs.assign(shifted.size(), 0.0);
    for (size_t k = 0; k < shifted.size(); ++k) {
        // shifted[k] (x - x0)^k
        for (size_t j = 0; j <= k; ++j) {
            p.coeffs[j] += shifted[k] * binomial(static_cast<int>(k), static_cast<int>(j)) *
                           std::pow(-x0, static_cast<double>(k - j));
        }
    }
    return p;
}

Poly1D operator+(const Poly1D& a, const Poly1D& b) {
    Poly1D r;
    r.coeffs.assign(std::max(a.coeffs.size(), b.coeffs.size()), 0.0);
    for (size_t i = 0; i < a.coeffs.size(); ++i) r.coeffs[i] += a.coeffs[i];
    for (size_t i = 0; i < b.coeffs.size(); ++i) r.coeffs[i] += b.coeffs[i];
    return r;
}

Poly1D operator-(const Poly1D& a, const Poly1D& b) {
    Poly1D neg = b;
    for (double& c : neg.coeffs) c = -c;
    return a + neg;
}

KnotSet1D::KnotSet1D(std::vector<double> k) : knots(std::move(k)) {
    double prev = 0.0;
    for (double t : knots) {
        if (!(t > prev) || !(t < 1.0)) {
            throw std::invalid_argument("knots must be strictly increasing inside (0,1)");
        }
        prev = t;
    }
}

int KnotSet1D::interval_of(double x) const {
    const auto it = std::lower_bound(knots.begin(), knots.end(), x);
    return static_cast<int>(it - knots.begin());
}

std::pair<double, double> KnotSet1D::interval_bounds(int idx) const {
    if (idx < 0 || idx >= pieces()) throw std::invalid_argument("interval index out of range");
    const double a = (idx == 0) ? 0.0 : knots[idx - 1];
    const double b = (idx == pieces() - 1) ? 1.0 : knots[idx];
    return {a, b};
}

double Spline1D::eval(double x) const {
    if (x < -1e-12 || x > 1.0 + 1e-12) throw std::domain_error("spline evaluated outside [0,1]");
    double acc = first_piece.eval(x);
    for (size_t v = 0; v < alphas.size(); ++v) {
        const double t = x - knots.knots[v];
        if (t > 0.0) acc += alphas[v] * std::pow(t, m);
    }
    return acc;
}

Poly1D Spline1D::piece(int idx) const {
    if (idx < 0 || idx >= knots.pieces()) throw std::invalid_argument("piece index out of range");
    Poly1D p = first_piece;
    for (int v = 0; v < idx; ++v) {
        std::vector<double> shifted(m + 1, 0.0);
        shifted[m] = alphas[v];
        p = p + Poly1D::from_shifted(shifted, knots.knots[v]);
    }
    return p;
}

Hyperplane Hyperplane::normalized(std::vector<double> w, double b) {
    double mx = 0.0;
    for (double c : w) mx = std::max(mx, std::fabs(c));
    if (mx == 0.0) throw std::invalid_argument("hyperplane normal must be nonzero");
    for (double& c : w) c /= mx;
    return Hyperplane{std::move(w), b / mx};
}

double PolyND::eval(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != n) throw std::invalid_argument("point dimension mismatch");
    double acc = 0.0;
    for (const auto& [alpha, c] : coeffs) {
        double term = c;
        for (int j = 0; j < n; ++j) term *= std::pow(x[j], alpha[j]);
        acc += term;
    }
    return acc;
}

double PolyND::partial_at(const std::vector<int>& alpha, const std::vector<double>& x) const {
    if (static_cast<int>(alpha.size()) != n || static_cast<int>(x.size()) != n) {
        throw std::invalid_argument("multi-index or point dimension mismatch");
    }
    double acc = 0.0;
    for (const auto& [expo, c] : coeffs) {
        double term = c;
        bool alive = true;
        for (int j = 0; j < n; ++j) {
            if (alpha[j] > expo[j]) {
                alive = false;
                break;
            }
            for (int r = 0; r < alpha[j]; ++r) term *= expo[j] - r;
            term *= std::pow(x[j], expo[j] - alpha[j]);
        }
        if (alive) acc += term;
    }
    return acc;
}

PolyND PolyND::truncated_power_expansion(int n, int axis, double knot, double coef, int m) {
    PolyND p;
    p.n = n;
    p.m = m;
    for (int k = 0; k <= m; ++k) {
        std::vector<int> alpha(n, 0);
        alpha[axis] = k;
        p.coeffs[alpha] = coef * binomial(m, k) * std::pow(-knot, m - k);
    }
    return p;
}

PolyND PolyND::from_shifted(int n, int m, const std::vector<double>& center,
                            const std::map<std::vector<int>, double>& shifted) {
    PolyND out;
    out.n = n;
    out.m = m;
    for (const auto& [alpha, c] : shifted) {
        // expand c * prod_j (x_j - center_j)^{alpha_j}
        std::map<std::vector<int>, double> acc{{std::vector<int>(n, 0), c}};
        for (int j = 0; j < n; ++j) {
            std::map<std::vector<int>, double> next;
            for (const auto& [idx, v] : acc) {
                for (int k = 0; k <= alpha[j]; ++k) {
                    std::vector<int> id2 = idx;
                    id2[j] += k;
                    next[id2] += v * binomial(alpha[j], k) *
                                 std::pow(-center[j], static_cast<double>(alpha[j] - k));
                }
            }
            acc.swap(next);
        }
        for (const auto& [idx, v] : acc) out.coeffs[idx] += v;
    }
    return out;
}

PolyND operator+(const PolyND& a, const PolyND& b) {
    if (a.n != b.n) throw std::invalid_argument("polynomial dimension mismatch");
    PolyND r = a;
    r.m = std::max(a.m, b.m);
    for (const auto& [alpha, c] : b.coeffs) r.coeffs[alpha] += c;
    return r;
}

PolyND operator-(const PolyND& a, const PolyND& b) {
    PolyND neg = b;
    for (auto& [alpha, c] : neg.coeffs) c = -c;
    return a + neg;
}

Poly1D poly_on_line(const PolyND& p, const std::vector<double>& x0, const std::vector<double>& d) {
    Poly1D result{{0.0}};
    for (const auto& [alpha, c] : p.coeffs) {
        Poly1D term{{c}};
        for (int j = 0; j < p.n; ++j) {
            // (x0_j + d_j t)^{alpha_j}
            Poly1D factor{{1.0}};
            for (int rep = 0; rep < alpha[j]; ++rep) {
                Poly1D lin{{x0[j], d[j]}};
                Poly1D prod;
                prod.coeffs.assign(factor.coeffs.size() + 1, 0.0);
                for (size_t i = 0; i < factor.coeffs.size(); ++i) {
                    prod.coeffs[i] += factor.coeffs[i] * lin.coeffs[0];
                    prod.coeffs[i + 1] += factor.coeffs[i] * lin.coeffs[1];
                }
                factor = prod;
            }
            Poly1D prod;
            prod.coeffs.assign(term.coeffs.size() + factor.coeffs.size() - 1, 0.0);
            for (size_t i = 0; i < term.coeffs.size(); ++i)
                for (size_t j2 = 0; j2 < factor.coeffs.size(); ++j2)
                    prod.coeffs[i + j2] += term.coeffs[i] * factor.coeffs[j2];
            term = prod;
        }
        result = result + term;
    }
    return result;
}

double StandardPartitionSpline::eval(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != n) throw std::invalid_argument("point dimension mismatch");
    for (double c : x) {
        if (c < -1e-12 || c > 1.0 + 1e-12) throw std::domain_error("point outside the unit cube");
    }
    double acc = base_piece.eval(x);
    for (int a = 0; a < n; ++a) {
        for (size_t j = 0; j < axis_alphas[a].size(); ++j) {
            const double t = x[a] - grid[a][j];
            if (t > 0.0) acc += axis_alphas[a][j] * std::pow(t, m);
        }
    }
    return acc;
}

std::vector<int> StandardPartitionSpline::cell_of(const std::vector<double>& x) const {
    std::vector<int> cell(n);
    for (int a = 0; a < n; ++a) {
        const auto it = std::lower_bound(grid[a].begin(), grid[a].end(), x[a]);
        cell[a] = static_cast<int>(it - grid[a].begin());
    }
    return cell;
}

PolyND StandardPartitionSpline::cell_piece(const std::vector<int>& cell) const {
    PolyND p = base_piece;
    for (int a = 0; a < n; ++a) {
        for (int j = 0; j < cell[a]; ++j) {
            p = p + PolyND::truncated_power_expansion(n, a, grid[a][j], axis_alphas[a][j], m);
        }
    }
    return p;
}

Spline1D construct_spline_from_derivative(const std::function<double(double)>& f, int m,
                                          const KnotSet1D& knots) {
    return construct_spline_from_derivative(f, m, knots, {0.0, f(0.0)});
}

Spline1D construct_spline_from_derivative(const std::function<double(double)>& f, int m,
                                          const KnotSet1D& knots,
                                          std::pair<double, double> anchor) {
    if (m < 1) throw std::invalid_argument("spline degree must be >= 1");

    Spline1D s;
    s.m = m;
    s.knots = knots;

    const auto [a0, b0] = knots.interval_bounds(0);
    const double mid0 = 0.5 * (a0 + b0);
    std::vector<double> shifted(m + 1);
    double fact = 1.0;
    for (int k = 0; k <= m; ++k) {
        if (k > 0) fact *= k;
        shifted[k] = sample_derivative(f, k, mid0) / fact;
    }
    s.first_piece = Poly1D::from_shifted(shifted, mid0);
    // pin the anchor value on the first piece
    s.first_piece.coeffs[0] += anchor.second - s.first_piece.eval(anchor.first);

    const double mfact = factorial(m);
    double prev_slope = sample_derivative(f, m, mid0);
    for (int v = 1; v < knots.pieces(); ++v) {
        const auto [a, b] = knots.interval_bounds(v);
        const double slope = sample_derivative(f, m, 0.5 * (a + b));
        s.alphas.push_back((slope - prev_slope) / mfact);
        prev_slope = slope;
    }
    return s;
}

double eval_spline(const Spline1D& s, double x) { return s.eval(x); }

double eval_spline(const StandardPartitionSpline& s, const std::vector<double>& x) {
    return s.eval(x);
}

double directional_derivative_surface(const std::function<double(const std::vector<double>&)>& f,
                                      std::vector<double> d, int k, const std::vector<double>& x) {
    double norm = 0.0;
    for (double c : d) norm += c * c;
    norm = std::sqrt(norm);
    if (norm == 0.0) throw std::invalid_argument("direction must be nonzero");
    if (std::fabs(norm - 1.0) > 1e-9) {
        std::fprintf(stderr, "note: normalizing non-unit direction (|d| = %.6f)\n", norm);
        for (double& c : d) c /= norm;
    }
    auto g = [&](double t) {
        std::vector<double> p = x;
        for (size_t j = 0; j < p.size(); ++j) p[j] += t * d[j];
        return f(p);
    };
    if (k == 0) return g(0.0);
    return central_diff_rich(g, 0.0, k, kFieldStep);
}

double field_mixed_partial(const std::function<double(const std::vector<double>&)>& f,
                           const std::vector<int>& alpha, const std::vector<double>& x) {
    if (alpha.size() != x.size()) throw std::invalid_argument("multi-index dimension mismatch");
    int axis = -1;
    for (size_t j = 0; j < alpha.size(); ++j) {
        if (alpha[j] < 0) throw std::invalid_argument("multi-index entries must be >= 0");
        if (alpha[j] > 0 && axis < 0) axis = static_cast<int>(j);
    }
    if (axis < 0) return f(x);

    std::vector<int> rest = alpha;
    rest[axis] = 0;
    auto g = [&](double t) {
        std::vector<double> p = x;
        p[axis] = t;
        return field_mixed_partial(f, rest, p);
    };
    return central_diff_rich(g, x[axis], alpha[axis],
                             kFieldStep * std::max(1.0, std::fabs(x[axis])));
}

StandardPartitionSpline construct_spline_nd(
    const std::function<double(const std::vector<double>&)>& f, int m,
    const std::vector<std::vector<double>>& grid, const std::vector<double>& d) {
    const int n = static_cast<int>(grid.size());
    if (n < 1 || n > 3) throw std::invalid_argument("supported dimensions are 1..3");
    if (m < 1) throw std::invalid_argument("spline degree must be >= 1");
    if (!d.empty() && static_cast<int>(d.size()) != n) {
        throw std::invalid_argument("direction dimension mismatch");
    }

    std::vector<KnotSet1D> axes;
    axes.reserve(n);
    for (const auto& g : grid) axes.emplace_back(g); // validates each axis

    StandardPartitionSpline s;
    s.n = n;
    s.m = m;
    s.grid = grid;

    // center of the first cell
    std::vector<double> c0(n);
    for (int a = 0; a < n; ++a) {
        const auto [lo, hi] = axes[a].interval_bounds(0);
        c0[a] = 0.5 * (lo + hi);
    }

    // degree-m Taylor polynomial of f at the first-cell center
    std::map<std::vector<int>, double> shifted;
    std::vector<int> alpha(n, 0);
    const std::function<void(int, int)> enumerate = [&](int axis, int left) {
        if (axis == n) {
            double fact = 1.0;
            for (int j = 0; j < n; ++j) fact *= factorial(alpha[j]);
            shifted[alpha] = field_mixed_partial(f, alpha, c0) / fact;
            return;
        }
        for (int k = 0; k <= left; ++k) {
            alpha[axis] = k;
            enumerate(axis + 1, left - k);
        }
        alpha[axis] = 0;
    };
    enumerate(0, m);
    s.base_piece = PolyND::from_shifted(n, m, c0, shifted);

    // per-axis recurrence coefficients from jumps of the m-th axis derivative
    // along the line through the first-cell center
    const double mfact = factorial(m);
    s.axis_alphas.assign(n, {});
    for (int a = 0; a < n; ++a) {
        std::vector<int> da(n, 0);
        da[a] = m;
        auto slope_at = [&](double t) {
            std::vector<double> p = c0;
            p[a] = t;
            return field_mixed_partial(f, da, p);
        };
        const auto [lo0, hi0] = axes[a].interval_bounds(0);
        double prev = slope_at(0.5 * (lo0 + hi0));
        for (int v = 1; v < axes[a].pieces(); ++v) {
            const auto [lo, hi] = axes[a].interval_bounds(v);
            const double cur = slope_at(0.5 * (lo + hi));
            s.axis_alphas[a].push_back((cur - prev) / mfact);
            prev = cur;
        }
    }
    return s;
}

double recurrence_jump(const Poly1D& left, const Poly1D& right, double knot, int m, double tol) {
    const Poly1D diff = right - left;
    auto about = diff.taylor_coeffs_at(knot);
    about.resize(std::max<size_t>(about.size(), m + 1), 0.0);
    double scale = 1.0;
    for (double c : about) scale = std::max(scale, std::fabs(c));
    for (int k = 0; k < m; ++k) {
        if (std::fabs(about[k]) > tol * scale) {
            throw SmoothnessError("derivative jump of order " + std::to_string(k) +
                                  " exceeds tolerance at knot " + std::to_string(knot));
        }
    }
    for (size_t k = m + 1; k < about.size(); ++k) {
        if (std::fabs(about[k]) > tol * scale) {
            throw SmoothnessError("piece difference has degree above the spline order");
        }
    }
    return about[m];
}

double recurrence_jump_nd(const PolyND& left, const PolyND& right, const Hyperplane& l, int m,
                          const std::vector<double>& probe_dir, double tol) {
    if (static_cast<int>(probe_dir.size()) != left.n) {
        throw std::invalid_argument("probe direction dimension mismatch");
    }
    double wd = 0.0;
    double wn = 0.0;
    for (size_t j = 0; j < l.w.size(); ++j) {
        wd += l.w[j] * probe_dir[j];
        wn += l.w[j] * l.w[j];
    }
    if (std::fabs(wd) < 1e-12) {
        throw std::invalid_argument("probe direction is parallel to the hyperplane");
    }

    // any point on the hyperplane works; take the closest one to the origin
    std::vector<double> x0(l.w.size());
    for (size_t j = 0; j < l.w.size(); ++j) x0[j] = -l.b * l.w[j] / wn;

    const Poly1D q = poly_on_line(right - left, x0, probe_dir);
    auto c = q.coeffs;
    c.resize(std::max<size_t>(c.size(), m + 1), 0.0);
    double scale = 1.0;
    for (double v : c) scale = std::max(scale, std::fabs(v));
    for (int k = 0; k < m; ++k) {
        if (std::fabs(c[k]) > tol * scale) {
            throw SmoothnessError("directional jump of order " + std::to_string(k) +
                                  " exceeds tolerance across the hyperplane");
        }
    }
    for (size_t k = m + 1; k < c.size(); ++k) {
        if (std::fabs(c[k]) > tol * scale) {
            throw SmoothnessError("piece difference has degree above the spline order");
        }
    }
    return c[m] / std::pow(wd, m);
}

} // namespace smoothnet
