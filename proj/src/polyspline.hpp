#ifndef SMOOTHNET_POLYSPLINE_HPP
#define SMOOTHNET_POLYSPLINE_HPP

#include <functional>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

namespace smoothnet {

// Thrown when adjacent pieces fail the C^{m-1} compatibility check.
struct SmoothnessError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Poly1D {
    std::vector<double> coeffs; // ascending degree

    int degree() const { return coeffs.empty() ? 0 : static_cast<int>(coeffs.size()) - 1; }
    double eval(double x) const;
    Poly1D derivative() const;

    // Coefficients of the same polynomial written in powers of (x - x0).
    std::vector<double> taylor_coeffs_at(double x0) const;
    // Inverse: expand sum shifted[k] (x - x0)^k into ordinary coefficients.
    static Poly1D from_shifted(const std::vector<double>& shifted, double x0);
};

Poly1D operator+(const Poly1D& a, const Poly1D& b);
Poly1D operator-(const Poly1D& a, const Poly1D& b);

struct KnotSet1D {
    std::vector<double> knots; // strictly increasing, inside (0,1)

    KnotSet1D() = default;
    explicit KnotSet1D(std::vector<double> k);

    int pieces() const { return static_cast<int>(knots.size()) + 1; }
    // 0-based interval index; I_1 = [0, x_1], later intervals (x_{j-1}, x_j].
    int interval_of(double x) const;
    std::pair<double, double> interval_bounds(int idx) const;
};

struct Spline1D {
    KnotSet1D knots;
    Poly1D first_piece;
    std::vector<double> alphas; // one per knot
    int m = 2;

    double eval(double x) const;
    // Dense expansion of piece idx (0-based) via the recurrence.
    Poly1D piece(int idx) const;
};

struct Hyperplane {
    std::vector<double> w;
    double b = 0.0;

    // Scales so max |w_i| = 1; throws on w = 0.
    static Hyperplane normalized(std::vector<double> w, double b);
};

struct PolyND {
    int n = 1;
    int m = 0;
    std::map<std::vector<int>, double> coeffs;

    double eval(const std::vector<double>& x) const;
    // Mixed partial d^alpha p at x, term-wise and exact.
    double partial_at(const std::vector<int>& alpha, const std::vector<double>& x) const;

    // coef * (x_axis - knot)^m as a dense polynomial.
    static PolyND truncated_power_expansion(int n, int axis, double knot, double coef, int m);
    // Expand coefficients given in powers of (x - center).
    static PolyND from_shifted(int n, int m, const std::vector<double>& center,
                               const std::map<std::vector<int>, double>& shifted);
};

PolyND operator+(const PolyND& a, const PolyND& b);
PolyND operator-(const PolyND& a, const PolyND& b);

// Restriction of p to the line x0 + t d, as a polynomial in t (exact).
Poly1D poly_on_line(const PolyND& p, const std::vector<double>& x0, const std::vector<double>& d);

struct StandardPartitionSpline {
    int n = 2;
    int m = 2;
    std::vector<std::vector<double>> grid; // per-axis interior knots
    PolyND base_piece;
    std::vector<std::vector<double>> axis_alphas;

    double eval(const std::vector<double>& x) const;
    std::vector<int> cell_of(const std::vector<double>& x) const;
    PolyND cell_piece(const std::vector<int>& cell) const;
};

// Spline from a piecewise-linear approximation of f^{(m-1)}: per interval the
// degree-m Taylor polynomial of f at the interval midpoint, stored in
// recurrence form; the anchor pins the first piece's value (default (0, f(0))).
Spline1D construct_spline_from_derivative(const std::function<double(double)>& f, int m,
                                          const KnotSet1D& knots);
Spline1D construct_spline_from_derivative(const std::function<double(double)>& f, int m,
                                          const KnotSet1D& knots,
                                          std::pair<double, double> anchor);

double eval_spline(const Spline1D& s, double x);
double eval_spline(const StandardPartitionSpline& s, const std::vector<double>& x);

// k-th derivative of t -> f(x + t d) at t = 0. Non-unit d is normalized (with
// a stderr note).
double directional_derivative_surface(const std::function<double(const std::vector<double>&)>& f,
                                      std::vector<double> d, int k, const std::vector<double>& x);

// Mixed partial of a black-box field by nested central differences.
double field_mixed_partial(const std::function<double(const std::vector<double>&)>& f,
                           const std::vector<int>& alpha, const std::vector<double>& x);

// Axis-wise standard-partition construction; the optional direction argument
// is accepted for interface compatibility and only validated (construction
// proceeds along the axes).
StandardPartitionSpline construct_spline_nd(
    const std::function<double(const std::vector<double>&)>& f, int m,
    const std::vector<std::vector<double>>& grid, const std::vector<double>& d = {});

// Truncated-power coefficient linking two adjacent pieces; verifies that all
// lower-order jumps vanish (SmoothnessError otherwise).
double recurrence_jump(const Poly1D& left, const Poly1D& right, double knot, int m,
                       double tol = 1e-6);
double recurrence_jump_nd(const PolyND& left, const PolyND& right, const Hyperplane& l, int m,
                          const std::vector<double>& probe_dir, double tol = 1e-6);

} // namespace smoothnet

#endif
