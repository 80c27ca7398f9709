#ifndef SMOOTHNET_NUMERIC_HPP
#define SMOOTHNET_NUMERIC_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

namespace smoothnet {

// Logistic function, stable on both tails.
inline double logistic(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

inline double factorial(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

inline double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
    return r;
}

// Step size for an order-k central difference of a function evaluated in
// double precision: h ~ eps^(1/(k+2)) balances truncation against roundoff.
inline double fd_step(int order, double x) {
    const double eps = std::numeric_limits<double>::epsilon();
    return std::pow(eps, 1.0 / (order + 2)) * std::max(1.0, std::fabs(x));
}

// Order-k central difference. Exact stencil: sum_j (-1)^j C(k,j) f(x+(k/2-j)h) / h^k.
inline double central_diff(const std::function<double(double)>& f, double x, int order, double h) {
    if (order == 0) return f(x);
    double acc = 0.0;
    for (int j = 0; j <= order; ++j) {
        const double c = binomial(order, j);
        const double xi = x + (order / 2.0 - j) * h;
        acc += ((j % 2 == 0) ? c : -c) * f(xi);
    }
    return acc / std::pow(h, order);
}

// Richardson-extrapolated central difference: two O(h^2) stencils combined to
// O(h^4), which is what it takes to see 1e-6 absolute at orders 3 and 4 in
// double precision.
inline double central_diff_rich(const std::function<double(double)>& f, double x, int order,
                                double h) {
    const double d1 = central_diff(f, x, order, h);
    const double d2 = central_diff(f, x, order, h / 2.0);
    return (4.0 * d2 - d1) / 3.0;
}

inline double central_diff_rich(const std::function<double(double)>& f, double x, int order) {
    const double eps = std::numeric_limits<double>::epsilon();
    const double h = std::pow(eps, 1.0 / (order + 4)) * std::max(1.0, std::fabs(x));
    return central_diff_rich(f, x, order, h);
}

inline double central_diff(const std::function<double(double)>& f, double x, int order) {
    return central_diff(f, x, order, fd_step(order, x));
}

// Long-double variants for derivative oracles: at order 4 the double-precision
// roundoff floor of any finite-difference scheme sits right at the 1e-6
// tolerance the oracles promise, so the stencils run in extended precision.
inline long double central_diff_l(const std::function<long double(long double)>& f, long double x,
                                  int order, long double h) {
    if (order == 0) return f(x);
    long double acc = 0.0L;
    for (int j = 0; j <= order; ++j) {
        const long double c = binomial(order, j);
        const long double xi = x + (order / 2.0L - j) * h;
        acc += ((j % 2 == 0) ? c : -c) * f(xi);
    }
    return acc / std::pow(h, static_cast<long double>(order));
}

inline long double central_diff_rich_l(const std::function<long double(long double)>& f,
                                       long double x, int order) {
    const long double eps = std::numeric_limits<long double>::epsilon();
    const long double h = std::pow(eps, 1.0L / (order + 4)) * std::max(1.0L, std::fabs(x));
    const long double d1 = central_diff_l(f, x, order, h);
    const long double d2 = central_diff_l(f, x, order, h / 2.0L);
    return (4.0L * d2 - d1) / 3.0L;
}

// Composite Simpson rule; n is the number of subintervals (rounded up to even).
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 200) {
    if (n < 2) n = 2;
    if (n % 2 != 0) ++n;
    const double h = (b - a) / n;
    double acc = f(a) + f(b);
    for (int i = 1; i < n; ++i) {
        acc += f(a + i * h) * ((i % 2 == 1) ? 4.0 : 2.0);
    }
    return acc * h / 3.0;
}

inline double l2_norm_on(const std::function<double(double)>& f, double a, double b, int n = 400) {
    if (b <= a) return 0.0;
    const double v = simpson([&](double x) { double y = f(x); return y * y; }, a, b, n);
    return std::sqrt(std::max(0.0, v));
}

// Chebyshev points of the first kind mapped to [a, b].
inline std::vector<double> chebyshev_points(double a, double b, int count) {
    std::vector<double> pts(count);
    for (int i = 0; i < count; ++i) {
        const double t = std::cos(M_PI * (2.0 * i + 1.0) / (2.0 * count));
        pts[i] = 0.5 * (a + b) + 0.5 * (b - a) * t;
    }
    return pts;
}

// Uniform deviate in (-1, 1) from raw 64-bit engine output; 53 mantissa bits.
template <typename Engine>
double uniform_sym(Engine& eng) {
    const std::uint64_t raw = static_cast<std::uint64_t>(eng());
    const double u = static_cast<double>(raw >> 11) * 0x1.0p-53; // [0, 1)
    return 2.0 * u - 1.0;
}

} // namespace smoothnet

#endif
