#pragma once

// Graded radial meshes on (0,1] and the composite-trapezoid cumulative/tail
// operators used by the nested integral equation.
//
//   nodes:  r_i = (i/M)^s           i = 1..M   (graded toward the origin)
//   guard:  r_0 = (1/(2M))^s        (the origin is an open endpoint)
//
// The left cell [0, r_0] is closed with the one-sided rectangle r_0 * f(r_0);
// all other cells use the trapezoid rule.  For the weakly singular integrands
// arising here the rectangle commits an O(r_0^(1+p)) error with p > 0, far
// below the mesh truncation error.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace mems {

struct radial_grid {
    std::vector<double> r; // r[0] is the guard node, r[M] = 1
    double grading = 2.0;
    int M = 0;
};

inline radial_grid graded_grid(int M, double grading = 2.0) {
    if (M < 16) throw std::invalid_argument("graded_grid: M must be >= 16");
    if (!(grading >= 1.0)) throw std::invalid_argument("graded_grid: grading must be >= 1");
    radial_grid g;
    g.M = M;
    g.grading = grading;
    g.r.resize(static_cast<std::size_t>(M) + 1);
    g.r[0] = std::pow(1.0 / (2.0 * M), grading);
    for (int i = 1; i <= M; ++i) g.r[i] = std::pow(static_cast<double>(i) / M, grading);
    return g;
}

namespace detail {

// Per-cell integrals: cell 0 is the [0, r_0] rectangle closure, cell i >= 1
// the trapezoid over [r_{i-1}, r_i].
inline std::vector<double> cell_integrals(const radial_grid& g, const std::vector<double>& f) {
    if (f.size() != g.r.size())
        throw std::invalid_argument("cell_integrals: value count does not match grid");
    std::vector<double> c(f.size());
    c[0] = g.r[0] * f[0];
    for (std::size_t i = 1; i < f.size(); ++i)
        c[i] = 0.5 * (g.r[i] - g.r[i - 1]) * (f[i] + f[i - 1]);
    return c;
}

} // namespace detail

// I[i] ~ int_0^{r_i} f(s) ds at every node; nondecreasing when f >= 0.
inline std::vector<double> cumulative_integral(const radial_grid& g, const std::vector<double>& f) {
    std::vector<double> c = detail::cell_integrals(g, f);
    for (std::size_t i = 1; i < c.size(); ++i) c[i] += c[i - 1];
    return c;
}

// T[i] ~ int_{r_i}^{1} f(t) dt at every node; T[M] = 0 exactly.
inline std::vector<double> tail_integrals(const radial_grid& g, const std::vector<double>& f) {
    std::vector<double> c = detail::cell_integrals(g, f);
    std::vector<double> t(c.size());
    t.back() = 0.0;
    for (std::size_t i = c.size() - 1; i-- > 0;) t[i] = t[i + 1] + c[i + 1];
    return t;
}

// int_r^1 f with r a grid node, or r = 0 for the full integral (guard cell
// included).
inline double tail_integral(const radial_grid& g, const std::vector<double>& f, double r) {
    std::vector<double> t = tail_integrals(g, f);
    if (r == 0.0) return t[0] + g.r[0] * f[0];
    for (std::size_t i = 0; i < g.r.size(); ++i)
        if (g.r[i] == r) return t[i];
    throw std::invalid_argument("tail_integral: r is not a grid node");
}

namespace detail {

// Shape-preserving cubic Hermite interpolation (Fritsch-Carlson slopes).
// Monotone data yields a monotone interpolant, which is what the touchdown
// profile reconstruction relies on.
class pchip {
public:
    pchip(std::vector<double> x, std::vector<double> y)
        : x_(std::move(x)), y_(std::move(y)) {
        const std::size_t n = x_.size();
        if (n < 2 || y_.size() != n)
            throw std::invalid_argument("pchip: need matching arrays of length >= 2");
        std::vector<double> h(n - 1), del(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            h[i] = x_[i + 1] - x_[i];
            if (!(h[i] > 0.0))
                throw std::invalid_argument("pchip: abscissae must be strictly increasing");
            del[i] = (y_[i + 1] - y_[i]) / h[i];
        }
        d_.assign(n, 0.0);
        if (n == 2) {
            d_[0] = d_[1] = del[0];
            return;
        }
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (del[i - 1] * del[i] <= 0.0) continue;
            const double w1 = 2.0 * h[i] + h[i - 1];
            const double w2 = h[i] + 2.0 * h[i - 1];
            d_[i] = (w1 + w2) / (w1 / del[i - 1] + w2 / del[i]);
        }
        d_[0] = end_slope(h[0], h[1], del[0], del[1]);
        d_[n - 1] = end_slope(h[n - 2], h[n - 3], del[n - 2], del[n - 3]);
    }

    double operator()(double t) const {
        std::size_t lo = 0, hi = x_.size() - 1;
        while (hi - lo > 1) {
            const std::size_t mid = (lo + hi) / 2;
            (x_[mid] <= t ? lo : hi) = mid;
        }
        const double h = x_[lo + 1] - x_[lo];
        const double s = t - x_[lo];
        const double del = (y_[lo + 1] - y_[lo]) / h;
        const double c2 = (3.0 * del - 2.0 * d_[lo] - d_[lo + 1]) / h;
        const double c3 = (d_[lo] - 2.0 * del + d_[lo + 1]) / (h * h);
        return y_[lo] + s * (d_[lo] + s * (c2 + s * c3));
    }

private:
    static double end_slope(double h1, double h2, double del1, double del2) {
        double d = ((2.0 * h1 + h2) * del1 - h1 * del2) / (h1 + h2);
        if (d * del1 <= 0.0) return 0.0;
        if (del1 * del2 <= 0.0 && std::fabs(d) > 3.0 * std::fabs(del1)) return 3.0 * del1;
        return d;
    }

    std::vector<double> x_, y_, d_;
};

} // namespace detail

} // namespace mems
