#pragma once

// Problem data for the quasilinear radial models on the unit ball:
//
//   E1  phi(r,v) = r^alpha |v|^beta v                    (power monomial)
//   E2  phi(r,v) = sum_i r^{alpha_i} |v|^{beta_i} v      (monomial sum)
//   E3  phi(r,v) = r^{N-1} |v|^{p(r)-2} v                (variable exponent)
//   E4  phi(r,v) = rho sin(r/rho)^{N-1} v                (sphere cap)
//
// plus the gap nonlinearity g (electrostatic force denominator, canonical
// form (1-u)^p) and the source profile f with cumulative F(r) = int_0^r f.
// For fixed r in (0,1], phi(r,.) is odd and strictly increasing with
// phi(r,0) = 0; phi_inverse(r,.) is its partial inverse on [0,inf).
//
// validate_hypotheses checks the standing assumptions by sampling:
//   H1: g strictly decreasing, g(1) = 0, g(0) > 0
//   H3: phi monotone, majorant phi(r,v) <= a_sup * P(v),
//       int_0^1 phi^{-1}(s, F(s)) ds finite (value + refinement trend)
//   H4: F(1) < inf, F > 0 on (0,1]
//   A2: g'(u) / g(u)^q -> -A as u -> 1-
//   A3: beta > -1, alpha > beta + 1, gamma >= alpha   (power monomial only)
//   A4: h(r) -> C as r -> 0+

#include <mems/errors.hpp>
#include <mems/quadrature.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace mems {

inline constexpr double tol_inv = 1e-12; // inversion tolerance for phi^{-1}

// ---------------------------------------------------------------- operators

struct power_monomial {
    double alpha = 0.0;
    double beta = 0.0;
};

struct monomial_sum {
    std::vector<std::pair<double, double>> terms; // (alpha_i, beta_i)
};

struct variable_exponent {
    double N = 2.0;
    std::function<double(double)> p; // p(r) in [1+eps, N)
    double eps = 0.1;
};

struct sphere_cap {
    int N = 2;
    double rho = 1.0;
};

using phi_operator = std::variant<power_monomial, monomial_sum, variable_exponent, sphere_cap>;

inline double phi_eval(const phi_operator& op, double r, double v) {
    if (!(r > 0.0)) throw std::domain_error("phi_eval: r must be positive");
    if (v == 0.0) return 0.0;
    const double sign = v > 0.0 ? 1.0 : -1.0;
    const double av = std::fabs(v);
    double out = std::visit(
        [&](const auto& o) -> double {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, power_monomial>) {
                return sign * std::pow(r, o.alpha) * std::pow(av, o.beta + 1.0);
            } else if constexpr (std::is_same_v<T, monomial_sum>) {
                if (o.terms.empty()) throw std::invalid_argument("phi_eval: empty monomial sum");
                double s = 0.0;
                for (const auto& [a, b] : o.terms) s += std::pow(r, a) * std::pow(av, b + 1.0);
                return sign * s;
            } else if constexpr (std::is_same_v<T, variable_exponent>) {
                return sign * std::pow(r, o.N - 1.0) * std::pow(av, o.p(r) - 1.0);
            } else {
                return o.rho * std::pow(std::sin(r / o.rho), o.N - 1) * v;
            }
        },
        op);
    if (!std::isfinite(out)) throw evaluation_overflow("phi_eval: non-finite result");
    return out;
}

inline double phi_inverse(const phi_operator& op, double r, double w) {
    if (!(r > 0.0)) throw std::domain_error("phi_inverse: r must be positive");
    if (w < 0.0) throw std::domain_error("phi_inverse: w must be nonnegative");
    if (w == 0.0) return 0.0;
    return std::visit(
        [&](const auto& o) -> double {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, power_monomial>) {
                return std::pow(w * std::pow(r, -o.alpha), 1.0 / (o.beta + 1.0));
            } else if constexpr (std::is_same_v<T, variable_exponent>) {
                return std::pow(w * std::pow(r, -(o.N - 1.0)), 1.0 / (o.p(r) - 1.0));
            } else if constexpr (std::is_same_v<T, sphere_cap>) {
                return w / (o.rho * std::pow(std::sin(r / o.rho), o.N - 1));
            } else {
                // monotone bracketing + bisection
                double hi = 1.0;
                int doublings = 0;
                while (phi_eval(op, r, hi) < w) {
                    hi *= 2.0;
                    if (++doublings > 1024) throw root_find_failure("phi_inverse: bracket not found");
                }
                double lo = 0.0;
                for (int it = 0; it < 500 && hi - lo > 0.1 * tol_inv * std::max(hi, tol_inv); ++it) {
                    const double mid = 0.5 * (lo + hi);
                    (phi_eval(op, r, mid) < w ? lo : hi) = mid;
                }
                return 0.5 * (lo + hi);
            }
        },
        op);
}

// --------------------------------------------------------------------- gap

struct mems_power {
    double p = 2.0; // g(u) = (1-u)^p
};

struct custom_gap {
    std::function<double(double)> g;
    std::function<double(double)> dg;
    double A = 1.0;
    double q = 0.5;
};

class gap_function {
public:
    gap_function(mems_power m) : var_(m) {}
    gap_function(custom_gap c) : var_(std::move(c)) {}

    double g(double u) const {
        if (const auto* m = std::get_if<mems_power>(&var_))
            return u >= 1.0 ? 0.0 : std::pow(1.0 - u, m->p);
        return std::get<custom_gap>(var_).g(u);
    }

    double dg(double u) const {
        if (const auto* m = std::get_if<mems_power>(&var_))
            return u >= 1.0 ? 0.0 : -m->p * std::pow(1.0 - u, m->p - 1.0);
        return std::get<custom_gap>(var_).dg(u);
    }

    // inverse of g on [0,1]: closed form for the power gap, bisection otherwise
    double ginv(double w) const {
        if (w < 0.0) throw std::domain_error("ginv: w must be nonnegative");
        if (const auto* m = std::get_if<mems_power>(&var_)) return 1.0 - std::pow(w, 1.0 / m->p);
        if (w > g(0.0)) throw std::domain_error("ginv: w exceeds g(0)");
        double lo = 0.0, hi = 1.0; // g(lo) >= w >= g(hi)
        for (int it = 0; it < 60 && hi - lo > 1e-13; ++it) {
            const double mid = 0.5 * (lo + hi);
            (g(mid) >= w ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }

    double A() const {
        if (const auto* m = std::get_if<mems_power>(&var_)) return m->p;
        return std::get<custom_gap>(var_).A;
    }

    double q() const {
        if (const auto* m = std::get_if<mems_power>(&var_)) return (m->p - 1.0) / m->p;
        return std::get<custom_gap>(var_).q;
    }

    bool is_mems_power() const { return std::holds_alternative<mems_power>(var_); }
    double mems_p() const { return std::get<mems_power>(var_).p; }

private:
    std::variant<mems_power, custom_gap> var_;
};

// ------------------------------------------------------------------ source

struct weighted_power {
    double gamma = 0.0;
    std::function<double(double)> h; // empty handle means h == C identically
    double C = 1.0;
};

struct direct_source {
    std::function<double(double)> f;
};

class source_profile {
public:
    source_profile(weighted_power w) : var_(std::move(w)) {}
    source_profile(direct_source d) : var_(std::move(d)) {}

    double f(double s) const {
        if (const auto* w = std::get_if<weighted_power>(&var_))
            return std::pow(s, w->gamma) * (w->h ? w->h(s) : w->C);
        return std::get<direct_source>(var_).f(s);
    }

    // F(r) = int_0^r f(s) ds; closed form when h == C, else converged Simpson
    // quadrature under the softening substitution s = r * tau^2.
    double F(double r) const {
        if (r < 0.0 || r > 1.0) throw std::domain_error("F: r must lie in [0,1]");
        if (r == 0.0) return 0.0;
        if (const auto* w = std::get_if<weighted_power>(&var_)) {
            if (!w->h && w->gamma > -1.0)
                return w->C * std::pow(r, w->gamma + 1.0) / (w->gamma + 1.0);
        }
        auto integrand = [&](double tau) { return tau == 0.0 ? 0.0 : 2.0 * r * tau * f(r * tau * tau); };
        double prev = std::numeric_limits<double>::infinity();
        for (int n = 64; n <= (1 << 20); n *= 2) {
            double s = integrand(0.0) + integrand(1.0);
            for (int k = 1; k < n; ++k) s += (k % 2 ? 4.0 : 2.0) * integrand(double(k) / n);
            const double I = s / (3.0 * n);
            if (std::fabs(I - prev) <= 1e-12 * (1.0 + std::fabs(I))) return I;
            prev = I;
        }
        throw quadrature_failure("F: Simpson refinement did not converge", std::fabs(prev));
    }

    bool is_weighted() const { return std::holds_alternative<weighted_power>(var_); }
    bool has_const_h() const {
        const auto* w = std::get_if<weighted_power>(&var_);
        return w && !w->h;
    }
    double gamma() const { return std::get<weighted_power>(var_).gamma; }
    double C() const { return std::get<weighted_power>(var_).C; }
    double h(double r) const {
        const auto& w = std::get<weighted_power>(var_);
        return w.h ? w.h(r) : w.C;
    }

private:
    std::variant<weighted_power, direct_source> var_;
};

inline double source_cumulative(const source_profile& src, double r) { return src.F(r); }

// ---------------------------------------------------------------- majorant

// phi(r,v) <= a_sup * P(v) with P(v) = sum_i c_i v^{d_i}
struct majorant {
    std::vector<double> c;
    std::vector<double> d;
    double a_sup = 1.0;
    double dmax = 1.0;
    double emin = 1.0;

    double P(double v) const {
        double s = 0.0;
        for (std::size_t i = 0; i < c.size(); ++i) s += c[i] * std::pow(v, d[i]);
        return s;
    }
};

namespace detail {

// K Chebyshev-like sample points in (0,1], x_k = sin^2(pi k / (2K))
inline std::vector<double> cheb_points(int K) {
    std::vector<double> x(static_cast<std::size_t>(K));
    for (int k = 1; k <= K; ++k) {
        const double s = std::sin(std::numbers::pi * k / (2.0 * K));
        x[static_cast<std::size_t>(k - 1)] = s * s;
    }
    return x;
}

inline majorant finish_majorant(std::vector<double> c, std::vector<double> d,
                                const std::function<double(double)>& a) {
    majorant m;
    m.c = std::move(c);
    m.d = std::move(d);
    m.dmax = *std::max_element(m.d.begin(), m.d.end());
    m.emin = *std::min_element(m.d.begin(), m.d.end());
    m.a_sup = 0.0;
    for (double r : cheb_points(256)) m.a_sup = std::max(m.a_sup, a(r));
    return m;
}

} // namespace detail

inline majorant default_majorant(const phi_operator& op) {
    return std::visit(
        [&](const auto& o) -> majorant {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, power_monomial>) {
                return detail::finish_majorant({1.0}, {o.beta + 1.0},
                                               [&](double r) { return std::pow(r, o.alpha); });
            } else if constexpr (std::is_same_v<T, monomial_sum>) {
                if (o.terms.empty()) throw std::invalid_argument("default_majorant: empty monomial sum");
                double amin = o.terms.front().first;
                std::vector<double> c, d;
                for (const auto& [a, b] : o.terms) {
                    amin = std::min(amin, a);
                    c.push_back(1.0);
                    d.push_back(b + 1.0);
                }
                return detail::finish_majorant(std::move(c), std::move(d),
                                               [&](double r) { return std::pow(r, amin); });
            } else if constexpr (std::is_same_v<T, variable_exponent>) {
                double plo = o.p(1.0), phi_ = o.p(1.0);
                for (double r : detail::cheb_points(256)) {
                    plo = std::min(plo, o.p(r));
                    phi_ = std::max(phi_, o.p(r));
                }
                return detail::finish_majorant({1.0, 1.0}, {phi_ - 1.0, plo - 1.0},
                                               [&](double r) { return std::pow(r, o.N - 1.0); });
            } else {
                return detail::finish_majorant({1.0}, {1.0}, [&](double r) {
                    return o.rho * std::pow(std::sin(r / o.rho), o.N - 1);
                });
            }
        },
        op);
}

// -------------------------------------------------------------- validation

struct validation_check {
    std::string name;
    bool applicable = true;
    bool required_for_solve = true; // false marks the asymptotic (A) group
    bool pass = true;
    std::string detail;
};

struct validation_report {
    std::vector<validation_check> checks;
    double phi_inv_integral = 0.0;         // int_0^1 phi^{-1}(s, F(s)) ds
    double phi_inv_integral_refined = 0.0; // same at doubled resolution

    bool all_pass() const {
        for (const auto& c : checks)
            if (c.applicable && !c.pass) return false;
        return true;
    }
    bool solve_ok() const {
        for (const auto& c : checks)
            if (c.applicable && c.required_for_solve && !c.pass) return false;
        return true;
    }
};

namespace detail {

inline std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

} // namespace detail

inline validation_report validate_hypotheses(const phi_operator& op, const gap_function& gap,
                                             const source_profile& src) {
    validation_report rep;
    const std::vector<double> pts = detail::cheb_points(256);

    { // operator structural invariants
        validation_check c{"op.structure", true, true, true, ""};
        std::visit(
            [&](const auto& o) {
                using T = std::decay_t<decltype(o)>;
                if constexpr (std::is_same_v<T, power_monomial>) {
                    if (!(o.beta > -1.0)) { c.pass = false; c.detail = "beta <= -1"; }
                } else if constexpr (std::is_same_v<T, monomial_sum>) {
                    if (o.terms.empty()) { c.pass = false; c.detail = "empty term list"; }
                    for (const auto& t : o.terms)
                        if (!(t.second > -1.0)) { c.pass = false; c.detail = "beta_i <= -1"; }
                } else if constexpr (std::is_same_v<T, variable_exponent>) {
                    if (!(o.N > 1.0) || !(o.eps > 0.0 && o.eps < 1.0)) {
                        c.pass = false;
                        c.detail = "require N > 1 and eps in (0,1)";
                    } else {
                        for (double r : pts) {
                            const double p = o.p(r);
                            if (!(p >= 1.0 + o.eps) || !(p < o.N)) {
                                c.pass = false;
                                c.detail = "p(" + detail::num(r) + ") = " + detail::num(p) +
                                           " outside [1+eps, N)";
                                break;
                            }
                        }
                    }
                } else {
                    if (o.N < 2 || !(o.rho >= 1.0)) { c.pass = false; c.detail = "require N >= 2, rho >= 1"; }
                }
            },
            op);
        rep.checks.push_back(std::move(c));
    }

    { // H1: g strictly decreasing on [0,1], g(1) = 0, g(0) > 0
        validation_check c{"H1", true, true, true, ""};
        if (!(gap.g(0.0) > 0.0)) { c.pass = false; c.detail = "g(0) <= 0"; }
        if (std::fabs(gap.g(1.0)) > 1e-12) {
            c.pass = false;
            c.detail = "g(1) = " + detail::num(gap.g(1.0)) + " != 0";
        }
        double prev_u = 0.0, prev_g = gap.g(0.0);
        for (double u : pts) {
            const double gu = gap.g(u);
            if (gu >= prev_g + 1e-14 * (1.0 + std::fabs(prev_g))) {
                c.pass = false;
                c.detail = "g not strictly decreasing near u = " + detail::num(u);
                break;
            }
            prev_u = u;
            prev_g = gu;
        }
        (void)prev_u;
        rep.checks.push_back(std::move(c));
    }

    bool phi_ok = true;
    { // H3: phi strictly increasing in v with phi(r,0) = 0
        validation_check c{"H3.monotone", true, true, true, ""};
        try {
            for (int i = 0; i < 32 && c.pass; ++i) {
                const double r = pts[static_cast<std::size_t>(i) * 8 + 7];
                if (phi_eval(op, r, 0.0) != 0.0) { c.pass = false; c.detail = "phi(r,0) != 0"; break; }
                double prev = 0.0;
                for (int j = 1; j <= 64; ++j) {
                    const double v = 2.0 * j / 64.0;
                    const double f = phi_eval(op, r, v);
                    if (!(f > prev)) {
                        c.pass = false;
                        c.detail = "phi(r,.) not increasing at r = " + detail::num(r);
                        break;
                    }
                    prev = f;
                }
            }
        } catch (const std::exception& e) {
            c.pass = false;
            c.detail = e.what();
        }
        phi_ok = c.pass;
        rep.checks.push_back(std::move(c));
    }

    { // H3: majorant inequality phi(r,v) <= a_sup * P(v)
        validation_check c{"H3.majorant", true, true, true, ""};
        try {
            const majorant maj = default_majorant(op);
            for (int i = 0; i < 32 && c.pass; ++i) {
                const double r = pts[static_cast<std::size_t>(i) * 8 + 7];
                for (int j = 1; j <= 64; ++j) {
                    const double v = 2.0 * j / 64.0;
                    if (phi_eval(op, r, v) > maj.a_sup * maj.P(v) * (1.0 + 1e-12)) {
                        c.pass = false;
                        c.detail = "violated at (r,v) = (" + detail::num(r) + "," + detail::num(v) + ")";
                        break;
                    }
                }
            }
        } catch (const std::exception& e) {
            c.pass = false;
            c.detail = e.what();
        }
        rep.checks.push_back(std::move(c));
    }

    { // H4: F(1) finite, F > 0 on (0,1]
        validation_check c{"H4", true, true, true, ""};
        try {
            const double F1 = src.F(1.0);
            if (!std::isfinite(F1) || !(F1 > 0.0)) { c.pass = false; c.detail = "F(1) not finite positive"; }
            for (int k = 1; k <= 16 && c.pass; ++k) {
                const double r = pts[static_cast<std::size_t>(k) * 4];
                if (!(src.F(r) > 0.0)) {
                    c.pass = false;
                    c.detail = "F(" + detail::num(r) + ") <= 0";
                }
            }
        } catch (const std::exception& e) {
            c.pass = false;
            c.detail = e.what();
        }
        rep.checks.push_back(std::move(c));
    }

    { // H3: int_0^1 phi^{-1}(s, F(s)) ds finite: value plus refinement trend
        validation_check c{"H3.integral", true, true, true, ""};
        try {
            auto value = [&](int M) {
                const radial_grid g = graded_grid(M, 2.0);
                std::vector<double> f(g.r.size());
                for (std::size_t i = 0; i < f.size(); ++i)
                    f[i] = phi_inverse(op, g.r[i], src.F(g.r[i]));
                return cumulative_integral(g, f).back();
            };
            rep.phi_inv_integral = value(2048);
            rep.phi_inv_integral_refined = value(4096);
            const double change = std::fabs(rep.phi_inv_integral_refined - rep.phi_inv_integral) /
                                  (1.0 + std::fabs(rep.phi_inv_integral_refined));
            if (!std::isfinite(rep.phi_inv_integral_refined) || change > 0.05) {
                c.pass = false;
                c.detail = "refinement trend " + detail::num(change);
            } else {
                c.detail = "I = " + detail::num(rep.phi_inv_integral_refined) +
                           ", trend " + detail::num(change);
            }
        } catch (const std::exception& e) {
            c.pass = false;
            c.detail = e.what();
        }
        rep.checks.push_back(std::move(c));
    }

    { // A2: g'(u) / g(u)^q -> -A as u -> 1-
        validation_check c{"A2", true, false, true, ""};
        const double A = gap.A(), q = gap.q();
        if (!(A > 0.0) || !(q > 0.0 && q < 1.0)) {
            c.pass = false;
            c.detail = "require A > 0 and q in (0,1); got A = " + detail::num(A) +
                       ", q = " + detail::num(q);
        } else {
            const double u = 1.0 - 1e-8;
            const double ratio = gap.dg(u) / std::pow(gap.g(u), q);
            if (!(std::fabs(ratio + A) <= 0.01 * A)) {
                c.pass = false;
                c.detail = "g'/g^q at 1-1e-8 is " + detail::num(ratio) + ", expected " + detail::num(-A);
            }
        }
        rep.checks.push_back(std::move(c));
    }

    { // A3: beta > -1, alpha > beta+1, gamma >= alpha (power monomial + weighted source)
        const auto* pm = std::get_if<power_monomial>(&op);
        validation_check c{"A3", pm != nullptr && src.is_weighted(), false, true, ""};
        if (c.applicable) {
            if (!(pm->beta > -1.0)) { c.pass = false; c.detail = "beta <= -1"; }
            else if (!(pm->alpha > pm->beta + 1.0)) {
                c.pass = false;
                c.detail = "alpha = " + detail::num(pm->alpha) + " <= beta+1 = " + detail::num(pm->beta + 1.0);
            } else if (!(src.gamma() >= pm->alpha)) {
                c.pass = false;
                c.detail = "gamma < alpha";
            }
        }
        rep.checks.push_back(std::move(c));
    }

    { // A4: h(r)/C -> 1 as r -> 0+
        validation_check c{"A4", src.is_weighted(), false, true, ""};
        if (c.applicable) {
            const double C = src.C();
            if (!(C > 0.0)) { c.pass = false; c.detail = "C <= 0"; }
            else {
                const double ratio = src.h(1e-8) / C;
                if (!(std::fabs(ratio - 1.0) <= 0.05)) {
                    c.pass = false;
                    c.detail = "h(1e-8)/C = " + detail::num(ratio);
                }
                for (double r : pts)
                    if (!(src.h(r) > 0.0)) { c.pass = false; c.detail = "h not positive"; break; }
            }
        }
        rep.checks.push_back(std::move(c));
    }

    (void)phi_ok;
    return rep;
}

// ------------------------------------------------------------------- model

struct model {
    phi_operator op;
    gap_function gap;
    source_profile src;
};

} // namespace mems
