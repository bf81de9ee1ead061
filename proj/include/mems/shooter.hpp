// Touchdown construction for the power-monomial operator by backward shooting.
//
// Substituting r = c e^{-t} with c = lambda^{-1/theta} turns the radial problem
// into an autonomous-weight system for v(t) = u(c e^{-t}) and the flux variable
// w(t) = e^{(beta+1-alpha) t} v'(t)^{beta+1}:
//
//     w'(t) = -e^{-(gamma+1) t} h(t) / g(v(t))
//     v'(t) = e^{(alpha/(beta+1) - 1) t} w(t)^{1/(beta+1)}
//
// For large t the solution rides the singular profile g(v) ~ kappa e^{-theta sigma t},
// which supplies the seed
//
//     v(T) = g^{-1}(kappa e^{-theta sigma T}),  w(T) = e^{(beta+1-alpha) T} psi(T),
//
// with psi the tail integral below. Integrating backward to the zero crossing
// T* of v yields the pull-in data: lambda* = e^{-theta T*} and the touchdown
// profile u*(r) = v(T* - ln r).

#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "mems/asymptotics.hpp"
#include "mems/errors.hpp"
#include "mems/model.hpp"
#include "mems/quadrature.hpp"
#include "mems/solver.hpp"

namespace mems {

struct shooter_config {
    double T = 0.0;
    double dt = 1e-3;
    double t_floor = 0.0;
    double seed_tail_tol = 1e-10;

    // smallest T whose seed tail meets the tolerance, with a hair of slack
    static shooter_config automatic(const asymptotic_constants& k, double tail = 1e-10) {
        shooter_config cfg;
        cfg.T = std::log(k.kappa / tail) / (k.theta * k.sigma) + 1e-3;
        cfg.t_floor = cfg.T - 200.0;
        cfg.seed_tail_tol = tail;
        return cfg;
    }
};

struct shooter_state {
    double t = 0.0;
    double v = 0.0;
    double w = 0.0;
};

struct shooter_result {
    double t_star = 0.0;
    double lambda_star = 0.0;
    std::vector<shooter_state> trajectory;  // ascending t, from T* up to T_used
    solution_grid touchdown_profile;
    int crossings = 0;
    int outer_passes = 0;
    double seed_tail = 0.0;
    double T_used = 0.0;
};

// psi(t) = kappa^{-1} int_t^inf e^{(alpha-beta-1)(t-s)} e^{-theta(1-sigma)s} h(s) ds,
// closed form when h == C. For varying h the radius is read as r = e^{t_origin - s}.
inline double psi_eval(const asymptotic_constants& k, const source_profile& src, double t,
                       double t_origin = 0.0) {
    if (!src.is_weighted())
        throw std::domain_error("psi_eval: source must be a weighted power");
    const double margin = k.gamma + 1.0 - k.theta * k.sigma;
    if (src.has_const_h())
        return k.C * std::exp(-k.theta * (1.0 - k.sigma) * t) / (k.kappa * margin);

    auto integrand = [&](double s) {
        const double r = std::max(std::min(std::exp(t_origin - s), 1.0), 1e-300);
        return std::exp((k.alpha - k.beta - 1.0) * (t - s) - k.theta * (1.0 - k.sigma) * s) *
               src.h(r);
    };
    const double base = integrand(t);
    if (!(base > 0.0) || !std::isfinite(base))
        throw quadrature_failure("psi_eval: integrand invalid at the lower limit", base);

    double s_max = t + 1.0;
    while (integrand(s_max) > 1e-16 * base) {
        s_max += 1.0;
        if (s_max - t > 4000.0)
            throw quadrature_failure("psi_eval: tail integral does not decay", integrand(s_max));
    }

    const int n = 2 * static_cast<int>(std::ceil((s_max - t) / (2.0 * 5e-3)));
    const double step = (s_max - t) / n;
    double acc = integrand(t) + integrand(s_max);
    for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * integrand(t + i * step);
    return acc * step / (3.0 * k.kappa);
}

inline shooter_state seed_state(const asymptotic_constants& k, const gap_function& gap,
                                const source_profile& src, double T,
                                double seed_tail_tol = 1e-10) {
    const double tail = k.kappa * std::exp(-k.theta * k.sigma * T);
    if (!(tail <= seed_tail_tol))
        throw seed_tail_violation("seed tail " + detail::num(tail) + " exceeds tolerance " +
                                  detail::num(seed_tail_tol) + "; increase T");
    shooter_state s;
    s.t = T;
    s.v = gap.ginv(tail);
    s.w = std::exp((k.beta + 1.0 - k.alpha) * T) * psi_eval(k, src, T);
    return s;
}

namespace detail {

struct shoot_system {
    const asymptotic_constants& k;
    const gap_function& gap;
    const source_profile& src;
    double t_origin;  // h is read at r = e^{t_origin - t}

    void rhs(double t, double v, double w, double& dv, double& dw) const {
        if (!(w > 0.0))
            throw integration_integrity("w reached " + num(w) + " at t = " + num(t));
        dv = std::exp((k.alpha / (k.beta + 1.0) - 1.0) * t) * std::pow(w, 1.0 / (k.beta + 1.0));
        const double g = gap.g(v);
        if (!(g > 0.0))
            throw integration_integrity("gap closed at t = " + num(t));
        const double r = std::max(std::min(std::exp(t_origin - t), 1.0), 1e-300);
        dw = -std::exp(-(k.gamma + 1.0) * t) * src.h(r) / g;
    }

    shooter_state rk4(const shooter_state& s, double hstep) const {
        double k1v, k1w, k2v, k2w, k3v, k3w, k4v, k4w;
        rhs(s.t, s.v, s.w, k1v, k1w);
        rhs(s.t + 0.5 * hstep, s.v + 0.5 * hstep * k1v, s.w + 0.5 * hstep * k1w, k2v, k2w);
        rhs(s.t + 0.5 * hstep, s.v + 0.5 * hstep * k2v, s.w + 0.5 * hstep * k2w, k3v, k3w);
        rhs(s.t + hstep, s.v + hstep * k3v, s.w + hstep * k3w, k4v, k4w);
        return {s.t + hstep, s.v + hstep / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v),
                s.w + hstep / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w)};
    }

    // one macro step, subdivided until w moves by at most 10% per substep
    // (the w^{1/(beta+1)} coupling is noise-amplifying for beta < 0)
    shooter_state advance(const shooter_state& s, double hstep) const {
        for (int n = 1; n <= 1024; n *= 2) {
            shooter_state cur = s;
            bool smooth = true;
            for (int i = 0; i < n && smooth; ++i) {
                shooter_state next = rk4(cur, hstep / n);
                if (std::fabs(next.w - cur.w) > 0.1 * std::fabs(cur.w))
                    smooth = false;
                else
                    cur = next;
            }
            if (smooth) return cur;
        }
        throw integration_integrity("w varies too rapidly near t = " + num(s.t));
    }
};

struct shot {
    double t_star = 0.0;
    shooter_state cross;
    std::vector<shooter_state> traj;  // integration order: seed first, descending t
};

inline shot single_shot(const asymptotic_constants& k, const gap_function& gap,
                        const source_profile& src, const shooter_config& cfg,
                        double t_origin) {
    const shoot_system sys{k, gap, src, t_origin};
    shooter_state s = seed_state(k, gap, src, cfg.T, cfg.seed_tail_tol);
    shot out;
    out.traj.push_back(s);
    while (s.t > cfg.t_floor + 1e-15) {
        const double hstep = -std::min(cfg.dt, s.t - cfg.t_floor);
        shooter_state next = sys.advance(s, hstep);
        if (next.v <= 0.0) {
            // secant refinement of the crossing, one fourth-order substep
            // from the pre-crossing state per candidate
            shooter_state a = s;     // v > 0
            shooter_state b = next;  // v <= 0
            shooter_state c = b;
            bool located = std::fabs(c.v) <= 1e-10;
            for (int it = 0; it < 100 && !located; ++it) {
                const double tc = a.t - a.v * (a.t - b.t) / (a.v - b.v);
                c = sys.rk4(a, tc - a.t);
                if (std::fabs(c.v) <= 1e-10)
                    located = true;
                else if (c.v > 0.0)
                    a = c;
                else
                    b = c;
            }
            if (!located)
                throw root_find_failure("crossing refinement stalled near t = " + num(b.t));
            out.t_star = c.t;
            out.cross = c;
            out.traj.push_back(c);
            return out;
        }
        s = next;
        out.traj.push_back(s);
    }
    throw no_zero_crossing("v = " + num(s.v) + " still positive at the floor t = " +
                           num(cfg.t_floor));
}

}  // namespace detail

inline solution_grid reconstruct_touchdown(const shooter_result& res, const radial_grid& grid) {
    const auto& tr = res.trajectory;
    if (tr.size() < 4)
        throw coverage_error("trajectory has fewer than 4 states");
    std::vector<double> ts(tr.size()), vs(tr.size());
    for (std::size_t i = 0; i < tr.size(); ++i) {
        ts[i] = tr[i].t;
        vs[i] = tr[i].v;
    }
    const detail::pchip interp(ts, vs);

    solution_grid out;
    out.grid = grid;
    out.lambda = res.lambda_star;
    out.u.resize(grid.r.size());
    for (std::size_t i = 0; i < grid.r.size(); ++i) {
        const double t = res.t_star - std::log(grid.r[i]);
        if (t > ts.back() + 1e-9)
            throw coverage_error("node r = " + detail::num(grid.r[i]) +
                                 " lies below the radius reached by the trajectory");
        out.u[i] = interp(std::clamp(t, ts.front(), ts.back()));
    }
    return out;
}

inline shooter_result shoot_backward(const asymptotic_constants& k, const gap_function& gap,
                                     const source_profile& src, shooter_config cfg,
                                     const radial_grid& profile_grid) {
    if (!src.is_weighted())
        throw std::domain_error("shoot_backward: source must be a weighted power");

    // h depends on the radius map r = e^{T* - t}, which depends on the answer;
    // constant h is exact on the first pass, otherwise fix-point the origin
    double t_origin = 0.0;
    detail::shot sh = detail::single_shot(k, gap, src, cfg, t_origin);
    int passes = 1;
    while (!src.has_const_h() && passes < 3) {
        const double prev = sh.t_star;
        t_origin = sh.t_star;
        sh = detail::single_shot(k, gap, src, cfg, t_origin);
        ++passes;
        if (std::fabs(sh.t_star - prev) <= 1e-12) break;
    }

    // the profile needs trajectory coverage down to the innermost node
    const double T_need = sh.t_star + std::log(1.0 / profile_grid.r.front()) + 1.0;
    if (cfg.T < T_need) {
        cfg.t_floor += T_need - cfg.T;
        cfg.T = T_need;
        sh = detail::single_shot(k, gap, src, cfg, t_origin);
    }

    shooter_result out;
    out.t_star = sh.t_star;
    out.lambda_star = std::exp(-k.theta * sh.t_star);
    out.crossings = 1;
    out.outer_passes = passes;
    out.T_used = cfg.T;
    out.seed_tail = k.kappa * std::exp(-k.theta * k.sigma * cfg.T);
    out.trajectory.assign(sh.traj.rbegin(), sh.traj.rend());
    out.touchdown_profile = reconstruct_touchdown(out, profile_grid);
    return out;
}

inline shooter_result shoot_backward(const asymptotic_constants& k, const gap_function& gap,
                                     const source_profile& src, const shooter_config& cfg) {
    return shoot_backward(k, gap, src, cfg, graded_grid(2048, 2.0));
}

// One discrete application of the correction map Gamma to a tail perturbation x
// given on the ascending grid ts (zero beyond the last node):
//
//     y(t)        = -kappa^{-1} int_t^Tmax e^{(alpha-beta-1)(t-s)} e^{-theta(1-sigma)s}
//                     h(s) X(s)/(1+X(s)) ds,          X(s) = x(s) e^{theta sigma s} / kappa
//     Gamma(x)(t) = -int_t^Tmax [ (psi+y)^{1/(beta+1)} g'(g^{-1}(kappa e^{-theta sigma s}+x(s)))
//                     + theta sigma kappa e^{-theta sigma s} ] ds
//
// Inputs must stay in the ball ||X|| <= 1/4, where the integrands are defined.
inline std::vector<double> gamma_refine(const asymptotic_constants& k, const gap_function& gap,
                                        const source_profile& src,
                                        const std::vector<double>& ts,
                                        const std::vector<double>& xs) {
    if (ts.size() != xs.size())
        throw std::domain_error("gamma_refine: grid and values differ in length");
    if (ts.size() < 4)
        throw std::domain_error("gamma_refine: need at least 4 grid nodes");
    for (std::size_t i = 1; i < ts.size(); ++i)
        if (!(ts[i] > ts[i - 1]))
            throw std::domain_error("gamma_refine: grid must be strictly increasing");
    if (!src.is_weighted())
        throw std::domain_error("gamma_refine: source must be a weighted power");

    const std::size_t n = ts.size();
    const double ths = k.theta * k.sigma;

    std::vector<double> chi(n);
    for (std::size_t i = 0; i < n; ++i) {
        chi[i] = xs[i] * std::exp(ths * ts[i]) / k.kappa;
        if (std::fabs(chi[i]) > 0.25 + 1e-12)
            throw xi_membership_violation("|x e^{theta sigma t}| / kappa = " +
                                          detail::num(std::fabs(chi[i])) + " at t = " +
                                          detail::num(ts[i]) + " exceeds 1/4");
    }

    auto suffix_trapezoid = [&](const std::vector<double>& vals) {
        std::vector<double> s(n, 0.0);
        for (std::size_t i = n - 1; i-- > 0;)
            s[i] = s[i + 1] + 0.5 * (vals[i] + vals[i + 1]) * (ts[i + 1] - ts[i]);
        return s;
    };

    // y via the factored kernel: e^{(alpha-beta-1)t} times a suffix integral
    const double mu = k.alpha - k.beta - 1.0 + k.theta * (1.0 - k.sigma);
    std::vector<double> b(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = std::max(std::min(std::exp(-ts[i]), 1.0), 1e-300);
        b[i] = std::exp(-mu * ts[i]) * src.h(r) * chi[i] / (1.0 + chi[i]);
    }
    const std::vector<double> bs = suffix_trapezoid(b);
    std::vector<double> integrand(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double y = -std::exp((k.alpha - k.beta - 1.0) * ts[i]) * bs[i] / k.kappa;
        const double pv = psi_eval(k, src, ts[i]) + y;
        if (!(pv > 0.0))
            throw integration_integrity("psi + y = " + detail::num(pv) +
                                        " not positive at t = " + detail::num(ts[i]));
        const double tail = k.kappa * std::exp(-ths * ts[i]);
        integrand[i] = std::pow(pv, 1.0 / (k.beta + 1.0)) *
                           gap.dg(gap.ginv(tail + xs[i])) +
                       ths * tail;
    }
    std::vector<double> out = suffix_trapezoid(integrand);
    for (double& g : out) g = -g;
    return out;
}

}  // namespace mems
