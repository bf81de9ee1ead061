#pragma once

// Monotone Picard iteration on the integral form of the membrane problem:
//
//   u(r) = int_r^1 phi^{-1}( t, lambda int_0^t f(s) / g(u(s)) ds ) dt
//
// Starting from the zero subsolution the iterates increase toward the minimal
// solution; starting from a verified supersolution they decrease.  Touchdown
// is detected when u(r_0) reaches 1 - eps_td or the gap drops below g_floor.
// Non-convergence within max_iter is classified TouchdownDetected only when
// u(r_0) > 1 - 1e-3, otherwise it stays indeterminate (MaxIterations).

#include <mems/model.hpp>
#include <mems/quadrature.hpp>

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

namespace mems {

struct solver_params {
    double tol_fix = 1e-10; // sup-norm fixed-point update
    double tol_res = 1e-6;  // integral-equation residual at M = 2048
    double eps_td = 1e-6;   // touchdown margin on 1 - u(r_0)
    double g_floor = 1e-14; // gap floor signalling incipient touchdown
    int max_iter = 10000;
    double tol_quad = 1e-6; // quadrature scale; monotonicity slack is 10x this
};

enum class iter_status { converged, touchdown_detected, max_iterations };

inline const char* to_string(iter_status s) {
    switch (s) {
        case iter_status::converged: return "Converged";
        case iter_status::touchdown_detected: return "TouchdownDetected";
        default: return "MaxIterations";
    }
}

struct iteration_report {
    iter_status status = iter_status::max_iterations;
    int iterations = 0;
    double final_delta = std::numeric_limits<double>::infinity();
    double residual = std::numeric_limits<double>::infinity();
    double u0_last_subcritical = 0.0; // last observed u(r_0) below 1
};

struct solution_grid {
    radial_grid grid;
    std::vector<double> u;
    double lambda = 0.0;
};

namespace detail {

// Picard engine bound to a (model, grid) pair.  Precomputes the source values
// and, where the operator admits it, the nodewise closed form
// phi^{-1}(r_i, w) = (w * scale_i)^{expo_i} (linear for the sphere cap).
class picard_engine {
public:
    picard_engine(const model& m, const radial_grid& g) : m_(m), g_(g) {
        const std::size_t n = g.r.size();
        f_.resize(n);
        for (std::size_t i = 0; i < n; ++i) f_[i] = m.src.f(g.r[i]);
        if (const auto* pm = std::get_if<power_monomial>(&m.op)) {
            mode_ = mode::powerlike;
            scale_.resize(n);
            expo_.assign(n, 1.0 / (pm->beta + 1.0));
            for (std::size_t i = 0; i < n; ++i) scale_[i] = std::pow(g.r[i], -pm->alpha);
        } else if (const auto* ve = std::get_if<variable_exponent>(&m.op)) {
            mode_ = mode::powerlike;
            scale_.resize(n);
            expo_.resize(n);
            for (std::size_t i = 0; i < n; ++i) {
                scale_[i] = std::pow(g.r[i], -(ve->N - 1.0));
                expo_[i] = 1.0 / (ve->p(g.r[i]) - 1.0);
            }
        } else if (const auto* sc = std::get_if<sphere_cap>(&m.op)) {
            mode_ = mode::linear;
            scale_.resize(n);
            for (std::size_t i = 0; i < n; ++i)
                scale_[i] = 1.0 / (sc->rho * std::pow(std::sin(g.r[i] / sc->rho), sc->N - 1));
        } else {
            mode_ = mode::generic;
        }
    }

    // one Picard application u -> T_lambda(u)
    std::vector<double> apply(double lambda, const std::vector<double>& u, double g_floor) const {
        const std::size_t n = u.size();
        std::vector<double> q(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double gi = m_.gap.g(u[i]);
            if (gi <= g_floor) throw gap_floor_breached("picard_step: gap fell to the floor");
            q[i] = f_[i] / gi;
        }
        std::vector<double> I = cumulative_integral(g_, q);
        for (std::size_t i = 0; i < n; ++i) I[i] = inverse_at(i, lambda * I[i]);
        return tail_integrals(g_, I);
    }

    const radial_grid& grid() const { return g_; }

private:
    enum class mode { powerlike, linear, generic };

    double inverse_at(std::size_t i, double w) const {
        switch (mode_) {
            case mode::powerlike: return w == 0.0 ? 0.0 : std::pow(w * scale_[i], expo_[i]);
            case mode::linear: return w * scale_[i];
            default: return phi_inverse(m_.op, g_.r[i], w);
        }
    }

    const model& m_;
    const radial_grid& g_;
    std::vector<double> f_;
    std::vector<double> scale_, expo_;
    mode mode_ = mode::generic;
};

inline double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::fabs(a[i] - b[i]));
    return d;
}

// shared iteration driver; `u` holds the start iterate on entry
inline std::pair<solution_grid, iteration_report> iterate(const picard_engine& eng, double lambda,
                                                          std::vector<double> u,
                                                          const solver_params& prm) {
    iteration_report rep;
    if (u[0] < 1.0) rep.u0_last_subcritical = u[0];
    for (int k = 1; k <= prm.max_iter; ++k) {
        std::vector<double> next;
        try {
            next = eng.apply(lambda, u, prm.g_floor);
        } catch (const gap_floor_breached&) {
            rep.status = iter_status::touchdown_detected;
            rep.iterations = k;
            return {solution_grid{eng.grid(), std::move(u), lambda}, rep};
        }
        rep.final_delta = sup_diff(next, u);
        rep.iterations = k;
        u = std::move(next);
        if (u[0] < 1.0) rep.u0_last_subcritical = u[0];
        if (u[0] >= 1.0 - prm.eps_td) {
            rep.status = iter_status::touchdown_detected;
            return {solution_grid{eng.grid(), std::move(u), lambda}, rep};
        }
        if (rep.final_delta <= prm.tol_fix) {
            try {
                rep.residual = sup_diff(eng.apply(lambda, u, prm.g_floor), u);
            } catch (const gap_floor_breached&) {
                rep.status = iter_status::touchdown_detected;
                return {solution_grid{eng.grid(), std::move(u), lambda}, rep};
            }
            rep.status = rep.residual <= prm.tol_res ? iter_status::converged
                                                     : iter_status::max_iterations;
            return {solution_grid{eng.grid(), std::move(u), lambda}, rep};
        }
    }
    rep.status = u[0] > 1.0 - 1e-3 ? iter_status::touchdown_detected : iter_status::max_iterations;
    return {solution_grid{eng.grid(), std::move(u), lambda}, rep};
}

} // namespace detail

inline solution_grid picard_step(const model& m, double lambda, const solution_grid& uk,
                                 const solver_params& prm = {}) {
    detail::picard_engine eng(m, uk.grid);
    return solution_grid{uk.grid, eng.apply(lambda, uk.u, prm.g_floor), lambda};
}

inline std::pair<solution_grid, iteration_report> solve_from_subsolution(
    const model& m, double lambda, const radial_grid& grid, const solver_params& prm = {}) {
    if (lambda < 0.0) throw std::domain_error("solve_from_subsolution: lambda must be nonnegative");
    detail::picard_engine eng(m, grid);
    return detail::iterate(eng, lambda, std::vector<double>(grid.r.size(), 0.0), prm);
}

inline std::pair<solution_grid, iteration_report> solve_from_supersolution(
    const model& m, double lambda, const solution_grid& u0, const solver_params& prm = {}) {
    detail::picard_engine eng(m, u0.grid);
    const std::vector<double> first = eng.apply(lambda, u0.u, prm.g_floor);
    for (std::size_t i = 0; i < first.size(); ++i)
        if (u0.u[i] < first[i] - 10.0 * prm.tol_quad)
            throw not_a_supersolution("solve_from_supersolution: start iterate is below its own Picard image");
    return detail::iterate(eng, lambda, u0.u, prm);
}

// ubar(r) = int_r^1 phi^{-1}(t, lambda0 F(t)) dt with rho = ubar(0+) < 1;
// ubar is a supersolution for every lambda <= lambda0 * g(rho).
inline std::pair<solution_grid, double> build_small_lambda_supersolution(const model& m, double lambda0,
                                                                         const radial_grid& grid) {
    std::vector<double> integrand(grid.r.size());
    for (std::size_t i = 0; i < integrand.size(); ++i)
        integrand[i] = phi_inverse(m.op, grid.r[i], lambda0 * m.src.F(grid.r[i]));
    const double rho = cumulative_integral(grid, integrand).back();
    if (!(rho < 1.0)) throw rho_not_below_one(rho);
    const double lambda_max = lambda0 * m.gap.g(rho);
    return {solution_grid{grid, tail_integrals(grid, integrand), lambda_max}, lambda_max};
}

inline double residual(const model& m, double lambda, const solution_grid& u,
                       const solver_params& prm = {}) {
    detail::picard_engine eng(m, u.grid);
    return detail::sup_diff(eng.apply(lambda, u.u, prm.g_floor), u.u);
}

} // namespace mems
