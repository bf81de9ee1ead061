#pragma once

// Pull-in voltage estimation.
//
// Analytic sandwich (d = max d_i, e = min d_i of the majorant exponents):
//
//   upper:  p_{d,e}^{-1}( 2 P_{d,e}(P(1) a_sup) P_{d,e}(g(0)) / p_{d,e}(F(1/2)) )
//           with P_{d,e}(r) = max{r^{1/d}, r^{1/e}}, p_{d,e}(r) = min{...}
//   lower:  g(Phi(1)) when Phi(1) < 1, else sup_{delta in (0,1)} Phi^{-1}(delta) g(delta),
//           where Phi(lambda) = int_0^1 phi^{-1}(s, lambda F(s)) ds.
//
// The bisection estimator classifies each lambda by the subsolution-start
// Picard iteration; solvability is monotone in lambda, so Exists/NotExists
// classifications bracket the pull-in threshold.  Indeterminate outcomes
// (MaxIterations) advance the Exists side but mark the estimate low-confidence:
// near the threshold the minimal solution exists but the iteration converges
// arbitrarily slowly, and treating indeterminate as NotExists would bias the
// estimate downward.

#include <mems/model.hpp>
#include <mems/quadrature.hpp>
#include <mems/solver.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>
#include <utility>
#include <vector>

namespace mems {

struct pde_values {
    double P = 0.0;
    double p = 0.0;
};

inline pde_values pde_pair(const majorant& m, double r) {
    if (r < 0.0) throw std::domain_error("pde_pair: r must be nonnegative");
    const double a = std::pow(r, 1.0 / m.dmax);
    const double b = std::pow(r, 1.0 / m.emin);
    return {std::max(a, b), std::min(a, b)};
}

// unique r with p_{d,e}(r) = y; p_{d,e} takes the slower-growing branch, so
// its inverse takes the faster one: r = max{y^d, y^e}
inline double pde_min_inverse(const majorant& m, double y) {
    if (y < 0.0) throw std::domain_error("pde_min_inverse: y must be nonnegative");
    return std::max(std::pow(y, m.dmax), std::pow(y, m.emin));
}

inline double upper_bound(const model& mdl, const majorant& maj) {
    const double F_half = mdl.src.F(0.5);
    if (!(F_half > 0.0)) throw std::domain_error("upper_bound: F(1/2) must be positive");
    const double num = 2.0 * pde_pair(maj, maj.P(1.0) * maj.a_sup).P * pde_pair(maj, mdl.gap.g(0.0)).P;
    return pde_min_inverse(maj, num / pde_pair(maj, F_half).p);
}

namespace detail {

class phi_big {
public:
    phi_big(const model& m, int M, double grading) : m_(m), grid_(graded_grid(M, grading)) {
        F_.resize(grid_.r.size());
        for (std::size_t i = 0; i < F_.size(); ++i) F_[i] = m.src.F(grid_.r[i]);
        if (const auto* pm = std::get_if<power_monomial>(&m.op)) {
            // phi^{-1}(s, lambda w) = lambda^{1/(beta+1)} phi^{-1}(s, w)
            homog_power_ = 1.0 / (pm->beta + 1.0);
            base_ = value(1.0);
        }
    }

    double value(double lambda) const {
        if (lambda == 0.0) return 0.0;
        if (homog_power_ > 0.0 && base_ > 0.0) return std::pow(lambda, homog_power_) * base_;
        std::vector<double> integrand(grid_.r.size());
        for (std::size_t i = 0; i < integrand.size(); ++i)
            integrand[i] = phi_inverse(m_.op, grid_.r[i], lambda * F_[i]);
        return cumulative_integral(grid_, integrand).back();
    }

    // monotone inverse by doubling + bisection
    double inverse(double delta) const {
        if (homog_power_ > 0.0 && base_ > 0.0) return std::pow(delta / base_, 1.0 / homog_power_);
        double hi = 1.0;
        int doublings = 0;
        while (value(hi) < delta) {
            hi *= 2.0;
            if (++doublings > 200) throw root_find_failure("Phi inverse: no bracket");
        }
        double lo = 0.0;
        while (hi - lo > 1e-10 * std::max(hi, 1e-10)) {
            const double mid = 0.5 * (lo + hi);
            (value(mid) < delta ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }

private:
    const model& m_;
    radial_grid grid_;
    std::vector<double> F_;
    double homog_power_ = 0.0;
    double base_ = 0.0;
};

} // namespace detail

inline double lower_bound(const model& mdl, int M = 2048, double grading = 2.0) {
    const detail::phi_big Phi(mdl, M, grading);
    const double Phi1 = Phi.value(1.0);
    if (Phi1 < 1.0) return mdl.gap.g(Phi1);
    // sup over delta of Phi^{-1}(delta) g(delta): coarse 64-point scan guards
    // against local maxima, golden-section refines the winning cell
    auto score = [&](double delta) { return Phi.inverse(delta) * mdl.gap.g(delta); };
    const double d_lo = 1e-6, d_hi = 1.0 - 1e-6;
    double best_d = d_lo, best = score(d_lo);
    for (int j = 0; j <= 64; ++j) {
        const double d = d_lo + (d_hi - d_lo) * j / 64.0;
        const double s = score(d);
        if (s > best) { best = s; best_d = d; }
    }
    double a = std::max(d_lo, best_d - (d_hi - d_lo) / 64.0);
    double b = std::min(d_hi, best_d + (d_hi - d_lo) / 64.0);
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = score(x1), f2 = score(x2);
    while (b - a > 1e-10) {
        if (f1 < f2) {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + gr * (b - a); f2 = score(x2);
        } else {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - gr * (b - a); f1 = score(x1);
        }
    }
    return std::max(best, std::max(f1, f2));
}

struct classified_lambda {
    double lambda = 0.0;
    iter_status status = iter_status::max_iterations;
};

struct pull_in_estimate {
    double lower = 0.0;
    double upper = 0.0;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    int evaluations = 0;
    bool low_confidence = false;
    std::vector<classified_lambda> trace;
};

inline pull_in_estimate bisect_pullin(const model& mdl, double width, double lambda_init_hi,
                                      const radial_grid& grid, const solver_params& prm = {}) {
    if (!(width > 0.0)) throw std::domain_error("bisect_pullin: width must be positive");
    pull_in_estimate est;
    est.lower = lower_bound(mdl, grid.M, grid.grading);
    est.upper = upper_bound(mdl, default_majorant(mdl.op));
    double lo = est.lower;
    double hi = std::min(est.upper, lambda_init_hi);
    if (hi - lo <= width) { // degenerate request: the analytic bounds already satisfy it
        est.bracket_lo = lo;
        est.bracket_hi = hi;
        return est;
    }
    auto classify = [&](double lam) {
        const iter_status st = solve_from_subsolution(mdl, lam, grid, prm).second.status;
        est.trace.push_back({lam, st});
        ++est.evaluations;
        return st;
    };
    const iter_status st_lo = classify(lo);
    if (st_lo == iter_status::touchdown_detected)
        throw inconsistent_bracket("bisect_pullin: touchdown at the analytic lower bound");
    if (st_lo == iter_status::max_iterations) est.low_confidence = true;
    const iter_status st_hi = classify(hi);
    if (st_hi != iter_status::touchdown_detected) {
        // everything up to hi is solvable; the threshold lies above the search range
        est.bracket_lo = est.bracket_hi = hi;
        est.low_confidence = true;
        return est;
    }
    while (hi - lo > width) {
        const double mid = 0.5 * (lo + hi);
        switch (classify(mid)) {
            case iter_status::converged: lo = mid; break;
            case iter_status::touchdown_detected: hi = mid; break;
            case iter_status::max_iterations:
                lo = mid;
                est.low_confidence = true;
                break;
        }
    }
    est.bracket_lo = lo;
    est.bracket_hi = hi;
    return est;
}

struct branch_point {
    double lambda = 0.0;
    double u0 = 0.0;       // u(r_0), last subcritical iterate for non-converged runs
    double norm_sup = 0.0;
    iter_status status = iter_status::max_iterations;
};

inline std::vector<branch_point> branch_sweep(const model& mdl, const std::vector<double>& lambdas,
                                              const radial_grid& grid, const solver_params& prm = {},
                                              int jobs = 1) {
    std::vector<branch_point> out(lambdas.size());
    auto run_one = [&](std::size_t k) {
        const auto [sol, rep] = solve_from_subsolution(mdl, lambdas[k], grid, prm);
        branch_point& bp = out[k];
        bp.lambda = lambdas[k];
        bp.status = rep.status;
        if (rep.status == iter_status::converged) {
            bp.u0 = sol.u[0];
            bp.norm_sup = *std::max_element(sol.u.begin(), sol.u.end());
        } else {
            bp.u0 = rep.u0_last_subcritical;
            bp.norm_sup = rep.u0_last_subcritical;
        }
    };
    const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(lambdas.size())));
    if (workers == 1) {
        for (std::size_t k = 0; k < lambdas.size(); ++k) run_one(k);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int t = 0; t < workers; ++t)
            pool.emplace_back([&] {
                for (std::size_t k = next.fetch_add(1); k < lambdas.size(); k = next.fetch_add(1))
                    run_one(k);
            });
        for (auto& th : pool) th.join();
    }
    return out;
}

} // namespace mems
