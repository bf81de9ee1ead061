// Acceptance gate: nine numbered criteria covering bounds, cross-oracle
// agreement, touchdown asymptotics, algebraic identities, monotone iteration,
// branch shape, operator reductions, seed consistency, and convergence orders.
// Prints one PASS/FAIL line per criterion; exits nonzero if any checked
// criterion fails.  Run a single criterion with --criterion N.

#include <mems/asymptotics.hpp>
#include <mems/model.hpp>
#include <mems/pullin.hpp>
#include <mems/quadrature.hpp>
#include <mems/shooter.hpp>
#include <mems/solver.hpp>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <random>
#include <string>
#include <vector>

using namespace mems;

namespace {

struct result {
    bool pass = false;
    std::string detail;
};

double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

model r1_model() {
    return model{power_monomial{2.0, 0.0}, gap_function(mems_power{2.0}),
                 source_profile(weighted_power{2.0, nullptr, 1.0})};
}

model khessian_model() {
    return model{power_monomial{3.0, 1.0}, gap_function(mems_power{3.0}),
                 source_profile(weighted_power{4.0, nullptr, 1.0})};
}

constexpr double inf = std::numeric_limits<double>::infinity();

// 1. analytic bounds hit their closed forms and the bisection bracket sits
//    strictly between them
result crit_1() {
    const model m = r1_model();
    const double lo = lower_bound(m);
    const double up = upper_bound(m, default_majorant(m.op));
    const double lo_exact = 25.0 / 36.0;

    bool pass = rel(lo, lo_exact) <= 1e-12 && rel(up, 48.0) <= 1e-12;
    const auto est = bisect_pullin(m, 1e-3, inf, graded_grid(2048, 2.0), {});
    const double width = est.bracket_hi - est.bracket_lo;
    pass = pass && width <= 1e-3 && est.bracket_lo > lo_exact && est.bracket_hi < 48.0 &&
           !est.low_confidence;

    return {pass, "lower " + num(lo) + " upper " + num(up) + ", bracket [" +
                      num(est.bracket_lo) + ", " + num(est.bracket_hi) + "] width " + num(width)};
}

// 2. shooter lambda* vs bisection bracket midpoint within 2 percent on the
//    radial Laplacian and k-Hessian instances
result crit_2() {
    const radial_grid grid = graded_grid(2048, 2.0);
    std::string detail;
    bool pass = true;
    const model models[] = {r1_model(), khessian_model()};
    const char* names[] = {"R1", "kHessian"};
    for (int i = 0; i < 2; ++i) {
        const model& m = models[i];
        const auto est = bisect_pullin(m, 1e-3, inf, grid, {});
        const double mid = 0.5 * (est.bracket_lo + est.bracket_hi);
        const auto k = compute_constants(std::get<power_monomial>(m.op), m.gap, m.src.gamma(),
                                         m.src.C());
        const auto shot = shoot_backward(k, m.gap, m.src, shooter_config::automatic(k));
        const double disc = std::fabs(shot.lambda_star - mid) / shot.lambda_star;
        pass = pass && disc <= 0.02;
        if (i) detail += ", ";
        detail += std::string(names[i]) + " disc " + num(100.0 * disc) + "% (shoot " +
                  num(shot.lambda_star) + " vs mid " + num(mid) + ")";
    }
    return {pass, detail + "; threshold 2%"};
}

// 3. touchdown profile obeys 1 - u = coef * r^(2/3) with the predicted
//    coefficient
result crit_3() {
    const model m = r1_model();
    const auto k = compute_constants(std::get<power_monomial>(m.op), m.gap, 2.0, 1.0);
    if (rel(k.kappa, std::pow(0.9, 2.0 / 3.0)) > 1e-12)
        return {false, "kappa " + num(k.kappa) + " off closed form"};

    const auto shot = shoot_backward(k, m.gap, m.src, shooter_config::automatic(k),
                                     graded_grid(2048, 2.0));
    const auto fit = fit_asymptotics(shot.touchdown_profile);
    const double coef_pred = k.coef(shot.lambda_star);
    const double e_err = rel(fit.exponent_hat, 2.0 / 3.0);
    const double c_err = rel(fit.coef_hat, coef_pred);
    return {e_err <= 0.02 && c_err <= 0.05,
            "exponent " + num(fit.exponent_hat) + " (err " + num(100.0 * e_err) + "%), coef " +
                num(fit.coef_hat) + " vs " + num(coef_pred) + " (err " + num(100.0 * c_err) +
                "%)"};
}

// 4. the two closed-form identities linking theta, sigma, kappa hold for 100
//    random admissible parameter tuples
result crit_4() {
    std::mt19937 rng(8123u);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double beta = -0.9 + 2.9 * u01(rng);
        const double alpha = beta + 1.0 + 0.1 + 3.0 * u01(rng);
        const double gamma = alpha + 3.0 * u01(rng);
        const double q = 0.05 + 0.9 * u01(rng);
        const double A = 0.1 + 9.9 * u01(rng);
        const double C = 0.1 + 9.9 * u01(rng);
        const gap_function gap(custom_gap{[](double u) { return (1.0 - u) * (1.0 - u); },
                                          [](double u) { return -2.0 * (1.0 - u); }, A, q});
        const auto k = compute_constants(power_monomial{alpha, beta}, gap, gamma, C);

        const double lhs1 = k.theta * k.sigma * q + k.theta * (1.0 - k.sigma) / (beta + 1.0);
        const double lhs2 = A * std::pow(k.kappa, q) *
                            std::pow(C / (k.kappa * (gamma + 1.0 - k.theta * k.sigma)),
                                     1.0 / (1.0 + beta));
        worst = std::max(worst, rel(lhs1, k.theta * k.sigma));
        worst = std::max(worst, rel(lhs2, k.theta * k.sigma * k.kappa));
    }
    return {worst <= 1e-12, "worst relative defect " + num(worst) + " over 100 tuples"};
}

model random_model(std::mt19937& rng, int family) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const gap_function gap(mems_power{u01(rng) < 0.5 ? 2.0 : 3.0});
    const double C = 0.5 + u01(rng);
    switch (family) {
    case 0: {
        const double beta = -0.5 + 1.5 * u01(rng);
        const double alpha = beta + 1.2 + 2.0 * u01(rng);
        return model{power_monomial{alpha, beta}, gap,
                     source_profile(weighted_power{alpha + 2.0 * u01(rng), nullptr, C})};
    }
    case 1: {
        std::vector<std::pair<double, double>> terms;
        const int n = 2 + (u01(rng) < 0.5 ? 1 : 0);
        for (int i = 0; i < n; ++i)
            terms.emplace_back(1.5 + 2.0 * u01(rng), -0.3 + 1.3 * u01(rng));
        return model{monomial_sum{std::move(terms)}, gap,
                     source_profile(weighted_power{1.0 + 2.0 * u01(rng), nullptr, C})};
    }
    case 2: {
        const double N = 2.5 + 1.5 * u01(rng);
        const double p_lo = 1.2 + (N - 1.5) * u01(rng);
        const double p_hi = p_lo + (N - 0.1 - p_lo) * u01(rng);
        return model{variable_exponent{N,
                                       [p_lo, p_hi](double r) {
                                           return p_lo + (p_hi - p_lo) * r;
                                       },
                                       0.1},
                     gap, source_profile(weighted_power{N - 1.0 + u01(rng), nullptr, C})};
    }
    default: {
        const int N = 2 + (u01(rng) < 0.5 ? 1 : 0);
        return model{sphere_cap{N, 1.0 + u01(rng)}, gap,
                     source_profile(weighted_power{N - 1.0, nullptr, C})};
    }
    }
}

// run a monitored Picard chain; direction +1 demands nondecreasing iterates,
// -1 nonincreasing
bool monotone_chain(const model& m, double lambda, solution_grid u, int direction,
                    double slack, solution_grid& out) {
    const solver_params prm;
    for (int it = 0; it < prm.max_iter; ++it) {
        const solution_grid next = picard_step(m, lambda, u, prm);
        double delta = 0.0;
        for (std::size_t i = 0; i < u.u.size(); ++i) {
            if (direction * (next.u[i] - u.u[i]) < -slack) return false;
            delta = std::max(delta, std::fabs(next.u[i] - u.u[i]));
        }
        u = next;
        if (delta <= prm.tol_fix) break;
    }
    out = std::move(u);
    return true;
}

// 5. monotone squeeze: rising chain from zero, falling chain from the small
//    lambda supersolution, both converging to residual <= 1e-6
result crit_5() {
    std::mt19937 rng(40123u);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const radial_grid grid = graded_grid(2048, 2.0);
    const double slack = 10.0 * solver_params{}.tol_quad;

    double worst_res = 0.0;
    for (int i = 0; i < 20; ++i) {
        const model m = random_model(rng, i % 4);

        double lam0 = lower_bound(m);
        solution_grid ubar;
        double lam_max = 0.0;
        for (int attempt = 0;; ++attempt) {
            try {
                std::tie(ubar, lam_max) = build_small_lambda_supersolution(m, lam0, grid);
                break;
            } catch (const rho_not_below_one&) {
                if (attempt > 60) return {false, "no supersolution for model " + std::to_string(i)};
                lam0 *= 0.5;
            }
        }
        const double lam = (0.1 + 0.8 * u01(rng)) * std::min(lower_bound(m), lam_max);

        solution_grid up, down;
        if (!monotone_chain(m, lam, solution_grid{grid, std::vector<double>(grid.r.size(), 0.0),
                                                  lam},
                            +1, slack, up))
            return {false, "rising chain not monotone for model " + std::to_string(i)};
        if (!monotone_chain(m, lam, ubar, -1, slack, down))
            return {false, "falling chain not monotone for model " + std::to_string(i)};

        worst_res = std::max(worst_res, residual(m, lam, up));
        worst_res = std::max(worst_res, residual(m, lam, down));
    }
    return {worst_res <= 1e-6, "20 models, worst residual " + num(worst_res)};
}

// 6. the minimal branch u(r0) is nondecreasing in lambda below the bracket
result crit_6() {
    const model m = r1_model();
    const radial_grid grid = graded_grid(2048, 2.0);
    const auto est = bisect_pullin(m, 1e-3, inf, grid, {});

    std::vector<double> lambdas;
    for (int i = 0; i < 32; ++i) lambdas.push_back(est.bracket_lo * i / 31.0);
    const auto pts = branch_sweep(m, lambdas, grid, {}, 4);

    const double slack = 10.0 * solver_params{}.tol_quad;
    bool pass = pts.size() == 32;
    for (std::size_t i = 1; i < pts.size(); ++i)
        if (pts[i].u0 < pts[i - 1].u0 - slack) pass = false;
    for (const auto& p : pts)
        if (p.status != iter_status::converged) pass = false;
    return {pass, "u0 spans [" + num(pts.front().u0) + ", " + num(pts.back().u0) +
                      "] over 32 points"};
}

// 7. single-term sum and constant-exponent operators collapse to the monomial
//    case; lambda = 0 gives the zero profile exactly
result crit_7() {
    const radial_grid grid = graded_grid(1024, 2.0);
    const gap_function gap(mems_power{2.0});
    const source_profile src(weighted_power{3.0, nullptr, 1.0});
    const model m1{power_monomial{2.0, 0.5}, gap, src};
    const model m2{monomial_sum{{{2.0, 0.5}}}, gap, src};
    const model m3{variable_exponent{3.0, [](double) { return 2.5; }, 0.1}, gap, src};

    solver_params prm;
    prm.tol_fix = 1e-13;
    const double lam = 0.5 * lower_bound(m1);
    const auto [u1, rep1] = solve_from_subsolution(m1, lam, grid, prm);
    const auto [u2, rep2] = solve_from_subsolution(m2, lam, grid, prm);
    const auto [u3, rep3] = solve_from_subsolution(m3, lam, grid, prm);
    if (rep1.status != iter_status::converged || rep2.status != iter_status::converged ||
        rep3.status != iter_status::converged)
        return {false, "reduction solve did not converge"};

    double d2 = 0.0, d3 = 0.0;
    for (std::size_t i = 0; i < u1.u.size(); ++i) {
        d2 = std::max(d2, std::fabs(u2.u[i] - u1.u[i]));
        d3 = std::max(d3, std::fabs(u3.u[i] - u1.u[i]));
    }

    const auto [u0, rep0] = solve_from_subsolution(m1, 0.0, grid, prm);
    bool zero_ok = rep0.status == iter_status::converged;
    for (double v : u0.u) zero_ok = zero_ok && v == 0.0;

    return {d2 <= 1e-12 && d3 <= 1e-12 && zero_ok,
            "sup gaps: single-term sum " + num(d2) + ", constant exponent " + num(d3) +
                (zero_ok ? ", zero profile exact" : ", zero profile NOT exact")};
}

// 8. quadrature psi equals the closed form for constant h, and lambda* is
//    insensitive to the seed time
result crit_8() {
    const model m = r1_model();
    const auto k = compute_constants(std::get<power_monomial>(m.op), m.gap, 2.0, 1.0);
    const source_profile src_const(weighted_power{2.0, nullptr, 1.0});
    const source_profile src_quad(weighted_power{2.0, [](double) { return 1.0; }, 1.0});

    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const double t = 17.0 * i / 19.0;
        worst = std::max(worst, rel(psi_eval(k, src_quad, t), psi_eval(k, src_const, t)));
    }

    shooter_config cfg;
    cfg.T = 18.0;
    cfg.t_floor = cfg.T - 200.0;
    const double lam_a = shoot_backward(k, m.gap, m.src, cfg).lambda_star;
    cfg.T = 23.0;
    cfg.t_floor = cfg.T - 200.0;
    const double lam_b = shoot_backward(k, m.gap, m.src, cfg).lambda_star;
    const double drift = rel(lam_a, lam_b);

    return {worst <= 1e-8 && drift < 1e-3,
            "psi defect " + num(worst) + " over 20 times, seed drift " + num(100.0 * drift) +
                "%"};
}

// 9. trapezoid layer decays at second order, the shooter's T* at fourth
result crit_9() {
    const double exact = std::sin(1.0);
    std::vector<double> trap_err;
    for (int M : {128, 256, 512, 1024}) {
        const radial_grid grid = graded_grid(M, 1.0);
        std::vector<double> f(grid.r.size());
        for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::cos(grid.r[i]);
        trap_err.push_back(std::fabs(cumulative_integral(grid, f).back() - exact));
    }
    bool trap_ok = true;
    std::string detail = "trapezoid ratios";
    for (std::size_t i = 0; i + 1 < trap_err.size(); ++i) {
        const double ratio = trap_err[i] / trap_err[i + 1];
        trap_ok = trap_ok && ratio >= 3.5 && ratio <= 4.5;
        detail += " " + num(ratio);
    }

    const model m = r1_model();
    const auto k = compute_constants(std::get<power_monomial>(m.op), m.gap, 2.0, 1.0);
    std::vector<double> tstar;
    for (double dt : {0.032, 0.016, 0.008, 0.004}) {
        shooter_config cfg;
        cfg.T = 18.0;
        cfg.t_floor = -200.0;
        cfg.dt = dt;
        tstar.push_back(shoot_backward(k, m.gap, m.src, cfg).t_star);
    }
    const double ref = tstar[3] + (tstar[3] - tstar[2]) / 15.0;
    const double e0 = std::fabs(tstar[0] - ref);
    const double e1 = std::fabs(tstar[1] - ref);
    const double e2 = std::fabs(tstar[2] - ref);
    const double r01 = e0 / e1, r12 = e1 / e2;
    const bool shoot_ok = r01 > 8.0 && r01 < 40.0 && r12 > 8.0 && r12 < 40.0;
    detail += ", shooter ratios " + num(r01) + " " + num(r12);

    return {trap_ok && shoot_ok, detail};
}

} // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i)
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);

    result (*const table[])() = {crit_1, crit_2, crit_3, crit_4, crit_5,
                                 crit_6, crit_7, crit_8, crit_9};
    bool all = true;
    for (int n = 1; n <= 9; ++n) {
        if (only != 0 && n != only) continue;
        result r;
        try {
            r = table[n - 1]();
        } catch (const std::exception& e) {
            r = {false, std::string("exception: ") + e.what()};
        }
        std::printf("criterion %d: %s  %s\n", n, r.pass ? "PASS" : "FAIL", r.detail.c_str());
        all = all && r.pass;
    }
    return all ? 0 : 1;
}
