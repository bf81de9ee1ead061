#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "mems/asymptotics.hpp"

using namespace mems;

namespace {

asymptotic_constants r1_constants() {
    return compute_constants(power_monomial{2.0, 0.0}, gap_function(mems_power{2.0}),
                             2.0, 1.0);
}

gap_function unit_gap(double A, double q) {
    return gap_function(custom_gap{[](double u) { return (1.0 - u) * (1.0 - u); },
                                   [](double u) { return -2.0 * (1.0 - u); }, A, q});
}

}  // namespace

TEST_CASE("radial Laplacian constants") {
    auto k = r1_constants();
    CHECK(k.theta == Catch::Approx(2.0).margin(1e-15));
    CHECK(k.sigma == Catch::Approx(2.0 / 3.0).margin(1e-15));
    CHECK(k.exponent == Catch::Approx(2.0 / 3.0).margin(1e-15));
    CHECK(k.kappa == Catch::Approx(std::pow(0.9, 2.0 / 3.0)).epsilon(1e-14));
    CHECK(k.kappa == Catch::Approx(0.932170).epsilon(1e-5));
    CHECK(k.A == 2.0);
    CHECK(k.q == 0.5);
}

TEST_CASE("theta matches the operator family tables") {
    // p-Laplacian in dimension N: alpha = gamma = N-1, beta = p-2, theta = p.
    // The hypotheses need alpha > beta+1, i.e. N > p.
    for (double N : {3.0, 4.0}) {
        for (double p : {2.0, 2.5, 3.0}) {
            if (p >= N) continue;
            auto k = compute_constants(power_monomial{N - 1.0, p - 2.0},
                                       gap_function(mems_power{2.0}), N - 1.0, 1.0);
            CHECK(k.theta == Catch::Approx(p).margin(1e-14));
        }
    }
    // k-Hessian: alpha = N-k, beta = k-1, gamma = N-1, theta = 2k.
    auto kh = compute_constants(power_monomial{3.0, 1.0}, gap_function(mems_power{3.0}),
                                4.0, 1.0);
    CHECK(kh.theta == Catch::Approx(4.0).margin(1e-14));
}

TEST_CASE("constants satisfy the defining identities") {
    const struct {
        power_monomial op;
        double p, gamma, C;
    } cases[] = {
        {{2.0, 0.0}, 2.0, 2.0, 1.0},
        {{3.0, 1.0}, 3.0, 4.0, 1.0},
        {{2.0, 0.5}, 2.5, 3.0, 0.7},
        {{4.0, 1.5}, 2.0, 4.0, 2.0},
    };
    for (const auto& c : cases) {
        auto k = compute_constants(c.op, gap_function(mems_power{c.p}), c.gamma, c.C);

        double lhs = k.theta * k.sigma * k.q + k.theta * (1.0 - k.sigma) / (k.beta + 1.0);
        CHECK(lhs == Catch::Approx(k.theta * k.sigma).margin(1e-12));

        double margin = k.gamma + 1.0 - k.theta * k.sigma;
        double lhs2 = k.A * std::pow(k.kappa, k.q) *
                      std::pow(k.C / (k.kappa * margin), 1.0 / (1.0 + k.beta));
        CHECK(lhs2 == Catch::Approx(k.theta * k.sigma * k.kappa).epsilon(1e-12));
    }
}

TEST_CASE("exponent decreases in q at fixed operator") {
    double prev = std::numeric_limits<double>::infinity();
    for (double q : {0.1, 0.25, 0.4, 0.55, 0.7, 0.85}) {
        auto k = compute_constants(power_monomial{2.0, 0.0}, unit_gap(2.0, q), 2.0, 1.0);
        CHECK(k.exponent < prev);
        prev = k.exponent;
    }
}

TEST_CASE("compute_constants rejects out-of-range data") {
    gap_function g(mems_power{2.0});
    CHECK_THROWS_AS(compute_constants(power_monomial{1.0, 0.5}, g, 2.0, 1.0),
                    std::domain_error);  // alpha <= beta+1
    CHECK_THROWS_AS(compute_constants(power_monomial{2.0, 0.0}, g, 1.5, 1.0),
                    std::domain_error);  // gamma < alpha
    CHECK_THROWS_AS(compute_constants(power_monomial{2.0, -1.0}, g, 2.0, 1.0),
                    std::domain_error);  // beta <= -1
    CHECK_THROWS_AS(compute_constants(power_monomial{2.0, 0.0}, g, 2.0, 0.0),
                    std::domain_error);  // C = 0
    CHECK_THROWS_AS(compute_constants(power_monomial{2.0, 0.0}, unit_gap(2.0, 1.3), 2.0, 1.0),
                    std::domain_error);  // q outside (0,1)
}

TEST_CASE("expansion evaluation") {
    auto k = r1_constants();

    SECTION("coefficient formula") {
        CHECK(k.coef(1.0) == Catch::Approx(std::sqrt(k.kappa)).epsilon(1e-14));
        CHECK(k.coef(1.0) == Catch::Approx(0.96549).epsilon(1e-4));
        // at lambda* = 10/9 the kappa powers cancel exactly
        CHECK(k.coef(10.0 / 9.0) == Catch::Approx(1.0).epsilon(1e-14));
    }
    SECTION("profile values") {
        CHECK(expansion_eval(k, 1.0, 1e-3) == Catch::Approx(0.990345).margin(1e-6));
        CHECK(expansion_eval(k, 10.0 / 9.0, 1.0) == Catch::Approx(0.0).margin(1e-14));
        CHECK(expansion_eval(k, 1.0, 1e-12) > 1.0 - 1e-7);
    }
    SECTION("domain guards") {
        CHECK_THROWS_AS(expansion_eval(k, 1.0, 0.0), std::domain_error);
        CHECK_THROWS_AS(expansion_eval(k, 1.0, 1.5), std::domain_error);
        CHECK_THROWS_AS(expansion_eval(k, -1.0, 0.5), std::domain_error);
    }
}

TEST_CASE("fit recovers an exact power law") {
    radial_grid grid = graded_grid(2048, 2.0);
    solution_grid sol;
    sol.grid = grid;
    sol.lambda = 1.0;
    sol.u.resize(grid.r.size());
    for (std::size_t i = 0; i < grid.r.size(); ++i)
        sol.u[i] = 1.0 - 0.9 * std::pow(grid.r[i], 2.0 / 3.0);

    auto fit = fit_asymptotics(sol);
    CHECK(fit.exponent_hat == Catch::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(fit.coef_hat == Catch::Approx(0.9).epsilon(1e-12));
    CHECK(fit.r2 == Catch::Approx(1.0).margin(1e-12));
    CHECK(fit.nodes_used >= 8);
}

TEST_CASE("fit flags degenerate inputs") {
    radial_grid grid = graded_grid(2048, 2.0);
    solution_grid sol;
    sol.grid = grid;
    sol.lambda = 0.5;
    sol.u.assign(grid.r.size(), 0.5);

    SECTION("constant profile has no power-law signal") {
        auto fit = fit_asymptotics(sol);
        CHECK(std::abs(fit.exponent_hat) < 1e-12);
        CHECK(fit.r2 == 0.0);
    }
    SECTION("too few nodes in the window") {
        CHECK_THROWS_AS(fit_asymptotics(sol, 0.9e-4, 1.0e-4), std::domain_error);
    }
    SECTION("saturated nodes are excluded") {
        solution_grid hot = sol;
        hot.u.assign(grid.r.size(), 1.0);
        CHECK_THROWS_AS(fit_asymptotics(hot), std::domain_error);
    }
    SECTION("bad window") {
        CHECK_THROWS_AS(fit_asymptotics(sol, 1e-2, 1e-4), std::domain_error);
    }
}
