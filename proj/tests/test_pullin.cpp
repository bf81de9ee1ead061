#include <catch2/catch_amalgamated.hpp>

#include <mems/pullin.hpp>

#include <cmath>

using namespace mems;

namespace {

model r1_model(double C = 1.0) {
    return model{power_monomial{2.0, 0.0}, gap_function(mems_power{2.0}),
                 source_profile(weighted_power{2.0, nullptr, C})};
}

majorant make_majorant(double d, double e) {
    majorant m;
    m.c = {1.0, 1.0};
    m.d = {d, e};
    m.a_sup = 1.0;
    m.dmax = d;
    m.emin = e;
    return m;
}

} // namespace

TEST_CASE("pde_pair") {
    const majorant m21 = make_majorant(2.0, 1.0);
    SECTION("splits max and min branches") {
        const auto [P, p] = pde_pair(m21, 4.0);
        REQUIRE(P == Catch::Approx(4.0).epsilon(1e-15));
        REQUIRE(p == Catch::Approx(2.0).epsilon(1e-15));
    }
    SECTION("degenerate exponents collapse to the identity") {
        const majorant m11 = make_majorant(1.0, 1.0);
        const auto [P, p] = pde_pair(m11, 0.37);
        REQUIRE(P == 0.37);
        REQUIRE(p == 0.37);
    }
    SECTION("fixed point at one") {
        const auto [P, p] = pde_pair(m21, 1.0);
        REQUIRE(P == 1.0);
        REQUIRE(p == 1.0);
    }
}

TEST_CASE("pde_min_inverse") {
    const majorant m21 = make_majorant(2.0, 1.0);
    SECTION("the faster branch inverts the min") {
        // p(r) = min(r^{1/2}, r) equals 2 at r = 4
        REQUIRE(pde_min_inverse(m21, 2.0) == Catch::Approx(4.0).epsilon(1e-15));
    }
    SECTION("fixed point and identity cases") {
        REQUIRE(pde_min_inverse(m21, 1.0) == 1.0);
        const majorant m11 = make_majorant(1.0, 1.0);
        REQUIRE(pde_min_inverse(m11, 0.37) == 0.37);
    }
    SECTION("round trip through pde_pair") {
        for (double r : {0.04, 0.2, 1.0, 2.5, 7.0})
            REQUIRE(pde_min_inverse(m21, pde_pair(m21, r).p) == Catch::Approx(r).epsilon(1e-12));
    }
}

TEST_CASE("upper_bound") {
    SECTION("reference model evaluates to 48") {
        const model m = r1_model();
        REQUIRE(upper_bound(m, default_majorant(m.op)) == Catch::Approx(48.0).epsilon(1e-12));
    }
    SECTION("scales linearly in g(0) when d = e = 1") {
        const model m{power_monomial{2.0, 0.0},
                      gap_function(custom_gap{
                          [](double u) { return 4.0 * (1.0 - u) * (1.0 - u); },
                          [](double u) { return -8.0 * (1.0 - u); }, 4.0, 0.5}),
                      source_profile(weighted_power{2.0, nullptr, 1.0})};
        REQUIRE(upper_bound(m, default_majorant(m.op)) == Catch::Approx(192.0).epsilon(1e-12));
    }
    SECTION("formula skeleton with every factor normalized") {
        const model m{power_monomial{0.0, 0.0}, gap_function(mems_power{2.0}),
                      source_profile(direct_source{[](double) { return 2.0; }})};
        REQUIRE(upper_bound(m, default_majorant(m.op)) == Catch::Approx(2.0).epsilon(1e-10));
    }
}

TEST_CASE("lower_bound") {
    SECTION("reference model: Phi(1) = 1/6 gives g(1/6) = 25/36") {
        REQUIRE(lower_bound(r1_model()) == Catch::Approx(25.0 / 36.0).epsilon(1e-12));
    }
    SECTION("doubled source halves Phi inverse") {
        // Phi(lambda) = lambda/3, still below one: bound g(1/3) = 4/9
        REQUIRE(lower_bound(r1_model(2.0)) == Catch::Approx(4.0 / 9.0).epsilon(1e-12));
    }
    SECTION("Phi(1) >= 1 branch agrees with a brute-force delta scan") {
        // C = 12: Phi(lambda) = 2 lambda, so the score is (delta/2)(1-delta)^2
        const model m = r1_model(12.0);
        const double found = lower_bound(m);
        double brute = 0.0;
        for (int j = 1; j < 200000; ++j) {
            const double d = j / 200000.0;
            brute = std::max(brute, d / 2.0 * (1.0 - d) * (1.0 - d));
        }
        REQUIRE(found == Catch::Approx(brute).margin(1e-6));
        REQUIRE(found == Catch::Approx(2.0 / 27.0).margin(1e-6));
    }
}

TEST_CASE("bisect_pullin") {
    const model m = r1_model();
    SECTION("degenerate width returns the analytic bounds") {
        const radial_grid g = graded_grid(64, 2.0);
        const pull_in_estimate est = bisect_pullin(m, 1e6, 1e9, g);
        REQUIRE(est.bracket_lo == est.lower);
        REQUIRE(est.bracket_hi == Catch::Approx(est.upper));
        REQUIRE(est.evaluations == 0);
    }
    SECTION("reference bracket sits strictly inside the sandwich") {
        const radial_grid g = graded_grid(512, 2.0);
        const pull_in_estimate est = bisect_pullin(m, 1e-3, 1e9, g);
        REQUIRE(est.lower == Catch::Approx(25.0 / 36.0).epsilon(1e-12));
        REQUIRE(est.upper == Catch::Approx(48.0).epsilon(1e-12));
        REQUIRE(est.bracket_hi - est.bracket_lo <= 1e-3);
        REQUIRE(est.bracket_lo > est.lower);
        REQUIRE(est.bracket_hi < est.upper);
        // regression constant recorded from the first oracle run (stable
        // against grid refinement within the requested width)
        const double mid = 0.5 * (est.bracket_lo + est.bracket_hi);
        REQUIRE(mid == Catch::Approx(1.2995).margin(0.01));
        // monotone solvability: no Exists classification above a NotExists one
        double min_not_exists = 1e300, max_exists = -1.0;
        for (const auto& cl : est.trace) {
            if (cl.status == iter_status::touchdown_detected)
                min_not_exists = std::min(min_not_exists, cl.lambda);
            else
                max_exists = std::max(max_exists, cl.lambda);
        }
        REQUIRE(max_exists < min_not_exists);
    }
}

TEST_CASE("branch_sweep") {
    const model m = r1_model();
    const radial_grid g = graded_grid(512, 2.0);
    SECTION("u0 grows with lambda on the converged prefix") {
        const auto pts = branch_sweep(m, {0.0, 0.1, 0.2}, g);
        REQUIRE(pts.size() == 3);
        for (const auto& p : pts) REQUIRE(p.status == iter_status::converged);
        REQUIRE(pts[0].u0 == 0.0);
        REQUIRE(pts[1].u0 > pts[0].u0);
        REQUIRE(pts[2].u0 > pts[1].u0);
        REQUIRE(pts[2].norm_sup == pts[2].u0);
    }
    SECTION("single point") {
        const auto pts = branch_sweep(m, {0.0}, g);
        REQUIRE(pts.size() == 1);
        REQUIRE(pts[0].u0 == 0.0);
    }
    SECTION("sweep across the threshold records touchdown rows") {
        const auto pts = branch_sweep(m, {0.5, 1.0, 2.0}, g);
        REQUIRE(pts[0].status == iter_status::converged);
        REQUIRE(pts[2].status == iter_status::touchdown_detected);
        REQUIRE(pts[2].u0 < 1.0);
        REQUIRE(pts[2].u0 >= 0.0);
    }
    SECTION("parallel evaluation is deterministic") {
        const std::vector<double> lams = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
        const auto serial = branch_sweep(m, lams, g, {}, 1);
        const auto parallel = branch_sweep(m, lams, g, {}, 4);
        for (std::size_t i = 0; i < lams.size(); ++i) {
            REQUIRE(serial[i].u0 == parallel[i].u0);
            REQUIRE(serial[i].status == parallel[i].status);
        }
    }
}
