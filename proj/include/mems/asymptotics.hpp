// Touchdown asymptotics for the power-monomial operator.
//
// Near r = 0 the touchdown solution follows the one-term law
//
//     u*(r) = 1 - Cc(lambda*) r^(theta sigma (1-q)),
//
// whose constants come from the model data alone:
//
//     theta = gamma + 2 + beta - alpha
//     sigma = 1 / ((1-q)(beta+1) + 1)
//     kappa = [A/(theta sigma)]^((beta+1) sigma) [C/(gamma+1-theta sigma)]^sigma
//     Cc(lambda*) = kappa^(1-q) (lambda*)^(sigma(1-q)) / (A (1-q))
//
// compute_constants builds the pack, expansion_eval evaluates the law, and
// fit_asymptotics recovers (exponent, coefficient) from a computed profile by
// a least-squares line in log-log coordinates.

#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "mems/model.hpp"
#include "mems/solver.hpp"

namespace mems {

struct asymptotic_constants {
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    double C = 0.0;
    double A = 0.0;
    double q = 0.0;

    double theta = 0.0;
    double sigma = 0.0;
    double kappa = 0.0;
    double exponent = 0.0;

    double coef(double lambda_star) const {
        return std::pow(kappa, 1.0 - q) * std::pow(lambda_star, sigma * (1.0 - q)) /
               (A * (1.0 - q));
    }
};

inline asymptotic_constants compute_constants(const power_monomial& op,
                                              const gap_function& gap,
                                              double gamma, double C) {
    if (!(op.beta > -1.0) || !(op.alpha > op.beta + 1.0) || !(gamma >= op.alpha))
        throw std::domain_error(
            "compute_constants: requires beta > -1, alpha > beta+1, gamma >= alpha");
    if (!(C > 0.0))
        throw std::domain_error("compute_constants: C must be positive");

    const double A = gap.A();
    const double q = gap.q();
    if (!(A > 0.0) || !(q > 0.0) || !(q < 1.0))
        throw std::domain_error("compute_constants: gap must supply A > 0, q in (0,1)");

    asymptotic_constants k;
    k.alpha = op.alpha;
    k.beta = op.beta;
    k.gamma = gamma;
    k.C = C;
    k.A = A;
    k.q = q;
    k.theta = gamma + 2.0 + op.beta - op.alpha;
    k.sigma = 1.0 / ((1.0 - q) * (op.beta + 1.0) + 1.0);

    const double margin = gamma + 1.0 - k.theta * k.sigma;
    if (!(margin > 0.0))
        throw std::domain_error("compute_constants: gamma + 1 - theta*sigma must be positive");

    k.kappa = std::pow(A / (k.theta * k.sigma), (op.beta + 1.0) * k.sigma) *
              std::pow(C / margin, k.sigma);
    k.exponent = k.theta * k.sigma * (1.0 - q);
    return k;
}

inline double expansion_eval(const asymptotic_constants& k, double lambda_star, double r) {
    if (!(r > 0.0) || !(r <= 1.0))
        throw std::domain_error("expansion_eval: r must lie in (0,1]");
    if (!(lambda_star > 0.0))
        throw std::domain_error("expansion_eval: lambda_star must be positive");
    return 1.0 - k.coef(lambda_star) * std::pow(r, k.exponent);
}

struct asymptotic_fit {
    double exponent_hat = 0.0;
    double coef_hat = 0.0;
    double r2 = 0.0;
    int nodes_used = 0;
};

// Least-squares line through (log r, log(1-u)) restricted to the window.
// Nodes with u >= 1 cannot enter the log and are dropped; fewer than eight
// survivors is an error rather than a silent bad fit.
inline asymptotic_fit fit_asymptotics(const solution_grid& sol,
                                      double r_lo = 1e-4, double r_hi = 1e-2) {
    if (!(r_lo > 0.0) || !(r_hi > r_lo))
        throw std::domain_error("fit_asymptotics: window must satisfy 0 < r_lo < r_hi");

    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < sol.grid.r.size(); ++i) {
        const double r = sol.grid.r[i];
        if (r < r_lo || r > r_hi) continue;
        const double gap = 1.0 - sol.u[i];
        if (!(gap > 0.0)) continue;
        xs.push_back(std::log(r));
        ys.push_back(std::log(gap));
    }
    if (xs.size() < 8)
        throw std::domain_error("fit_asymptotics: fewer than 8 usable nodes in window");

    const double n = static_cast<double>(xs.size());
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx, dy = ys[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (!(sxx > 0.0))
        throw std::domain_error("fit_asymptotics: degenerate abscissae");

    asymptotic_fit fit;
    fit.nodes_used = static_cast<int>(xs.size());
    const double slope = sxy / sxx;
    fit.exponent_hat = slope;
    fit.coef_hat = std::exp(my - slope * mx);

    double ss_res = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double e = ys[i] - (my + slope * (xs[i] - mx));
        ss_res += e * e;
    }
    fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 0.0;
    return fit;
}

}  // namespace mems
