#pragma once

#include <stdexcept>
#include <string>

namespace mems {

struct evaluation_overflow : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct root_find_failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct quadrature_failure : std::runtime_error {
    double achieved = 0.0;
    quadrature_failure(const std::string& what, double achieved_tol)
        : std::runtime_error(what + " (achieved tolerance " + std::to_string(achieved_tol) + ")"),
          achieved(achieved_tol) {}
};

struct gap_floor_breached : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct not_a_supersolution : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct rho_not_below_one : std::runtime_error {
    double rho = 0.0;
    explicit rho_not_below_one(double rho_value)
        : std::runtime_error("supersolution construction: rho = " + std::to_string(rho_value) + " >= 1"),
          rho(rho_value) {}
};

struct inconsistent_bracket : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct seed_tail_violation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct no_zero_crossing : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct integration_integrity : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct xi_membership_violation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct coverage_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct config_parse_error : std::runtime_error {
    int line = 0;
    config_parse_error(const std::string& what, int line_number)
        : std::runtime_error(what + " (line " + std::to_string(line_number) + ")"),
          line(line_number) {}
};

} // namespace mems
