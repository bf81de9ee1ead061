// Flat sectioned key=value configuration files:
//
//   [model]
//   operator = power_monomial        # monomial_sum | variable_exponent | sphere_cap
//   alpha = 2
//   beta = 0
//   gap = mems
//   p = 2
//   source = weighted_power
//   gamma = 2
//   C = 1
//
//   [numerics]
//   M = 2048
//   grading = 2
//   tol_fix = 1e-10
//   tol_res = 1e-6
//   dt = 1e-3
//   T_auto = true
//
//   [output]
//   dir = out
//   svg = false
//
// Operator-specific keys: terms (monomial_sum, "a:b,a:b,..."), N and eps and
// p_const or p_lo/p_hi (variable_exponent, linear profile between the two),
// N and rho (sphere_cap). Unknown sections or keys are errors with the line
// number, as are missing required keys.

#pragma once

#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mems/errors.hpp"
#include "mems/model.hpp"
#include "mems/solver.hpp"

namespace mems {

struct model_spec {
    std::string op_kind = "power_monomial";
    double alpha = 0.0;
    double beta = 0.0;
    std::vector<std::pair<double, double>> terms;
    double N = 2.0;
    double eps = 0.1;
    bool p_linear = false;
    double p_const = 2.0;
    double p_lo = 0.0;
    double p_hi = 0.0;
    double rho = 1.0;

    std::string gap_kind = "mems";
    double p = 2.0;

    std::string source_kind = "weighted_power";
    double gamma = 0.0;
    double C = 1.0;
};

struct numerics_spec {
    int M = 2048;
    double grading = 2.0;
    double tol_fix = 1e-10;
    double tol_res = 1e-6;
    double dt = 1e-3;
    bool T_auto = true;
    double T = 0.0;
    int max_iter = 10000;
};

struct output_spec {
    std::string dir = "out";
    bool svg = false;
};

struct run_config {
    model_spec mdl;
    numerics_spec num;
    output_spec out;

    phi_operator build_operator() const {
        if (mdl.op_kind == "power_monomial") return power_monomial{mdl.alpha, mdl.beta};
        if (mdl.op_kind == "monomial_sum") return monomial_sum{mdl.terms};
        if (mdl.op_kind == "variable_exponent") {
            const double lo = mdl.p_linear ? mdl.p_lo : mdl.p_const;
            const double hi = mdl.p_linear ? mdl.p_hi : mdl.p_const;
            return variable_exponent{mdl.N, [lo, hi](double r) { return lo + (hi - lo) * r; },
                                     mdl.eps};
        }
        return sphere_cap{static_cast<int>(mdl.N), mdl.rho};
    }

    model build_model() const {
        return model{build_operator(), gap_function(mems_power{mdl.p}),
                     source_profile(weighted_power{mdl.gamma, nullptr, mdl.C})};
    }

    solver_params solver() const {
        solver_params prm;
        prm.tol_fix = num.tol_fix;
        prm.tol_res = num.tol_res;
        prm.max_iter = num.max_iter;
        return prm;
    }

    radial_grid grid() const { return graded_grid(num.M, num.grading); }
};

namespace detail {

struct config_entry {
    std::string value;
    int line = 0;
    mutable bool used = false;
};

using config_sections = std::map<std::string, std::map<std::string, config_entry>>;

inline config_sections parse_sections(std::istream& in) {
    config_sections sections;
    std::string raw, section;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string s = raw;
        const auto a = s.find_first_not_of(" \t\r");
        if (a == std::string::npos) continue;
        const auto b = s.find_last_not_of(" \t\r");
        s = s.substr(a, b - a + 1);
        if (s.empty() || s[0] == '#' || s[0] == ';') continue;
        if (s.front() == '[') {
            if (s.back() != ']')
                throw config_parse_error("unterminated section header", line);
            section = s.substr(1, s.size() - 2);
            if (section != "model" && section != "numerics" && section != "output")
                throw config_parse_error("unknown section [" + section + "]", line);
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw config_parse_error("expected key = value", line);
        if (section.empty())
            throw config_parse_error("key outside any section", line);
        std::string key = s.substr(0, eq);
        std::string val = s.substr(eq + 1);
        const auto ka = key.find_last_not_of(" \t");
        key = key.substr(0, ka == std::string::npos ? 0 : ka + 1);
        const auto va = val.find_first_not_of(" \t");
        val = va == std::string::npos ? "" : val.substr(va);
        if (key.empty()) throw config_parse_error("empty key", line);
        if (sections[section].count(key))
            throw config_parse_error("duplicate key '" + key + "'", line);
        sections[section][key] = {val, line, false};
    }
    return sections;
}

inline double to_double(const config_entry& e, const std::string& key) {
    char* end = nullptr;
    const double v = std::strtod(e.value.c_str(), &end);
    if (end == e.value.c_str() || *end != '\0')
        throw config_parse_error("value of '" + key + "' is not a number", e.line);
    return v;
}

inline bool to_bool(const config_entry& e, const std::string& key) {
    if (e.value == "true" || e.value == "1") return true;
    if (e.value == "false" || e.value == "0") return false;
    throw config_parse_error("value of '" + key + "' is not a boolean", e.line);
}

inline std::vector<std::pair<double, double>> to_terms(const config_entry& e,
                                                       const std::string& key) {
    std::vector<std::pair<double, double>> terms;
    std::stringstream ss(e.value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos)
            throw config_parse_error("term '" + item + "' in '" + key +
                                     "' must be alpha:beta", e.line);
        try {
            terms.emplace_back(std::stod(item.substr(0, colon)),
                               std::stod(item.substr(colon + 1)));
        } catch (const std::exception&) {
            throw config_parse_error("term '" + item + "' in '" + key +
                                     "' is not numeric", e.line);
        }
    }
    if (terms.empty())
        throw config_parse_error("'" + key + "' needs at least one alpha:beta term", e.line);
    return terms;
}

class section_reader {
public:
    section_reader(const config_sections& all, std::string name) : name_(std::move(name)) {
        const auto it = all.find(name_);
        if (it != all.end()) entries_ = &it->second;
    }

    const config_entry* find(const std::string& key) const {
        if (!entries_) return nullptr;
        const auto it = entries_->find(key);
        if (it == entries_->end()) return nullptr;
        it->second.used = true;
        return &it->second;
    }

    double number(const std::string& key, double fallback) const {
        const auto* e = find(key);
        return e ? to_double(*e, key) : fallback;
    }

    double required_number(const std::string& key) const {
        const auto* e = find(key);
        if (!e)
            throw config_parse_error("[" + name_ + "] is missing required key '" + key + "'", 0);
        return to_double(*e, key);
    }

    bool boolean(const std::string& key, bool fallback) const {
        const auto* e = find(key);
        return e ? to_bool(*e, key) : fallback;
    }

    std::string text(const std::string& key, const std::string& fallback) const {
        const auto* e = find(key);
        return e ? e->value : fallback;
    }

    void reject_unused() const {
        if (!entries_) return;
        for (const auto& [key, entry] : *entries_)
            if (!entry.used)
                throw config_parse_error("unknown key '" + key + "' in [" + name_ + "]",
                                         entry.line);
    }

private:
    std::string name_;
    const std::map<std::string, config_entry>* entries_ = nullptr;
};

} // namespace detail

inline run_config load_config(std::istream& in) {
    const detail::config_sections sections = detail::parse_sections(in);
    const detail::section_reader model_s(sections, "model");
    const detail::section_reader num_s(sections, "numerics");
    const detail::section_reader out_s(sections, "output");

    run_config cfg;
    auto& m = cfg.mdl;
    m.op_kind = model_s.text("operator", "power_monomial");
    if (m.op_kind == "power_monomial") {
        m.alpha = model_s.required_number("alpha");
        m.beta = model_s.required_number("beta");
    } else if (m.op_kind == "monomial_sum") {
        const auto* e = model_s.find("terms");
        if (!e) throw config_parse_error("[model] is missing required key 'terms'", 0);
        m.terms = detail::to_terms(*e, "terms");
    } else if (m.op_kind == "variable_exponent") {
        m.N = model_s.required_number("N");
        m.eps = model_s.number("eps", 0.1);
        const auto* pc = model_s.find("p_const");
        const auto* plo = model_s.find("p_lo");
        const auto* phi = model_s.find("p_hi");
        if (pc && (plo || phi))
            throw config_parse_error("give either p_const or p_lo/p_hi, not both", pc->line);
        if (pc) {
            m.p_linear = false;
            m.p_const = detail::to_double(*pc, "p_const");
        } else if (plo && phi) {
            m.p_linear = true;
            m.p_lo = detail::to_double(*plo, "p_lo");
            m.p_hi = detail::to_double(*phi, "p_hi");
        } else {
            throw config_parse_error("[model] needs p_const or both p_lo and p_hi", 0);
        }
    } else if (m.op_kind == "sphere_cap") {
        m.N = model_s.required_number("N");
        m.rho = model_s.required_number("rho");
    } else {
        throw config_parse_error("unknown operator '" + m.op_kind + "'",
                                 model_s.find("operator") ? model_s.find("operator")->line : 0);
    }

    m.gap_kind = model_s.text("gap", "mems");
    if (m.gap_kind != "mems")
        throw config_parse_error("unknown gap '" + m.gap_kind + "'",
                                 model_s.find("gap") ? model_s.find("gap")->line : 0);
    m.p = model_s.number("p", 2.0);

    m.source_kind = model_s.text("source", "weighted_power");
    if (m.source_kind != "weighted_power")
        throw config_parse_error("unknown source '" + m.source_kind + "'",
                                 model_s.find("source") ? model_s.find("source")->line : 0);
    m.gamma = model_s.required_number("gamma");
    m.C = model_s.number("C", 1.0);

    auto& n = cfg.num;
    n.M = static_cast<int>(num_s.number("M", 2048));
    n.grading = num_s.number("grading", 2.0);
    n.tol_fix = num_s.number("tol_fix", 1e-10);
    n.tol_res = num_s.number("tol_res", 1e-6);
    n.dt = num_s.number("dt", 1e-3);
    n.T_auto = num_s.boolean("T_auto", true);
    n.T = num_s.number("T", 0.0);
    n.max_iter = static_cast<int>(num_s.number("max_iter", 10000));

    cfg.out.dir = out_s.text("dir", "out");
    cfg.out.svg = out_s.boolean("svg", false);

    model_s.reject_unused();
    num_s.reject_unused();
    out_s.reject_unused();
    return cfg;
}

inline run_config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_parse_error("cannot open config file '" + path + "'", 0);
    return load_config(in);
}

} // namespace mems
