#pragma once

#include <array>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "spinrl/aircraft.hpp"
#include "spinrl/common.hpp"

namespace spinrl {

// the six dimensionless aerodynamic coefficients
struct CoefficientSet {
    double CD = 0.0;
    double CL = 0.0;
    double CY = 0.0;
    double Cl = 0.0;
    double Cm = 0.0;
    double Cn = 0.0;
};

// rates nondimensionalized by the standard convention
struct NondimensionalRates {
    double p_hat;  // p*b/(2V)
    double q_hat;  // q*c_bar/(2V)
    double r_hat;  // r*b/(2V)
};

namespace aero_detail {

enum Var { kAlpha = 0, kBeta, kP, kQ, kR, kDe, kDa, kDr, kNumVars };

inline const std::array<std::string, kNumVars>& var_names() {
    static const std::array<std::string, kNumVars> n = {
        "alpha", "beta", "p", "q", "r", "de", "da", "dr"};
    return n;
}

inline int var_index(const std::string& name) {
    const auto& n = var_names();
    for (int i = 0; i < kNumVars; ++i)
        if (n[i] == name) return i;
    return -1;
}

enum Coef { kCD = 0, kCL, kCY, kCl, kCm, kCn, kNumCoefs };

inline const std::array<std::string, kNumCoefs>& coef_names() {
    static const std::array<std::string, kNumCoefs> n = {"CD", "CL", "CY",
                                                         "Cl", "Cm", "Cn"};
    return n;
}

// argument lists exactly as the coefficient functional signatures allow:
// longitudinal coefficients read (alpha, q, de), lateral-directional read
// (alpha, beta, p, r, de, da, dr).
inline const std::array<std::array<bool, kNumVars>, kNumCoefs>& allowed() {
    static const std::array<std::array<bool, kNumVars>, kNumCoefs> a = {{
        // alpha  beta   p      q      r      de     da     dr
        {true, false, false, true, false, true, false, false},  // CD
        {true, false, false, true, false, true, false, false},  // CL
        {true, true, true, false, true, true, true, true},      // CY
        {true, true, true, false, true, true, true, true},      // Cl
        {true, false, false, true, false, true, false, false},  // Cm
        {true, true, true, false, true, true, true, true},      // Cn
    }};
    return a;
}

}  // namespace aero_detail

// one polynomial term: product of integer powers of the allowed variables,
// times a constant. nondim selects whether rate variables enter as raw rad/s
// or as p_hat/q_hat/r_hat.
struct AeroTerm {
    std::map<std::string, int> vars;  // variable name -> exponent
    double coef = 0.0;
    bool nondim = true;
};

struct AeroModelConfig {
    std::array<std::vector<AeroTerm>, aero_detail::kNumCoefs> terms;
};

inline AeroModelConfig load_aero_config(const nlohmann::json& j) {
    using namespace aero_detail;
    AeroModelConfig cfg;
    for (int c = 0; c < kNumCoefs; ++c) {
        const std::string& cname = coef_names()[c];
        if (!j.contains(cname)) continue;  // absent coefficient = identically zero
        const auto& arr = j.at(cname);
        if (!arr.is_array())
            throw ConfigError("aero: " + cname + " must be an array of terms");
        int ti = 0;
        for (const auto& jt : arr) {
            AeroTerm term;
            const std::string where = cname + "[" + std::to_string(ti++) + "]";
            if (!jt.is_object() || !jt.contains("coef"))
                throw ConfigError("aero: " + where + ": term needs a coef field");
            if (!jt.at("coef").is_number())
                throw ConfigError("aero: " + where + ": coef must be a number");
            term.coef = jt.at("coef").get<double>();
            if (!std::isfinite(term.coef))
                throw ConfigError("aero: " + where + ": coef is not finite");
            term.nondim = jt.value("nondim", true);
            const nlohmann::json vars = jt.value("vars", nlohmann::json::object());
            for (const auto& [vname, vexp] : vars.items()) {
                int vi = var_index(vname);
                if (vi < 0)
                    throw ConfigError("aero: " + where + ": unknown variable '" + vname + "'");
                if (!allowed()[c][vi])
                    throw ConfigError("aero: " + where + ": " + cname +
                                      " may not depend on '" + vname + "'");
                if (!vexp.is_number_integer() || vexp.get<int>() < 1)
                    throw ConfigError("aero: " + where + ": exponent of '" + vname +
                                      "' must be a positive integer");
                term.vars[vname] = vexp.get<int>();
            }
            cfg.terms[c].push_back(std::move(term));
        }
    }
    return cfg;
}

inline nlohmann::json save_aero_config(const AeroModelConfig& cfg) {
    using namespace aero_detail;
    nlohmann::json j = nlohmann::json::object();
    for (int c = 0; c < kNumCoefs; ++c) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& t : cfg.terms[c]) {
            nlohmann::json v = nlohmann::json::object();
            for (const auto& [name, exp] : t.vars) v[name] = exp;
            arr.push_back({{"vars", v}, {"coef", t.coef}, {"nondim", t.nondim}});
        }
        j[coef_names()[c]] = arr;
    }
    return j;
}

class AeroModel {
public:
    AeroModel() = default;
    explicit AeroModel(AeroModelConfig cfg) : cfg_(std::move(cfg)) { compile(); }

    const AeroModelConfig& config() const { return cfg_; }

    CoefficientSet evaluate(double alpha, double beta, double p, double q, double r,
                            double V, double delta_e, double delta_a, double delta_r,
                            const AircraftParams& params) const {
        using namespace aero_detail;
        NondimensionalRates nd{p * params.b / (2.0 * V), q * params.c_bar / (2.0 * V),
                               r * params.b / (2.0 * V)};
        std::array<double, kNumVars> raw = {alpha, beta, p, q, r, delta_e, delta_a, delta_r};
        std::array<double, kNumVars> hat = raw;
        hat[kP] = nd.p_hat;
        hat[kQ] = nd.q_hat;
        hat[kR] = nd.r_hat;

        std::array<double, kNumCoefs> out{};
        for (int c = 0; c < kNumCoefs; ++c) {
            double total = 0.0;
            for (const auto& t : compiled_[c]) {
                const auto& vals = t.nondim ? hat : raw;
                double prod = t.coef;
                for (const auto& [vi, exp] : t.vars)
                    for (int k = 0; k < exp; ++k) prod *= vals[vi];
                total += prod;
            }
            if (!std::isfinite(total))
                throw NumericalError("aero: " + coef_names()[c] + " is not finite");
            out[c] = total;
        }
        return CoefficientSet{out[kCD], out[kCL], out[kCY], out[kCl], out[kCm], out[kCn]};
    }

private:
    struct CompiledTerm {
        std::vector<std::pair<int, int>> vars;  // (variable index, exponent)
        double coef;
        bool nondim;
    };

    void compile() {
        using namespace aero_detail;
        for (int c = 0; c < kNumCoefs; ++c) {
            compiled_[c].clear();
            for (const auto& t : cfg_.terms[c]) {
                CompiledTerm ct{{}, t.coef, t.nondim};
                for (const auto& [name, exp] : t.vars)
                    ct.vars.emplace_back(var_index(name), exp);
                compiled_[c].push_back(std::move(ct));
            }
        }
    }

    AeroModelConfig cfg_;
    std::array<std::vector<CompiledTerm>, aero_detail::kNumCoefs> compiled_;
};

}  // namespace spinrl
