#pragma once

#include <cmath>
#include <string>

#include "spinrl/common.hpp"

namespace spinrl {

// air density model. "constant" ignores altitude; "standard" is an
// exponential approximation of the standard atmosphere anchored at rho0,
// density scale height 30500 ft.
struct Atmosphere {
    enum class Mode { Constant, Standard };

    Mode mode = Mode::Constant;
    double rho0 = 0.002377;  // sea-level density, slug/ft^3

    static constexpr double kScaleHeightFt = 30500.0;

    double air_density(double h) const {
        if (mode == Mode::Constant) return rho0;
        return rho0 * std::exp(-h / kScaleHeightFt);
    }

    static Mode parse_mode(const std::string& s) {
        if (s == "constant") return Mode::Constant;
        if (s == "standard") return Mode::Standard;
        throw ConfigError("atmosphere: unknown mode '" + s + "' (want constant|standard)");
    }

    static std::string mode_name(Mode m) {
        return m == Mode::Constant ? "constant" : "standard";
    }
};

}  // namespace spinrl
