#pragma once

#include <string>

#include <json.hpp>

#include "spinrl/atmosphere.hpp"
#include "spinrl/common.hpp"

namespace spinrl {

// rigid-body and geometry constants. US customary units throughout
// (slug, ft, lbf, rad).
struct AircraftParams {
    double m = 0.0;      // mass, slug
    double S = 0.0;      // wing reference area, ft^2
    double b = 0.0;      // wing span, ft
    double c_bar = 0.0;  // mean aerodynamic chord, ft
    double Ix = 0.0;     // roll inertia, slug ft^2
    double Iy = 0.0;     // pitch inertia, slug ft^2
    double Iz = 0.0;     // yaw inertia, slug ft^2
    double Tm = 0.0;     // maximum thrust, lbf
    double g = 32.174;   // gravity, ft/s^2

    Atmosphere atmosphere;

    void validate() const {
        auto pos = [](double v, const char* name) {
            if (!(v > 0.0))
                throw ConfigError(std::string("aircraft: ") + name + " must be > 0");
        };
        pos(m, "mass_slug");
        pos(S, "wing_area_ft2");
        pos(b, "span_ft");
        pos(c_bar, "chord_ft");
        pos(Ix, "Ix");
        pos(Iy, "Iy");
        pos(Iz, "Iz");
        pos(Tm, "Tm_lbf");
        pos(g, "gravity_ftps2");
        pos(atmosphere.rho0, "rho0");
    }
};

inline AircraftParams load_aircraft_params(const nlohmann::json& j) {
    AircraftParams p;
    try {
        p.m = j.at("mass_slug").get<double>();
        p.S = j.at("wing_area_ft2").get<double>();
        p.b = j.at("span_ft").get<double>();
        p.c_bar = j.at("chord_ft").get<double>();
        p.Ix = j.at("Ix").get<double>();
        p.Iy = j.at("Iy").get<double>();
        p.Iz = j.at("Iz").get<double>();
        p.Tm = j.at("Tm_lbf").get<double>();
        p.g = j.value("gravity_ftps2", 32.174);
        p.atmosphere.mode = Atmosphere::parse_mode(j.value("atmosphere", std::string("constant")));
        p.atmosphere.rho0 = j.value("rho0", 0.002377);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("aircraft: ") + e.what());
    }
    p.validate();
    return p;
}

inline nlohmann::json save_aircraft_params(const AircraftParams& p) {
    return nlohmann::json{
        {"mass_slug", p.m},
        {"wing_area_ft2", p.S},
        {"span_ft", p.b},
        {"chord_ft", p.c_bar},
        {"Ix", p.Ix},
        {"Iy", p.Iy},
        {"Iz", p.Iz},
        {"Tm_lbf", p.Tm},
        {"gravity_ftps2", p.g},
        {"atmosphere", Atmosphere::mode_name(p.atmosphere.mode)},
        {"rho0", p.atmosphere.rho0},
    };
}

}  // namespace spinrl
