#pragma once

// shared plumbing for the test suites: repo config access and random
// in-envelope state generation.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "spinrl/aero.hpp"
#include "spinrl/aircraft.hpp"
#include "spinrl/config.hpp"
#include "spinrl/dynamics.hpp"
#include "spinrl/env.hpp"
#include "spinrl/rng.hpp"

#include "oracles.hpp"

namespace support {

inline std::string config_dir() {
#ifdef SPINRL_CONFIG_DIR
    return SPINRL_CONFIG_DIR;
#else
    return "configs";
#endif
}

inline nlohmann::json load_json(const std::string& name) {
    const std::string path = config_dir() + "/" + name;
    return spinrl::parse_json(spinrl::read_file(path), path);
}

inline spinrl::AircraftParams default_aircraft() {
    return spinrl::load_aircraft_params(load_json("aircraft.json"));
}

inline spinrl::AeroModel default_aero() {
    return spinrl::AeroModel(spinrl::load_aero_config(load_json("aero.json")));
}

inline oracle::PlaneConstants plane_constants(const spinrl::AircraftParams& p) {
    return {p.m, p.S, p.b, p.c_bar, p.Ix, p.Iy, p.Iz, p.Tm, p.g};
}

// a random state drawn well inside the flight envelope (away from the
// trig guards)
inline spinrl::AircraftState random_state(spinrl::Rng& rng) {
    spinrl::AircraftState x;
    x.V = rng.uniform(80.0, 900.0);
    x.alpha = rng.uniform(-0.2, 1.4);
    x.beta = rng.uniform(-1.2, 1.2);
    x.p = rng.uniform(-6.0, 6.0);
    x.q = rng.uniform(-6.0, 6.0);
    x.r = rng.uniform(-6.0, 6.0);
    x.mu = rng.uniform(-3.0, 3.0);
    x.gamma = rng.uniform(-1.4, 1.4);
    x.phi = rng.uniform(-3.0, 3.0);
    x.theta = rng.uniform(-1.4, 1.4);
    x.psi = rng.uniform(-3.0, 3.0);
    x.h = rng.uniform(500.0, 40000.0);
    x.chi = rng.uniform(-3.0, 3.0);
    return x;
}

inline spinrl::ControlInput random_controls(spinrl::Rng& rng) {
    spinrl::ControlInput u;
    u.delta_e = rng.uniform(-0.436, 0.175);
    u.delta_a = rng.uniform(-0.436, 0.436);
    u.delta_r = rng.uniform(-0.524, 0.524);
    u.eta = rng.uniform(0.0, 1.0);
    return u;
}

inline std::array<double, 13> to_array(const spinrl::AircraftState& x) {
    std::array<double, 13> a{};
    auto v = x.ode_vector();
    for (int i = 0; i < 13; ++i) a[i] = v[i];
    return a;
}

}  // namespace support
