#pragma once

#include <cmath>

#include <Eigen/Dense>

#include "spinrl/aero.hpp"
#include "spinrl/aircraft.hpp"
#include "spinrl/common.hpp"

namespace spinrl {

// full kinematic/dynamic state. the core 8-state dynamics sub-vector is
// [V, alpha, beta, p, q, r, mu, gamma]; the Euler angles, altitude and
// heading are co-integrated auxiliaries.
struct AircraftState {
    double V = 0.0;      // true airspeed, ft/s
    double alpha = 0.0;  // angle of attack, rad
    double beta = 0.0;   // sideslip, rad
    double p = 0.0;      // body roll rate, rad/s
    double q = 0.0;      // body pitch rate, rad/s
    double r = 0.0;      // body yaw rate, rad/s
    double mu = 0.0;     // velocity-axis bank, rad
    double gamma = 0.0;  // flight-path angle, rad
    double phi = 0.0;    // Euler roll, rad
    double theta = 0.0;  // Euler pitch, rad
    double psi = 0.0;    // Euler yaw, rad
    double h = 0.0;      // altitude, ft (up positive)
    double chi = 0.0;    // velocity heading, rad
    double t = 0.0;      // elapsed time, s

    static constexpr int kOdeDim = 13;  // everything but t
    using OdeVec = Eigen::Matrix<double, kOdeDim, 1>;

    OdeVec ode_vector() const {
        OdeVec v;
        v << V, alpha, beta, p, q, r, mu, gamma, phi, theta, psi, h, chi;
        return v;
    }

    static AircraftState from_ode_vector(const OdeVec& v, double time) {
        AircraftState s;
        s.V = v[0];
        s.alpha = v[1];
        s.beta = v[2];
        s.p = v[3];
        s.q = v[4];
        s.r = v[5];
        s.mu = v[6];
        s.gamma = v[7];
        s.phi = v[8];
        s.theta = v[9];
        s.psi = v[10];
        s.h = v[11];
        s.chi = v[12];
        s.t = time;
        return s;
    }

    bool finite() const { return ode_vector().allFinite() && std::isfinite(t); }
};

// time derivative of every AircraftState field (per second)
struct StateDerivative {
    double V_dot, alpha_dot, beta_dot, p_dot, q_dot, r_dot;
    double mu_dot, gamma_dot;
    double phi_dot, theta_dot, psi_dot, h_dot, chi_dot;

    AircraftState::OdeVec ode_vector() const {
        AircraftState::OdeVec v;
        v << V_dot, alpha_dot, beta_dot, p_dot, q_dot, r_dot, mu_dot, gamma_dot,
            phi_dot, theta_dot, psi_dot, h_dot, chi_dot;
        return v;
    }
};

struct ControlInput {
    double delta_e = 0.0;  // elevator, rad
    double delta_a = 0.0;  // aileron, rad
    double delta_r = 0.0;  // rudder, rad
    double eta = 0.0;      // throttle fraction, constant per episode
};

struct ChannelLimit {
    double min, max;
};

struct ControlLimits {
    ChannelLimit elevator{-0.436, 0.175};
    ChannelLimit aileron{-0.436, 0.436};
    ChannelLimit rudder{-0.524, 0.524};

    void validate() const {
        for (const auto& c : {elevator, aileron, rudder})
            if (!(c.min < c.max))
                throw ConfigError("control limits: min must be < max per channel");
    }
};

// sat(u): clamp each surface channel to its limits; throttle untouched
inline ControlInput saturate(const ControlInput& u, const ControlLimits& limits) {
    ControlInput out = u;
    out.delta_e = clamp(u.delta_e, limits.elevator.min, limits.elevator.max);
    out.delta_a = clamp(u.delta_a, limits.aileron.min, limits.aileron.max);
    out.delta_r = clamp(u.delta_r, limits.rudder.min, limits.rudder.max);
    return out;
}

inline constexpr double kTrigGuard = 1e-6;

// right-hand side of the thirteen wind-axis equations of motion. gravity term
// of the sideslip equation sits inside the 1/(mV) bracket; the velocity-bank
// equation carries its sin(mu)tan(gamma) addend outside any mass scaling.
// altitude rate is +V sin(gamma) (up-positive altitude).
inline StateDerivative state_derivative(const AircraftState& x, const ControlInput& u,
                                        const AircraftParams& params,
                                        const AeroModel& aero, double rho) {
    const double V = x.V, alpha = x.alpha, beta = x.beta;
    const double p = x.p, q = x.q, r = x.r;
    const double mu = x.mu, gam = x.gamma;
    const double phi = x.phi, theta = x.theta;

    const double cb = std::cos(beta), cth = std::cos(theta), cg = std::cos(gam);
    if (std::fabs(cb) < kTrigGuard) throw DomainError("state_derivative: cos(beta) ~ 0");
    if (std::fabs(cth) < kTrigGuard) throw DomainError("state_derivative: cos(theta) ~ 0");
    if (std::fabs(cg) < kTrigGuard) throw DomainError("state_derivative: cos(gamma) ~ 0");
    if (!(V > 0.0)) throw DomainError("state_derivative: V must be > 0");

    const CoefficientSet c =
        aero.evaluate(alpha, beta, p, q, r, V, u.delta_e, u.delta_a, u.delta_r, params);

    const double m = params.m, S = params.S, b = params.b, cbar = params.c_bar;
    const double Ix = params.Ix, Iy = params.Iy, Iz = params.Iz;
    const double g = params.g;
    const double T = params.Tm * u.eta;
    const double qbar = 0.5 * rho * V * V;

    const double ca = std::cos(alpha), sa = std::sin(alpha);
    const double sb = std::sin(beta);
    const double cm = std::cos(mu), sm = std::sin(mu);
    const double sg = std::sin(gam);
    const double cph = std::cos(phi), sph = std::sin(phi);

    StateDerivative d;
    d.V_dot = (T * ca * cb - qbar * S * c.CD - m * g * sg) / m;
    d.alpha_dot = q - (1.0 / cb) * ((p * ca + r * sa) * sb) +
                  (T * sa + qbar * S * c.CL - m * g * cm * cg) / (m * V);
    d.beta_dot = (-T * ca * sb + qbar * S * c.CY + m * g * sm * cg) / (m * V) +
                 (p * sa - r * ca);
    d.p_dot = (Iy - Iz) / Ix * q * r + qbar * S * b * c.Cl / Ix;
    d.q_dot = (Iz - Ix) / Iy * p * r + qbar * S * cbar * c.Cm / Iy;
    d.r_dot = (Ix - Iy) / Iz * p * q + qbar * S * b * c.Cn / Iz;
    d.phi_dot = p + q * sph * std::tan(theta) + r * cph * std::tan(theta);
    d.theta_dot = q * cph - r * sph;
    d.psi_dot = (q * sph + r * cph) / cth;
    d.h_dot = V * sg;
    d.mu_dot = (1.0 / cb) * (p * ca + r * sa) +
               (qbar * S * c.CL * std::tan(beta) + T * sa + sm * std::tan(gam) -
                m * g * cm * cg * std::tan(beta) + qbar * S * c.CY * cm * std::tan(gam)) /
                   (m * V);
    d.gamma_dot = (T * (sa * cm + ca * sb * sm) - qbar * S * c.CL * cm - m * g * cg -
                   qbar * S * c.CY * sm) /
                  (m * V);
    d.chi_dot = (T * (sa * sm - ca * sb * cm) + qbar * S * (c.CL * sm + c.CY * cm)) /
                (m * V * cg);
    return d;
}

// generic classical fixed-step RK4 advance of dx/dt = f(x)
template <typename Vec, typename F>
Vec rk4_step(const Vec& x, F&& f, double dt) {
    const Vec k1 = f(x);
    const Vec k2 = f(Vec(x + 0.5 * dt * k1));
    const Vec k3 = f(Vec(x + 0.5 * dt * k2));
    const Vec k4 = f(Vec(x + dt * k3));
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// one RK4 step of the aircraft ODEs; u must already be saturated.
// air density is re-evaluated from altitude at every stage.
inline AircraftState integrate_step(const AircraftState& x, const ControlInput& u,
                                    double dt, const AircraftParams& params,
                                    const AeroModel& aero) {
    if (!(dt > 0.0)) throw DomainError("integrate_step: dt must be > 0");
    auto f = [&](const AircraftState::OdeVec& v) -> AircraftState::OdeVec {
        AircraftState s = AircraftState::from_ode_vector(v, x.t);
        double rho = params.atmosphere.air_density(s.h);
        return state_derivative(s, u, params, aero, rho).ode_vector();
    };
    AircraftState::OdeVec next = rk4_step(x.ode_vector(), f, dt);
    if (!next.allFinite()) throw NumericalError("integrate_step: non-finite state");
    return AircraftState::from_ode_vector(next, x.t + dt);
}

// Euler angles consistent with given wind-axis angles: body-to-earth
// attitude recovered from R_be = R_wb^T R_we.
inline void euler_from_wind(double mu, double gam, double chi, double alpha, double beta,
                            double& phi, double& theta, double& psi) {
    using M3 = Eigen::Matrix3d;
    auto Rx = [](double a) {
        M3 R;
        R << 1, 0, 0, 0, std::cos(a), std::sin(a), 0, -std::sin(a), std::cos(a);
        return R;
    };
    auto Ry = [](double a) {
        M3 R;
        R << std::cos(a), 0, -std::sin(a), 0, 1, 0, std::sin(a), 0, std::cos(a);
        return R;
    };
    auto Rz = [](double a) {
        M3 R;
        R << std::cos(a), std::sin(a), 0, -std::sin(a), std::cos(a), 0, 0, 0, 1;
        return R;
    };
    M3 Rwe = Rx(mu) * Ry(gam) * Rz(chi);
    const double ca = std::cos(alpha), sa = std::sin(alpha);
    const double cb = std::cos(beta), sb = std::sin(beta);
    M3 Rwb;
    Rwb << ca * cb, sb, sa * cb, -ca * sb, cb, -sa * sb, -sa, 0, ca;
    M3 Rbe = Rwb.transpose() * Rwe;
    theta = std::asin(-Rbe(0, 2));
    phi = std::atan2(Rbe(1, 2), Rbe(2, 2));
    psi = std::atan2(Rbe(0, 1), Rbe(0, 0));
}

}  // namespace spinrl
