#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spinrl/aero.hpp"
#include "spinrl/aircraft.hpp"
#include "spinrl/common.hpp"
#include "spinrl/dynamics.hpp"
#include "spinrl/reward.hpp"
#include "spinrl/rng.hpp"

namespace spinrl {

using Observation = Eigen::Matrix<double, 11, 1>;  // [V a b p q r mu gam a_d b_d mu_d]
using Action = Eigen::Vector3d;                     // raw policy output [a_e, a_a, a_r]

// observation normalization bounds; targets reuse the alpha/beta/mu rows
struct ObservationBounds {
    // V, alpha, beta, p, q, r, mu, gamma
    std::array<double, 8> lo = {0.0, -0.244, -kPi, -10 * kPi, -10 * kPi, -10 * kPi, -kPi, -1.745};
    std::array<double, 8> hi = {2000.0, 1.571, kPi, 10 * kPi, 10 * kPi, 10 * kPi, kPi, 1.745};
};

enum class TargetMode { Fixed, Sampled };

struct EnvConfig {
    double dt = 0.01;
    int episode_len = 20000;
    double spin_hold = 30.0;  // seconds of scripted spin before the agent acts
    ControlInput hold_controls{};
    std::array<double, 8> initial_state = {207.576, 1.2375, 0.0382, -0.6163,
                                           0.1784,  -1.4645, -1.3508, -1.5075};
    TargetMode target_mode = TargetMode::Fixed;
    AttitudeTargets fixed_targets{};
    double alpha_target_lo = -0.0873;  // sampled mode range, rad
    double alpha_target_hi = 0.6981;
    double eta = 0.0;
    double terminal_penalty = -1000.0;
    double start_altitude = 8500.0;
    std::uint64_t seed = 0;
    ControlLimits limits{};
    RewardWeights reward{};

    void validate() const {
        if (!(dt > 0)) throw ConfigError("env: dt must be > 0");
        if (episode_len <= 0) throw ConfigError("env: episode_len must be > 0");
        if (spin_hold < 0) throw ConfigError("env: spin_hold must be >= 0");
        if (terminal_penalty > 0) throw ConfigError("env: terminal_penalty must be <= 0");
        if (!(eta >= 0.0 && eta <= 1.0)) throw ConfigError("env: eta must be in [0,1]");
        if (!(alpha_target_lo <= alpha_target_hi))
            throw ConfigError("env: alpha target range reversed");
        limits.validate();
        reward.validate();
    }
};

struct TerminationCheck {
    bool ok = true;
    std::string reason;  // empty when ok
};

// envelope: the observation-table bounds plus the altitude floor
inline TerminationCheck check_termination(const AircraftState& x) {
    if (!x.finite()) return {false, "nonfinite"};
    const ObservationBounds b;
    const std::array<double, 8> core = {x.V, x.alpha, x.beta, x.p, x.q, x.r, x.mu, x.gamma};
    static const std::array<const char*, 8> names = {"speed", "alpha", "beta", "p",
                                                     "q",     "r",     "mu",   "gamma"};
    for (int i = 0; i < 8; ++i)
        if (core[i] < b.lo[i] || core[i] > b.hi[i]) return {false, names[i]};
    if (x.h <= 0.0) return {false, "ground"};
    return {true, ""};
}

inline Observation normalize_observation(const AircraftState& x, const AttitudeTargets& tgt) {
    const ObservationBounds b;
    auto norm = [&](double v, int i) {
        double n = 2.0 * (v - b.lo[i]) / (b.hi[i] - b.lo[i]) - 1.0;
        return clamp(n, -1.0, 1.0);
    };
    Observation o;
    o << norm(x.V, 0), norm(x.alpha, 1), norm(x.beta, 2), norm(x.p, 3), norm(x.q, 4),
        norm(x.r, 5), norm(x.mu, 6), norm(x.gamma, 7), norm(tgt.alpha_d, 1),
        norm(tgt.beta_d, 2), norm(tgt.mu_d, 6);
    return o;
}

struct StepResult {
    Observation observation;
    double reward = 0.0;
    bool terminated = false;
    bool truncated = false;
    // info
    RewardPhase phase = RewardPhase::RateDamping;
    AircraftState raw_state;
    ControlInput applied;
    RewardComponents reward_components;
    std::string termination_reason;
};

class SpinEnv {
public:
    explicit SpinEnv(AircraftParams aircraft, AeroModel aero, EnvConfig config)
        : params_(std::move(aircraft)), aero_(std::move(aero)), cfg_(config), rng_(config.seed) {
        cfg_.validate();
        params_.validate();
    }

    const EnvConfig& config() const { return cfg_; }
    const AircraftState& state() const { return state_; }
    const AttitudeTargets& targets() const { return targets_; }
    int steps_taken() const { return step_; }
    bool episode_over() const { return finished_; }
    Rng& rng() { return rng_; }

    Observation reset() { return do_reset(); }

    Observation reset(std::uint64_t seed) {
        rng_ = Rng(seed);
        return do_reset();
    }

    // clip to [-1,1], then map affinely onto the actuator box
    ControlInput scale_action(const Action& a) const {
        auto map = [](double v, const ChannelLimit& c) {
            double x = clamp(v, -1.0, 1.0);
            return c.min + (x + 1.0) / 2.0 * (c.max - c.min);
        };
        ControlInput u;
        u.delta_e = map(a[0], cfg_.limits.elevator);
        u.delta_a = map(a[1], cfg_.limits.aileron);
        u.delta_r = map(a[2], cfg_.limits.rudder);
        u.eta = cfg_.eta;
        return u;
    }

    StepResult step(const Action& a) {
        if (!reset_called_) throw DomainError("env: step before reset");
        if (finished_) throw DomainError("env: step after episode end");

        StepResult res;
        const bool holding = state_.t < cfg_.spin_hold - 0.5 * cfg_.dt;
        res.applied = holding ? hold_controls_with_eta() : scale_action(a);
        res.applied = saturate(res.applied, cfg_.limits);
        const Action penalized = holding ? Action::Zero() : clip_action(a);

        AircraftState before = state_;
        bool numerical_failure = false;
        std::string failure_reason;
        try {
            state_ = integrate_step(state_, res.applied, cfg_.dt, params_, aero_);
        } catch (const DomainError&) {
            numerical_failure = true;
            failure_reason = "singular";
        } catch (const NumericalError&) {
            numerical_failure = true;
            failure_reason = "nonfinite";
        }
        wrap_state_angles(state_);
        ++step_;

        res.reward_components = total_reward(before, state_, penalized, targets_, cfg_.reward);
        res.phase = phase_of(state_.p, state_.q, state_.r, cfg_.reward.rate_threshold);

        TerminationCheck term =
            numerical_failure ? TerminationCheck{false, failure_reason} : check_termination(state_);
        if (!term.ok) {
            res.terminated = true;
            res.termination_reason = term.reason;
            res.reward_components.penalty = cfg_.terminal_penalty;
            if (numerical_failure) {
                // reward formulas are meaningless on a broken state
                res.reward_components.phase1 = 0.0;
                res.reward_components.phase2 = 0.0;
                res.reward_components.shaping = 0.0;
                state_ = before;  // keep the last valid state observable
            }
        } else if (step_ >= cfg_.episode_len) {
            res.truncated = true;
        }
        finished_ = res.terminated || res.truncated;

        res.reward = res.reward_components.sum();
        res.raw_state = state_;
        res.observation = normalize_observation(state_, targets_);
        return res;
    }

    bool in_hold() const { return state_.t < cfg_.spin_hold - 0.5 * cfg_.dt; }

private:
    Observation do_reset() {
        const auto& s0 = cfg_.initial_state;
        state_ = AircraftState{};
        state_.V = s0[0];
        state_.alpha = s0[1];
        state_.beta = s0[2];
        state_.p = s0[3];
        state_.q = s0[4];
        state_.r = s0[5];
        state_.mu = s0[6];
        state_.gamma = s0[7];
        state_.h = cfg_.start_altitude;
        state_.chi = 0.0;
        state_.t = 0.0;
        euler_from_wind(state_.mu, state_.gamma, state_.chi, state_.alpha, state_.beta,
                        state_.phi, state_.theta, state_.psi);

        targets_ = cfg_.fixed_targets;
        if (cfg_.target_mode == TargetMode::Sampled) {
            targets_.alpha_d = rng_.uniform(cfg_.alpha_target_lo, cfg_.alpha_target_hi);
            targets_.beta_d = 0.0;
            targets_.mu_d = 0.0;
        }

        step_ = 0;
        finished_ = false;
        reset_called_ = true;
        return normalize_observation(state_, targets_);
    }

    ControlInput hold_controls_with_eta() const {
        ControlInput u = cfg_.hold_controls;
        u.eta = cfg_.eta;
        return u;
    }

    static Action clip_action(const Action& a) {
        return a.cwiseMax(-1.0).cwiseMin(1.0);
    }

    // mu winds monotonically in a developed spin; wrapping the periodic
    // angles after each step keeps the envelope check meaningful. a 2*pi
    // shift is exact for every trigonometric use of these angles.
    static void wrap_state_angles(AircraftState& s) {
        s.beta = wrap_angle(s.beta);
        s.mu = wrap_angle(s.mu);
        s.phi = wrap_angle(s.phi);
        s.theta = wrap_angle(s.theta);
        s.psi = wrap_angle(s.psi);
        s.chi = wrap_angle(s.chi);
    }

    AircraftParams params_;
    AeroModel aero_;
    EnvConfig cfg_;
    Rng rng_;
    AircraftState state_{};
    AttitudeTargets targets_{};
    int step_ = 0;
    bool finished_ = false;
    bool reset_called_ = false;
};

}  // namespace spinrl
