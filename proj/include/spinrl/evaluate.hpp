#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spinrl/common.hpp"
#include "spinrl/csv.hpp"
#include "spinrl/env.hpp"
#include "spinrl/policy.hpp"

namespace spinrl {

inline const std::vector<std::string>& trajectory_columns() {
    static const std::vector<std::string> cols = {
        "t",  "V",  "alpha", "beta", "p",  "q",  "r",   "mu",     "gamma", "chi",
        "phi", "theta", "psi",  "h",    "de", "da", "dr", "eta", "reward", "phase"};
    return cols;
}

inline std::vector<double> trajectory_row(const StepResult& sr) {
    const AircraftState& x = sr.raw_state;
    return {x.t,
            x.V,
            x.alpha,
            x.beta,
            x.p,
            x.q,
            x.r,
            x.mu,
            x.gamma,
            x.chi,
            x.phi,
            x.theta,
            x.psi,
            x.h,
            sr.applied.delta_e,
            sr.applied.delta_a,
            sr.applied.delta_r,
            sr.applied.eta,
            sr.reward,
            sr.phase == RewardPhase::RateDamping ? 1.0 : 2.0};
}

struct EpisodeReport {
    double episode_return = 0.0;
    std::optional<double> rate_arrest_time_s;  // first t with rates < threshold, sustained 5 s
    double final_abs_e_alpha_rad = 0.0;
    double altitude_loss_ft = 0.0;  // control start (hold end) to arrest, or to episode end
    int steps = 0;
    bool terminated = false;
    std::string termination_reason;
};

struct EvalReport {
    std::vector<EpisodeReport> episodes;

    double mean_return() const {
        double s = 0.0;
        for (const auto& e : episodes) s += e.episode_return;
        return episodes.empty() ? 0.0 : s / static_cast<double>(episodes.size());
    }

    double arrest_fraction() const {
        if (episodes.empty()) return 0.0;
        int n = 0;
        for (const auto& e : episodes)
            if (e.rate_arrest_time_s) ++n;
        return static_cast<double>(n) / static_cast<double>(episodes.size());
    }
};

// a policy for evaluation purposes: observation -> raw action
using EvalPolicy = std::function<Action(const Observation&)>;

inline constexpr double kArrestSustainS = 5.0;

// roll episodes and collect the recovery metrics; optionally stream each
// step into a per-episode trajectory CSV via row_sink.
inline EvalReport evaluate(SpinEnv& env, const EvalPolicy& policy, int episodes,
                           const std::function<void(int, const StepResult&)>& row_sink = nullptr) {
    EvalReport report;
    const double threshold = env.config().reward.rate_threshold;
    for (int e = 0; e < episodes; ++e) {
        EpisodeReport ep;
        Observation obs = env.reset();
        double arrest_window_start = -1.0;
        std::optional<double> arrest;
        double h_control_start = env.config().start_altitude;
        bool control_started = env.config().spin_hold <= 0.0;
        double h_at_arrest = std::numeric_limits<double>::quiet_NaN();
        bool done = false;
        while (!done) {
            if (!control_started && !env.in_hold()) {
                control_started = true;
                h_control_start = env.state().h;
            }
            Action a = policy(obs);
            StepResult sr = env.step(a);
            ++ep.steps;
            const AircraftState& x = sr.raw_state;
            const double worst =
                std::max(std::fabs(x.p), std::max(std::fabs(x.q), std::fabs(x.r)));
            if (worst < threshold) {
                if (arrest_window_start < 0.0) arrest_window_start = x.t;
                if (!arrest && x.t - arrest_window_start >= kArrestSustainS) {
                    arrest = arrest_window_start;
                    h_at_arrest = x.h;  // altitude when the sustain window confirmed
                }
            } else {
                arrest_window_start = -1.0;
            }
            ep.episode_return += sr.reward;
            ep.final_abs_e_alpha_rad = std::fabs(x.alpha - env.targets().alpha_d);
            if (row_sink) row_sink(e, sr);
            if (sr.terminated || sr.truncated) {
                ep.terminated = sr.terminated;
                ep.termination_reason = sr.termination_reason;
                ep.rate_arrest_time_s = arrest;
                ep.altitude_loss_ft =
                    h_control_start - (arrest ? h_at_arrest : x.h);
                done = true;
            }
            obs = sr.observation;
        }
        report.episodes.push_back(ep);
    }
    return report;
}

// deterministic policy from a trained actor: action = mean
inline EvalPolicy policy_from_actor(const ActorCritic& ac, bool deterministic, Rng* rng) {
    if (deterministic) {
        return [&ac](const Observation& o) -> Action {
            auto [mean, ls] = actor_forward(ac, o);
            return mean.head<3>();
        };
    }
    return [&ac, rng](const Observation& o) -> Action {
        auto [mean, ls] = actor_forward(ac, o);
        auto [a, lp] = sample_action(mean, ls, *rng);
        return a.head<3>();
    };
}

// scripted comparators. neutral: surfaces centered. pare: power is already
// idle (eta from config), ailerons neutral, rudder opposite the yaw rate,
// elevator forward (never positive).
struct PareGains {
    double rudder_per_rad_s = 1.0;   // rudder action per rad/s of yaw rate
    double elevator_forward = -0.8;  // raw action command while rates are high
    double alpha_gain = 1.0;         // pitch capture terms once rates die down
    double pitch_rate_gain = 3.0;
};

// raw action command whose scaled deflections equal (de, da, dr): each
// channel is the inverse of the affine [-1,1] -> [min,max] map
inline Action action_for_deflection(const ControlLimits& lim, double de, double da, double dr) {
    auto inv = [](double v, const ChannelLimit& c) {
        return 2.0 * (v - c.min) / (c.max - c.min) - 1.0;
    };
    return Action(inv(de, lim.elevator), inv(da, lim.aileron), inv(dr, lim.rudder));
}

inline EvalPolicy pare_policy(const SpinEnv& env, const PareGains& g,
                              const ObservationBounds& bounds = {}) {
    const ControlLimits lim = env.config().limits;
    const double threshold = env.config().reward.rate_threshold;
    const double alpha_d = env.targets().alpha_d;
    return [lim, g, threshold, alpha_d, bounds](const Observation& o) -> Action {
        // decode the rates and alpha from the normalized observation
        auto decode = [&](int i) {
            return bounds.lo[i] + (o[i] + 1.0) / 2.0 * (bounds.hi[i] - bounds.lo[i]);
        };
        const double alpha = decode(1), p = decode(3), q = decode(4), r = decode(5);
        (void)p;
        Action a = action_for_deflection(lim, 0.0, 0.0, 0.0);  // ailerons neutral
        const double worst = std::max(std::fabs(p), std::max(std::fabs(q), std::fabs(r)));
        // rudder opposite the spin
        a[2] = clamp(-g.rudder_per_rad_s * r, -1.0, 1.0);
        // elevator forward, never aft of neutral deflection
        double de_cmd = worst >= threshold
                            ? g.elevator_forward
                            : g.alpha_gain * (alpha_d - alpha) - g.pitch_rate_gain * q;
        const double de_neutral = action_for_deflection(lim, 0.0, 0.0, 0.0)[0];
        a[0] = std::min(clamp(de_cmd, -1.0, 1.0), de_neutral);
        return a;
    };
}

}  // namespace spinrl
