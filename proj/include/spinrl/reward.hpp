#pragma once

#include <cmath>

#include <Eigen/Dense>

#include "spinrl/common.hpp"
#include "spinrl/dynamics.hpp"

namespace spinrl {

struct RewardWeights {
    double w_p1 = 0.3;            // phase-1 cross-coupling weight
    double w_p21 = 0.3;           // phase-2 alpha-error/pitch-rate weight, also PBRS rate weight
    double w_p22 = 0.05;          // phase-2 residual-rate weight
    double rate_threshold = 0.17; // rad/s, phase switch
    double bonus_alpha = 5.0;
    double bonus_beta = 3.0;
    double bonus_mu = 3.0;
    double bonus_band = 0.017;    // rad
    double Gamma = 0.99;          // shaping discount

    void validate() const {
        if (w_p1 < 0 || w_p21 < 0 || w_p22 < 0)
            throw ConfigError("reward: weights must be >= 0");
        if (!(rate_threshold > 0)) throw ConfigError("reward: rate_threshold must be > 0");
        if (!(Gamma > 0.0 && Gamma <= 1.0)) throw ConfigError("reward: Gamma must be in (0,1]");
    }
};

struct AttitudeErrors {
    double e_alpha, e_beta, e_mu;
};

struct AttitudeTargets {
    double alpha_d = 0.3;
    double beta_d = 0.0;
    double mu_d = 0.0;
};

inline AttitudeErrors attitude_errors(const AircraftState& x, const AttitudeTargets& tgt) {
    return {x.alpha - tgt.alpha_d, x.beta - tgt.beta_d, x.mu - tgt.mu_d};
}

enum class RewardPhase { RateDamping, AttitudeTracking };

// attitude tracking iff every body rate is below the threshold
inline RewardPhase phase_of(double p, double q, double r, double threshold) {
    double worst = std::max(std::fabs(p), std::max(std::fabs(q), std::fabs(r)));
    return worst < threshold ? RewardPhase::AttitudeTracking : RewardPhase::RateDamping;
}

// -||w||^2 - w_p1 (|pq| + |qr| + |pr|)
inline double phase1_reward(double p, double q, double r, const RewardWeights& w) {
    double sq = p * p + q * q + r * r;
    double cross = std::fabs(p * q) + std::fabs(q * r) + std::fabs(p * r);
    return -sq - w.w_p1 * cross;
}

// -e_a^2 - w_p21 e_a q - w_p22 (||w||^2 + couplings) + bonuses - sum a_i^2.
// the action penalty uses the raw clipped policy outputs, not scaled
// deflections.
inline double phase2_reward(const AttitudeErrors& err, double p, double q, double r,
                            const Eigen::Vector3d& action, const RewardWeights& w) {
    double sq = p * p + q * q + r * r;
    double cross = std::fabs(p * q) + std::fabs(q * r) + std::fabs(p * r);
    double v = -err.e_alpha * err.e_alpha - w.w_p21 * err.e_alpha * q -
               w.w_p22 * (sq + cross);
    if (std::fabs(err.e_alpha) < w.bonus_band) v += w.bonus_alpha;
    if (std::fabs(err.e_beta) < w.bonus_band) v += w.bonus_beta;
    if (std::fabs(err.e_mu) < w.bonus_band) v += w.bonus_mu;
    v -= action.squaredNorm();
    return v;
}

// sigma = -e_alpha^2 - w_p21 ||w||^2
inline double shaping_potential(double e_alpha, double p, double q, double r,
                                const RewardWeights& w) {
    return -e_alpha * e_alpha - w.w_p21 * (p * p + q * q + r * r);
}

struct RewardComponents {
    double phase1 = 0.0;
    double phase2 = 0.0;
    double shaping = 0.0;
    double penalty = 0.0;  // terminal penalty, added by the environment

    double sum() const { return phase1 + phase2 + shaping + penalty; }
};

// per-step reward for the transition x_t -> x_{t+1}: the phase term is
// selected and evaluated on the post-step state, plus the PBRS term
// Gamma*sigma(x_{t+1}) - sigma(x_t).
inline RewardComponents total_reward(const AircraftState& x_t, const AircraftState& x_tp1,
                                     const Eigen::Vector3d& action,
                                     const AttitudeTargets& tgt, const RewardWeights& w) {
    RewardComponents out;
    AttitudeErrors err_t = attitude_errors(x_t, tgt);
    AttitudeErrors err_tp1 = attitude_errors(x_tp1, tgt);
    if (phase_of(x_tp1.p, x_tp1.q, x_tp1.r, w.rate_threshold) == RewardPhase::RateDamping)
        out.phase1 = phase1_reward(x_tp1.p, x_tp1.q, x_tp1.r, w);
    else
        out.phase2 = phase2_reward(err_tp1, x_tp1.p, x_tp1.q, x_tp1.r, action, w);
    double sigma_t = shaping_potential(err_t.e_alpha, x_t.p, x_t.q, x_t.r, w);
    double sigma_tp1 = shaping_potential(err_tp1.e_alpha, x_tp1.p, x_tp1.q, x_tp1.r, w);
    out.shaping = w.Gamma * sigma_tp1 - sigma_t;
    return out;
}

}  // namespace spinrl
