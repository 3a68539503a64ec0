#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "spinrl/common.hpp"
#include "spinrl/gae.hpp"
#include "spinrl/mlp.hpp"
#include "spinrl/policy.hpp"

namespace spinrl {

struct PPOHyperparams {
    double learning_rate = 5e-5;
    double gamma = 0.99;
    double clip_eps = 0.2;
    double gae_lambda = 0.95;
    int epochs = 10;
    int minibatch_size = 256;
    int rollout_horizon = 4096;  // target steps per update (whole episodes)
    double entropy_coef = 0.01;
    double value_coef = 0.5;
    double max_grad_norm = 0.5;
    int total_episodes = 6000;
    int checkpoint_every = 50;  // updates between periodic checkpoints
    std::uint64_t seed = 0;

    void validate() const {
        if (!(learning_rate > 0)) throw ConfigError("ppo: learning_rate must be > 0");
        if (!(gamma > 0 && gamma <= 1)) throw ConfigError("ppo: gamma must be in (0,1]");
        if (!(gae_lambda > 0 && gae_lambda <= 1))
            throw ConfigError("ppo: gae_lambda must be in (0,1]");
        if (!(clip_eps > 0 && clip_eps < 1)) throw ConfigError("ppo: clip_eps must be in (0,1)");
        if (epochs < 1) throw ConfigError("ppo: epochs must be >= 1");
        if (minibatch_size < 1) throw ConfigError("ppo: minibatch_size must be >= 1");
        if (rollout_horizon < 1) throw ConfigError("ppo: rollout_horizon must be >= 1");
        if (total_episodes < 0) throw ConfigError("ppo: total_episodes must be >= 0");
        if (!(max_grad_norm > 0)) throw ConfigError("ppo: max_grad_norm must be > 0");
        if (entropy_coef < 0 || value_coef < 0)
            throw ConfigError("ppo: loss coefficients must be >= 0");
    }
};

// on-policy transition storage for one update cycle; cleared after use
struct RolloutBuffer {
    struct Episode {
        int start = 0;
        int len = 0;
        bool terminated = false;     // envelope failure (bootstraps zero)
        double bootstrap = 0.0;      // V(s_T) when truncated
        double total_reward = 0.0;   // undiscounted episode return
    };

    std::vector<Eigen::VectorXd> obs;
    std::vector<Eigen::VectorXd> act;
    std::vector<double> logp;
    std::vector<double> value;
    std::vector<double> reward;
    std::vector<std::uint8_t> done;
    std::vector<Episode> episodes;
    std::vector<double> advantage;
    std::vector<double> ret;

    size_t size() const { return obs.size(); }

    void clear() {
        obs.clear();
        act.clear();
        logp.clear();
        value.clear();
        reward.clear();
        done.clear();
        episodes.clear();
        advantage.clear();
        ret.clear();
    }

    // per-episode GAE, concatenated in buffer order
    void compute_advantages(double gamma, double lambda) {
        advantage.assign(size(), 0.0);
        ret.assign(size(), 0.0);
        for (const auto& ep : episodes) {
            std::vector<double> r(reward.begin() + ep.start, reward.begin() + ep.start + ep.len);
            std::vector<double> v(value.begin() + ep.start, value.begin() + ep.start + ep.len);
            std::vector<std::uint8_t> d(done.begin() + ep.start,
                                        done.begin() + ep.start + ep.len);
            GaeResult g = compute_gae(r, v, d, ep.terminated ? 0.0 : ep.bootstrap, gamma, lambda);
            for (int i = 0; i < ep.len; ++i) {
                advantage[ep.start + i] = g.advantages[i];
                ret[ep.start + i] = g.returns[i];
            }
        }
    }

    // zero-mean unit-std normalization over the whole update batch
    void normalize_advantages() {
        const size_t n = advantage.size();
        if (n == 0) return;
        double mean = 0.0;
        for (double a : advantage) mean += a;
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (double a : advantage) var += (a - mean) * (a - mean);
        double sd = std::sqrt(var / static_cast<double>(n));
        if (sd < 1e-8) sd = 1e-8;
        for (double& a : advantage) a = (a - mean) / sd;
    }
};

struct LossStats {
    double total = 0.0;
    double actor_loss = 0.0;   // -mean(min(r A, clip(r) A))
    double value_loss = 0.0;   // mean((V - ret)^2), unweighted
    double entropy = 0.0;
    double clip_frac = 0.0;
    double approx_kl = 0.0;    // mean(logp_old - logp_new)
};

// clipped-surrogate PPO loss and its analytic gradient with respect to every
// parameter (actor weights, log_std, critic weights), flat layout matching
// ActorCritic::flatten. the returned gradient is global-norm clipped.
//
// loss = -mean(min(ratio*A, clip(ratio, 1-eps, 1+eps)*A))
//        + value_coef * mean((V - ret)^2) - entropy_coef * entropy
inline LossStats ppo_objective(const Eigen::MatrixXd& obs, const Eigen::MatrixXd& act,
                               const Eigen::VectorXd& logp_old, const Eigen::VectorXd& adv,
                               const Eigen::VectorXd& ret, const ActorCritic& ac,
                               const PPOHyperparams& hp, Eigen::VectorXd& grad_out) {
    const Eigen::Index n = obs.rows();
    if (act.rows() != n || logp_old.size() != n || adv.size() != n || ret.size() != n)
        throw LengthMismatch("ppo_objective: batch arrays disagree");

    const Eigen::VectorXd ls = ac.clamped_log_std();
    const Eigen::ArrayXd inv_var = (-2.0 * ls.array()).exp();

    Mlp::Cache actor_cache, critic_cache;
    const Eigen::MatrixXd means = ac.actor.forward(obs, &actor_cache);
    const Eigen::VectorXd values = ac.critic.forward(obs, &critic_cache).col(0);

    const Eigen::VectorXd logp_new = gaussian_log_prob(means, act, ls);
    const Eigen::ArrayXd ratio = (logp_new - logp_old).array().exp();
    const Eigen::ArrayXd clipped =
        ratio.min(1.0 + hp.clip_eps).max(1.0 - hp.clip_eps);
    const Eigen::ArrayXd surr1 = ratio * adv.array();
    const Eigen::ArrayXd surr2 = clipped * adv.array();

    LossStats stats;
    stats.entropy = gaussian_entropy(ls);
    stats.actor_loss = -surr1.min(surr2).mean();
    const Eigen::ArrayXd verr = values.array() - ret.array();
    stats.value_loss = verr.square().mean();
    stats.clip_frac = ((ratio - 1.0).abs() > hp.clip_eps).cast<double>().mean();
    stats.approx_kl = (logp_old - logp_new).mean();
    stats.total = stats.actor_loss + hp.value_coef * stats.value_loss -
                  hp.entropy_coef * stats.entropy;
    if (!std::isfinite(stats.total)) throw NumericalError("ppo_objective: non-finite loss");

    // d loss / d logp_new: the min picks the unclipped branch on ties, so at
    // theta = theta_old gradients flow; a sample clipped at a bound (surr2 <
    // surr1) contributes nothing to the actor.
    Eigen::ArrayXd dlogp(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const bool unclipped = surr1[i] <= surr2[i];
        dlogp[i] = unclipped ? -(ratio[i] * adv[i]) / static_cast<double>(n) : 0.0;
    }

    // through the Gaussian: d logp / d mean_ij = (a_ij - mu_ij) / sigma_j^2,
    // d logp / d log_std_j = z_ij^2 - 1 with z = (a - mu)/sigma
    const Eigen::ArrayXXd diff = (act - means).array();
    Eigen::MatrixXd dMeans =
        ((diff.rowwise() * inv_var.transpose()).colwise() * dlogp).matrix();
    Eigen::VectorXd dLogStd(ls.size());
    for (Eigen::Index j = 0; j < dLogStd.size(); ++j) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
            s += dlogp[i] * (diff(i, j) * diff(i, j) * inv_var[j] - 1.0);
        dLogStd[j] = s;
    }
    dLogStd.array() -= hp.entropy_coef;  // d(-coef * H)/d log_std = -coef

    Eigen::MatrixXd dValues =
        (2.0 * hp.value_coef / static_cast<double>(n)) * verr.matrix();

    Mlp::Grads ga, gc;
    ac.actor.backward(actor_cache, dMeans, ga);
    ac.critic.backward(critic_cache, dValues, gc);

    grad_out.resize(ac.num_params());
    double* d = grad_out.data();
    ac.actor.flatten_grads(ga, d);
    d += ac.actor.num_params();
    for (Eigen::Index i = 0; i < dLogStd.size(); ++i) *d++ = dLogStd[i];
    ac.critic.flatten_grads(gc, d);

    if (!grad_out.allFinite()) throw NumericalError("ppo_objective: non-finite gradient");

    const double norm = grad_out.norm();
    if (norm > hp.max_grad_norm) grad_out *= hp.max_grad_norm / norm;
    return stats;
}

}  // namespace spinrl
