#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spinrl/adam.hpp"
#include "spinrl/checkpoint.hpp"
#include "spinrl/config.hpp"
#include "spinrl/csv.hpp"
#include "spinrl/env.hpp"
#include "spinrl/policy.hpp"
#include "spinrl/ppo.hpp"
#include "spinrl/sha256.hpp"

namespace spinrl {

struct UpdateMetrics {
    long update = 0;
    long episodes = 0;  // cumulative
    long steps = 0;     // cumulative
    double mean_return = 0.0;
    double actor_loss = 0.0;
    double value_loss = 0.0;
    double entropy = 0.0;
    double clip_frac = 0.0;
    double approx_kl = 0.0;
};

using MetricsLogger = std::function<void(const UpdateMetrics&)>;
using CheckpointSink = std::function<void(const Checkpoint&, long update, bool final)>;

// Algorithm 1: repeat {collect N on-policy episodes, estimate advantages,
// K epochs of clipped-surrogate minibatch updates}. everything downstream of
// the master seed is deterministic.
class Trainer {
public:
    Trainer(SpinEnv env, PPOHyperparams hp)
        : env_(std::move(env)), hp_(hp), rng_(hp.seed), ac_(11, 3) {
        hp_.validate();
        ac_.init(rng_);
        flat_params_ = ac_.flatten();
        opt_ = AdamState(static_cast<int>(flat_params_.size()));
    }

    // resume from checkpoint state
    void restore(const Checkpoint& ck) {
        ac_ = ck.params;
        flat_params_ = ac_.flatten();
        opt_ = AdamState(static_cast<int>(flat_params_.size()));
        if (!ck.trainer_rng.empty()) rng_.deserialize(ck.trainer_rng);
        if (!ck.env_rng.empty()) env_.rng().deserialize(ck.env_rng);
        episodes_done_ = ck.episodes_done;
        updates_done_ = ck.updates_done;
    }

    const ActorCritic& actor_critic() const { return ac_; }
    SpinEnv& env() { return env_; }
    const RolloutBuffer& buffer() const { return buf_; }

    Checkpoint make_checkpoint() const {
        Checkpoint ck;
        ck.params = ac_;
        ck.hp = hp_;
        ck.trainer_rng = rng_.serialize();
        ck.env_rng = const_cast<SpinEnv&>(env_).rng().serialize();
        ck.episodes_done = episodes_done_;
        ck.updates_done = updates_done_;
        return ck;
    }

    // run the full training budget; emits one metrics row per update
    Checkpoint train(const MetricsLogger& log = nullptr,
                     const CheckpointSink& sink = nullptr) {
        const int ep_per_update = episodes_per_update();
        while (episodes_done_ < hp_.total_episodes) {
            const int want =
                std::min<long>(ep_per_update, hp_.total_episodes - episodes_done_);
            collect_rollout(want);
            UpdateMetrics m = update_policy();
            ++updates_done_;
            m.update = updates_done_;
            m.episodes = episodes_done_;
            m.steps = steps_done_;
            if (log) log(m);
            if (sink && hp_.checkpoint_every > 0 && updates_done_ % hp_.checkpoint_every == 0)
                sink(make_checkpoint(), updates_done_, false);
        }
        Checkpoint final = make_checkpoint();
        if (sink) sink(final, updates_done_, true);
        return final;
    }

    int episodes_per_update() const {
        double n = std::round(static_cast<double>(hp_.rollout_horizon) /
                              static_cast<double>(env_.config().episode_len));
        return std::max(1, static_cast<int>(n));
    }

private:
    void collect_rollout(int episodes) {
        buf_.clear();
        for (int e = 0; e < episodes; ++e) {
            RolloutBuffer::Episode ep;
            ep.start = static_cast<int>(buf_.size());
            Observation obs = env_.reset();
            bool done = false;
            Observation final_obs = obs;
            while (!done) {
                auto [mean, ls] = actor_forward(ac_, obs);
                auto [action, lp] = sample_action(mean, ls, rng_);
                StepResult sr = env_.step(action);
                buf_.obs.push_back(obs);
                buf_.act.push_back(action);
                buf_.logp.push_back(lp);
                buf_.reward.push_back(sr.reward);
                buf_.done.push_back(sr.terminated ? 1 : 0);
                ep.total_reward += sr.reward;
                obs = sr.observation;
                final_obs = sr.observation;
                if (sr.terminated || sr.truncated) {
                    ep.terminated = sr.terminated;
                    done = true;
                }
            }
            ep.len = static_cast<int>(buf_.size()) - ep.start;
            // bootstrap for a truncated tail: V of the state we stopped in
            if (!ep.terminated) {
                Eigen::MatrixXd v = ac_.critic.forward(final_obs.transpose());
                ep.bootstrap = v(0, 0);
            }
            buf_.episodes.push_back(ep);
            ++episodes_done_;
            steps_done_ += ep.len;
        }
        // critic values for every stored observation, one batched pass
        const Eigen::Index n = static_cast<Eigen::Index>(buf_.size());
        Eigen::MatrixXd X(n, 11);
        for (Eigen::Index i = 0; i < n; ++i) X.row(i) = buf_.obs[i].transpose();
        Eigen::VectorXd values = ac_.critic.forward(X).col(0);
        buf_.value.assign(values.data(), values.data() + n);
        buf_.compute_advantages(hp_.gamma, hp_.gae_lambda);
        buf_.normalize_advantages();
    }

    UpdateMetrics update_policy() {
        const Eigen::Index n = static_cast<Eigen::Index>(buf_.size());
        Eigen::MatrixXd obs(n, 11), act(n, 3);
        Eigen::VectorXd logp_old(n), adv(n), ret(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            obs.row(i) = buf_.obs[i].transpose();
            act.row(i) = buf_.act[i].transpose();
            logp_old[i] = buf_.logp[i];
            adv[i] = buf_.advantage[i];
            ret[i] = buf_.ret[i];
        }

        UpdateMetrics m;
        double ep_return = 0.0;
        for (const auto& ep : buf_.episodes) ep_return += ep.total_reward;
        m.mean_return = ep_return / static_cast<double>(buf_.episodes.size());

        std::vector<int> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        Eigen::VectorXd grad;
        long batches = 0;
        for (int epoch = 0; epoch < hp_.epochs; ++epoch) {
            shuffle(idx);
            for (Eigen::Index lo = 0; lo < n; lo += hp_.minibatch_size) {
                const Eigen::Index m_end = std::min<Eigen::Index>(lo + hp_.minibatch_size, n);
                const Eigen::Index bsz = m_end - lo;
                Eigen::MatrixXd bo(bsz, 11), ba(bsz, 3);
                Eigen::VectorXd blp(bsz), badv(bsz), bret(bsz);
                for (Eigen::Index k = 0; k < bsz; ++k) {
                    const int i = idx[lo + k];
                    bo.row(k) = obs.row(i);
                    ba.row(k) = act.row(i);
                    blp[k] = logp_old[i];
                    badv[k] = adv[i];
                    bret[k] = ret[i];
                }
                LossStats s = ppo_objective(bo, ba, blp, badv, bret, ac_, hp_, grad);
                optimizer_step(flat_params_, grad, opt_, hp_.learning_rate);
                // project log_std back into its box, then sync the nets
                const int off = ac_.actor.num_params();
                for (Eigen::Index i = 0; i < ac_.log_std.size(); ++i)
                    flat_params_[off + i] =
                        clamp(flat_params_[off + i], kLogStdMin, kLogStdMax);
                ac_.unflatten(flat_params_);
                m.actor_loss += s.actor_loss;
                m.value_loss += s.value_loss;
                m.entropy += s.entropy;
                m.clip_frac += s.clip_frac;
                m.approx_kl += s.approx_kl;
                ++batches;
            }
        }
        if (batches > 0) {
            m.actor_loss /= static_cast<double>(batches);
            m.value_loss /= static_cast<double>(batches);
            m.entropy /= static_cast<double>(batches);
            m.clip_frac /= static_cast<double>(batches);
            m.approx_kl /= static_cast<double>(batches);
        }
        buf_.clear();  // on-policy: nothing is reused
        return m;
    }

    // Fisher-Yates on our deterministic rng
    void shuffle(std::vector<int>& idx) {
        for (size_t i = idx.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(rng_.uniform() * static_cast<double>(i));
            if (j >= i) j = i - 1;
            std::swap(idx[i - 1], idx[j]);
        }
    }

    SpinEnv env_;
    PPOHyperparams hp_;
    Rng rng_;
    ActorCritic ac_;
    Eigen::VectorXd flat_params_;
    AdamState opt_;
    RolloutBuffer buf_;
    long episodes_done_ = 0;
    long updates_done_ = 0;
    long steps_done_ = 0;
};

}  // namespace spinrl
