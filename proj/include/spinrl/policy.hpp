#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "spinrl/common.hpp"
#include "spinrl/mlp.hpp"
#include "spinrl/rng.hpp"

namespace spinrl {

inline constexpr double kLogStdMin = -5.0;
inline constexpr double kLogStdMax = 2.0;
inline constexpr double kLog2Pi = 1.8378770664093454836;  // log(2*pi)

// actor-critic parameter bundle: shared architecture in->256->128->out with
// tanh hidden activations, a state-independent learnable log-std vector for
// the diagonal Gaussian policy, and a scalar-output critic.
struct ActorCritic {
    Mlp actor;
    Eigen::VectorXd log_std;
    Mlp critic;

    ActorCritic() = default;

    ActorCritic(int obs_dim, int act_dim, const std::vector<int>& hidden = {256, 128}) {
        std::vector<int> a{obs_dim};
        a.insert(a.end(), hidden.begin(), hidden.end());
        a.push_back(act_dim);
        std::vector<int> c{obs_dim};
        c.insert(c.end(), hidden.begin(), hidden.end());
        c.push_back(1);
        actor = Mlp(a);
        critic = Mlp(c);
        log_std = Eigen::VectorXd::Constant(act_dim, std::log(0.5));
    }

    void init(Rng& rng) {
        actor.init_orthogonal(rng, std::sqrt(2.0), 0.01);
        critic.init_orthogonal(rng, std::sqrt(2.0), 1.0);
        log_std.setConstant(std::log(0.5));
    }

    int num_params() const {
        return actor.num_params() + static_cast<int>(log_std.size()) + critic.num_params();
    }

    // flat layout: actor params, log_std, critic params
    Eigen::VectorXd flatten() const {
        Eigen::VectorXd out(num_params());
        double* d = out.data();
        actor.flatten(d);
        d += actor.num_params();
        for (Eigen::Index i = 0; i < log_std.size(); ++i) *d++ = log_std[i];
        critic.flatten(d);
        return out;
    }

    void unflatten(const Eigen::VectorXd& flat) {
        if (flat.size() != num_params()) throw ShapeMismatch("actor-critic: flat size mismatch");
        const double* d = flat.data();
        actor.unflatten(d);
        d += actor.num_params();
        for (Eigen::Index i = 0; i < log_std.size(); ++i) log_std[i] = *d++;
        critic.unflatten(d);
    }

    void clamp_log_std() {
        for (Eigen::Index i = 0; i < log_std.size(); ++i)
            log_std[i] = clamp(log_std[i], kLogStdMin, kLogStdMax);
    }

    Eigen::VectorXd clamped_log_std() const {
        Eigen::VectorXd out = log_std;
        for (Eigen::Index i = 0; i < out.size(); ++i)
            out[i] = clamp(out[i], kLogStdMin, kLogStdMax);
        return out;
    }
};

// deterministic forward pass of the policy head
inline std::pair<Eigen::VectorXd, Eigen::VectorXd> actor_forward(const ActorCritic& ac,
                                                                 const Eigen::VectorXd& obs) {
    if (!obs.allFinite()) throw NumericalError("actor_forward: non-finite observation");
    Eigen::MatrixXd mean = ac.actor.forward(obs.transpose());
    if (!mean.allFinite()) throw NumericalError("actor_forward: non-finite mean");
    return {mean.row(0).transpose(), ac.clamped_log_std()};
}

// diagonal Gaussian log-density of each action row given each mean row
inline Eigen::VectorXd gaussian_log_prob(const Eigen::MatrixXd& means,
                                         const Eigen::MatrixXd& actions,
                                         const Eigen::VectorXd& log_std) {
    const Eigen::ArrayXd inv_var = (-2.0 * log_std.array()).exp();
    Eigen::ArrayXXd z2 = (actions - means).array().square();
    Eigen::VectorXd lp =
        (z2.rowwise() * inv_var.transpose()).rowwise().sum().matrix() * -0.5;
    const double offset = -log_std.sum() - 0.5 * kLog2Pi * static_cast<double>(log_std.size());
    lp.array() += offset;
    return lp;
}

// entropy of the diagonal Gaussian; independent of the state
inline double gaussian_entropy(const Eigen::VectorXd& log_std) {
    return log_std.sum() +
           0.5 * static_cast<double>(log_std.size()) * (1.0 + kLog2Pi);
}

// draw an action and report its log-density. log_std is clamped before use.
inline std::pair<Eigen::VectorXd, double> sample_action(const Eigen::VectorXd& mean,
                                                        const Eigen::VectorXd& log_std,
                                                        Rng& rng) {
    Eigen::VectorXd ls = log_std;
    for (Eigen::Index i = 0; i < ls.size(); ++i) ls[i] = clamp(ls[i], kLogStdMin, kLogStdMax);
    Eigen::VectorXd action(mean.size());
    double lp = 0.0;
    for (Eigen::Index i = 0; i < mean.size(); ++i) {
        double z = rng.normal();
        double sigma = std::exp(ls[i]);
        action[i] = mean[i] + sigma * z;
        lp += -0.5 * z * z - ls[i] - 0.5 * kLog2Pi;
    }
    return {action, lp};
}

}  // namespace spinrl
