#pragma once

#include <cmath>

#include <Eigen/Dense>

#include "spinrl/common.hpp"

namespace spinrl {

// Adam with bias correction over a flat parameter vector
struct AdamState {
    Eigen::VectorXd m;
    Eigen::VectorXd v;
    long step = 0;

    explicit AdamState(int n = 0)
        : m(Eigen::VectorXd::Zero(n)), v(Eigen::VectorXd::Zero(n)) {}
};

inline void optimizer_step(Eigen::VectorXd& params, const Eigen::VectorXd& grads,
                           AdamState& state, double lr, double beta1 = 0.9,
                           double beta2 = 0.999, double eps = 1e-8) {
    if (params.size() != grads.size() || params.size() != state.m.size())
        throw ShapeMismatch("adam: parameter/gradient/state sizes differ");
    ++state.step;
    state.m = beta1 * state.m + (1.0 - beta1) * grads;
    state.v = beta2 * state.v + (1.0 - beta2) * grads.cwiseProduct(grads);
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.step));
    params.array() -=
        lr * (state.m.array() / bc1) / ((state.v.array() / bc2).sqrt() + eps);
}

}  // namespace spinrl
