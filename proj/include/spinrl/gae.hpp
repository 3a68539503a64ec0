#pragma once

#include <cstdint>
#include <vector>

#include "spinrl/common.hpp"

namespace spinrl {

struct GaeResult {
    std::vector<double> advantages;
    std::vector<double> returns;  // advantage + value
};

// generalized advantage estimation over one contiguous reward sequence.
// dones mark *terminated* steps only; a truncated tail keeps done = 0 and
// bootstraps from bootstrap_value = V(s_T). delta_t = r_t + G*V_{t+1}*(1-d_t)
// - V_t; A_t = delta_t + G*lambda*(1-d_t)*A_{t+1}.
inline GaeResult compute_gae(const std::vector<double>& rewards,
                             const std::vector<double>& values,
                             const std::vector<std::uint8_t>& dones,
                             double bootstrap_value, double gamma, double lambda) {
    const size_t T = rewards.size();
    if (values.size() != T || dones.size() != T)
        throw LengthMismatch("compute_gae: rewards/values/dones lengths differ");
    GaeResult out;
    out.advantages.assign(T, 0.0);
    out.returns.assign(T, 0.0);
    double next_adv = 0.0;
    double next_value = bootstrap_value;
    for (size_t i = T; i-- > 0;) {
        const double not_done = dones[i] ? 0.0 : 1.0;
        const double delta = rewards[i] + gamma * next_value * not_done - values[i];
        next_adv = delta + gamma * lambda * not_done * next_adv;
        out.advantages[i] = next_adv;
        out.returns[i] = next_adv + values[i];
        next_value = values[i];
    }
    return out;
}

}  // namespace spinrl
