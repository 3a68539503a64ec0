#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "spinrl/common.hpp"
#include "spinrl/policy.hpp"
#include "spinrl/ppo.hpp"
#include "spinrl/rng.hpp"

namespace spinrl {

// checkpoint file: 8-byte magic, u32 format version, u64 JSON header length,
// JSON header (shapes, hyperparameters, counters, rng state), then the flat
// parameter vector as raw little-endian doubles. doubles round-trip as raw
// bytes, so save/load is bit-exact.
struct Checkpoint {
    static constexpr char kMagic[9] = "SPINRLCP";
    static constexpr std::uint32_t kVersion = 1;

    ActorCritic params;
    PPOHyperparams hp;
    std::string trainer_rng;
    std::string env_rng;
    long episodes_done = 0;
    long updates_done = 0;
};

namespace checkpoint_detail {

inline nlohmann::json hp_to_json(const PPOHyperparams& hp) {
    return {
        {"learning_rate", hp.learning_rate},
        {"gamma", hp.gamma},
        {"clip_eps", hp.clip_eps},
        {"gae_lambda", hp.gae_lambda},
        {"epochs", hp.epochs},
        {"minibatch_size", hp.minibatch_size},
        {"rollout_horizon", hp.rollout_horizon},
        {"entropy_coef", hp.entropy_coef},
        {"value_coef", hp.value_coef},
        {"max_grad_norm", hp.max_grad_norm},
        {"total_episodes", hp.total_episodes},
        {"checkpoint_every", hp.checkpoint_every},
        {"seed", hp.seed},
    };
}

inline PPOHyperparams hp_from_json(const nlohmann::json& j) {
    PPOHyperparams hp;
    hp.learning_rate = j.value("learning_rate", hp.learning_rate);
    hp.gamma = j.value("gamma", hp.gamma);
    hp.clip_eps = j.value("clip_eps", hp.clip_eps);
    hp.gae_lambda = j.value("gae_lambda", hp.gae_lambda);
    hp.epochs = j.value("epochs", hp.epochs);
    hp.minibatch_size = j.value("minibatch_size", hp.minibatch_size);
    hp.rollout_horizon = j.value("rollout_horizon", hp.rollout_horizon);
    hp.entropy_coef = j.value("entropy_coef", hp.entropy_coef);
    hp.value_coef = j.value("value_coef", hp.value_coef);
    hp.max_grad_norm = j.value("max_grad_norm", hp.max_grad_norm);
    hp.total_episodes = j.value("total_episodes", hp.total_episodes);
    hp.checkpoint_every = j.value("checkpoint_every", hp.checkpoint_every);
    hp.seed = j.value("seed", hp.seed);
    return hp;
}

}  // namespace checkpoint_detail

inline void save_checkpoint(const Checkpoint& ck, const std::string& path) {
    nlohmann::json header = {
        {"actor_sizes", ck.params.actor.layer_sizes()},
        {"critic_sizes", ck.params.critic.layer_sizes()},
        {"act_dim", ck.params.log_std.size()},
        {"hyperparams", checkpoint_detail::hp_to_json(ck.hp)},
        {"trainer_rng", ck.trainer_rng},
        {"env_rng", ck.env_rng},
        {"episodes_done", ck.episodes_done},
        {"updates_done", ck.updates_done},
    };
    const std::string htext = header.dump();
    const Eigen::VectorXd flat = ck.params.flatten();

    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("checkpoint: cannot open '" + path + "' for writing");
    out.write(Checkpoint::kMagic, 8);
    std::uint32_t ver = Checkpoint::kVersion;
    out.write(reinterpret_cast<const char*>(&ver), sizeof(ver));
    std::uint64_t hlen = htext.size();
    out.write(reinterpret_cast<const char*>(&hlen), sizeof(hlen));
    out.write(htext.data(), static_cast<std::streamsize>(htext.size()));
    std::uint64_t nparams = static_cast<std::uint64_t>(flat.size());
    out.write(reinterpret_cast<const char*>(&nparams), sizeof(nparams));
    out.write(reinterpret_cast<const char*>(flat.data()),
              static_cast<std::streamsize>(flat.size() * sizeof(double)));
    if (!out) throw ConfigError("checkpoint: write failure on '" + path + "'");
}

inline Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IncompatibleCheckpoint("checkpoint: cannot open '" + path + "'");
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, Checkpoint::kMagic, 8) != 0)
        throw IncompatibleCheckpoint("checkpoint: bad magic in '" + path + "'");
    std::uint32_t ver = 0;
    in.read(reinterpret_cast<char*>(&ver), sizeof(ver));
    if (!in || ver != Checkpoint::kVersion)
        throw IncompatibleCheckpoint("checkpoint: unsupported format version");
    std::uint64_t hlen = 0;
    in.read(reinterpret_cast<char*>(&hlen), sizeof(hlen));
    if (!in || hlen > (1u << 20)) throw IncompatibleCheckpoint("checkpoint: corrupt header");
    std::string htext(hlen, '\0');
    in.read(htext.data(), static_cast<std::streamsize>(hlen));
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(htext);
    } catch (const nlohmann::json::exception& e) {
        throw IncompatibleCheckpoint(std::string("checkpoint: bad header: ") + e.what());
    }

    Checkpoint ck;
    try {
        std::vector<int> asz = header.at("actor_sizes").get<std::vector<int>>();
        std::vector<int> csz = header.at("critic_sizes").get<std::vector<int>>();
        ck.params.actor = Mlp(asz);
        ck.params.critic = Mlp(csz);
        ck.params.log_std = Eigen::VectorXd::Zero(header.at("act_dim").get<int>());
        ck.hp = checkpoint_detail::hp_from_json(header.at("hyperparams"));
        ck.trainer_rng = header.value("trainer_rng", std::string());
        ck.env_rng = header.value("env_rng", std::string());
        ck.episodes_done = header.value("episodes_done", 0L);
        ck.updates_done = header.value("updates_done", 0L);
    } catch (const nlohmann::json::exception& e) {
        throw IncompatibleCheckpoint(std::string("checkpoint: bad header: ") + e.what());
    }

    std::uint64_t nparams = 0;
    in.read(reinterpret_cast<char*>(&nparams), sizeof(nparams));
    if (!in || nparams != static_cast<std::uint64_t>(ck.params.num_params()))
        throw IncompatibleCheckpoint("checkpoint: parameter count does not match shapes");
    Eigen::VectorXd flat(static_cast<Eigen::Index>(nparams));
    in.read(reinterpret_cast<char*>(flat.data()),
            static_cast<std::streamsize>(nparams * sizeof(double)));
    if (!in) throw IncompatibleCheckpoint("checkpoint: truncated parameter block");
    ck.params.unflatten(flat);
    return ck;
}

}  // namespace spinrl
