#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "spinrl/aero.hpp"
#include "spinrl/aircraft.hpp"
#include "spinrl/checkpoint.hpp"
#include "spinrl/common.hpp"
#include "spinrl/env.hpp"
#include "spinrl/ppo.hpp"

namespace spinrl {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline nlohmann::json parse_json(const std::string& text, const std::string& what) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(what + ": " + e.what());
    }
}

inline EnvConfig load_env_config(const nlohmann::json& j) {
    EnvConfig c;
    try {
        c.dt = j.value("dt", c.dt);
        c.episode_len = j.value("episode_len", c.episode_len);
        c.spin_hold = j.value("spin_hold", c.spin_hold);
        if (j.contains("hold_controls")) {
            const auto& h = j.at("hold_controls");
            c.hold_controls.delta_e = h.value("de", 0.0);
            c.hold_controls.delta_a = h.value("da", 0.0);
            c.hold_controls.delta_r = h.value("dr", 0.0);
        }
        if (j.contains("initial_state")) {
            auto v = j.at("initial_state").get<std::vector<double>>();
            if (v.size() != 8)
                throw ConfigError("scenario: initial_state must have 8 entries");
            for (int i = 0; i < 8; ++i) c.initial_state[i] = v[i];
        }
        std::string tm = j.value("target_mode", std::string("fixed"));
        if (tm == "fixed")
            c.target_mode = TargetMode::Fixed;
        else if (tm == "sampled")
            c.target_mode = TargetMode::Sampled;
        else
            throw ConfigError("scenario: target_mode must be fixed|sampled");
        c.fixed_targets.alpha_d = j.value("alpha_target", 0.3);
        c.fixed_targets.beta_d = j.value("beta_target", 0.0);
        c.fixed_targets.mu_d = j.value("mu_target", 0.0);
        c.alpha_target_lo = j.value("alpha_target_lo", c.alpha_target_lo);
        c.alpha_target_hi = j.value("alpha_target_hi", c.alpha_target_hi);
        c.eta = j.value("eta", c.eta);
        c.terminal_penalty = j.value("terminal_penalty", c.terminal_penalty);
        c.start_altitude = j.value("start_altitude", c.start_altitude);
        c.seed = j.value("seed", c.seed);
        if (j.contains("limits")) {
            const auto& l = j.at("limits");
            auto chan = [&](const char* name, ChannelLimit& out) {
                if (!l.contains(name)) return;
                auto v = l.at(name).get<std::vector<double>>();
                if (v.size() != 2) throw ConfigError("scenario: limit needs [min, max]");
                out.min = v[0];
                out.max = v[1];
            };
            chan("elevator", c.limits.elevator);
            chan("aileron", c.limits.aileron);
            chan("rudder", c.limits.rudder);
        }
        if (j.contains("reward")) {
            const auto& r = j.at("reward");
            c.reward.w_p1 = r.value("w_p1", c.reward.w_p1);
            c.reward.w_p21 = r.value("w_p21", c.reward.w_p21);
            c.reward.w_p22 = r.value("w_p22", c.reward.w_p22);
            c.reward.rate_threshold = r.value("rate_threshold", c.reward.rate_threshold);
            c.reward.bonus_alpha = r.value("bonus_alpha", c.reward.bonus_alpha);
            c.reward.bonus_beta = r.value("bonus_beta", c.reward.bonus_beta);
            c.reward.bonus_mu = r.value("bonus_mu", c.reward.bonus_mu);
            c.reward.bonus_band = r.value("bonus_band", c.reward.bonus_band);
            c.reward.Gamma = r.value("gamma", c.reward.Gamma);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("scenario: ") + e.what());
    }
    c.validate();
    return c;
}

inline nlohmann::json save_env_config(const EnvConfig& c) {
    nlohmann::json j = {
        {"dt", c.dt},
        {"episode_len", c.episode_len},
        {"spin_hold", c.spin_hold},
        {"hold_controls",
         {{"de", c.hold_controls.delta_e},
          {"da", c.hold_controls.delta_a},
          {"dr", c.hold_controls.delta_r}}},
        {"initial_state", c.initial_state},
        {"target_mode", c.target_mode == TargetMode::Fixed ? "fixed" : "sampled"},
        {"alpha_target", c.fixed_targets.alpha_d},
        {"beta_target", c.fixed_targets.beta_d},
        {"mu_target", c.fixed_targets.mu_d},
        {"alpha_target_lo", c.alpha_target_lo},
        {"alpha_target_hi", c.alpha_target_hi},
        {"eta", c.eta},
        {"terminal_penalty", c.terminal_penalty},
        {"start_altitude", c.start_altitude},
        {"seed", c.seed},
        {"limits",
         {{"elevator", {c.limits.elevator.min, c.limits.elevator.max}},
          {"aileron", {c.limits.aileron.min, c.limits.aileron.max}},
          {"rudder", {c.limits.rudder.min, c.limits.rudder.max}}}},
        {"reward",
         {{"w_p1", c.reward.w_p1},
          {"w_p21", c.reward.w_p21},
          {"w_p22", c.reward.w_p22},
          {"rate_threshold", c.reward.rate_threshold},
          {"bonus_alpha", c.reward.bonus_alpha},
          {"bonus_beta", c.reward.bonus_beta},
          {"bonus_mu", c.reward.bonus_mu},
          {"bonus_band", c.reward.bonus_band},
          {"gamma", c.reward.Gamma}}},
    };
    return j;
}

inline PPOHyperparams load_ppo_config(const nlohmann::json& j) {
    PPOHyperparams hp = checkpoint_detail::hp_from_json(j);
    hp.validate();
    return hp;
}

// a full experiment: aircraft + aero + scenario + ppo, each given inline or
// as a path relative to the experiment file.
struct ExperimentConfig {
    nlohmann::json aircraft;
    nlohmann::json aero;
    nlohmann::json scenario;
    nlohmann::json ppo;
    std::string out_dir = "runs/out";
    std::uint64_t seed = 0;
    std::string label = "run";

    // normalized, fully inline form; its dump is what gets hashed
    nlohmann::json to_json() const {
        return {{"label", label},   {"seed", seed},         {"out_dir", out_dir},
                {"aircraft", aircraft}, {"aero", aero},     {"scenario", scenario},
                {"ppo", ppo}};
    }
};

inline nlohmann::json resolve_section(const nlohmann::json& v,
                                      const std::filesystem::path& base,
                                      const std::string& what) {
    if (v.is_object()) return v;
    if (v.is_string()) {
        std::filesystem::path p = v.get<std::string>();
        if (p.is_relative()) p = base / p;
        return parse_json(read_file(p.string()), what + " (" + p.string() + ")");
    }
    throw ConfigError(what + ": must be an inline object or a file path");
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
    nlohmann::json j = parse_json(read_file(path), "experiment config");
    // a run manifest embeds the effective config under "config"
    if (j.contains("config_sha256") && j.contains("config")) j = j.at("config");
    const std::filesystem::path base = std::filesystem::path(path).parent_path();
    ExperimentConfig c;
    try {
        if (!j.contains("aircraft") || !j.contains("aero") || !j.contains("scenario") ||
            !j.contains("ppo"))
            throw ConfigError(
                "experiment config: needs aircraft, aero, scenario and ppo sections");
        c.aircraft = resolve_section(j.at("aircraft"), base, "aircraft config");
        c.aero = resolve_section(j.at("aero"), base, "aero config");
        c.scenario = resolve_section(j.at("scenario"), base, "scenario config");
        c.ppo = resolve_section(j.at("ppo"), base, "ppo config");
        c.out_dir = j.value("out_dir", c.out_dir);
        c.seed = j.value("seed", c.seed);
        c.label = j.value("label", c.label);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("experiment config: ") + e.what());
    }
    return c;
}

// parse + cross-validate everything; throws ConfigError on the first problem
struct ValidatedExperiment {
    AircraftParams aircraft;
    AeroModel aero;
    EnvConfig env;
    PPOHyperparams ppo;
};

inline ValidatedExperiment validate_experiment(const ExperimentConfig& c) {
    ValidatedExperiment v;
    v.aircraft = load_aircraft_params(c.aircraft);
    v.aero = AeroModel(load_aero_config(c.aero));
    v.env = load_env_config(c.scenario);
    v.ppo = load_ppo_config(c.ppo);
    return v;
}

}  // namespace spinrl
