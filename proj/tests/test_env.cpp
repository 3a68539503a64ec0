#include <cmath>

#include <gtest/gtest.h>

#include "spinrl/env.hpp"

#include "support.hpp"

using namespace spinrl;

namespace {

EnvConfig base_config() {
    EnvConfig c;
    c.spin_hold = 0.0;
    c.episode_len = 400;
    return c;
}

SpinEnv make_env(const EnvConfig& c) {
    return SpinEnv(support::default_aircraft(), support::default_aero(), c);
}

Action random_action(Rng& rng) {
    return Action(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
}

}  // namespace

TEST(Env, DeterministicUnderSameSeed) {
    EnvConfig c = base_config();
    c.target_mode = TargetMode::Sampled;
    c.seed = 99;
    SpinEnv a = make_env(c), b = make_env(c);
    Observation oa = a.reset(), ob = b.reset();
    ASSERT_EQ(memcmp(oa.data(), ob.data(), sizeof(double) * 11), 0);

    Rng actions(5);
    for (int i = 0; i < 200; ++i) {
        const Action act = random_action(actions);
        StepResult ra = a.step(act), rb = b.step(act);
        // bit-identical trajectories, not merely close
        ASSERT_EQ(memcmp(ra.raw_state.ode_vector().data(), rb.raw_state.ode_vector().data(),
                         sizeof(double) * 13), 0) << "step " << i;
        ASSERT_EQ(ra.reward, rb.reward);
        ASSERT_EQ(ra.terminated, rb.terminated);
        if (ra.terminated || ra.truncated) break;
    }
}

TEST(Env, HoldPhaseIgnoresAgentActions) {
    EnvConfig c = base_config();
    c.spin_hold = 1.0;  // 100 steps
    c.hold_controls = ControlInput{-0.05, 0.01, 0.02, 0.0};
    SpinEnv a = make_env(c), b = make_env(c);
    a.reset();
    b.reset();
    Rng actions(31);
    for (int i = 0; i < 100; ++i) {
        ASSERT_TRUE(a.in_hold());
        StepResult ra = a.step(random_action(actions));
        StepResult rb = b.step(random_action(actions));
        ASSERT_EQ(ra.applied.delta_e, c.hold_controls.delta_e);
        ASSERT_EQ(ra.applied.delta_a, c.hold_controls.delta_a);
        ASSERT_EQ(ra.applied.delta_r, c.hold_controls.delta_r);
        ASSERT_EQ(memcmp(ra.raw_state.ode_vector().data(), rb.raw_state.ode_vector().data(),
                         sizeof(double) * 13), 0) << "hold step " << i;
        ASSERT_EQ(ra.reward, rb.reward) << "actions must not leak into hold rewards";
    }
    EXPECT_FALSE(a.in_hold());
    // once the hold ends, different actions make the trajectories diverge
    StepResult ra = a.step(Action(1.0, 0.0, 0.0));
    StepResult rb = b.step(Action(-1.0, 0.0, 0.0));
    EXPECT_NE(ra.raw_state.q, rb.raw_state.q);
}

TEST(Env, TruncatesAtEpisodeLength) {
    EnvConfig c = base_config();
    c.episode_len = 50;
    c.spin_hold = 10.0;  // hold the spin script the whole episode
    SpinEnv env = make_env(c);
    env.reset();
    StepResult last;
    for (int i = 0; i < 50; ++i) {
        last = env.step(Action::Zero());
        if (i + 1 < 50) {
            ASSERT_FALSE(last.truncated);
            ASSERT_FALSE(last.terminated);
        }
    }
    EXPECT_TRUE(last.truncated);
    EXPECT_FALSE(last.terminated);
    EXPECT_TRUE(env.episode_over());
    EXPECT_THROW(env.step(Action::Zero()), DomainError);
}

TEST(Env, EnvelopeViolationAddsExactPenalty) {
    EnvConfig c = base_config();
    c.start_altitude = 1.0;  // the spin sinks through the floor immediately
    SpinEnv env = make_env(c);
    env.reset();
    StepResult r;
    int steps = 0;
    do {
        r = env.step(Action::Zero());
        ++steps;
    } while (!r.terminated && steps < 10);
    ASSERT_TRUE(r.terminated);
    EXPECT_EQ(r.termination_reason, "ground");
    EXPECT_EQ(r.reward_components.penalty, -1000.0);
    const double without = r.reward_components.phase1 + r.reward_components.phase2 +
                           r.reward_components.shaping;
    EXPECT_EQ(r.reward - without, -1000.0);
}

TEST(Env, TerminationReasonsNamed) {
    AircraftState x;
    x.V = 207.0;
    x.h = 5000.0;
    EXPECT_TRUE(check_termination(x).ok);
    auto reason = [&](auto&& mutate) {
        AircraftState y = x;
        mutate(y);
        return check_termination(y).reason;
    };
    EXPECT_EQ(reason([](AircraftState& s) { s.V = 2100.0; }), "speed");
    EXPECT_EQ(reason([](AircraftState& s) { s.alpha = 1.6; }), "alpha");
    EXPECT_EQ(reason([](AircraftState& s) { s.beta = 3.5; }), "beta");
    EXPECT_EQ(reason([](AircraftState& s) { s.p = 32.0; }), "p");
    EXPECT_EQ(reason([](AircraftState& s) { s.q = -32.0; }), "q");
    EXPECT_EQ(reason([](AircraftState& s) { s.r = 32.0; }), "r");
    EXPECT_EQ(reason([](AircraftState& s) { s.gamma = -1.75; }), "gamma");
    EXPECT_EQ(reason([](AircraftState& s) { s.h = -1.0; }), "ground");
    EXPECT_EQ(reason([](AircraftState& s) { s.V = std::nan(""); }), "nonfinite");
}

TEST(Env, ObservationRoundTrip) {
    const ObservationBounds b;
    const AttitudeTargets tgt{0.25, 0.0, 0.0};
    Rng rng(13);
    for (int draw = 0; draw < 200; ++draw) {
        AircraftState x;
        x.V = rng.uniform(b.lo[0], b.hi[0]);
        x.alpha = rng.uniform(b.lo[1], b.hi[1]);
        x.beta = rng.uniform(b.lo[2], b.hi[2]);
        x.p = rng.uniform(b.lo[3], b.hi[3]);
        x.q = rng.uniform(b.lo[4], b.hi[4]);
        x.r = rng.uniform(b.lo[5], b.hi[5]);
        x.mu = rng.uniform(b.lo[6], b.hi[6]);
        x.gamma = rng.uniform(b.lo[7], b.hi[7]);
        const Observation o = normalize_observation(x, tgt);
        const std::array<double, 8> expect = {x.V, x.alpha, x.beta, x.p,
                                              x.q, x.r,     x.mu,   x.gamma};
        for (int i = 0; i < 8; ++i) {
            ASSERT_GE(o[i], -1.0);
            ASSERT_LE(o[i], 1.0);
            const double back = b.lo[i] + (o[i] + 1.0) / 2.0 * (b.hi[i] - b.lo[i]);
            ASSERT_NEAR(back, expect[i], 1e-12) << "row " << i;
        }
        // target rows reuse the matching state rows' normalization
        const double back_ad = b.lo[1] + (o[8] + 1.0) / 2.0 * (b.hi[1] - b.lo[1]);
        ASSERT_NEAR(back_ad, tgt.alpha_d, 1e-12);
    }
    // out-of-range values are clipped, not extrapolated
    AircraftState far;
    far.V = 5000.0;
    far.alpha = -2.0;
    EXPECT_EQ(normalize_observation(far, tgt)[0], 1.0);
    EXPECT_EQ(normalize_observation(far, tgt)[1], -1.0);
}

TEST(Env, ActionScalingMatchesActuatorBox) {
    SpinEnv env = make_env(base_config());
    const ControlInput mid = env.scale_action(Action::Zero());
    EXPECT_NEAR(mid.delta_e, -0.1305, 1e-12);
    EXPECT_NEAR(mid.delta_a, 0.0, 1e-12);
    EXPECT_NEAR(mid.delta_r, 0.0, 1e-12);
    const ControlInput lo = env.scale_action(Action(-1, -1, -1));
    EXPECT_DOUBLE_EQ(lo.delta_e, -0.436);
    EXPECT_DOUBLE_EQ(lo.delta_a, -0.436);
    EXPECT_DOUBLE_EQ(lo.delta_r, -0.524);
    const ControlInput hi = env.scale_action(Action(1, 1, 1));
    EXPECT_DOUBLE_EQ(hi.delta_e, 0.175);
    EXPECT_DOUBLE_EQ(hi.delta_r, 0.524);
    // values outside [-1,1] clip before mapping
    const ControlInput wild = env.scale_action(Action(7.0, -9.0, 0.0));
    EXPECT_DOUBLE_EQ(wild.delta_e, 0.175);
    EXPECT_DOUBLE_EQ(wild.delta_a, -0.436);
}

TEST(Env, RewardComponentsSumToScalar) {
    EnvConfig c = base_config();
    c.episode_len = 300;
    SpinEnv env = make_env(c);
    env.reset();
    Rng actions(41);
    for (int i = 0; i < 300; ++i) {
        const StepResult r = env.step(random_action(actions));
        const RewardComponents& rc = r.reward_components;
        ASSERT_NEAR(r.reward, rc.phase1 + rc.phase2 + rc.shaping + rc.penalty, 1e-12)
            << "step " << i;
        // exactly one phase term is live on any step
        ASSERT_TRUE(rc.phase1 == 0.0 || rc.phase2 == 0.0) << "step " << i;
        if (r.terminated || r.truncated) break;
    }
}

TEST(Env, ActionScalingMonotonePerChannel) {
    SpinEnv env = make_env(base_config());
    ControlInput prev = env.scale_action(Action(-1.0, -1.0, -1.0));
    for (int k = 1; k <= 40; ++k) {
        const double raw = -1.0 + 2.0 * k / 40.0;
        const ControlInput cur = env.scale_action(Action(raw, raw, raw));
        ASSERT_GT(cur.delta_e, prev.delta_e) << "raw " << raw;
        ASSERT_GT(cur.delta_a, prev.delta_a);
        ASSERT_GT(cur.delta_r, prev.delta_r);
        prev = cur;
    }
}

TEST(Env, AnglesStayWrapped) {
    EnvConfig c = base_config();
    c.episode_len = 300;
    SpinEnv env = make_env(c);
    env.reset();
    for (int i = 0; i < 300; ++i) {
        StepResult r = env.step(Action::Zero());
        ASSERT_LT(std::fabs(r.raw_state.mu), kPi + 1e-12) << "step " << i;
        ASSERT_LT(std::fabs(r.raw_state.psi), kPi + 1e-12);
        if (r.terminated || r.truncated) break;
    }
}

TEST(Env, SampledTargetsReproducible) {
    EnvConfig c = base_config();
    c.target_mode = TargetMode::Sampled;
    SpinEnv env = make_env(c);
    env.reset(123);
    const double first = env.targets().alpha_d;
    EXPECT_GE(first, c.alpha_target_lo);
    EXPECT_LE(first, c.alpha_target_hi);
    EXPECT_EQ(env.targets().beta_d, 0.0);
    env.reset();  // continues the stream: a fresh draw
    const double second = env.targets().alpha_d;
    EXPECT_NE(first, second);
    env.reset(123);  // reseeding reproduces the first draw
    EXPECT_EQ(env.targets().alpha_d, first);
}

TEST(Env, StepBeforeResetThrows) {
    SpinEnv env = make_env(base_config());
    EXPECT_THROW(env.step(Action::Zero()), DomainError);
}

TEST(Env, ResetInitialStateAndTargets) {
    EnvConfig c = base_config();
    SpinEnv env = make_env(c);
    env.reset();
    const AircraftState& x = env.state();
    EXPECT_DOUBLE_EQ(x.V, 207.576);
    EXPECT_DOUBLE_EQ(x.alpha, 1.2375);
    EXPECT_DOUBLE_EQ(x.h, 8500.0);
    EXPECT_DOUBLE_EQ(x.chi, 0.0);
    EXPECT_DOUBLE_EQ(env.targets().alpha_d, 0.3);
    // euler angles consistent with the wind-axis attitude at reset
    double phi, theta, psi;
    euler_from_wind(x.mu, x.gamma, x.chi, x.alpha, x.beta, phi, theta, psi);
    EXPECT_DOUBLE_EQ(x.phi, phi);
    EXPECT_DOUBLE_EQ(x.theta, theta);
    EXPECT_DOUBLE_EQ(x.psi, psi);
}

TEST(Env, ConfigValidation) {
    EnvConfig c = base_config();
    c.dt = 0.0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = base_config();
    c.terminal_penalty = 5.0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = base_config();
    c.eta = 1.5;
    EXPECT_THROW(c.validate(), ConfigError);
    c = base_config();
    c.limits.elevator = {0.3, -0.3};
    EXPECT_THROW(c.validate(), ConfigError);
}
