#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"
#include "uranex/pid.hpp"

using namespace uranex;

namespace {

const InputBounds kWide{0.0, 1e6, -1e6, 1e6};

}  // namespace

TEST(InputBounds, ClampOrderAndIdempotence)
{
    const InputBounds b{5.0, 80.0, -5.0, 5.0};
    EXPECT_EQ(b.clamp(100.0, 78.0), 80.0);
    EXPECT_EQ(b.clamp(100.0, 40.0), 45.0);
    EXPECT_EQ(b.clamp(0.0, 40.0), 35.0);
    EXPECT_EQ(b.clamp(0.0, 7.0), 5.0);
    for (double u : {-10.0, 3.0, 40.0, 44.0, 90.0}) {
        const double once = b.clamp(u, 40.0);
        EXPECT_EQ(b.clamp(once, 40.0), once);
    }
}

TEST(Pid, ZeroErrorReturnsSetInput)
{
    PidState st;
    st.u_prev = 30.0;
    const auto out = pid_step(st, {3.0, 2.0, 1.0}, 0.4, 0.4, 30.0, kWide);
    EXPECT_EQ(out.u, 30.0);
}

TEST(Pid, ZeroGainsIgnoreOutput)
{
    PidState st;
    st.u_prev = 30.0;
    for (double y : {0.0, 0.2, 5.0}) {
        EXPECT_EQ(pid_step(st, {}, y, 0.4, 30.0, kWide).u, 30.0);
    }
}

TEST(Pid, TrapezoidalIntegralGrowth)
{
    PidState st;
    st.T = 0.5;
    st.u_prev = 30.0;
    const double e = 0.1;
    const PidGains g{0.0, 1.0, 0.0};
    // First step integrates (0 + e)/2 * T, later steps e * T.
    auto a = pid_step(st, g, 0.3, 0.4, 30.0, kWide);
    EXPECT_NEAR(a.u - 30.0, 0.25 * e, 1e-12);
    auto b = pid_step(a.state, g, 0.3, 0.4, 30.0, kWide);
    EXPECT_NEAR(b.u - a.u, 0.5 * e, 1e-12);
    auto c = pid_step(b.state, g, 0.3, 0.4, 30.0, kWide);
    EXPECT_NEAR(c.u - b.u, 0.5 * e, 1e-12);
}

TEST(Pid, ProportionalAndDerivativeTerms)
{
    PidState st;
    st.T = 0.5;
    st.e_prev = 0.05;
    st.u_prev = 30.0;
    const auto out = pid_step(st, {10.0, 0.0, 2.0}, 0.3, 0.4, 30.0, kWide);
    EXPECT_NEAR(out.u, 30.0 + 10.0 * 0.1 + 2.0 * (0.1 - 0.05) / 0.5, 1e-12);
    EXPECT_EQ(out.state.e_prev, 0.4 - 0.3);
}

TEST(Pid, StoredInputIsClamped)
{
    PidState st;
    st.u_prev = 40.0;
    const InputBounds b{5.0, 80.0, -5.0, 5.0};
    const auto out = pid_step(st, {1000.0, 0.0, 0.0}, 0.0, 0.4, 40.0, b);
    EXPECT_EQ(out.u, 45.0);
    EXPECT_EQ(out.state.u_prev, 45.0);
}

TEST(PidRollout, ZeroGainsMatchOpenLoopObjective)
{
    const auto& fs = test::reference();
    PidTuningProblem prob;
    prob.x0 = test::uranium_free_start();
    prob.setpoint = test::nominal_setpoint();
    prob.p = fs.O_E_nominal;
    prob.u_prev = prob.setpoint.u_set;
    prob.steps = 4;
    const auto r = pid_rollout(prob, {}, fs);
    ASSERT_EQ(r.u.size(), 5u);
    ASSERT_EQ(r.y.size(), 5u);
    for (double u : r.u) {
        EXPECT_EQ(u, prob.setpoint.u_set);
    }
    double obj = 0.0;
    for (int k = 0; k < prob.steps; ++k) {
        obj += (r.y[k] - prob.setpoint.y_set()) * (r.y[k] - prob.setpoint.y_set());
    }
    EXPECT_NEAR(r.objective, obj, 1e-12 * obj);
}

TEST(TunePid, NeverWorseThanInitialGains)
{
    const auto& fs = test::reference();
    PidTuningProblem prob;
    prob.x0 = test::uranium_free_start();
    prob.setpoint = test::nominal_setpoint();
    prob.p = fs.O_E_nominal;
    prob.u_prev = prob.setpoint.u_set;
    prob.steps = 10;
    TuneOptions opt;
    opt.starts = 3;
    opt.max_iterations = 60;
    const PidGains init{20.0, 5.0, 0.0};
    const auto res = tune_pid(fs, prob, init, opt);
    ASSERT_EQ(res.starts.size(), 3u);
    for (const auto& s : res.starts) {
        EXPECT_LE(s.tuned_objective, s.initial_objective);
    }
    EXPECT_LE(res.objective, pid_rollout(prob, init, fs).objective);
    EXPECT_EQ(res.seed, opt.seed);
    // Reproducible for a fixed seed.
    const auto again = tune_pid(fs, prob, init, opt);
    EXPECT_EQ(again.gains, res.gains);
}

TEST(TunePid, BangBangPressureRespectsRateClamp)
{
    const auto& fs = test::reference();
    PidTuningProblem prob;
    prob.x0 = test::uranium_free_start();
    prob.setpoint = test::nominal_setpoint();
    prob.p = fs.O_E_nominal;
    prob.u_prev = prob.setpoint.u_set;
    prob.steps = 10;
    prob.r = 1e-300;
    prob.s = 1e-300;
    TuneOptions opt;
    opt.starts = 2;
    opt.max_iterations = 60;
    opt.scale = {4000.0, 2000.0, 400.0};
    const auto res = tune_pid(fs, prob, {2000.0, 0.0, 0.0}, opt);
    const auto r = pid_rollout(prob, res.gains, fs);
    double prev = prob.u_prev;
    for (double u : r.u) {
        EXPECT_LE(u, fs.u_max);
        EXPECT_GE(u, fs.u_min);
        EXPECT_LE(u - prev, fs.du_max + 1e-12);
        EXPECT_GE(u - prev, fs.du_min - 1e-12);
        prev = u;
    }
}
