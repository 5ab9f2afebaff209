#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "support.hpp"
#include "uranex/harness.hpp"

using namespace uranex;
using nlohmann::json;

namespace {

Trajectory constant_trajectory(int steps, double c, double p, int n_stages)
{
    Trajectory t;
    t.T_s = 0.5;
    CascadeState x(n_stages);
    x.at(Block::UogSettler, n_stages) = c;
    for (int k = 0; k <= steps; ++k) {
        t.time.push_back(0.5 * k);
        t.states.push_back(x);
        if (k < steps) {
            t.inputs.push_back(30.0);
            t.parameters.push_back(p);
            t.clamped.push_back(0.0);
        }
    }
    return t;
}

RunResult fake_run(ControllerKind c, double R)
{
    RunResult r;
    r.controller = c;
    r.extracted = R;
    r.trajectory = constant_trajectory(4, 0.1, 100.0, 16);
    return r;
}

}  // namespace

TEST(Controller, Names)
{
    for (auto c : {ControllerKind::OpenLoop, ControllerKind::Pid, ControllerKind::Nmpc}) {
        EXPECT_EQ(parse_controller(to_string(c)), c);
    }
    EXPECT_THROW(parse_controller("lqr"), ConfigError);
}

TEST(Extracted, ZeroTrajectory)
{
    EXPECT_EQ(extracted_uranium(constant_trajectory(10, 0.0, 100.0, 16), 10), 0.0);
}

TEST(Extracted, ClosedForm)
{
    const auto t = constant_trajectory(60, 0.4, 80.0, 16);
    EXPECT_NEAR(extracted_uranium(t, 60), 0.5 * 61 * 80.0 * 0.4, 1e-10);
    EXPECT_NEAR(extracted_uranium(t, 10), 0.5 * 11 * 80.0 * 0.4, 1e-10);
}

TEST(Settling, BandEntryTime)
{
    auto t = constant_trajectory(10, 1.0, 100.0, 16);
    t.states[3].at(Block::UogSettler, 16) = 1.5;
    const std::vector<double> target(11, 1.0);
    EXPECT_DOUBLE_EQ(settling_time(t, target, 0.02), 2.0);
    t.states[10].at(Block::UogSettler, 16) = 0.9;
    EXPECT_TRUE(std::isinf(settling_time(t, target, 0.02)));
}

TEST(Violation, Trapezoid)
{
    auto t = constant_trajectory(2, 0.0, 100.0, 16);
    t.states[1].at(Block::UaqSettler, 1) = 2e-3;
    EXPECT_NEAR(violation_integral(t, 1e-3), 0.5 * 1e-3, 1e-15);
}

TEST(Compare, EmptyAndSingle)
{
    EXPECT_TRUE(compare({}).empty());
    const auto rows = compare({fake_run(ControllerKind::Pid, 5.0)});
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_TRUE(std::isnan(rows[0].gain_vs_open_loop));
}

TEST(Compare, OrderAndGain)
{
    const auto rows = compare({fake_run(ControllerKind::OpenLoop, 100.0), fake_run(ControllerKind::Nmpc, 104.0),
                               fake_run(ControllerKind::Pid, 101.0)});
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[0].controller, "nmpc");
    EXPECT_EQ(rows[1].controller, "pid");
    EXPECT_EQ(rows[2].controller, "openloop");
    EXPECT_NEAR(rows[0].gain_vs_open_loop, 4.0, 1e-12);
    std::ostringstream csv;
    write_comparison_csv(csv, rows);
    EXPECT_NE(csv.str().find("nmpc"), std::string::npos);
}

TEST(Options, JsonRoundTripAndStrictness)
{
    HarnessOptions o;
    o.mpc.horizon = 7;
    o.pid.gains = PidGains{1.0, 2.0, 3.0};
    json j = o;
    const auto back = j.get<HarnessOptions>();
    EXPECT_EQ(back.mpc.horizon, 7);
    ASSERT_TRUE(back.pid.gains.has_value());
    EXPECT_EQ(*back.pid.gains, (PidGains{1.0, 2.0, 3.0}));
    EXPECT_EQ(json(back), j);
    j["surprise"] = 1;
    EXPECT_THROW(j.get<HarnessOptions>(), ConfigError);
}

TEST(Scenario, ValidationAndSchedule)
{
    const auto& fs = test::reference();
    HarnessOptions o;
    auto b = make_case('B', ControllerKind::OpenLoop, fs, o, {});
    EXPECT_EQ(b.steps(), 240);
    EXPECT_DOUBLE_EQ(b.p_at(0.0), 100.0);
    EXPECT_DOUBLE_EQ(b.p_at(30.0), 150.0);
    EXPECT_DOUBLE_EQ(b.p_at(59.5), 150.0);
    EXPECT_DOUBLE_EQ(b.p_at(60.0), 100.0);
    EXPECT_DOUBLE_EQ(b.p_at(119.5), 50.0);
    EXPECT_THROW(make_case('D', ControllerKind::Pid, fs, o, {}), ConfigError);
    b.schedule = {{5.0, 100.0}};
    EXPECT_THROW(b.validate(), ConfigError);
}

TEST(RunScenario, ZeroGainPidEqualsOpenLoop)
{
    const auto& fs = test::reference();
    HarnessOptions o;
    o.case_a_duration = 5.0;
    const auto ol = run_scenario(make_case('A', ControllerKind::OpenLoop, fs, o, {}), fs);
    const auto pid = run_scenario(make_case('A', ControllerKind::Pid, fs, o, {}), fs);
    ASSERT_EQ(ol.trajectory.states.size(), 11u);
    EXPECT_EQ(ol.trajectory.states, pid.trajectory.states);
    EXPECT_EQ(ol.trajectory.inputs, pid.trajectory.inputs);
    EXPECT_EQ(ol.extracted, pid.extracted);
    // Uranium-free start.
    EXPECT_LT(ol.trajectory.states[0].loaded(), 1e-20);
    EXPECT_EQ(ol.setpoints.size(), 1u);
}

TEST(RunScenario, SetPointEventsFollowSchedule)
{
    const auto& fs = test::reference();
    HarnessOptions o;
    o.case_b_duration = 32.0;
    o.disturbance_times = {31.0};
    o.disturbance_factors = {0.5};
    const auto r = run_scenario(make_case('B', ControllerKind::OpenLoop, fs, o, {}), fs);
    ASSERT_EQ(r.setpoints.size(), 2u);
    EXPECT_EQ(r.setpoints[1].step, 62);
    EXPECT_DOUBLE_EQ(r.setpoints[1].p, 50.0);
    EXPECT_LT(r.setpoints[1].u_set, r.setpoints[0].u_set);
    // Open loop moves toward the new u_set at the rate limit.
    EXPECT_DOUBLE_EQ(r.trajectory.inputs[62], r.trajectory.inputs[61] + fs.du_min);
    EXPECT_EQ(r.y_set.size(), r.trajectory.states.size());
}

TEST(Manifest, CarriesEverythingForARerun)
{
    const auto& fs = test::reference();
    HarnessOptions o;
    o.case_a_duration = 1.0;
    o.pid.gains = PidGains{1.0, 0.5, 0.0};
    const auto r = run_scenario(make_case('A', ControllerKind::Pid, fs, o, *o.pid.gains), fs);
    const json m = make_manifest(fs, o, 'A', {r}, std::nullopt);
    EXPECT_EQ(m.at("case"), "A");
    EXPECT_EQ(parse_flowsheet(m.at("flowsheet")).n_stages, 16);
    const auto back = m.at("options").get<HarnessOptions>();
    EXPECT_EQ(*back.pid.gains, *o.pid.gains);
    EXPECT_EQ(m.at("runs").size(), 1u);
}
