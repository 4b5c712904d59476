#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <sstream>

#include "fixtures.hpp"
#include "hazsynth/simulator.hpp"

using namespace hazsynth;

namespace {

const std::vector<std::string> worked{"b2", "r", "t1", "u_S", "r", "t1", "t2", "d_R"};

}  // namespace

TEST_CASE("same inputs give a bit-identical trace") {
    const auto s = scenario_a_defaults();
    for (std::uint64_t seed : {1u, 7u, 12345u}) {
        const auto a = run_episode(s, worked, seed);
        const auto b = run_episode(s, worked, seed);
        CHECK(a == b);
    }
    CHECK(run_episode(s, worked, 1).walk_speed != run_episode(s, worked, 2).walk_speed);
}

TEST_CASE("walking to storage and back with the robot idle is riskless") {
    const auto s = scenario_a_defaults();
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto t = run_episode(s, {"t1", "t1"}, seed);
        CHECK(t.r_max == 0.0);
        CHECK(t.cause == TerminalCause::SequenceExhausted);
        CHECK_FALSE(t.infeasible);
        for (const auto& x : t.samples) {
            CHECK(x.v_r == 0.0);
            CHECK_FALSE(x.s);
        }
    }
}

TEST_CASE("the worked sequence ends in contact under override") {
    const auto s = scenario_a_defaults();
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        CAPTURE(seed);
        const auto t = run_episode(s, worked, seed);
        CHECK(t.cause == TerminalCause::Contact);
        CHECK(t.r_max >= 1.0);
        CHECK(classify_trace(t) == Safety::Unsafe);
        REQUIRE_FALSE(t.samples.empty());
        CHECK(t.samples.back().mode == RobotMode::Override);
        CHECK(t.samples.back().contact);
    }
}

TEST_CASE("trace samples obey the risk formula") {
    const auto s = scenario_a_defaults();
    for (const auto& seq : std::vector<std::vector<std::string>>{worked, {"b1", "t2", "t2"}, {"b1", "r", "t2", "t2", "t1"}}) {
        const auto t = run_episode(s, seq, 3);
        double m = 0.0;
        for (const auto& x : t.samples) {
            CHECK(x.d_hr >= 0.0);
            CHECK(x.v_r >= 0.0);
            if (x.contact) CHECK(x.d_hr == 0.0);
            const double f = x.contact ? contact_force(x.v_r, s.risk) : 0.0;
            CHECK(x.f_c == f);
            CHECK(x.r == risk(x.d_hr, x.v_r, x.contact, f, s.risk));
            m = std::max(m, x.r);
        }
        CHECK(t.r_max == m);
    }
}

TEST_CASE("laser zone flag follows the walk to the robot station") {
    const auto s = scenario_a_defaults();
    const auto t = run_episode(s, {"t2", "t2"}, 5);
    REQUIRE(t.samples.size() > 2);
    CHECK_FALSE(t.samples.front().s);
    CHECK(std::any_of(t.samples.begin(), t.samples.end(), [](const auto& x) { return x.s; }));
    CHECK_FALSE(t.samples.back().s);
    // Times are monotone with the configured step.
    for (std::size_t i = 1; i < t.samples.size(); ++i)
        CHECK(t.samples[i].time == Catch::Approx(t.samples[i - 1].time + s.time_step));
}

TEST_CASE("working mode stops the robot when the human enters the laser zone") {
    const auto s = scenario_a_defaults();
    const auto t = run_episode(s, {"b1", "r", "t1", "u_S", "r", "t1", "t2", "d_R"}, 11);
    bool stopped = false;
    for (const auto& x : t.samples) stopped = stopped || x.mode == RobotMode::Stopped;
    CHECK(stopped);
    CHECK(t.r_max < 1.0);
}

TEST_CASE("zero latency and braking never allow hazardous contact without override") {
    auto s = scenario_a_defaults();
    s.robot.detection_latency = 0.0;
    s.robot.braking_time = 0.0;
    const std::vector<std::vector<std::string>> seqs{
        {"b1", "r", "t2", "d_R"}, {"b1", "r", "t1", "u_S", "r", "t1", "t2", "d_R"}, {"b1", "r", "t2", "t2", "t2"}};
    for (const auto& seq : seqs)
        for (std::uint64_t seed = 0; seed < 10; ++seed) CHECK(run_episode(s, seq, seed).r_max < 1.0);
}

TEST_CASE("infeasible primitives abort or are skipped") {
    const auto s = scenario_a_defaults();
    const auto a = run_episode(s, {"u_S", "t1"}, 1);
    CHECK(a.cause == TerminalCause::Infeasible);
    CHECK(a.infeasible);
    CHECK(a.executed.empty());

    SimOptions skip;
    skip.infeasible = InfeasiblePolicy::Skip;
    const auto b = run_episode(s, {"u_S", "t1"}, 1, skip);
    CHECK(b.cause == TerminalCause::SequenceExhausted);
    CHECK(b.infeasible);
    CHECK(b.skipped == std::vector<std::string>{"u_S"});
    CHECK(b.executed == std::vector<std::string>{"t1"});
}

TEST_CASE("part handling updates P") {
    const auto s = scenario_a_defaults();
    const auto t = run_episode(s, {"t1", "u_S"}, 2);
    CHECK(t.samples.front().p == 0);
    CHECK(t.samples.back().p == 1);
    CHECK(t.executed == std::vector<std::string>{"t1", "u_S"});
}

TEST_CASE("run_episode input errors") {
    const auto s = scenario_a_defaults();
    CHECK_THROWS_AS(run_episode(s, {}, 1), ConfigError);
    CHECK_THROWS_AS(run_episode(s, {"fly"}, 1), ConfigError);
}

TEST_CASE("sample recording can be disabled without changing r_max") {
    const auto s = scenario_a_defaults();
    SimOptions o;
    o.record_samples = false;
    const auto lean = run_episode(s, worked, 4, o);
    CHECK(lean.samples.empty());
    CHECK(lean.r_max == run_episode(s, worked, 4).r_max);
}

TEST_CASE("classify_trace thresholds") {
    RiskTrace t;
    t.r_max = 0.0;
    CHECK(classify_trace(t) == Safety::Safe);
    t.r_max = 1.3;
    CHECK(classify_trace(t) == Safety::Unsafe);
    t.r_max = 0.99;
    CHECK(classify_trace(t, 1.0) == Safety::Safe);
    t.r_max = 1.0;
    CHECK(classify_trace(t, 1.0) == Safety::Unsafe);
}

TEST_CASE("trace export") {
    const auto t = run_episode(scenario_a_defaults(), {"t1", "t1"}, 1);
    std::ostringstream os;
    write_trace_csv(os, t);
    const auto csv = os.str();
    CHECK(csv.rfind("time,d_hr,v_r,contact,f_c,r,S,W,P,mode\n", 0) == 0);
    CHECK(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) == t.samples.size() + 1);
    const auto j = trace_summary_json(t);
    CHECK(j.at("cause") == "sequence_exhausted");
    CHECK(j.at("r_max") == 0.0);
}
