#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "fixtures.hpp"
#include "hazsynth/harness.hpp"
#include "hazsynth/rng.hpp"

using namespace hazsynth;

namespace {

RunConfig small_config() {
    RunConfig c;
    c.budget = 30;
    c.seeds = {1, 2};
    return c;
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("classify_alarms examples") {
    const Sequence s1{"x"}, s2{"y", "z"};
    auto a = classify_alarms({s1}, {{s1, 1.5}}, 1.0);
    CHECK(a.agreements == std::vector<UnsafeSequence>{{s1, 1.5}});
    CHECK(a.missed.empty());
    CHECK(a.false_alarms.empty());

    a = classify_alarms({s1}, {{s1, 0.3}, {s2, 2.0}}, 1.0, 1);
    CHECK(a.agreements.empty());
    CHECK(a.missed == std::vector<UnsafeSequence>{{s2, 2.0}});
    CHECK(a.false_alarms == std::vector<UnsafeSequence>{{s1, 0.3}});
    CHECK(a.missed_beyond_horizon == 1);

    // The best score over repeated evaluations decides.
    a = classify_alarms({s1}, {{s1, 0.3}, {s1, 1.2}, {s2, 0.1}}, 1.0);
    CHECK(a.agreements.size() == 1);
    CHECK(a.benign == std::vector<UnsafeSequence>{{s2, 0.1}});
}

TEST_CASE("classify_alarms partitions the evaluated sequences") {
    Rng rng(42);
    for (int round = 0; round < 50; ++round) {
        std::vector<Sequence> formal;
        std::vector<std::pair<Sequence, double>> evaluated;
        for (int i = 0; i < 20; ++i) {
            Sequence s{std::string(1, static_cast<char>('a' + rng.below(4))),
                       std::string(1, static_cast<char>('a' + rng.below(4)))};
            if (rng.uniform() < 0.4) formal.push_back(s);
            if (rng.uniform() < 0.8) evaluated.push_back({s, rng.uniform(0.0, 2.0)});
        }
        const auto a = classify_alarms(formal, evaluated, 1.0);
        std::set<Sequence> seen;
        std::size_t total = 0;
        for (const auto* cls : {&a.agreements, &a.missed, &a.false_alarms, &a.benign})
            for (const auto& u : *cls) {
                CHECK(seen.insert(u.sequence).second);
                ++total;
            }
        std::set<Sequence> distinct;
        for (const auto& [s, r] : evaluated) distinct.insert(s);
        CHECK(total == distinct.size());
    }
}

TEST_CASE("config validation and parsing") {
    RunConfig c;
    CHECK_NOTHROW(validate_config(c));
    c.budget = 0;
    CHECK_THROWS_AS(validate_config(c), ConfigError);
    c = {};
    c.seeds.clear();
    CHECK_THROWS_AS(validate_config(c), ConfigError);
    c = {};
    c.uct_c = 0.0;
    CHECK_THROWS_AS(validate_config(c), ConfigError);

    const auto j = config_from_json(nlohmann::json{{"seeds", 3}, {"horizon_counting", "all_events"}, {"budget", 20}});
    CHECK(j.seeds == std::vector<std::uint64_t>{1, 2, 3});
    CHECK(j.counting == HorizonCounting::AllEvents);
    CHECK(j.budget == 20);
    CHECK(j.horizon == 10);
    CHECK_THROWS_AS(config_from_json(nlohmann::json{{"bugdet", 20}}), ConfigError);
    CHECK_THROWS_AS(counting_from_string("sometimes"), ConfigError);

    RunConfig r;
    r.risk = RiskParams{};
    r.risk->v_crit = 200.0;
    CHECK(config_from_json(config_to_json(r)) == r);
}

TEST_CASE("bundled default config equals the built-in defaults") {
    CHECK(load_config_file(fixtures::data_path("configs/default.json")) == RunConfig{});
}

TEST_CASE("config hash is stable and sensitive") {
    RunConfig a, b;
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a).size() == 16);
    b.budget = 501;
    CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("formal layer on scenario A") {
    const auto fa = analyze_model(fixtures::scenario_a(), RunConfig{});
    CHECK(fa.product_states == 69);
    CHECK(fa.supervisor_states == 69);
    CHECK(fa.supervisor_transitions == 142);
    CHECK(fa.full.size() == 24);
    CHECK(fa.projections.size() == 24);
    CHECK(fa.empty_projections == 0);
    CHECK(fa.formal_set().size() == 24);
    CHECK(fa.proactive_alphabet == Sequence{"b0", "b1", "b2", "d_R", "d_S", "r", "t1", "t2", "u_R", "u_S"});
}

TEST_CASE("two-layer budget handling") {
    const auto& m = fixtures::scenario_a();
    const auto s = scenario_a_defaults();
    auto c = small_config();
    c.budget = 10;
    const auto truncated = run_two_layer(m, s, c, 1);
    CHECK(truncated.episodes == 10);
    CHECK(truncated.method == "two-layer");

    c.budget = 60;
    const auto cycled = run_two_layer(m, s, c, 1);
    CHECK(cycled.episodes == 60);
    CHECK(cycled.n == 12);

    const auto fa = analyze_model(m, c);
    CHECK_THROWS_AS(run_two_layer(fa, simulator_runner(s, InfeasiblePolicy::Abort), 0, 1, 1.0), ConfigError);
}

TEST_CASE("model with an unreachable hazard gives an empty flagged result") {
    auto m = fixtures::scenario_a();
    for (auto& e : m.efas)
        if (e.name == "SP") e.transitions.clear();
    const auto r = run_two_layer(m, scenario_a_defaults(), small_config(), 1);
    CHECK(r.empty_supervisor);
    CHECK(r.episodes == 0);
    CHECK(r.n == 0);
}

TEST_CASE("compare report content and formats") {
    const auto rep = run_compare(fixtures::scenario_a(), scenario_a_defaults(), small_config());
    REQUIRE(rep.methods.size() == 3);
    CHECK(rep.methods[0].method == "two-layer");
    CHECK(rep.methods[1].method == "mcts");
    CHECK(rep.methods[2].method == "random");
    for (const auto& m : rep.methods) {
        CHECK(m.runs.size() == 2);
        for (const auto& r : m.runs) CHECK(r.episodes <= 30);
    }
    CHECK(rep.config_hash == config_hash(small_config()));

    std::ostringstream csv;
    emit_report(csv, rep, ReportFormat::Csv);
    CHECK(csv.str().rfind("method,seed,episodes,N,r_mean\n", 0) == 0);
    CHECK(count_lines(csv.str()) == 1 + 3 * (2 + 1));

    std::ostringstream md;
    emit_report(md, rep, ReportFormat::Markdown);
    CHECK(md.str().find("| two-layer") != std::string::npos);

    CHECK(report_from_json(report_to_json(rep)) == rep);
}

TEST_CASE("empty report gives a header-only CSV") {
    std::ostringstream csv;
    emit_report(csv, AnalysisReport{}, ReportFormat::Csv);
    CHECK(csv.str() == "method,seed,episodes,N,r_mean\n");
}

TEST_CASE("report formats and files") {
    CHECK(report_format_from_string("md") == ReportFormat::Markdown);
    CHECK(report_format_from_string("markdown") == ReportFormat::Markdown);
    CHECK(report_format_from_string("json") == ReportFormat::Json);
    CHECK_THROWS_AS(report_format_from_string("xml"), ConfigError);

    const auto dir = std::filesystem::temp_directory_path() / "hazsynth_harness_test";
    std::filesystem::remove_all(dir);
    emit_report_files(dir, AnalysisReport{});
    CHECK(std::filesystem::exists(dir / "report.json"));
    CHECK(std::filesystem::exists(dir / "report.csv"));
    CHECK(std::filesystem::exists(dir / "report.md"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("compare reports are byte-identical across runs") {
    const auto a = run_compare(fixtures::scenario_a(), scenario_a_defaults(), small_config());
    const auto b = run_compare(fixtures::scenario_a(), scenario_a_defaults(), small_config());
    CHECK(report_to_json(a).dump(2) == report_to_json(b).dump(2));
}

TEST_CASE("risk override applies to the scenario") {
    RunConfig c;
    c.risk = RiskParams{};
    c.risk->v_crit = 1000.0;
    CHECK(apply_config(scenario_a_defaults(), c).risk.v_crit == 1000.0);
    CHECK(apply_config(scenario_a_defaults(), RunConfig{}).risk.v_crit == 250.0);
}
