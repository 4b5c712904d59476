#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <nlohmann/json.hpp>
#include <sstream>

#include "fixtures.hpp"
#include "hazsynth/graph_io.hpp"

using namespace hazsynth;

namespace {

Supervisor synth(const ModelSet& m) {
    const auto split = split_plant_spec(m);
    return synthesize(split.plant, split.spec);
}

}  // namespace

TEST_CASE("automaton JSON round trip") {
    const auto a = flatten(fixtures::scenario_a().efas);
    CHECK(automaton_from_json(automaton_to_json(a)) == a);
}

TEST_CASE("supervisor JSON round trip keeps removed elements") {
    const auto sup = synth(fixtures::fig1());
    const auto j = supervisor_to_json(sup);
    CHECK(j.at("format") == "hazsynth-supervisor");
    const auto back = supervisor_from_json(j);
    CHECK(back.automaton == sup.automaton);
    CHECK(back.removed_states == sup.removed_states);
    CHECK(back.removed_transitions == sup.removed_transitions);
    CHECK(back.empty == sup.empty);
}

TEST_CASE("supervisor file save and load") {
    const auto dir = std::filesystem::temp_directory_path() / "hazsynth_graph_io_test";
    std::filesystem::create_directories(dir);
    const auto path = dir / "fig1.sup.json";
    const auto sup = synth(fixtures::fig1());
    save_supervisor(path, sup);
    CHECK(load_supervisor(path).automaton == sup.automaton);
    std::filesystem::remove_all(dir);
    CHECK_THROWS_AS(load_supervisor(dir / "missing.json"), IoError);
}

TEST_CASE("malformed supervisor JSON is an IO error") {
    CHECK_THROWS_AS(supervisor_from_json(nlohmann::json{{"format", "other"}}), IoError);
    CHECK_THROWS_AS(supervisor_from_json(nlohmann::json::array()), IoError);
}

TEST_CASE("Graphviz rendering of the fig1 supervisor") {
    std::ostringstream os;
    write_dot(os, synth(fixtures::fig1()));
    const auto dot = os.str();
    CHECK(dot.rfind("digraph", 0) == 0);
    CHECK(dot.find("doublecircle") != std::string::npos);
    CHECK(dot.find("dashed") != std::string::npos);
    CHECK(dot.find("<j,y>") != std::string::npos);
}
