#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <sstream>

#include "fixtures.hpp"
#include "hazsynth/extractor.hpp"
#include "model_gen.hpp"
#include "oracle.hpp"

using namespace hazsynth;

namespace {

using Words = std::set<std::vector<std::string>>;

Supervisor synth(const ModelSet& m) {
    const auto split = split_plant_spec(m);
    return synthesize(split.plant, split.spec);
}

std::vector<std::vector<std::string>> words(const std::vector<EventSequence>& seqs) {
    std::vector<std::vector<std::string>> out;
    for (const auto& s : seqs) out.push_back(s.events);
    return out;
}

ExtractOptions opts(std::size_t horizon, HorizonCounting c = HorizonCounting::ExcludeTerminal) {
    ExtractOptions o;
    o.horizon = horizon;
    o.counting = c;
    return o;
}

EventSequence full(std::size_t id, std::vector<std::string> events) {
    EventSequence s;
    s.id = id;
    s.events = std::move(events);
    s.sources = {id};
    return s;
}

// Two states, both marked; 0 is initial with a self-loop b and an edge a to 1.
ExplicitAutomaton marked_root() {
    ExplicitAutomaton a;
    a.components = {"M"};
    a.location_names = {{"m0", "m1"}};
    a.events = {{"a", true, true}, {"b", true, true}};
    a.states = {{{0}, {}}, {{1}, {}}};
    a.transitions = {{0, 0, 1}, {0, 1, 0}};
    a.initial = {0};
    a.marked = {true, true};
    return a;
}

}  // namespace

TEST_CASE("fig1 unsafe sequences and horizon counting") {
    const auto sup = synth(fixtures::fig1());
    using V = std::vector<std::vector<std::string>>;
    CHECK(words(enumerate_unsafe(sup, opts(3))) == V{{"a"}, {"c", "d", "a"}});
    CHECK(words(enumerate_unsafe(sup, opts(3, HorizonCounting::AllEvents))) == V{{"a"}, {"c", "d", "a"}});
    CHECK(words(enumerate_unsafe(sup, opts(2, HorizonCounting::AllEvents))) == V{{"a"}});
    CHECK(words(enumerate_unsafe(sup, opts(2))) == V{{"a"}, {"c", "d", "a"}});
    CHECK(enumerate_unsafe(sup, opts(5)).size() == 3);
}

TEST_CASE("scenario A extraction") {
    const auto& m = fixtures::scenario_a();
    const auto sup = synth(m);
    const auto seqs = enumerate_unsafe(sup, opts(10));
    CHECK(seqs.size() == 24);
    CHECK(std::is_sorted(seqs.begin(), seqs.end(),
                         [](const auto& x, const auto& y) { return x.events < y.events; }));
    const std::vector<std::string> worked{"b2", "r", "t1", "u_S", "r", "t1", "t2", "d_R", "c"};
    const auto ws = words(seqs);
    CHECK(std::find(ws.begin(), ws.end(), worked) != ws.end());

    std::vector<EventSequence> proj;
    for (const auto& s : seqs) proj.push_back(project_proactive(s, m.events));
    const auto uniq = dedup_projections(proj);
    CHECK(uniq.size() == 24);
    const std::vector<std::string> worked_proj(worked.begin(), worked.end() - 1);
    bool found = false;
    for (const auto& u : uniq) found = found || u.events == worked_proj;
    CHECK(found);

    // Counting the terminal event gives the shorter family.
    CHECK(enumerate_unsafe(sup, opts(10, HorizonCounting::AllEvents)).size() < 24);
}

TEST_CASE("extraction soundness: every sequence replays to a marked state") {
    const auto sup = synth(fixtures::scenario_a());
    const auto& a = sup.automaton;
    for (const auto& s : enumerate_unsafe(sup, opts(10))) {
        StateId at = a.initial.at(0);
        for (std::size_t k = 0; k < s.events.size(); ++k) {
            bool moved = false;
            for (const auto& t : a.transitions)
                if (t.source == at && a.event_name(t.event) == s.events[k]) {
                    at = t.target;
                    moved = true;
                    break;
                }
            REQUIRE(moved);
            CHECK(a.marked[at] == (k + 1 == s.events.size()));
        }
    }
}

TEST_CASE("marked initial state: the empty path is excluded") {
    const auto a = marked_root();
    const auto seqs = enumerate_unsafe(a, opts(1, HorizonCounting::AllEvents));
    REQUIRE(seqs.size() == 1);
    CHECK(seqs[0].events == std::vector<std::string>{"a"});
}

TEST_CASE("extraction errors") {
    const auto sup = synth(fixtures::fig1());
    CHECK_THROWS_AS(enumerate_unsafe(sup, opts(0)), ConfigError);
    auto o = opts(10);
    o.max_sequences = 2;
    CHECK_THROWS_AS(enumerate_unsafe(sup, o), ResourceError);
}

TEST_CASE("project_proactive") {
    const std::vector<EventDecl> table{{"activateRobot", true, true},
                                       {"approachRobot", true, true},
                                       {"robotStops", false, false},
                                       {"enterWorkspace", true, true}};
    const auto p = project_proactive(full(3, {"activateRobot", "approachRobot", "robotStops", "enterWorkspace"}), table);
    CHECK(p.events == std::vector<std::string>{"activateRobot", "approachRobot", "enterWorkspace"});
    CHECK(p.kind == SequenceKind::ProactiveProjection);
    CHECK(p.sources == std::vector<std::size_t>{3});

    const auto same = project_proactive(full(0, {"activateRobot", "enterWorkspace"}), table);
    CHECK(same.events == std::vector<std::string>{"activateRobot", "enterWorkspace"});

    const auto none = project_proactive(full(0, {"robotStops"}), table);
    CHECK(none.events.empty());
    CHECK(none.empty_projection);

    const auto& m = fixtures::scenario_a();
    const auto w = project_proactive(full(0, {"b2", "r", "t1", "u_S", "r", "t1", "t2", "d_R", "c"}), m.events);
    CHECK(w.events == std::vector<std::string>{"b2", "r", "t1", "u_S", "r", "t1", "t2", "d_R"});
}

TEST_CASE("projection is monotone under prefixes") {
    const auto& m = fixtures::scenario_a();
    const std::vector<std::string> seq{"b2", "safetyStop", "r", "t1", "c", "u_S", "r"};
    const auto whole = project_proactive(full(0, seq), m.events).events;
    for (std::size_t n = 0; n <= seq.size(); ++n) {
        const auto p = project_proactive(full(0, {seq.begin(), seq.begin() + static_cast<long>(n)}), m.events).events;
        REQUIRE(p.size() <= whole.size());
        CHECK(std::equal(p.begin(), p.end(), whole.begin()));
    }
}

TEST_CASE("dedup_projections merges sources") {
    const std::vector<EventDecl> table{{"x", true, true}, {"y", true, true}, {"z", false, false}};
    const auto p0 = project_proactive(full(0, {"x", "z", "y"}), table);
    const auto p1 = project_proactive(full(1, {"x", "y", "z"}), table);
    const auto p2 = project_proactive(full(2, {"y"}), table);
    const auto u = dedup_projections({p0, p1, p2});
    REQUIRE(u.size() == 2);
    CHECK(u[0].events == std::vector<std::string>{"x", "y"});
    CHECK(u[0].sources == std::vector<std::size_t>{0, 1});
    CHECK(u[1].sources == std::vector<std::size_t>{2});

    const auto d = dedup_projections({p0, p2});
    CHECK(d.size() == 2);
}

TEST_CASE("sequence files round trip") {
    const auto sup = synth(fixtures::fig1());
    const auto seqs = enumerate_unsafe(sup, opts(5));
    std::stringstream ss;
    write_sequences_jsonl(ss, seqs);
    CHECK(read_sequences_jsonl(ss) == seqs);

    std::ostringstream csv;
    write_sequences_csv(csv, seqs);
    CHECK(csv.str().rfind("id,kind,sources,events\n", 0) == 0);
}

TEST_CASE("random models: unsafe sequences agree with the oracle") {
    std::size_t with_paths = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        CAPTURE(seed);
        const auto m = gen::random_model(seed);
        const auto split = split_plant_spec(m);
        const auto sup = synthesize(split.plant, split.spec);
        oracle::Graph g;
        const auto keep = oracle::synthesize(split.plant, split.spec, &g);
        if (sup.empty) continue;
        for (auto c : {HorizonCounting::AllEvents, HorizonCounting::ExcludeTerminal}) {
            const auto got = fixtures::as_set(words(enumerate_unsafe(sup, opts(6, c))));
            const auto want = oracle::unsafe_paths(g, keep, 6, c == HorizonCounting::AllEvents);
            CHECK(got == want);
            // Without uncontrollable events the supervisor loses no hazard path, so a search over
            // the whole product agrees.
            bool all_controllable = true;
            for (const auto& [ev, ctrl] : g.controllable) all_controllable = all_controllable && ctrl;
            if (all_controllable)
                CHECK(oracle::unsafe_paths(g, g.states, 6, c == HorizonCounting::AllEvents) == want);
            if (!want.empty()) ++with_paths;
        }
    }
    CHECK(with_paths > 20);
}
