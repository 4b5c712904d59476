#include "fixtures.hpp"

#include <deque>
#include <map>

namespace fixtures {

using namespace hazsynth;

std::filesystem::path data_path(const std::string& relative) { return std::filesystem::path(HAZSYNTH_DATA_DIR) / relative; }

const ModelSet& fig1() {
    static const ModelSet m = load_model_file(data_path("models/fig1.des"));
    return m;
}

const ModelSet& scenario_a() {
    static const ModelSet m = load_model_file(data_path("models/scenario_a.des"));
    return m;
}

Scenario scenario_a_layout() { return load_scenario_file(data_path("scenarios/scenario_a.scn")); }

oracle::State to_oracle(const ExplicitAutomaton& a, StateId s) {
    oracle::State o;
    o.locs = a.state_locations(s);
    for (const auto& [k, v] : a.state_valuation(s)) o.vals[k] = v;
    return o;
}

std::set<oracle::State> oracle_states(const ExplicitAutomaton& a, const std::vector<bool>& keep) {
    std::set<oracle::State> out;
    for (StateId s = 0; s < a.num_states(); ++s)
        if (keep.empty() || keep[s]) out.insert(to_oracle(a, s));
    return out;
}

void language(const ExplicitAutomaton& a, std::size_t n, std::set<std::vector<std::string>>& gen,
              std::set<std::vector<std::string>>& marked) {
    std::vector<std::vector<std::size_t>> out(a.num_states());
    for (std::size_t t = 0; t < a.num_transitions(); ++t) out[a.transitions[t].source].push_back(t);
    struct Item {
        std::set<StateId> at;
        std::vector<std::string> word;
    };
    if (a.initial.empty()) return;
    std::deque<Item> work{{std::set<StateId>(a.initial.begin(), a.initial.end()), {}}};
    while (!work.empty()) {
        Item it = std::move(work.front());
        work.pop_front();
        gen.insert(it.word);
        for (auto s : it.at)
            if (a.marked[s]) {
                marked.insert(it.word);
                break;
            }
        if (it.word.size() == n) continue;
        std::map<std::string, std::set<StateId>> next;
        for (auto s : it.at)
            for (auto t : out[s]) next[a.event_name(a.transitions[t].event)].insert(a.transitions[t].target);
        for (auto& [ev, to] : next) {
            auto w = it.word;
            w.push_back(ev);
            work.push_back({std::move(to), std::move(w)});
        }
    }
}

std::set<std::vector<std::string>> as_set(const std::vector<std::vector<std::string>>& v) {
    return {v.begin(), v.end()};
}

}  // namespace fixtures
