#include "oracle.hpp"

#include <algorithm>
#include <deque>

namespace oracle {

using hazsynth::CmpOp;
using hazsynth::Efa;
using hazsynth::Guard;

bool eval(const Guard& g, const std::map<std::string, int>& v) {
    switch (g.kind) {
        case Guard::Kind::True: return true;
        case Guard::Kind::False: return false;
        case Guard::Kind::Not: return !eval(g.args.at(0), v);
        case Guard::Kind::And:
            for (const auto& a : g.args)
                if (!eval(a, v)) return false;
            return true;
        case Guard::Kind::Or:
            for (const auto& a : g.args)
                if (eval(a, v)) return true;
            return false;
        case Guard::Kind::Compare: {
            const int x = v.at(g.var);
            switch (g.op) {
                case CmpOp::Eq: return x == g.value;
                case CmpOp::Ne: return x != g.value;
                case CmpOp::Lt: return x < g.value;
                case CmpOp::Le: return x <= g.value;
                case CmpOp::Gt: return x > g.value;
                case CmpOp::Ge: return x >= g.value;
            }
        }
    }
    return false;
}

namespace {

std::map<State, std::vector<const Edge*>> adjacency(const Graph& g) {
    std::map<State, std::vector<const Edge*>> out;
    for (const auto& e : g.edges) out[e.from].push_back(&e);
    return out;
}

bool in_alphabet(const Efa& e, const std::string& ev) {
    for (const auto& d : e.alphabet)
        if (d.name == ev) return true;
    return false;
}

// All successor states for `event` using the EFAs listed in `idx`; other components stay put.
std::vector<State> fire(const std::vector<Efa>& efas, const std::vector<std::size_t>& idx, const State& s,
                        const std::string& event) {
    std::vector<std::size_t> parts;
    for (auto i : idx)
        if (in_alphabet(efas[i], event)) parts.push_back(i);
    if (parts.empty()) return {};
    std::vector<std::vector<const hazsynth::Transition*>> options;
    for (auto i : parts) {
        std::vector<const hazsynth::Transition*> o;
        for (const auto& t : efas[i].transitions)
            if (t.source == s.locs[i] && t.event == event && eval(t.guard, s.vals)) o.push_back(&t);
        if (o.empty()) return {};
        options.push_back(std::move(o));
    }
    std::vector<State> out;
    std::vector<std::size_t> pick(parts.size(), 0);
    for (;;) {
        State n = s;
        std::map<std::string, int> assigned;
        bool ok = true;
        for (std::size_t k = 0; k < parts.size() && ok; ++k) {
            const auto* t = options[k][pick[k]];
            n.locs[parts[k]] = t->target;
            for (const auto& a : t->action) {
                auto it = assigned.find(a.var);
                if (it != assigned.end() && it->second != a.value) ok = false;
                assigned[a.var] = a.value;
            }
        }
        if (ok) {
            for (const auto& [k, v] : assigned) n.vals[k] = v;
            out.push_back(std::move(n));
        }
        std::size_t k = 0;
        while (k < parts.size() && ++pick[k] == options[k].size()) pick[k++] = 0;
        if (k == parts.size()) break;
    }
    return out;
}

bool is_marked(const std::vector<Efa>& efas, const State& s) {
    for (std::size_t i = 0; i < efas.size(); ++i) {
        const auto& m = efas[i].marked_locations;
        if (!m.empty() && std::find(m.begin(), m.end(), s.locs[i]) == m.end()) return false;
    }
    return true;
}

}  // namespace

bool subset_enables(const std::vector<Efa>& efas, const std::vector<std::size_t>& idx, const State& s,
                    const std::string& event) {
    return !fire(efas, idx, s, event).empty();
}

Graph product(const std::vector<Efa>& efas) {
    Graph g;
    std::set<std::string> events;
    std::map<std::string, int> init_vals;
    for (const auto& e : efas) {
        for (const auto& d : e.alphabet) {
            events.insert(d.name);
            g.controllable[d.name] = d.controllable;
        }
        for (const auto& v : e.variables) init_vals[v.name] = v.initial;
    }
    std::vector<std::size_t> all(efas.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;

    std::vector<State> starts{State{{}, init_vals}};
    for (const auto& e : efas) {
        std::vector<State> next;
        for (const auto& s : starts)
            for (const auto& l : e.initial_locations) {
                State n = s;
                n.locs.push_back(l);
                next.push_back(n);
            }
        starts = std::move(next);
    }
    std::deque<State> work;
    for (auto& s : starts) {
        g.initial.insert(s);
        if (g.states.insert(s).second) work.push_back(s);
    }
    while (!work.empty()) {
        State s = work.front();
        work.pop_front();
        if (is_marked(efas, s)) g.marked.insert(s);
        for (const auto& ev : events)
            for (auto& t : fire(efas, all, s, ev)) {
                g.edges.insert({s, ev, t});
                if (g.states.insert(t).second) work.push_back(t);
            }
    }
    return g;
}

std::set<State> synthesize(const std::vector<Efa>& plant, const std::vector<Efa>& spec, Graph* product_out) {
    std::vector<Efa> all = plant;
    all.insert(all.end(), spec.begin(), spec.end());
    Graph g = product(all);
    std::vector<std::size_t> plant_idx(plant.size());
    for (std::size_t i = 0; i < plant_idx.size(); ++i) plant_idx[i] = i;

    std::set<State> good = g.states;
    for (const auto& s : g.states) {
        for (const auto& [ev, ctrl] : g.controllable) {
            if (ctrl) continue;
            bool in_product = false;
            for (const auto& e : g.edges)
                if (e.from == s && e.event == ev) in_product = true;
            if (!in_product && subset_enables(all, plant_idx, s, ev)) good.erase(s);
        }
    }

    for (;;) {
        std::set<State> co;
        for (const auto& s : g.marked)
            if (good.count(s)) co.insert(s);
        for (bool grew = true; grew;) {
            grew = false;
            for (const auto& e : g.edges)
                if (good.count(e.from) && co.count(e.to) && co.insert(e.from).second) grew = true;
        }
        std::set<State> next = co;
        for (bool shrank = true; shrank;) {
            shrank = false;
            for (const auto& e : g.edges)
                if (!g.controllable.at(e.event) && next.count(e.from) && !next.count(e.to)) {
                    next.erase(e.from);
                    shrank = true;
                }
        }
        if (next == good) break;
        good = std::move(next);
    }

    std::set<State> keep;
    for (const auto& s : g.initial)
        if (good.count(s)) keep.insert(s);
    for (bool grew = true; grew;) {
        grew = false;
        for (const auto& e : g.edges)
            if (keep.count(e.from) && good.count(e.to) && keep.insert(e.to).second) grew = true;
    }
    if (product_out) *product_out = std::move(g);
    return keep;
}

std::set<std::vector<std::string>> unsafe_paths(const Graph& g, const std::set<State>& keep, std::size_t horizon,
                                                bool count_terminal) {
    std::set<std::vector<std::string>> out;
    const std::size_t max_total = count_terminal ? horizon : horizon + 1;
    struct Item {
        State root;
        State at;
        std::vector<std::string> path;
    };
    const auto adj = adjacency(g);
    std::deque<Item> work;
    for (const auto& s : g.initial)
        if (keep.count(s)) work.push_back({s, s, {}});
    while (!work.empty()) {
        Item it = std::move(work.front());
        work.pop_front();
        if (it.path.size() + 1 > max_total) continue;
        auto a = adj.find(it.at);
        if (a == adj.end()) continue;
        for (const Edge* e : a->second) {
            if (!keep.count(e->to)) continue;
            auto p = it.path;
            p.push_back(e->event);
            if (g.marked.count(e->to)) {
                if (!(e->to == it.root)) out.insert(p);
                continue;
            }
            work.push_back({it.root, e->to, std::move(p)});
        }
    }
    return out;
}

void language(const Graph& g, const std::set<State>& keep, std::size_t n, std::set<std::vector<std::string>>& gen,
              std::set<std::vector<std::string>>& marked) {
    std::set<State> init;
    for (const auto& s : g.initial)
        if (keep.count(s)) init.insert(s);
    if (init.empty()) return;
    struct Item {
        std::set<State> at;
        std::vector<std::string> word;
    };
    const auto adj = adjacency(g);
    std::deque<Item> work{{init, {}}};
    while (!work.empty()) {
        Item it = std::move(work.front());
        work.pop_front();
        gen.insert(it.word);
        for (const auto& s : it.at)
            if (g.marked.count(s)) {
                marked.insert(it.word);
                break;
            }
        if (it.word.size() == n) continue;
        std::map<std::string, std::set<State>> next;
        for (const auto& s : it.at) {
            auto a = adj.find(s);
            if (a == adj.end()) continue;
            for (const Edge* e : a->second)
                if (keep.count(e->to)) next[e->event].insert(e->to);
        }
        for (auto& [ev, to] : next) {
            auto w = it.word;
            w.push_back(ev);
            work.push_back({std::move(to), std::move(w)});
        }
    }
}

}  // namespace oracle
