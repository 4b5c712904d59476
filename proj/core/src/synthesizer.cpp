#include "hazsynth/synthesizer.hpp"

#include <algorithm>
#include <deque>

#include "hazsynth/error.hpp"

namespace hazsynth {

namespace {

std::vector<std::vector<std::size_t>> incoming(const ExplicitAutomaton& a) {
    std::vector<std::vector<std::size_t>> in(a.num_states());
    for (std::size_t i = 0; i < a.transitions.size(); ++i) in[a.transitions[i].target].push_back(i);
    return in;
}

std::vector<std::vector<std::size_t>> outgoing(const ExplicitAutomaton& a) {
    std::vector<std::vector<std::size_t>> out(a.num_states());
    for (std::size_t i = 0; i < a.transitions.size(); ++i) out[a.transitions[i].source].push_back(i);
    return out;
}

}  // namespace

StateSet coreachable_set(const ExplicitAutomaton& a, const StateSet& surviving) {
    StateSet co(a.num_states(), false);
    std::deque<StateId> work;
    for (StateId s = 0; s < a.num_states(); ++s)
        if (surviving[s] && a.marked[s]) {
            co[s] = true;
            work.push_back(s);
        }
    auto in = incoming(a);
    while (!work.empty()) {
        StateId s = work.front();
        work.pop_front();
        for (auto ti : in[s]) {
            StateId p = a.transitions[ti].source;
            if (surviving[p] && !co[p]) {
                co[p] = true;
                work.push_back(p);
            }
        }
    }
    return co;
}

StateSet reachable_set(const ExplicitAutomaton& a, const StateSet& surviving) {
    StateSet reach(a.num_states(), false);
    std::deque<StateId> work;
    for (auto s : a.initial)
        if (surviving[s] && !reach[s]) {
            reach[s] = true;
            work.push_back(s);
        }
    auto out = outgoing(a);
    while (!work.empty()) {
        StateId s = work.front();
        work.pop_front();
        for (auto ti : out[s]) {
            StateId t = a.transitions[ti].target;
            if (surviving[t] && !reach[t]) {
                reach[t] = true;
                work.push_back(t);
            }
        }
    }
    return reach;
}

NonblockingResult check_nonblocking(const ExplicitAutomaton& a) {
    StateSet all(a.num_states(), true);
    StateSet co = coreachable_set(a, all);

    // BFS with parents; initial states and successors visited in ascending index order.
    std::vector<std::size_t> parent(a.num_states(), SIZE_MAX);
    StateSet seen(a.num_states(), false);
    std::vector<StateId> frontier(a.initial.begin(), a.initial.end());
    std::sort(frontier.begin(), frontier.end());
    for (auto s : frontier) seen[s] = true;
    auto out = outgoing(a);
    for (auto& edges : out)
        std::stable_sort(edges.begin(), edges.end(), [&](std::size_t x, std::size_t y) {
            return a.transitions[x].target < a.transitions[y].target;
        });

    while (!frontier.empty()) {
        for (auto s : frontier) {
            if (co[s]) continue;
            NonblockingResult r{false, s, {}};
            for (StateId cur = s; parent[cur] != SIZE_MAX; cur = a.transitions[parent[cur]].source)
                r.path.push_back(parent[cur]);
            std::reverse(r.path.begin(), r.path.end());
            return r;
        }
        std::vector<StateId> next;
        for (auto s : frontier)
            for (auto ti : out[s]) {
                StateId t = a.transitions[ti].target;
                if (!seen[t]) {
                    seen[t] = true;
                    parent[t] = ti;
                    next.push_back(t);
                }
            }
        std::sort(next.begin(), next.end());
        frontier = std::move(next);
    }
    return {};
}

Supervisor synthesize(const ExplicitAutomaton& product, const StateSet& forbidden) {
    const std::size_t n = product.num_states();
    StateSet good(n, true);
    if (!forbidden.empty())
        for (std::size_t s = 0; s < n; ++s)
            if (forbidden[s]) good[s] = false;

    auto in = incoming(product);
    for (;;) {
        bool changed = false;

        StateSet co = coreachable_set(product, good);
        std::deque<StateId> bad;
        for (StateId s = 0; s < n; ++s)
            if (good[s] && !co[s]) {
                good[s] = false;
                changed = true;
            }
        for (StateId s = 0; s < n; ++s)
            if (!good[s]) bad.push_back(s);

        // Controllability: an uncontrollable transition into a removed state removes its source.
        while (!bad.empty()) {
            StateId s = bad.front();
            bad.pop_front();
            for (auto ti : in[s]) {
                const auto& t = product.transitions[ti];
                if (good[t.source] && !product.events[t.event].controllable) {
                    good[t.source] = false;
                    changed = true;
                    bad.push_back(t.source);
                }
            }
        }
        if (!changed) break;
    }
    return restrict_to(product, reachable_set(product, good));
}

Supervisor restrict_to(const ExplicitAutomaton& product, const StateSet& keep) {
    const std::size_t n = product.num_states();
    if (keep.size() != n) throw ConfigError("restrict_to: state mask size mismatch");
    Supervisor sup;
    sup.product = product;
    sup.retained_states = keep;
    sup.retained_transitions.assign(product.num_transitions(), false);

    ExplicitAutomaton& a = sup.automaton;
    a.components = product.components;
    a.location_names = product.location_names;
    a.variables = product.variables;
    a.events = product.events;
    std::vector<StateId> renumber(n, 0);
    for (StateId s = 0; s < n; ++s) {
        if (keep[s]) {
            renumber[s] = static_cast<StateId>(a.states.size());
            a.states.push_back(product.states[s]);
            a.marked.push_back(product.marked[s]);
            sup.original_state.push_back(s);
        } else {
            sup.removed_states.push_back(s);
        }
    }
    for (auto s : product.initial)
        if (keep[s]) a.initial.push_back(renumber[s]);
    for (std::size_t i = 0; i < product.transitions.size(); ++i) {
        const auto& t = product.transitions[i];
        if (keep[t.source] && keep[t.target]) {
            sup.retained_transitions[i] = true;
            a.transitions.push_back({renumber[t.source], t.event, renumber[t.target]});
        } else {
            sup.removed_transitions.push_back(i);
        }
    }
    sup.empty = a.states.empty();
    return sup;
}

Supervisor synthesize(std::span<const Efa> plant, std::span<const Efa> spec, const FlattenOptions& opts) {
    if (spec.empty()) throw ValidationError({{"synthesis needs at least one specification EFA"}});
    std::vector<Efa> all(plant.begin(), plant.end());
    all.insert(all.end(), spec.begin(), spec.end());
    // validate_model (inside ProductSemantics) rejects event declarations whose flags differ
    // between plant and specification.
    ProductSemantics sem(all);
    ExplicitAutomaton product = flatten(all, opts);

    std::vector<bool> plant_mask(all.size(), false);
    std::fill(plant_mask.begin(), plant_mask.begin() + static_cast<std::ptrdiff_t>(plant.size()), true);

    StateSet forbidden(product.num_states(), false);
    std::vector<EventId> uncontrollable;
    for (EventId e = 0; e < product.events.size(); ++e)
        if (!product.events[e].controllable && sem.in_subset_alphabet(e, plant_mask)) uncontrollable.push_back(e);

    if (!uncontrollable.empty()) {
        auto out = outgoing(product);
        for (StateId s = 0; s < product.num_states(); ++s) {
            for (auto e : uncontrollable) {
                bool in_product = std::any_of(out[s].begin(), out[s].end(), [&](std::size_t ti) {
                    return product.transitions[ti].event == e;
                });
                if (!in_product && sem.enabled_in_subset(product.states[s], e, plant_mask)) {
                    forbidden[s] = true;
                    break;
                }
            }
        }
    }
    return synthesize(product, forbidden);
}

}  // namespace hazsynth
