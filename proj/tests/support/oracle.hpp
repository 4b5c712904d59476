#pragma once

// Reference implementations used only by tests. They interpret EFAs directly with string-keyed
// states and ordered containers and share no algorithmic code with the library.

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "hazsynth/efa.hpp"

namespace oracle {

struct State {
    std::vector<std::string> locs;
    std::map<std::string, int> vals;

    auto operator<=>(const State&) const = default;
};

struct Edge {
    State from;
    std::string event;
    State to;

    auto operator<=>(const Edge&) const = default;
};

struct Graph {
    std::set<State> states;
    std::set<Edge> edges;
    std::set<State> initial;
    std::set<State> marked;
    std::map<std::string, bool> controllable;
};

bool eval(const hazsynth::Guard& g, const std::map<std::string, int>& v);

/// Reachable synchronous product by exhaustive search.
Graph product(const std::vector<hazsynth::Efa>& efas);

/// Events the EFA subset `idx` can jointly execute from `s` (components outside ignored).
bool subset_enables(const std::vector<hazsynth::Efa>& efas, const std::vector<std::size_t>& idx, const State& s,
                    const std::string& event);

/// Naive fixpoint: drop non-coreachable states and states with an uncontrollable edge
/// (or an uncontrollable event the plant allows but the product blocks) into the removed set.
std::set<State> synthesize(const std::vector<hazsynth::Efa>& plant, const std::vector<hazsynth::Efa>& spec,
                           Graph* product_out = nullptr);

/// Event strings from an initial state up to the first marked state, with at most `horizon`
/// events before the terminal one (or including it when `count_terminal`).
std::set<std::vector<std::string>> unsafe_paths(const Graph& g, const std::set<State>& keep, std::size_t horizon,
                                                bool count_terminal);

/// All event strings of length <= n generated from the initial states within `keep`; marked
/// strings are collected separately.
void language(const Graph& g, const std::set<State>& keep, std::size_t n, std::set<std::vector<std::string>>& gen,
              std::set<std::vector<std::string>>& marked);

}  // namespace oracle
