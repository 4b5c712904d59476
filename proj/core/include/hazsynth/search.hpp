#pragma once

// Simulation-only falsification: uniform random sequence sampling and UCT tree search over
// the proactive alphabet.

#include <cmath>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hazsynth/simulator.hpp"

namespace hazsynth {

using Sequence = std::vector<std::string>;

struct EpisodeOutcome {
    Sequence executed;  // events that actually ran, up to termination
    double r_max = 0.0;
    bool infeasible = false;
};

/// One simulated episode as a function of (requested events, seed).
using EpisodeRunner = std::function<EpisodeOutcome(const Sequence&, std::uint64_t)>;

/// Wraps run_episode without per-step sample recording.
EpisodeRunner simulator_runner(const Scenario& scenario, InfeasiblePolicy policy);

struct SearchRecord {
    Sequence sequence;   // identity used for counting (executed prefix for the baselines)
    Sequence requested;  // what the search asked the simulator to run
    double r_max = 0.0;
    std::uint64_t seed = 0;
    bool infeasible = false;

    bool operator==(const SearchRecord&) const = default;
};

struct UnsafeSequence {
    Sequence sequence;
    double r_max = 0.0;  // best over all episodes of this sequence

    bool operator==(const UnsafeSequence&) const = default;
};

struct SearchResult {
    std::string method;
    std::size_t episodes = 0;
    double threshold = 1.0;
    std::vector<SearchRecord> records;
    std::vector<UnsafeSequence> unsafe;  // distinct, sorted by sequence
    std::size_t n = 0;                   // |unsafe|
    double r_mean = 0.0;                 // mean r_max over `unsafe`, 0 when empty
    bool empty_supervisor = false;

    bool operator==(const SearchResult&) const = default;
};

/// Recomputes `unsafe`, `n` and `r_mean` from `records`.
void summarize(SearchResult& result);

struct RandomSearchOptions {
    std::size_t budget = 500;
    std::size_t max_len = 12;
    std::uint64_t seed = 0;
    double threshold = 1.0;
};

/// Each episode samples `max_len` events uniformly (with replacement) from `alphabet`.
SearchResult random_search(const EpisodeRunner& run, const Sequence& alphabet, const RandomSearchOptions& opts);

struct MctsOptions {
    std::size_t budget = 500;
    std::size_t max_len = 12;
    double uct_c = std::sqrt(2.0);
    std::uint64_t seed = 0;
    double threshold = 1.0;
};

struct MctsNode {
    std::string event;  // edge label from the parent; empty at the root
    std::size_t parent = 0;
    std::size_t depth = 0;
    std::uint64_t visits = 0;
    double total_reward = 0.0;
    std::map<std::string, std::size_t> children;  // event -> node index
};

/// UCT score; unvisited children score +infinity.
double uct_score(double total_reward, std::uint64_t visits, std::uint64_t parent_visits, double c) noexcept;

/// UCT with one expansion per iteration (smallest untried event first), uniform random rollout
/// to `max_len`, reward = episode r_max, and ties broken toward the smallest event. Each
/// iteration runs exactly one episode. The tree is written to `tree` when non-null.
SearchResult mcts_search(const EpisodeRunner& run, const Sequence& alphabet, const MctsOptions& opts,
                         std::vector<MctsNode>* tree = nullptr);

nlohmann::json search_result_to_json(const SearchResult& r, bool include_records = false);
SearchResult search_result_from_json(const nlohmann::json& j);
/// One row per episode: method,episode,seed,r_max,unsafe,infeasible,sequence.
void write_search_csv(std::ostream& os, const SearchResult& r);

}  // namespace hazsynth
