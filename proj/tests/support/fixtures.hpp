#pragma once

// Shared inputs and conversions for tests.

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "hazsynth/composer.hpp"
#include "hazsynth/model_dsl.hpp"
#include "hazsynth/scenario.hpp"
#include "oracle.hpp"

namespace fixtures {

std::filesystem::path data_path(const std::string& relative);

const hazsynth::ModelSet& fig1();
const hazsynth::ModelSet& scenario_a();
hazsynth::Scenario scenario_a_layout();

/// The oracle's view of a flattened state.
oracle::State to_oracle(const hazsynth::ExplicitAutomaton& a, hazsynth::StateId s);

/// Oracle states of every state flagged in `keep` (all states when `keep` is empty).
std::set<oracle::State> oracle_states(const hazsynth::ExplicitAutomaton& a, const std::vector<bool>& keep = {});

/// Words of length <= n generated by `a` from its initial states, and those ending in a marked state.
void language(const hazsynth::ExplicitAutomaton& a, std::size_t n, std::set<std::vector<std::string>>& gen,
              std::set<std::vector<std::string>>& marked);

std::set<std::vector<std::string>> as_set(const std::vector<std::vector<std::string>>& v);

}  // namespace fixtures
