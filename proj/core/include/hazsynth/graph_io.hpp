#pragma once

// Supervisor files: the plant||spec graph with per-state and per-transition retained flags
// (JSON), and Graphviz rendering.

#include <filesystem>
#include <iosfwd>

#include <nlohmann/json_fwd.hpp>

#include "hazsynth/synthesizer.hpp"

namespace hazsynth {

nlohmann::json automaton_to_json(const ExplicitAutomaton& a);
ExplicitAutomaton automaton_from_json(const nlohmann::json& j);

nlohmann::json supervisor_to_json(const Supervisor& sup);
/// Rebuilds the supervisor from the stored product graph and retained-state flags.
Supervisor supervisor_from_json(const nlohmann::json& j);

void save_supervisor(const std::filesystem::path& path, const Supervisor& sup);
Supervisor load_supervisor(const std::filesystem::path& path);

/// Removed states and transitions are drawn dashed; marked states as double circles.
void write_dot(std::ostream& os, const Supervisor& sup);

}  // namespace hazsynth
