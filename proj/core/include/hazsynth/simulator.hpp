#pragma once

// Fixed-step 2D replay of proactive event sequences. Human and robot TCP are points; the
// laser-zone stop and the workspace flag emerge from geometry.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hazsynth/scenario.hpp"

namespace hazsynth {

struct SimState {
    double time = 0.0;
    Vec2 body;
    Vec2 hand;
    bool hand_extended = false;
    std::string area;       // area the human is currently at
    std::string primitive;  // event whose primitive is running, empty when none
    RobotMode mode = RobotMode::Idle;
    Vec2 tcp;
    double v_r = 0.0;  // mm/s
    bool s = false;    // human in laser zone
    bool w = false;    // human in shared workspace
    std::string part;  // area holding the part, or empty while carried
    int p = 0;         // part location code
    bool contact = false;
};

struct RiskSample {
    double time = 0.0;
    double d_hr = 0.0;  // m
    double v_r = 0.0;   // mm/s
    bool contact = false;
    double f_c = 0.0;  // N
    double r = 0.0;
    bool s = false;
    bool w = false;
    int p = 0;
    RobotMode mode = RobotMode::Idle;

    bool operator==(const RiskSample&) const = default;
};

enum class TerminalCause { SequenceExhausted, Contact, Timeout, Infeasible };

const char* to_string(TerminalCause c) noexcept;

struct RiskTrace {
    std::vector<RiskSample> samples;
    double r_max = 0.0;
    TerminalCause cause = TerminalCause::SequenceExhausted;
    bool infeasible = false;              // some primitive could not run
    std::vector<std::string> executed;    // events whose primitive actually started
    std::vector<std::string> skipped;     // infeasible events skipped under InfeasiblePolicy::Skip
    double walk_speed = 0.0;              // sampled for this episode, m/s

    bool operator==(const RiskTrace&) const = default;
};

/// Abort ends the episode at the first infeasible primitive; Skip treats it as a no-op.
enum class InfeasiblePolicy { Abort, Skip };

struct SimOptions {
    InfeasiblePolicy infeasible = InfeasiblePolicy::Abort;
    bool record_samples = true;  // r_max is tracked either way
};

/// Simulates `events` in order. Each primitive runs to completion before the next starts.
/// Ends after the last primitive, on contact at v_R >= v_crit, or at the scenario timeout.
/// Throws ConfigError for an empty sequence or an event without a binding.
RiskTrace run_episode(const Scenario& scenario, const std::vector<std::string>& events,
                      std::uint64_t seed, const SimOptions& opts = {});

enum class Safety { Safe, Unsafe };

const char* to_string(Safety s) noexcept;

/// Unsafe iff r_max >= threshold.
Safety classify_trace(const RiskTrace& trace, double threshold = 1.0) noexcept;

void write_trace_csv(std::ostream& os, const RiskTrace& trace);
nlohmann::json trace_summary_json(const RiskTrace& trace);

}  // namespace hazsynth
