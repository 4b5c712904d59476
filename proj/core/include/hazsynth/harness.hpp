#pragma once

// End-to-end pipeline (synthesis, extraction, simulation) and its comparison against the
// simulation-only baselines under a shared episode budget.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hazsynth/extractor.hpp"
#include "hazsynth/model_dsl.hpp"
#include "hazsynth/search.hpp"

namespace hazsynth {

struct RunConfig {
    std::size_t horizon = 10;
    HorizonCounting counting = HorizonCounting::ExcludeTerminal;
    std::size_t budget = 500;
    std::size_t max_len = 12;
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    double threshold = 1.0;
    double uct_c = std::sqrt(2.0);
    std::size_t max_states = 10'000'000;
    std::optional<RiskParams> risk;  // replaces the scenario's risk parameters when set

    bool operator==(const RunConfig&) const = default;
};

const char* to_string(HorizonCounting c) noexcept;
HorizonCounting counting_from_string(const std::string& s);  // throws ConfigError

nlohmann::ordered_json config_to_json(const RunConfig& c);
/// Missing keys keep the values of `base`. `seeds` may be a list or a count n (meaning 1..n).
RunConfig config_from_json(const nlohmann::json& j, const RunConfig& base = {});
RunConfig load_config_file(const std::filesystem::path& path);
/// Throws ConfigError on zero budget/horizon/max_len, no seeds, or non-positive uct_c.
void validate_config(const RunConfig& c);
/// FNV-1a 64 of the canonical JSON form, as 16 hex digits.
std::string config_hash(const RunConfig& c);

/// Result of the formal layer.
struct FormalAnalysis {
    std::size_t product_states = 0;
    std::size_t supervisor_states = 0;
    std::size_t supervisor_transitions = 0;
    bool empty_supervisor = false;
    std::vector<EventSequence> full;         // hazard-reaching sequences within the horizon
    std::vector<EventSequence> projections;  // distinct proactive projections
    std::size_t empty_projections = 0;       // projections without any proactive event
    Sequence proactive_alphabet;             // sorted

    /// Distinct non-empty projections, as plain event lists.
    std::vector<Sequence> formal_set() const;
};

FormalAnalysis analyze_model(const ModelSet& model, const RunConfig& config);

/// Simulates the non-empty projections in order, cycling with fresh seeds until the budget is
/// used; truncates when there are more projections than budget. Infeasible primitives abort
/// the episode.
SearchResult run_two_layer(const FormalAnalysis& formal, const EpisodeRunner& run, std::size_t budget,
                           std::uint64_t seed, double threshold);
SearchResult run_two_layer(const ModelSet& model, const Scenario& scenario, const RunConfig& config,
                           std::uint64_t seed);

struct AlarmClassification {
    std::vector<UnsafeSequence> agreements;    // formal and unsafe in simulation
    std::vector<UnsafeSequence> missed;        // not formal, unsafe in simulation
    std::vector<UnsafeSequence> false_alarms;  // formal, safe in every simulation
    std::vector<UnsafeSequence> benign;        // not formal, safe
    std::size_t missed_beyond_horizon = 0;     // missed alarms longer than the horizon

    bool operator==(const AlarmClassification&) const = default;
};

/// Each evaluated sequence is scored by its best r_max and lands in exactly one class.
/// Identity is exact event-list equality. Lists are sorted by sequence.
AlarmClassification classify_alarms(const std::vector<Sequence>& formal,
                                    const std::vector<std::pair<Sequence, double>>& evaluated,
                                    double threshold, std::size_t horizon = 0);

struct SeedRun {
    std::uint64_t seed = 0;
    std::size_t episodes = 0;
    std::size_t n = 0;
    double r_mean = 0.0;
    std::vector<UnsafeSequence> unsafe;

    bool operator==(const SeedRun&) const = default;
};

struct MethodReport {
    std::string method;  // two-layer | mcts | random
    std::vector<SeedRun> runs;
    double mean_n = 0.0;
    double mean_r_mean = 0.0;
    double mean_episodes = 0.0;

    bool operator==(const MethodReport&) const = default;
};

struct AnalysisReport {
    std::string model;
    std::string scenario;
    RunConfig config;
    std::string config_hash;
    std::size_t product_states = 0;
    std::size_t supervisor_states = 0;
    std::size_t supervisor_transitions = 0;
    bool empty_supervisor = false;
    std::size_t full_sequences = 0;
    std::size_t projections = 0;
    std::vector<Sequence> formal;
    std::vector<MethodReport> methods;
    AlarmClassification alarms;

    bool operator==(const AnalysisReport&) const = default;
};

SeedRun seed_run_from(const SearchResult& r, std::uint64_t seed);
/// Fills the per-method means from `runs`.
void finalize_method(MethodReport& m);

/// Runs the two-layer pipeline, MCTS and random search once per configured seed.
AnalysisReport run_compare(const ModelSet& model, const Scenario& scenario, const RunConfig& config);

enum class ReportFormat { Json, Csv, Markdown };
ReportFormat report_format_from_string(const std::string& s);  // json | csv | md

nlohmann::ordered_json report_to_json(const AnalysisReport& r);
AnalysisReport report_from_json(const nlohmann::json& j);
void emit_report(std::ostream& os, const AnalysisReport& r, ReportFormat format);
/// Writes report.json, report.csv and report.md (or only `format`) into `dir`.
void emit_report_files(const std::filesystem::path& dir, const AnalysisReport& r,
                       std::optional<ReportFormat> only = std::nullopt);

/// Applies the config's risk override to a copy of the scenario.
Scenario apply_config(Scenario scenario, const RunConfig& config);

}  // namespace hazsynth
