#pragma once

// Bounded enumeration of hazard-reaching event sequences and their projection onto
// proactive events.

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "hazsynth/synthesizer.hpp"

namespace hazsynth {

enum class SequenceKind { Full, ProactiveProjection };

const char* to_string(SequenceKind k) noexcept;

struct EventSequence {
    std::size_t id = 0;
    SequenceKind kind = SequenceKind::Full;
    std::vector<std::string> events;
    std::vector<std::size_t> sources;  // ids of the full sequences a projection stands for
    bool empty_projection = false;     // hazard reachable without any proactive event

    bool operator==(const EventSequence&) const = default;
};

/// Whether the event that enters the marked state counts toward the horizon.
enum class HorizonCounting { AllEvents, ExcludeTerminal };

struct ExtractOptions {
    std::size_t horizon = 10;
    HorizonCounting counting = HorizonCounting::ExcludeTerminal;
    std::size_t max_sequences = 1'000'000;
};

/// Distinct event sequences from an initial state to the first visit of a marked state,
/// sorted lexicographically. Non-marked states may repeat along a path. Throws ConfigError for
/// horizon 0 and ResourceError when more than `max_sequences` sequences exist.
std::vector<EventSequence> enumerate_unsafe(const ExplicitAutomaton& sup, const ExtractOptions& opts);
std::vector<EventSequence> enumerate_unsafe(const Supervisor& sup, const ExtractOptions& opts);

/// Keeps only proactive events, order preserved. `events` is the event table used to look
/// up the proactive flag; unknown events are treated as reactive.
EventSequence project_proactive(const EventSequence& seq, const std::vector<EventDecl>& events);

/// Unique projections in first-seen order, each carrying the union of its sources.
std::vector<EventSequence> dedup_projections(const std::vector<EventSequence>& seqs);

void write_sequences_jsonl(std::ostream& os, const std::vector<EventSequence>& seqs);
void write_sequences_csv(std::ostream& os, const std::vector<EventSequence>& seqs);
std::vector<EventSequence> read_sequences_jsonl(std::istream& is);

}  // namespace hazsynth
