#pragma once

// Minimally-restrictive non-blocking supervisor synthesis over explicit automata.
//
// With marked states encoding hazards, the supervisor is exactly the set of behaviours
// from which a hazard remains reachable.

#include <optional>
#include <span>
#include <vector>

#include "hazsynth/composer.hpp"

namespace hazsynth {

using StateSet = std::vector<bool>;

struct Supervisor {
    ExplicitAutomaton product;             // plant || spec, full reachable graph
    std::vector<bool> retained_states;     // per product state
    std::vector<bool> retained_transitions;  // per product transition
    ExplicitAutomaton automaton;           // retained part, renumbered in product order
    std::vector<StateId> original_state;   // automaton state -> product state
    std::vector<StateId> removed_states;   // product numbering, ascending
    std::vector<std::size_t> removed_transitions;  // indices into product.transitions
    bool empty = false;
};

/// States of `surviving` that reach a marked state of `surviving` using only transitions
/// whose endpoints both survive.
StateSet coreachable_set(const ExplicitAutomaton& a, const StateSet& surviving);

/// States of `surviving` reachable from a surviving initial state within `surviving`.
StateSet reachable_set(const ExplicitAutomaton& a, const StateSet& surviving);

struct NonblockingResult {
    bool nonblocking = true;
    std::optional<StateId> blocking_state;
    std::vector<std::size_t> path;  // transition indices from an initial state
};

/// Shortest path (BFS, lowest state index first) to the nearest reachable state from which no
/// marked state is reachable.
NonblockingResult check_nonblocking(const ExplicitAutomaton& a);

/// Synthesis on an explicit plant||spec graph. `forbidden` lists states that must be removed
/// from the outset (uncontrollable events disabled by the specification); may be empty.
Supervisor synthesize(const ExplicitAutomaton& product, const StateSet& forbidden = {});

/// Supervisor that keeps exactly the states flagged in `keep` and the transitions between them.
Supervisor restrict_to(const ExplicitAutomaton& product, const StateSet& keep);

/// Builds plant || spec, marks states where the specification disables an uncontrollable
/// event the plant enables, and runs the fixpoint. Throws ValidationError when `spec` is
/// empty or uses an event whose controllability differs from the plant's declaration.
Supervisor synthesize(std::span<const Efa> plant, std::span<const Efa> spec,
                      const FlattenOptions& opts = {});

}  // namespace hazsynth
