#pragma once

// Synchronous composition of EFAs and flattening to explicit state graphs.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hazsynth/efa.hpp"

namespace hazsynth {

using StateId = std::uint32_t;
using EventId = std::uint32_t;

struct ExplicitState {
    std::vector<std::uint32_t> locations;  // index into each component's location table
    std::vector<int> values;               // one per variable, in `variables` order

    bool operator==(const ExplicitState&) const = default;
};

struct ExplicitTransition {
    StateId source = 0;
    EventId event = 0;
    StateId target = 0;

    bool operator==(const ExplicitTransition&) const = default;
};

/// Flattened automaton over Q = L x V. States are numbered in breadth-first discovery
/// order; transitions are grouped by source in that order.
struct ExplicitAutomaton {
    std::vector<std::string> components;                   // EFA names
    std::vector<std::vector<std::string>> location_names;  // per component
    std::vector<VarDecl> variables;
    std::vector<EventDecl> events;  // sorted by name
    std::vector<ExplicitState> states;
    std::vector<ExplicitTransition> transitions;
    std::vector<StateId> initial;
    std::vector<bool> marked;  // per state

    std::size_t num_states() const noexcept { return states.size(); }
    std::size_t num_transitions() const noexcept { return transitions.size(); }
    const std::string& event_name(EventId e) const { return events.at(e).name; }
    EventId event_id(const std::string& name) const;  // throws std::out_of_range
    std::vector<std::string> state_locations(StateId s) const;
    Valuation state_valuation(StateId s) const;
    /// "<i,x>" or "<H0,R0,S0|P=0,W=0>" when variables exist.
    std::string state_label(StateId s) const;

    bool operator==(const ExplicitAutomaton&) const = default;
};

/// N-ary synchronous product as a single EFA. Product locations are named by joining the
/// component locations with '.'. Combinations whose actions assign one variable two different
/// constants are dropped, as are combinations whose conjoined guard no valuation satisfies;
/// identical assignments merge.
Efa compose(std::span<const Efa> efas);

struct FlattenOptions {
    std::size_t max_states = 10'000'000;
};

/// Reachable explicit graph of the synchronous product of `efas` (a single EFA is the n = 1
/// case). A state is marked iff every component with a nonempty marked set is in one of its
/// marked locations. Throws ResourceError when the state cap is exceeded.
ExplicitAutomaton flatten(std::span<const Efa> efas, const FlattenOptions& opts = {});
ExplicitAutomaton flatten(const Efa& efa, const FlattenOptions& opts = {});

/// Compiled successor function of an EFA product; shared by the flattener and the
/// synthesizer's controllability check.
class ProductSemantics {
public:
    explicit ProductSemantics(std::span<const Efa> efas);

    struct Successor {
        EventId event;
        ExplicitState target;
    };

    const std::vector<EventDecl>& events() const noexcept { return events_; }
    const std::vector<VarDecl>& variables() const noexcept { return variables_; }
    const std::vector<std::string>& components() const noexcept { return components_; }
    const std::vector<std::vector<std::string>>& location_names() const noexcept { return locations_; }

    std::vector<ExplicitState> initial_states() const;
    bool is_marked(const ExplicitState& s) const;

    /// All successors, sorted by (event name, target location names, target values).
    std::vector<Successor> successors(const ExplicitState& s) const;

    /// True iff `event` can occur when only the components flagged in `subset` take part.
    /// Components outside the subset are ignored (neither block nor act).
    bool enabled_in_subset(const ExplicitState& s, EventId event, const std::vector<bool>& subset) const;

    /// True iff some component in `subset` has `event` in its alphabet.
    bool in_subset_alphabet(EventId event, const std::vector<bool>& subset) const;

private:
    struct CompiledGuard {
        Guard::Kind kind = Guard::Kind::True;
        std::uint32_t var = 0;
        CmpOp op = CmpOp::Eq;
        int value = 0;
        std::vector<CompiledGuard> args;
        bool eval(std::span<const int> values) const;
    };
    struct CompiledTransition {
        std::uint32_t source;
        std::uint32_t target;
        EventId event;
        CompiledGuard guard;
        std::vector<std::pair<std::uint32_t, int>> action;
    };
    struct Component {
        std::vector<std::vector<std::vector<std::size_t>>> by_loc_event;  // [loc][event] -> transitions
        std::vector<CompiledTransition> transitions;
        std::vector<bool> in_alphabet;  // per event
        std::vector<bool> marked;       // per location; empty = all marked
        std::vector<std::uint32_t> initial;
    };

    template <typename Fn>
    void for_each_combination(const ExplicitState& s, EventId e, const std::vector<bool>* subset,
                              Fn&& fn) const;

    CompiledGuard compile(const Guard& g) const;

    std::vector<std::string> components_;
    std::vector<std::vector<std::string>> locations_;
    std::vector<VarDecl> variables_;
    std::vector<EventDecl> events_;
    std::vector<Component> comps_;
    std::vector<std::vector<std::uint32_t>> participants_;  // per event
    std::vector<std::vector<std::uint32_t>> name_rank_;  // per component: rank of each location by name
};

}  // namespace hazsynth
