#pragma once

// Extended finite automata: locations, events, bounded integer variables,
// guarded transitions with constant-assignment actions.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hazsynth/error.hpp"

namespace hazsynth {

struct EventDecl {
    std::string name;
    bool controllable = true;
    bool proactive = false;

    bool operator==(const EventDecl&) const = default;
};

struct VarDecl {
    std::string name;
    int lo = 0;
    int hi = 0;
    int initial = 0;
    // Optional symbolic names for lo..hi; labels[i] names value lo + i.
    std::vector<std::string> labels;

    bool contains(int v) const noexcept { return v >= lo && v <= hi; }
    bool operator==(const VarDecl&) const = default;
};

enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };

const char* to_string(CmpOp op) noexcept;

/// Guard expression tree. A value type; `And`/`Or` are n-ary.
struct Guard {
    enum class Kind { True, False, Compare, Not, And, Or };

    Kind kind = Kind::True;
    std::string var;          // Compare only
    CmpOp op = CmpOp::Eq;     // Compare only
    int value = 0;            // Compare only
    std::vector<Guard> args;  // Not (one), And/Or (two or more)

    static Guard always() { return Guard{}; }
    static Guard never() { return Guard{Kind::False, {}, CmpOp::Eq, 0, {}}; }
    static Guard compare(std::string var, CmpOp op, int value);
    static Guard negate(Guard g);
    static Guard conj(std::vector<Guard> gs);
    static Guard disj(std::vector<Guard> gs);

    bool is_true() const noexcept { return kind == Kind::True; }

    /// Appends every variable name referenced by the guard.
    void collect_vars(std::vector<std::string>& out) const;

    bool operator==(const Guard&) const = default;
};

struct Assignment {
    std::string var;
    int value = 0;

    bool operator==(const Assignment&) const = default;
};

using ActionSet = std::vector<Assignment>;

struct Transition {
    std::string source;
    std::string event;
    Guard guard;
    ActionSet action;
    std::string target;

    bool operator==(const Transition&) const = default;
};

struct Efa {
    std::string name;
    bool is_spec = false;  // specification role for synthesis
    std::vector<EventDecl> alphabet;
    std::vector<VarDecl> variables;
    std::vector<std::string> locations;
    std::vector<Transition> transitions;
    std::vector<std::string> initial_locations;
    std::vector<std::string> marked_locations;

    bool has_location(std::string_view id) const;
    const EventDecl* find_event(std::string_view name) const;
    bool operator==(const Efa&) const = default;
};

/// Variable name to value. Ordered so that printing and comparison are canonical.
class Valuation {
public:
    Valuation() = default;
    Valuation(std::initializer_list<std::pair<const std::string, int>> init) : values_(init) {}

    static Valuation initial(std::span<const VarDecl> vars);

    std::optional<int> get(std::string_view name) const;
    void set(const std::string& name, int value) { values_[name] = value; }
    bool contains(std::string_view name) const { return values_.find(name) != values_.end(); }
    std::size_t size() const noexcept { return values_.size(); }

    auto begin() const { return values_.begin(); }
    auto end() const { return values_.end(); }

    bool operator==(const Valuation&) const = default;

private:
    std::map<std::string, int, std::less<>> values_;
};

/// Throws ValidationError if the guard references a variable not bound in `valuation`.
bool eval_guard(const Guard& guard, const Valuation& valuation);

/// Overwrites exactly the assigned variables. Throws ValidationError when an assigned
/// value falls outside the domain given in `domains` (if provided) or the variable is unbound.
Valuation apply_action(const ActionSet& action, const Valuation& valuation,
                       std::span<const VarDecl> domains = {});

/// Transitions leaving `location` whose guard holds, sorted by (event, target).
std::vector<Transition> enabled_transitions(const Efa& efa, std::string_view location,
                                            const Valuation& valuation);

/// Checks every structural invariant of each EFA and cross-EFA consistency of shared
/// event and variable declarations. Never throws.
std::vector<Diagnostic> validate_model(std::span<const Efa> efas);

}  // namespace hazsynth
