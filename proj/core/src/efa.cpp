#include "hazsynth/efa.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

namespace hazsynth {

const char* to_string(CmpOp op) noexcept {
    switch (op) {
        case CmpOp::Eq: return "==";
        case CmpOp::Ne: return "!=";
        case CmpOp::Lt: return "<";
        case CmpOp::Le: return "<=";
        case CmpOp::Gt: return ">";
        case CmpOp::Ge: return ">=";
    }
    return "?";
}

Guard Guard::compare(std::string var, CmpOp op, int value) {
    Guard g;
    g.kind = Kind::Compare;
    g.var = std::move(var);
    g.op = op;
    g.value = value;
    return g;
}

Guard Guard::negate(Guard inner) {
    Guard g;
    g.kind = Kind::Not;
    g.args.push_back(std::move(inner));
    return g;
}

Guard Guard::conj(std::vector<Guard> gs) {
    std::erase_if(gs, [](const Guard& g) { return g.is_true(); });
    if (gs.empty()) return always();
    if (gs.size() == 1) return std::move(gs.front());
    Guard g;
    g.kind = Kind::And;
    g.args = std::move(gs);
    return g;
}

Guard Guard::disj(std::vector<Guard> gs) {
    if (gs.empty()) return never();
    if (gs.size() == 1) return std::move(gs.front());
    Guard g;
    g.kind = Kind::Or;
    g.args = std::move(gs);
    return g;
}

void Guard::collect_vars(std::vector<std::string>& out) const {
    if (kind == Kind::Compare) out.push_back(var);
    for (const auto& a : args) a.collect_vars(out);
}

bool Efa::has_location(std::string_view id) const {
    return std::find(locations.begin(), locations.end(), id) != locations.end();
}

const EventDecl* Efa::find_event(std::string_view name) const {
    auto it = std::find_if(alphabet.begin(), alphabet.end(),
                           [&](const EventDecl& e) { return e.name == name; });
    return it == alphabet.end() ? nullptr : &*it;
}

Valuation Valuation::initial(std::span<const VarDecl> vars) {
    Valuation v;
    for (const auto& d : vars) v.set(d.name, d.initial);
    return v;
}

std::optional<int> Valuation::get(std::string_view name) const {
    auto it = values_.find(name);
    if (it == values_.end()) return std::nullopt;
    return it->second;
}

namespace {

bool compare(int lhs, CmpOp op, int rhs) {
    switch (op) {
        case CmpOp::Eq: return lhs == rhs;
        case CmpOp::Ne: return lhs != rhs;
        case CmpOp::Lt: return lhs < rhs;
        case CmpOp::Le: return lhs <= rhs;
        case CmpOp::Gt: return lhs > rhs;
        case CmpOp::Ge: return lhs >= rhs;
    }
    return false;
}

}  // namespace

bool eval_guard(const Guard& guard, const Valuation& valuation) {
    switch (guard.kind) {
        case Guard::Kind::True: return true;
        case Guard::Kind::False: return false;
        case Guard::Kind::Compare: {
            auto v = valuation.get(guard.var);
            if (!v) throw ValidationError({{"guard references unbound variable '" + guard.var + "'"}});
            return compare(*v, guard.op, guard.value);
        }
        case Guard::Kind::Not: return !eval_guard(guard.args.at(0), valuation);
        case Guard::Kind::And:
            return std::all_of(guard.args.begin(), guard.args.end(),
                               [&](const Guard& g) { return eval_guard(g, valuation); });
        case Guard::Kind::Or:
            return std::any_of(guard.args.begin(), guard.args.end(),
                               [&](const Guard& g) { return eval_guard(g, valuation); });
    }
    return false;
}

Valuation apply_action(const ActionSet& action, const Valuation& valuation,
                       std::span<const VarDecl> domains) {
    Valuation out = valuation;
    for (const auto& a : action) {
        if (!valuation.contains(a.var))
            throw ValidationError({{"action assigns unbound variable '" + a.var + "'"}});
        auto d = std::find_if(domains.begin(), domains.end(),
                              [&](const VarDecl& v) { return v.name == a.var; });
        if (d != domains.end() && !d->contains(a.value))
            throw ValidationError({{"action assigns " + std::to_string(a.value) + " to '" + a.var +
                                    "' outside its domain " + std::to_string(d->lo) + ".." +
                                    std::to_string(d->hi)}});
        out.set(a.var, a.value);
    }
    return out;
}

std::vector<Transition> enabled_transitions(const Efa& efa, std::string_view location,
                                            const Valuation& valuation) {
    std::vector<Transition> out;
    for (const auto& t : efa.transitions)
        if (t.source == location && eval_guard(t.guard, valuation)) out.push_back(t);
    std::stable_sort(out.begin(), out.end(), [](const Transition& a, const Transition& b) {
        return std::tie(a.event, a.target) < std::tie(b.event, b.target);
    });
    return out;
}

namespace {

void validate_one(const Efa& efa, std::vector<Diagnostic>& diags) {
    const std::string where = "efa '" + efa.name + "': ";
    auto report = [&](std::string msg) { diags.push_back({where + std::move(msg)}); };

    std::set<std::string, std::less<>> seen;
    for (const auto& e : efa.alphabet)
        if (!seen.insert(e.name).second) report("event '" + e.name + "' declared twice");

    std::unordered_map<std::string, const VarDecl*> vars;
    for (const auto& v : efa.variables) {
        if (!vars.emplace(v.name, &v).second) report("variable '" + v.name + "' declared twice");
        if (v.lo > v.hi)
            report("variable '" + v.name + "' has empty domain " + std::to_string(v.lo) + ".." +
                   std::to_string(v.hi));
        else if (!v.contains(v.initial))
            report("variable '" + v.name + "' initial value " + std::to_string(v.initial) +
                   " outside domain " + std::to_string(v.lo) + ".." + std::to_string(v.hi));
        if (!v.labels.empty() && v.labels.size() != static_cast<std::size_t>(v.hi - v.lo + 1))
            report("variable '" + v.name + "' label count does not match its domain");
    }

    seen.clear();
    for (const auto& l : efa.locations)
        if (!seen.insert(l).second) report("location '" + l + "' declared twice");

    if (efa.initial_locations.empty()) report("no initial location");
    for (const auto& l : efa.initial_locations)
        if (!efa.has_location(l)) report("initial location '" + l + "' is not a location");
    for (const auto& l : efa.marked_locations)
        if (!efa.has_location(l)) report("marked location '" + l + "' is not a location");

    for (const auto& t : efa.transitions) {
        const std::string tname = t.source + " -> " + t.target + " on " + t.event;
        if (!efa.has_location(t.source))
            report("transition " + tname + ": unknown source location '" + t.source + "'");
        if (!efa.has_location(t.target))
            report("transition " + tname + ": unknown target location '" + t.target + "'");
        if (!efa.find_event(t.event))
            report("transition " + tname + ": event '" + t.event + "' not in alphabet");

        std::vector<std::string> used;
        t.guard.collect_vars(used);
        for (const auto& name : used)
            if (!vars.count(name))
                report("transition " + tname + ": guard references unknown variable '" + name + "'");

        std::set<std::string, std::less<>> assigned;
        for (const auto& a : t.action) {
            if (!assigned.insert(a.var).second)
                report("transition " + tname + ": variable '" + a.var + "' assigned twice");
            auto it = vars.find(a.var);
            if (it == vars.end()) {
                report("transition " + tname + ": action assigns unknown variable '" + a.var + "'");
            } else if (!it->second->contains(a.value)) {
                report("transition " + tname + ": value " + std::to_string(a.value) +
                       " outside domain of '" + a.var + "'");
            }
        }
    }
}

}  // namespace

std::vector<Diagnostic> validate_model(std::span<const Efa> efas) {
    std::vector<Diagnostic> diags;
    std::set<std::string, std::less<>> names;
    for (const auto& efa : efas) {
        if (!names.insert(efa.name).second)
            diags.push_back({"efa name '" + efa.name + "' used twice"});
        validate_one(efa, diags);
    }

    std::map<std::string, std::pair<const EventDecl*, const Efa*>, std::less<>> events;
    std::map<std::string, std::pair<const VarDecl*, const Efa*>, std::less<>> vars;
    for (const auto& efa : efas) {
        for (const auto& e : efa.alphabet) {
            auto [it, fresh] = events.emplace(e.name, std::pair{&e, &efa});
            if (fresh) continue;
            const EventDecl& first = *it->second.first;
            if (first.controllable != e.controllable || first.proactive != e.proactive)
                diags.push_back({"event '" + e.name + "' declared with conflicting flags in efa '" +
                                 it->second.second->name + "' and efa '" + efa.name + "'"});
        }
        for (const auto& v : efa.variables) {
            auto [it, fresh] = vars.emplace(v.name, std::pair{&v, &efa});
            if (fresh) continue;
            const VarDecl& first = *it->second.first;
            if (first.lo != v.lo || first.hi != v.hi || first.initial != v.initial)
                diags.push_back({"variable '" + v.name +
                                 "' declared inconsistently in efa '" + it->second.second->name +
                                 "' and efa '" + efa.name + "'"});
        }
    }
    return diags;
}

}  // namespace hazsynth
