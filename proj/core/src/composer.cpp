#include "hazsynth/composer.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace hazsynth {

EventId ExplicitAutomaton::event_id(const std::string& name) const {
    auto it = std::lower_bound(events.begin(), events.end(), name,
                               [](const EventDecl& e, const std::string& n) { return e.name < n; });
    if (it == events.end() || it->name != name) throw std::out_of_range("unknown event '" + name + "'");
    return static_cast<EventId>(it - events.begin());
}

std::vector<std::string> ExplicitAutomaton::state_locations(StateId s) const {
    const auto& st = states.at(s);
    std::vector<std::string> out;
    out.reserve(st.locations.size());
    for (std::size_t c = 0; c < st.locations.size(); ++c) out.push_back(location_names[c][st.locations[c]]);
    return out;
}

Valuation ExplicitAutomaton::state_valuation(StateId s) const {
    Valuation v;
    const auto& st = states.at(s);
    for (std::size_t i = 0; i < variables.size(); ++i) v.set(variables[i].name, st.values[i]);
    return v;
}

std::string ExplicitAutomaton::state_label(StateId s) const {
    std::ostringstream os;
    os << '<';
    auto locs = state_locations(s);
    for (std::size_t i = 0; i < locs.size(); ++i) os << (i ? "," : "") << locs[i];
    if (!variables.empty()) {
        os << '|';
        for (std::size_t i = 0; i < variables.size(); ++i)
            os << (i ? "," : "") << variables[i].name << '=' << states[s].values[i];
    }
    os << '>';
    return os.str();
}

// ---------------------------------------------------------------------------
// ProductSemantics
// ---------------------------------------------------------------------------

bool ProductSemantics::CompiledGuard::eval(std::span<const int> values) const {
    switch (kind) {
        case Guard::Kind::True: return true;
        case Guard::Kind::False: return false;
        case Guard::Kind::Compare: {
            int v = values[var];
            switch (op) {
                case CmpOp::Eq: return v == value;
                case CmpOp::Ne: return v != value;
                case CmpOp::Lt: return v < value;
                case CmpOp::Le: return v <= value;
                case CmpOp::Gt: return v > value;
                case CmpOp::Ge: return v >= value;
            }
            return false;
        }
        case Guard::Kind::Not: return !args[0].eval(values);
        case Guard::Kind::And:
            for (const auto& a : args)
                if (!a.eval(values)) return false;
            return true;
        case Guard::Kind::Or:
            for (const auto& a : args)
                if (a.eval(values)) return true;
            return false;
    }
    return false;
}

ProductSemantics::CompiledGuard ProductSemantics::compile(const Guard& g) const {
    CompiledGuard c;
    c.kind = g.kind;
    c.op = g.op;
    c.value = g.value;
    if (g.kind == Guard::Kind::Compare) {
        auto it = std::find_if(variables_.begin(), variables_.end(),
                               [&](const VarDecl& v) { return v.name == g.var; });
        if (it == variables_.end())
            throw ValidationError({{"guard references unknown variable '" + g.var + "'"}});
        c.var = static_cast<std::uint32_t>(it - variables_.begin());
    }
    for (const auto& a : g.args) c.args.push_back(compile(a));
    return c;
}

ProductSemantics::ProductSemantics(std::span<const Efa> efas) {
    auto diags = validate_model(efas);
    if (!diags.empty()) throw ValidationError(std::move(diags));

    std::map<std::string, EventDecl> events;
    for (const auto& efa : efas) {
        components_.push_back(efa.name);
        locations_.push_back(efa.locations);
        for (const auto& e : efa.alphabet) events.emplace(e.name, e);
        for (const auto& v : efa.variables)
            if (std::none_of(variables_.begin(), variables_.end(),
                             [&](const VarDecl& d) { return d.name == v.name; }))
                variables_.push_back(v);
    }
    for (auto& [name, decl] : events) events_.push_back(decl);
    auto event_index = [&](const std::string& name) {
        auto it = std::lower_bound(events_.begin(), events_.end(), name,
                                   [](const EventDecl& e, const std::string& n) { return e.name < n; });
        return static_cast<EventId>(it - events_.begin());
    };

    participants_.assign(events_.size(), {});
    for (std::size_t ci = 0; ci < efas.size(); ++ci) {
        const Efa& efa = efas[ci];
        Component comp;
        std::unordered_map<std::string, std::uint32_t> loc_index;
        for (std::uint32_t i = 0; i < efa.locations.size(); ++i) loc_index.emplace(efa.locations[i], i);

        comp.in_alphabet.assign(events_.size(), false);
        for (const auto& e : efa.alphabet) {
            EventId id = event_index(e.name);
            comp.in_alphabet[id] = true;
            participants_[id].push_back(static_cast<std::uint32_t>(ci));
        }
        if (!efa.marked_locations.empty()) {
            comp.marked.assign(efa.locations.size(), false);
            for (const auto& l : efa.marked_locations) comp.marked[loc_index.at(l)] = true;
        }
        for (const auto& l : efa.initial_locations) comp.initial.push_back(loc_index.at(l));
        std::sort(comp.initial.begin(), comp.initial.end());
        comp.initial.erase(std::unique(comp.initial.begin(), comp.initial.end()), comp.initial.end());

        comp.by_loc_event.assign(efa.locations.size(), std::vector<std::vector<std::size_t>>(events_.size()));
        for (const auto& t : efa.transitions) {
            CompiledTransition ct;
            ct.source = loc_index.at(t.source);
            ct.target = loc_index.at(t.target);
            ct.event = event_index(t.event);
            ct.guard = compile(t.guard);
            for (const auto& a : t.action) {
                auto it = std::find_if(variables_.begin(), variables_.end(),
                                       [&](const VarDecl& v) { return v.name == a.var; });
                ct.action.emplace_back(static_cast<std::uint32_t>(it - variables_.begin()), a.value);
            }
            comp.by_loc_event[ct.source][ct.event].push_back(comp.transitions.size());
            comp.transitions.push_back(std::move(ct));
        }
        comps_.push_back(std::move(comp));

        std::vector<std::uint32_t> order(efa.locations.size());
        std::iota(order.begin(), order.end(), 0u);
        std::sort(order.begin(), order.end(),
                  [&](std::uint32_t a, std::uint32_t b) { return efa.locations[a] < efa.locations[b]; });
        std::vector<std::uint32_t> rank(order.size());
        for (std::uint32_t r = 0; r < order.size(); ++r) rank[order[r]] = r;
        name_rank_.push_back(std::move(rank));
    }
}

std::vector<ExplicitState> ProductSemantics::initial_states() const {
    std::vector<int> values;
    for (const auto& v : variables_) values.push_back(v.initial);
    std::vector<ExplicitState> out{ExplicitState{{}, values}};
    for (const auto& comp : comps_) {
        std::vector<ExplicitState> next;
        for (const auto& partial : out)
            for (auto l : comp.initial) {
                ExplicitState s = partial;
                s.locations.push_back(l);
                next.push_back(std::move(s));
            }
        out = std::move(next);
    }
    std::sort(out.begin(), out.end(), [&](const ExplicitState& a, const ExplicitState& b) {
        for (std::size_t c = 0; c < a.locations.size(); ++c) {
            auto ra = name_rank_[c][a.locations[c]], rb = name_rank_[c][b.locations[c]];
            if (ra != rb) return ra < rb;
        }
        return false;
    });
    return out;
}

bool ProductSemantics::is_marked(const ExplicitState& s) const {
    for (std::size_t c = 0; c < comps_.size(); ++c)
        if (!comps_[c].marked.empty() && !comps_[c].marked[s.locations[c]]) return false;
    return true;
}

template <typename Fn>
void ProductSemantics::for_each_combination(const ExplicitState& s, EventId e,
                                            const std::vector<bool>* subset, Fn&& fn) const {
    std::vector<std::uint32_t> parts;
    for (auto c : participants_[e])
        if (!subset || (*subset)[c]) parts.push_back(c);
    if (parts.empty()) return;

    std::vector<std::vector<const CompiledTransition*>> choices(parts.size());
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const Component& comp = comps_[parts[i]];
        for (auto ti : comp.by_loc_event[s.locations[parts[i]]][e]) {
            const auto& t = comp.transitions[ti];
            if (t.guard.eval(s.values)) choices[i].push_back(&t);
        }
        if (choices[i].empty()) return;
    }

    std::vector<std::size_t> pick(parts.size(), 0);
    std::vector<int> assigned(variables_.size());
    std::vector<bool> touched(variables_.size());
    for (;;) {
        std::fill(touched.begin(), touched.end(), false);
        bool conflict = false;
        for (std::size_t i = 0; i < parts.size() && !conflict; ++i)
            for (const auto& [var, val] : choices[i][pick[i]]->action) {
                if (touched[var] && assigned[var] != val) {
                    conflict = true;
                    break;
                }
                touched[var] = true;
                assigned[var] = val;
            }
        if (!conflict) {
            ExplicitState t = s;
            for (std::size_t i = 0; i < parts.size(); ++i) t.locations[parts[i]] = choices[i][pick[i]]->target;
            for (std::size_t v = 0; v < variables_.size(); ++v)
                if (touched[v]) t.values[v] = assigned[v];
            if (!fn(std::move(t))) return;
        }
        std::size_t k = 0;
        while (k < parts.size() && ++pick[k] == choices[k].size()) pick[k++] = 0;
        if (k == parts.size()) return;
    }
}

std::vector<ProductSemantics::Successor> ProductSemantics::successors(const ExplicitState& s) const {
    std::vector<Successor> out;
    for (EventId e = 0; e < events_.size(); ++e) {
        std::size_t first = out.size();
        for_each_combination(s, e, nullptr, [&](ExplicitState t) {
            out.push_back({e, std::move(t)});
            return true;
        });
        std::sort(out.begin() + static_cast<std::ptrdiff_t>(first), out.end(),
                  [&](const Successor& a, const Successor& b) {
                      for (std::size_t c = 0; c < a.target.locations.size(); ++c) {
                          auto ra = name_rank_[c][a.target.locations[c]];
                          auto rb = name_rank_[c][b.target.locations[c]];
                          if (ra != rb) return ra < rb;
                      }
                      return a.target.values < b.target.values;
                  });
        // Distinct transition combinations may land in the same target.
        out.erase(std::unique(out.begin() + static_cast<std::ptrdiff_t>(first), out.end(),
                              [](const Successor& a, const Successor& b) { return a.target == b.target; }),
                  out.end());
    }
    return out;
}

bool ProductSemantics::enabled_in_subset(const ExplicitState& s, EventId event,
                                         const std::vector<bool>& subset) const {
    bool found = false;
    for_each_combination(s, event, &subset, [&](ExplicitState) {
        found = true;
        return false;
    });
    return found;
}

bool ProductSemantics::in_subset_alphabet(EventId event, const std::vector<bool>& subset) const {
    for (auto c : participants_[event])
        if (subset[c]) return true;
    return false;
}

// ---------------------------------------------------------------------------
// flatten
// ---------------------------------------------------------------------------

namespace {

struct StateKeyHash {
    std::size_t operator()(const std::vector<int>& k) const noexcept {
        std::size_t h = 1469598103934665603ull;
        for (int x : k) {
            h ^= static_cast<std::size_t>(static_cast<unsigned>(x));
            h *= 1099511628211ull;
        }
        return h;
    }
};

std::vector<int> key_of(const ExplicitState& s) {
    std::vector<int> k;
    k.reserve(s.locations.size() + s.values.size());
    for (auto l : s.locations) k.push_back(static_cast<int>(l));
    k.insert(k.end(), s.values.begin(), s.values.end());
    return k;
}

}  // namespace

ExplicitAutomaton flatten(std::span<const Efa> efas, const FlattenOptions& opts) {
    ProductSemantics sem(efas);
    ExplicitAutomaton a;
    a.components = sem.components();
    a.location_names = sem.location_names();
    a.variables = sem.variables();
    a.events = sem.events();

    std::unordered_map<std::vector<int>, StateId, StateKeyHash> index;
    auto intern = [&](ExplicitState s) -> StateId {
        auto [it, fresh] = index.emplace(key_of(s), static_cast<StateId>(a.states.size()));
        if (fresh) {
            if (a.states.size() >= opts.max_states)
                throw ResourceError("state space exceeds cap of " + std::to_string(opts.max_states) +
                                    " states");
            a.marked.push_back(sem.is_marked(s));
            a.states.push_back(std::move(s));
        }
        return it->second;
    };

    for (auto& s : sem.initial_states()) {
        StateId id = intern(std::move(s));
        if (std::find(a.initial.begin(), a.initial.end(), id) == a.initial.end()) a.initial.push_back(id);
    }
    for (StateId cur = 0; cur < a.states.size(); ++cur) {
        auto succ = sem.successors(a.states[cur]);
        for (auto& [event, target] : succ) {
            StateId t = intern(std::move(target));
            a.transitions.push_back({cur, event, t});
        }
    }
    return a;
}

ExplicitAutomaton flatten(const Efa& efa, const FlattenOptions& opts) {
    return flatten(std::span<const Efa>(&efa, 1), opts);
}

// ---------------------------------------------------------------------------
// compose
// ---------------------------------------------------------------------------

namespace {

// True unless the guard is false under every valuation of the variables it mentions.
// Gives up (returns true) when the enumeration would be large.
bool satisfiable(const Guard& g, const std::vector<VarDecl>& vars) {
    std::vector<std::string> used;
    g.collect_vars(used);
    std::sort(used.begin(), used.end());
    used.erase(std::unique(used.begin(), used.end()), used.end());
    std::vector<const VarDecl*> decls;
    std::size_t combos = 1;
    for (const auto& name : used) {
        auto it = std::find_if(vars.begin(), vars.end(), [&](const VarDecl& v) { return v.name == name; });
        if (it == vars.end()) return true;
        decls.push_back(&*it);
        combos *= static_cast<std::size_t>(it->hi - it->lo + 1);
        if (combos > 100'000) return true;
    }
    Valuation v;
    for (const auto* d : decls) v.set(d->name, d->lo);
    for (;;) {
        if (eval_guard(g, v)) return true;
        std::size_t k = 0;
        for (; k < decls.size(); ++k) {
            const int x = *v.get(decls[k]->name);
            if (x < decls[k]->hi) {
                v.set(decls[k]->name, x + 1);
                break;
            }
            v.set(decls[k]->name, decls[k]->lo);
        }
        if (k == decls.size()) return false;
    }
}

}  // namespace

Efa compose(std::span<const Efa> efas) {
    auto diags = validate_model(efas);
    if (!diags.empty()) throw ValidationError(std::move(diags));
    if (efas.size() == 1) return efas.front();

    Efa out;
    std::map<std::string, EventDecl> events;
    for (std::size_t i = 0; i < efas.size(); ++i) {
        out.name += (i ? "||" : "") + efas[i].name;
        for (const auto& e : efas[i].alphabet) events.emplace(e.name, e);
        for (const auto& v : efas[i].variables)
            if (std::none_of(out.variables.begin(), out.variables.end(),
                             [&](const VarDecl& d) { return d.name == v.name; }))
                out.variables.push_back(v);
    }
    for (auto& [name, decl] : events) out.alphabet.push_back(decl);

    // Enumerate location tuples in lexicographic component order.
    std::vector<std::vector<std::size_t>> tuples{{}};
    for (const auto& efa : efas) {
        std::vector<std::vector<std::size_t>> next;
        for (const auto& t : tuples)
            for (std::size_t l = 0; l < efa.locations.size(); ++l) {
                auto u = t;
                u.push_back(l);
                next.push_back(std::move(u));
            }
        tuples = std::move(next);
    }
    auto name_of = [&](const std::vector<std::size_t>& t) {
        std::string s;
        for (std::size_t c = 0; c < t.size(); ++c) s += (c ? "." : "") + efas[c].locations[t[c]];
        return s;
    };
    auto contains = [](const std::vector<std::string>& v, const std::string& x) {
        return std::find(v.begin(), v.end(), x) != v.end();
    };

    bool any_marking = std::any_of(efas.begin(), efas.end(),
                                   [](const Efa& e) { return !e.marked_locations.empty(); });
    for (const auto& t : tuples) {
        std::string name = name_of(t);
        out.locations.push_back(name);
        bool initial = true, marked = any_marking;
        for (std::size_t c = 0; c < t.size(); ++c) {
            const auto& loc = efas[c].locations[t[c]];
            initial = initial && contains(efas[c].initial_locations, loc);
            if (!efas[c].marked_locations.empty()) marked = marked && contains(efas[c].marked_locations, loc);
        }
        if (initial) out.initial_locations.push_back(name);
        if (marked) out.marked_locations.push_back(name);

        for (const auto& ev : out.alphabet) {
            std::vector<std::size_t> parts;
            for (std::size_t c = 0; c < efas.size(); ++c)
                if (efas[c].find_event(ev.name)) parts.push_back(c);
            std::vector<std::vector<const Transition*>> choices(parts.size());
            bool blocked = false;
            for (std::size_t i = 0; i < parts.size(); ++i) {
                const Efa& efa = efas[parts[i]];
                for (const auto& tr : efa.transitions)
                    if (tr.event == ev.name && tr.source == efa.locations[t[parts[i]]])
                        choices[i].push_back(&tr);
                blocked = blocked || choices[i].empty();
            }
            if (blocked) continue;
            std::vector<std::size_t> pick(parts.size(), 0);
            for (;;) {
                std::vector<Guard> guards;
                ActionSet action;
                bool conflict = false;
                auto target = t;
                for (std::size_t i = 0; i < parts.size(); ++i) {
                    const Transition& tr = *choices[i][pick[i]];
                    guards.push_back(tr.guard);
                    const Efa& efa = efas[parts[i]];
                    target[parts[i]] = static_cast<std::size_t>(
                        std::find(efa.locations.begin(), efa.locations.end(), tr.target) - efa.locations.begin());
                    for (const auto& as : tr.action) {
                        auto it = std::find_if(action.begin(), action.end(),
                                               [&](const Assignment& x) { return x.var == as.var; });
                        if (it == action.end())
                            action.push_back(as);
                        else if (it->value != as.value)
                            conflict = true;
                    }
                }
                Guard guard = Guard::conj(std::move(guards));
                if (!conflict && satisfiable(guard, out.variables))
                    out.transitions.push_back({name, ev.name, std::move(guard), std::move(action), name_of(target)});
                std::size_t k = 0;
                while (k < parts.size() && ++pick[k] == choices[k].size()) pick[k++] = 0;
                if (k == parts.size()) break;
            }
        }
    }
    return out;
}

}  // namespace hazsynth
