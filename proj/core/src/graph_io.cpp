#include "hazsynth/graph_io.hpp"

#include <fstream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "hazsynth/error.hpp"

namespace hazsynth {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

ordered_json automaton_ordered(const ExplicitAutomaton& a) {
    ordered_json j;
    j["components"] = a.components;
    j["locations"] = a.location_names;
    j["variables"] = ordered_json::array();
    for (const auto& v : a.variables) {
        ordered_json x;
        x["name"] = v.name;
        x["lo"] = v.lo;
        x["hi"] = v.hi;
        x["initial"] = v.initial;
        if (!v.labels.empty()) x["labels"] = v.labels;
        j["variables"].push_back(x);
    }
    j["events"] = ordered_json::array();
    for (const auto& e : a.events) {
        ordered_json x;
        x["name"] = e.name;
        x["controllable"] = e.controllable;
        x["proactive"] = e.proactive;
        j["events"].push_back(x);
    }
    j["states"] = ordered_json::array();
    for (StateId s = 0; s < a.num_states(); ++s) {
        ordered_json x;
        x["id"] = s;
        x["label"] = a.state_label(s);
        x["locations"] = a.states[s].locations;
        x["values"] = a.states[s].values;
        x["marked"] = static_cast<bool>(a.marked[s]);
        j["states"].push_back(x);
    }
    j["initial"] = a.initial;
    j["transitions"] = ordered_json::array();
    for (const auto& t : a.transitions)
        j["transitions"].push_back(ordered_json{{"source", t.source}, {"event", a.event_name(t.event)}, {"target", t.target}});
    return j;
}

}  // namespace

json automaton_to_json(const ExplicitAutomaton& a) { return json::parse(automaton_ordered(a).dump()); }

ExplicitAutomaton automaton_from_json(const json& j) {
    try {
        ExplicitAutomaton a;
        a.components = j.at("components").get<std::vector<std::string>>();
        a.location_names = j.at("locations").get<std::vector<std::vector<std::string>>>();
        for (const auto& x : j.at("variables")) {
            VarDecl v;
            v.name = x.at("name").get<std::string>();
            v.lo = x.at("lo").get<int>();
            v.hi = x.at("hi").get<int>();
            v.initial = x.at("initial").get<int>();
            if (x.contains("labels")) v.labels = x["labels"].get<std::vector<std::string>>();
            a.variables.push_back(std::move(v));
        }
        for (const auto& x : j.at("events")) {
            EventDecl e;
            e.name = x.at("name").get<std::string>();
            e.controllable = x.value("controllable", true);
            e.proactive = x.value("proactive", false);
            a.events.push_back(std::move(e));
        }
        for (const auto& x : j.at("states")) {
            ExplicitState s;
            s.locations = x.at("locations").get<std::vector<std::uint32_t>>();
            s.values = x.at("values").get<std::vector<int>>();
            if (s.locations.size() != a.components.size() || s.values.size() != a.variables.size())
                throw IoError("graph: state shape does not match components/variables");
            for (std::size_t c = 0; c < s.locations.size(); ++c)
                if (s.locations[c] >= a.location_names[c].size()) throw IoError("graph: location index out of range");
            a.marked.push_back(x.value("marked", false));
            a.states.push_back(std::move(s));
        }
        a.initial = j.at("initial").get<std::vector<StateId>>();
        for (auto s : a.initial)
            if (s >= a.num_states()) throw IoError("graph: initial state out of range");
        for (const auto& x : j.at("transitions")) {
            ExplicitTransition t;
            t.source = x.at("source").get<StateId>();
            t.target = x.at("target").get<StateId>();
            if (t.source >= a.num_states() || t.target >= a.num_states())
                throw IoError("graph: transition endpoint out of range");
            try {
                t.event = a.event_id(x.at("event").get<std::string>());
            } catch (const std::out_of_range&) {
                throw IoError("graph: unknown event '" + x.at("event").get<std::string>() + "'");
            }
            a.transitions.push_back(t);
        }
        return a;
    } catch (const json::exception& e) {
        throw IoError(std::string("graph: ") + e.what());
    }
}

json supervisor_to_json(const Supervisor& sup) {
    ordered_json j;
    j["format"] = "hazsynth-supervisor";
    j["version"] = 1;
    ordered_json stats;
    stats["product_states"] = sup.product.num_states();
    stats["product_transitions"] = sup.product.num_transitions();
    stats["states"] = sup.automaton.num_states();
    stats["transitions"] = sup.automaton.num_transitions();
    stats["empty"] = sup.empty;
    j["summary"] = stats;
    auto g = automaton_ordered(sup.product);
    for (std::size_t s = 0; s < g["states"].size(); ++s) g["states"][s]["removed"] = !sup.retained_states[s];
    for (std::size_t t = 0; t < g["transitions"].size(); ++t)
        g["transitions"][t]["removed"] = !sup.retained_transitions[t];
    j["product"] = g;
    return json::parse(j.dump());
}

Supervisor supervisor_from_json(const json& j) {
    if (!j.is_object() || j.value("format", std::string()) != "hazsynth-supervisor")
        throw IoError("supervisor file: missing or wrong format tag");
    try {
        const auto& g = j.at("product");
        ExplicitAutomaton product = automaton_from_json(g);
        StateSet keep;
        for (const auto& s : g.at("states")) keep.push_back(!s.value("removed", false));
        return restrict_to(product, keep);
    } catch (const json::exception& e) {
        throw IoError(std::string("supervisor file: ") + e.what());
    } catch (const ConfigError& e) {
        throw IoError(std::string("supervisor file: ") + e.what());
    }
}

void save_supervisor(const std::filesystem::path& path, const Supervisor& sup) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << supervisor_to_json(sup).dump(1) << '\n';
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

Supervisor load_supervisor(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open supervisor file '" + path.string() + "'");
    try {
        return supervisor_from_json(json::parse(in));
    } catch (const json::exception& e) {
        throw IoError("supervisor file '" + path.string() + "': " + e.what());
    }
}

namespace {

std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

}  // namespace

void write_dot(std::ostream& os, const Supervisor& sup) {
    const auto& p = sup.product;
    os << "digraph supervisor {\n  rankdir=LR;\n  node [shape=circle];\n";
    for (StateId s = 0; s < p.num_states(); ++s) {
        os << "  s" << s << " [label=\"" << dot_escape(p.state_label(s)) << "\"";
        if (p.marked[s]) os << ", shape=doublecircle";
        if (!sup.retained_states[s]) os << ", style=dashed, color=red";
        os << "];\n";
    }
    for (auto s : p.initial) os << "  init" << s << " [shape=point];\n  init" << s << " -> s" << s << ";\n";
    for (std::size_t i = 0; i < p.transitions.size(); ++i) {
        const auto& t = p.transitions[i];
        os << "  s" << t.source << " -> s" << t.target << " [label=\"" << dot_escape(p.event_name(t.event)) << "\"";
        if (!p.events[t.event].controllable) os << ", arrowhead=empty";
        if (!sup.retained_transitions[i]) os << ", style=dashed, color=red";
        os << "];\n";
    }
    os << "}\n";
}

}  // namespace hazsynth
