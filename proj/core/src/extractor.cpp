#include "hazsynth/extractor.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <set>

#include <nlohmann/json.hpp>

namespace hazsynth {

const char* to_string(SequenceKind k) noexcept {
    return k == SequenceKind::Full ? "full" : "proactive";
}

namespace {

class Enumerator {
public:
    Enumerator(const ExplicitAutomaton& a, const ExtractOptions& opts) : a_(a), opts_(opts) {
        out_.resize(a.num_states());
        for (std::size_t i = 0; i < a.transitions.size(); ++i) out_[a.transitions[i].source].push_back(i);
        terminal_limit_ = opts.counting == HorizonCounting::AllEvents ? opts.horizon : opts.horizon + 1;
        on_path_.assign(a.num_states(), false);
    }

    std::set<std::vector<std::string>> run() {
        for (auto s : a_.initial) {
            on_path_[s] = true;
            dfs(s);
            on_path_[s] = false;
        }
        return std::move(found_);
    }

private:
    void dfs(StateId s) {
        const std::size_t len = path_.size() + 1;
        for (auto ti : out_[s]) {
            const auto& t = a_.transitions[ti];
            if (a_.marked[t.target]) {
                if (len <= terminal_limit_ && !on_path_[t.target]) record(t.event);
                continue;
            }
            if (len > opts_.horizon || len >= terminal_limit_) continue;
            bool was = on_path_[t.target];
            on_path_[t.target] = true;
            path_.push_back(t.event);
            dfs(t.target);
            path_.pop_back();
            on_path_[t.target] = was;
        }
    }

    void record(EventId last) {
        std::vector<std::string> seq;
        seq.reserve(path_.size() + 1);
        for (auto e : path_) seq.push_back(a_.event_name(e));
        seq.push_back(a_.event_name(last));
        found_.insert(std::move(seq));
        if (found_.size() > opts_.max_sequences)
            throw ResourceError("more than " + std::to_string(opts_.max_sequences) +
                                " unsafe sequences within horizon " + std::to_string(opts_.horizon));
    }

    const ExplicitAutomaton& a_;
    const ExtractOptions& opts_;
    std::vector<std::vector<std::size_t>> out_;
    std::size_t terminal_limit_;
    std::vector<bool> on_path_;
    std::vector<EventId> path_;
    std::set<std::vector<std::string>> found_;
};

}  // namespace

std::vector<EventSequence> enumerate_unsafe(const ExplicitAutomaton& sup, const ExtractOptions& opts) {
    if (opts.horizon == 0) throw ConfigError("horizon must be at least 1");
    auto found = Enumerator(sup, opts).run();
    std::vector<EventSequence> out;
    out.reserve(found.size());
    for (auto& events : found) {
        EventSequence s;
        s.id = out.size();
        s.kind = SequenceKind::Full;
        s.events = events;
        s.sources = {s.id};
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<EventSequence> enumerate_unsafe(const Supervisor& sup, const ExtractOptions& opts) {
    return enumerate_unsafe(sup.automaton, opts);
}

EventSequence project_proactive(const EventSequence& seq, const std::vector<EventDecl>& events) {
    if (seq.kind != SequenceKind::Full) throw ConfigError("projection expects a full sequence");
    EventSequence p;
    p.id = seq.id;
    p.kind = SequenceKind::ProactiveProjection;
    p.sources = {seq.id};
    for (const auto& e : seq.events) {
        auto it = std::find_if(events.begin(), events.end(), [&](const EventDecl& d) { return d.name == e; });
        if (it != events.end() && it->proactive) p.events.push_back(e);
    }
    p.empty_projection = p.events.empty();
    return p;
}

std::vector<EventSequence> dedup_projections(const std::vector<EventSequence>& seqs) {
    std::vector<EventSequence> out;
    std::map<std::vector<std::string>, std::size_t> index;
    for (const auto& s : seqs) {
        auto [it, fresh] = index.emplace(s.events, out.size());
        if (fresh) {
            EventSequence u = s;
            u.id = out.size();
            out.push_back(std::move(u));
            continue;
        }
        auto& srcs = out[it->second].sources;
        for (auto id : s.sources)
            if (std::find(srcs.begin(), srcs.end(), id) == srcs.end()) srcs.push_back(id);
    }
    for (auto& u : out) std::sort(u.sources.begin(), u.sources.end());
    return out;
}

void write_sequences_jsonl(std::ostream& os, const std::vector<EventSequence>& seqs) {
    for (const auto& s : seqs) {
        nlohmann::ordered_json j;
        j["id"] = s.id;
        j["kind"] = to_string(s.kind);
        j["events"] = s.events;
        j["sources"] = s.sources;
        if (s.empty_projection) j["empty_projection"] = true;
        os << j.dump() << '\n';
    }
}

void write_sequences_csv(std::ostream& os, const std::vector<EventSequence>& seqs) {
    os << "id,kind,sources,events\n";
    for (const auto& s : seqs) {
        os << s.id << ',' << to_string(s.kind) << ',';
        for (std::size_t i = 0; i < s.sources.size(); ++i) os << (i ? ";" : "") << s.sources[i];
        os << ',';
        for (std::size_t i = 0; i < s.events.size(); ++i) os << (i ? " " : "") << s.events[i];
        os << '\n';
    }
}

std::vector<EventSequence> read_sequences_jsonl(std::istream& is) {
    std::vector<EventSequence> out;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            auto j = nlohmann::json::parse(line);
            EventSequence s;
            s.id = j.at("id").get<std::size_t>();
            s.kind = j.at("kind").get<std::string>() == "full" ? SequenceKind::Full
                                                               : SequenceKind::ProactiveProjection;
            s.events = j.at("events").get<std::vector<std::string>>();
            s.sources = j.value("sources", std::vector<std::size_t>{s.id});
            s.empty_projection = j.value("empty_projection", false);
            out.push_back(std::move(s));
        } catch (const nlohmann::json::exception& e) {
            throw IoError("sequence file line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace hazsynth
