#include "hazsynth/harness.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <set>

#include <nlohmann/json.hpp>

#include "hazsynth/error.hpp"
#include "hazsynth/rng.hpp"
#include "hazsynth/synthesizer.hpp"

namespace hazsynth {

using nlohmann::json;
using nlohmann::ordered_json;

const char* to_string(HorizonCounting c) noexcept {
    return c == HorizonCounting::AllEvents ? "all_events" : "exclude_terminal";
}

HorizonCounting counting_from_string(const std::string& s) {
    if (s == "all_events") return HorizonCounting::AllEvents;
    if (s == "exclude_terminal") return HorizonCounting::ExcludeTerminal;
    throw ConfigError("unknown horizon counting '" + s + "' (expected all_events or exclude_terminal)");
}

ordered_json config_to_json(const RunConfig& c) {
    ordered_json j;
    j["horizon"] = c.horizon;
    j["horizon_counting"] = to_string(c.counting);
    j["budget"] = c.budget;
    j["max_len"] = c.max_len;
    j["seeds"] = c.seeds;
    j["threshold"] = c.threshold;
    j["uct_c"] = c.uct_c;
    j["max_states"] = c.max_states;
    if (c.risk) j["risk"] = ordered_json::parse(risk_params_to_json(*c.risk).dump());
    return j;
}

RunConfig config_from_json(const json& j, const RunConfig& base) {
    static const std::set<std::string> known{"horizon", "horizon_counting", "budget", "max_len", "seeds",
                                             "threshold", "uct_c", "max_states", "risk"};
    if (!j.is_object()) throw ConfigError("config: expected a JSON object");
    for (const auto& [k, v] : j.items())
        if (!known.count(k)) throw ConfigError("config: unknown key '" + k + "'");
    try {
        RunConfig c = base;
        c.horizon = j.value("horizon", c.horizon);
        if (j.contains("horizon_counting")) c.counting = counting_from_string(j["horizon_counting"].get<std::string>());
        c.budget = j.value("budget", c.budget);
        c.max_len = j.value("max_len", c.max_len);
        if (j.contains("seeds")) {
            const auto& s = j["seeds"];
            if (s.is_array()) {
                c.seeds = s.get<std::vector<std::uint64_t>>();
            } else {
                const auto n = s.get<std::uint64_t>();
                c.seeds.clear();
                for (std::uint64_t i = 1; i <= n; ++i) c.seeds.push_back(i);
            }
        }
        c.threshold = j.value("threshold", c.threshold);
        c.uct_c = j.value("uct_c", c.uct_c);
        c.max_states = j.value("max_states", c.max_states);
        if (j.contains("risk")) c.risk = risk_params_from_json(j["risk"], c.risk.value_or(RiskParams{}));
        return c;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

RunConfig load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    try {
        return config_from_json(json::parse(in, nullptr, true, true));
    } catch (const json::parse_error& e) {
        throw ConfigError("config file '" + path.string() + "': " + e.what());
    }
}

void validate_config(const RunConfig& c) {
    if (c.horizon == 0) throw ConfigError("horizon must be at least 1");
    if (c.budget == 0) throw ConfigError("budget must be at least 1");
    if (c.max_len == 0) throw ConfigError("max_len must be at least 1");
    if (c.seeds.empty()) throw ConfigError("at least one seed is required");
    if (!(c.uct_c > 0.0)) throw ConfigError("uct_c must be positive");
    if (c.max_states == 0) throw ConfigError("max_states must be positive");
    if (c.risk) validate(*c.risk);
}

std::string config_hash(const RunConfig& c) {
    const std::string text = config_to_json(c).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

Scenario apply_config(Scenario scenario, const RunConfig& config) {
    if (config.risk) scenario.risk = *config.risk;
    return scenario;
}

std::vector<Sequence> FormalAnalysis::formal_set() const {
    std::vector<Sequence> out;
    for (const auto& p : projections)
        if (!p.empty_projection) out.push_back(p.events);
    return out;
}

FormalAnalysis analyze_model(const ModelSet& model, const RunConfig& config) {
    auto split = split_plant_spec(model);
    FlattenOptions fo;
    fo.max_states = config.max_states;
    Supervisor sup = synthesize(split.plant, split.spec, fo);

    FormalAnalysis fa;
    fa.product_states = sup.product.num_states();
    fa.supervisor_states = sup.automaton.num_states();
    fa.supervisor_transitions = sup.automaton.num_transitions();
    fa.empty_supervisor = sup.empty;
    for (const auto& e : model.events)
        if (e.proactive) fa.proactive_alphabet.push_back(e.name);
    std::sort(fa.proactive_alphabet.begin(), fa.proactive_alphabet.end());
    if (sup.empty) return fa;

    ExtractOptions eo;
    eo.horizon = config.horizon;
    eo.counting = config.counting;
    fa.full = enumerate_unsafe(sup, eo);
    std::vector<EventSequence> projected;
    projected.reserve(fa.full.size());
    for (const auto& s : fa.full) projected.push_back(project_proactive(s, model.events));
    fa.projections = dedup_projections(projected);
    for (const auto& p : fa.projections)
        if (p.empty_projection) ++fa.empty_projections;
    return fa;
}

SearchResult run_two_layer(const FormalAnalysis& formal, const EpisodeRunner& run, std::size_t budget,
                           std::uint64_t seed, double threshold) {
    if (budget == 0) throw ConfigError("budget must be at least 1");
    SearchResult res;
    res.method = "two-layer";
    res.threshold = threshold;
    res.empty_supervisor = formal.empty_supervisor;
    const auto seqs = formal.formal_set();
    if (!seqs.empty()) {
        res.records.reserve(budget);
        for (std::size_t i = 0; i < budget; ++i) {
            const Sequence& seq = seqs[i % seqs.size()];
            const std::uint64_t s = derive_seed(derive_seed(seed, 0x2a7e4ULL), i);
            EpisodeOutcome o = run(seq, s);
            res.records.push_back({seq, seq, o.r_max, s, o.infeasible});
        }
    }
    summarize(res);
    return res;
}

SearchResult run_two_layer(const ModelSet& model, const Scenario& scenario, const RunConfig& config,
                           std::uint64_t seed) {
    validate_config(config);
    const Scenario sc = apply_config(scenario, config);
    validate_scenario(sc, &model.events);
    const FormalAnalysis fa = analyze_model(model, config);
    return run_two_layer(fa, simulator_runner(sc, InfeasiblePolicy::Abort), config.budget, seed, config.threshold);
}

AlarmClassification classify_alarms(const std::vector<Sequence>& formal,
                                    const std::vector<std::pair<Sequence, double>>& evaluated,
                                    double threshold, std::size_t horizon) {
    const std::set<Sequence> f(formal.begin(), formal.end());
    std::map<Sequence, double> best;
    for (const auto& [seq, r] : evaluated) {
        auto [it, fresh] = best.emplace(seq, r);
        if (!fresh && r > it->second) it->second = r;
    }
    AlarmClassification out;
    for (const auto& [seq, r] : best) {
        const bool is_formal = f.count(seq) > 0;
        const bool unsafe = r >= threshold;
        UnsafeSequence u{seq, r};
        if (is_formal && unsafe) out.agreements.push_back(std::move(u));
        else if (is_formal) out.false_alarms.push_back(std::move(u));
        else if (unsafe) {
            if (horizon && seq.size() > horizon) ++out.missed_beyond_horizon;
            out.missed.push_back(std::move(u));
        } else out.benign.push_back(std::move(u));
    }
    return out;
}

SeedRun seed_run_from(const SearchResult& r, std::uint64_t seed) {
    return {seed, r.episodes, r.n, r.r_mean, r.unsafe};
}

void finalize_method(MethodReport& m) {
    m.mean_n = m.mean_r_mean = m.mean_episodes = 0.0;
    if (m.runs.empty()) return;
    for (const auto& r : m.runs) {
        m.mean_n += static_cast<double>(r.n);
        m.mean_r_mean += r.r_mean;
        m.mean_episodes += static_cast<double>(r.episodes);
    }
    const double k = static_cast<double>(m.runs.size());
    m.mean_n /= k;
    m.mean_r_mean /= k;
    m.mean_episodes /= k;
}

AnalysisReport run_compare(const ModelSet& model, const Scenario& scenario, const RunConfig& config) {
    validate_config(config);
    const Scenario sc = apply_config(scenario, config);
    validate_scenario(sc, &model.events);
    const FormalAnalysis fa = analyze_model(model, config);

    AnalysisReport rep;
    rep.model = model.name;
    rep.scenario = sc.name;
    rep.config = config;
    rep.config_hash = config_hash(config);
    rep.product_states = fa.product_states;
    rep.supervisor_states = fa.supervisor_states;
    rep.supervisor_transitions = fa.supervisor_transitions;
    rep.empty_supervisor = fa.empty_supervisor;
    rep.full_sequences = fa.full.size();
    rep.formal = fa.formal_set();
    rep.projections = rep.formal.size();

    const auto two_layer_run = simulator_runner(sc, InfeasiblePolicy::Abort);
    const auto baseline_run = simulator_runner(sc, InfeasiblePolicy::Skip);
    MethodReport two{"two-layer", {}, 0, 0, 0}, mcts{"mcts", {}, 0, 0, 0}, rnd{"random", {}, 0, 0, 0};
    std::vector<std::pair<Sequence, double>> evaluated;
    auto collect = [&](const SearchResult& r) {
        for (const auto& rec : r.records) evaluated.emplace_back(rec.sequence, rec.r_max);
    };

    for (auto seed : config.seeds) {
        auto t = run_two_layer(fa, two_layer_run, config.budget, seed, config.threshold);
        two.runs.push_back(seed_run_from(t, seed));
        collect(t);

        MctsOptions mo;
        mo.budget = config.budget;
        mo.max_len = config.max_len;
        mo.uct_c = config.uct_c;
        mo.seed = seed;
        mo.threshold = config.threshold;
        auto m = mcts_search(baseline_run, fa.proactive_alphabet, mo);
        mcts.runs.push_back(seed_run_from(m, seed));
        collect(m);

        RandomSearchOptions ro;
        ro.budget = config.budget;
        ro.max_len = config.max_len;
        ro.seed = seed;
        ro.threshold = config.threshold;
        auto r = random_search(baseline_run, fa.proactive_alphabet, ro);
        rnd.runs.push_back(seed_run_from(r, seed));
        collect(r);
    }
    for (auto* m : {&two, &mcts, &rnd}) {
        finalize_method(*m);
        rep.methods.push_back(std::move(*m));
    }
    rep.alarms = classify_alarms(rep.formal, evaluated, config.threshold, config.horizon);
    return rep;
}

ReportFormat report_format_from_string(const std::string& s) {
    if (s == "json") return ReportFormat::Json;
    if (s == "csv") return ReportFormat::Csv;
    if (s == "md" || s == "markdown") return ReportFormat::Markdown;
    throw ConfigError("unknown report format '" + s + "' (expected json, csv or md)");
}

namespace {

ordered_json unsafe_list(const std::vector<UnsafeSequence>& v) {
    ordered_json a = ordered_json::array();
    for (const auto& u : v) a.push_back({{"sequence", u.sequence}, {"r_max", u.r_max}});
    return a;
}

std::vector<UnsafeSequence> unsafe_from(const json& a) {
    std::vector<UnsafeSequence> out;
    for (const auto& u : a) out.push_back({u.at("sequence").get<Sequence>(), u.at("r_max").get<double>()});
    return out;
}

std::string join(const Sequence& s, const char* sep = " ") {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) out += sep;
        out += s[i];
    }
    return out;
}

}  // namespace

ordered_json report_to_json(const AnalysisReport& r) {
    ordered_json j;
    ordered_json meta;
    meta["model"] = r.model;
    meta["scenario"] = r.scenario;
    meta["config_hash"] = r.config_hash;
    meta["config"] = config_to_json(r.config);
    j["metadata"] = meta;

    ordered_json formal;
    formal["product_states"] = r.product_states;
    formal["supervisor_states"] = r.supervisor_states;
    formal["supervisor_transitions"] = r.supervisor_transitions;
    formal["empty_supervisor"] = r.empty_supervisor;
    formal["full_sequences"] = r.full_sequences;
    formal["projections"] = r.projections;
    formal["sequences"] = r.formal;
    j["formal"] = formal;

    j["methods"] = ordered_json::array();
    for (const auto& m : r.methods) {
        ordered_json x;
        x["method"] = m.method;
        x["mean_N"] = m.mean_n;
        x["mean_r_mean"] = m.mean_r_mean;
        x["mean_episodes"] = m.mean_episodes;
        x["runs"] = ordered_json::array();
        for (const auto& s : m.runs) {
            ordered_json y;
            y["seed"] = s.seed;
            y["episodes"] = s.episodes;
            y["N"] = s.n;
            y["r_mean"] = s.r_mean;
            y["unsafe"] = unsafe_list(s.unsafe);
            x["runs"].push_back(y);
        }
        j["methods"].push_back(x);
    }

    ordered_json al;
    al["agreements"] = unsafe_list(r.alarms.agreements);
    al["missed"] = unsafe_list(r.alarms.missed);
    al["false_alarms"] = unsafe_list(r.alarms.false_alarms);
    al["benign_count"] = r.alarms.benign.size();
    al["benign"] = unsafe_list(r.alarms.benign);
    al["missed_beyond_horizon"] = r.alarms.missed_beyond_horizon;
    j["alarms"] = al;
    return j;
}

AnalysisReport report_from_json(const json& j) {
    try {
        AnalysisReport r;
        const auto& meta = j.at("metadata");
        r.model = meta.at("model").get<std::string>();
        r.scenario = meta.at("scenario").get<std::string>();
        r.config_hash = meta.at("config_hash").get<std::string>();
        r.config = config_from_json(meta.at("config"));
        const auto& f = j.at("formal");
        r.product_states = f.at("product_states").get<std::size_t>();
        r.supervisor_states = f.at("supervisor_states").get<std::size_t>();
        r.supervisor_transitions = f.at("supervisor_transitions").get<std::size_t>();
        r.empty_supervisor = f.at("empty_supervisor").get<bool>();
        r.full_sequences = f.at("full_sequences").get<std::size_t>();
        r.projections = f.at("projections").get<std::size_t>();
        r.formal = f.at("sequences").get<std::vector<Sequence>>();
        for (const auto& x : j.at("methods")) {
            MethodReport m;
            m.method = x.at("method").get<std::string>();
            m.mean_n = x.at("mean_N").get<double>();
            m.mean_r_mean = x.at("mean_r_mean").get<double>();
            m.mean_episodes = x.at("mean_episodes").get<double>();
            for (const auto& y : x.at("runs"))
                m.runs.push_back({y.at("seed").get<std::uint64_t>(), y.at("episodes").get<std::size_t>(),
                                  y.at("N").get<std::size_t>(), y.at("r_mean").get<double>(),
                                  unsafe_from(y.at("unsafe"))});
            r.methods.push_back(std::move(m));
        }
        const auto& al = j.at("alarms");
        r.alarms.agreements = unsafe_from(al.at("agreements"));
        r.alarms.missed = unsafe_from(al.at("missed"));
        r.alarms.false_alarms = unsafe_from(al.at("false_alarms"));
        r.alarms.benign = unsafe_from(al.at("benign"));
        r.alarms.missed_beyond_horizon = al.at("missed_beyond_horizon").get<std::size_t>();
        return r;
    } catch (const json::exception& e) {
        throw IoError(std::string("report: ") + e.what());
    }
}

void emit_report(std::ostream& os, const AnalysisReport& r, ReportFormat format) {
    switch (format) {
        case ReportFormat::Json:
            os << report_to_json(r).dump(2) << '\n';
            return;
        case ReportFormat::Csv: {
            os << "method,seed,episodes,N,r_mean\n";
            const auto prec = os.precision(10);
            for (const auto& m : r.methods) {
                for (const auto& s : m.runs)
                    os << m.method << ',' << s.seed << ',' << s.episodes << ',' << s.n << ',' << s.r_mean << '\n';
                if (!m.runs.empty())
                    os << m.method << ",mean," << m.mean_episodes << ',' << m.mean_n << ',' << m.mean_r_mean << '\n';
            }
            os.precision(prec);
            return;
        }
        case ReportFormat::Markdown: {
            os << "# Comparison report: " << r.model << " on " << r.scenario << "\n\n";
            os << "- config hash: `" << r.config_hash << "`\n";
            os << "- budget " << r.config.budget << ", horizon " << r.config.horizon << " ("
               << to_string(r.config.counting) << "), max length " << r.config.max_len << ", threshold "
               << r.config.threshold << ", " << r.config.seeds.size() << " seeds\n";
            os << "- supervisor: " << r.supervisor_states << " states, " << r.supervisor_transitions
               << " transitions (product " << r.product_states << " states)\n";
            os << "- formal sequences: " << r.full_sequences << " full, " << r.projections
               << " distinct proactive projections\n\n";
            os << "| method | mean N | mean r_mean | mean episodes |\n|---|---:|---:|---:|\n";
            for (const auto& m : r.methods)
                os << "| " << m.method << " | " << m.mean_n << " | " << m.mean_r_mean << " | " << m.mean_episodes
                   << " |\n";
            os << "\n## Per seed\n\n| method | seed | episodes | N | r_mean |\n|---|---:|---:|---:|---:|\n";
            for (const auto& m : r.methods)
                for (const auto& s : m.runs)
                    os << "| " << m.method << " | " << s.seed << " | " << s.episodes << " | " << s.n << " | "
                       << s.r_mean << " |\n";
            os << "\n## Alarm classification\n\n";
            os << "- agreements: " << r.alarms.agreements.size() << "\n- missed alarms: " << r.alarms.missed.size()
               << " (" << r.alarms.missed_beyond_horizon << " longer than the horizon)\n- false alarms: "
               << r.alarms.false_alarms.size() << "\n- benign, not formal: " << r.alarms.benign.size() << "\n";
            auto list = [&](const char* title, const std::vector<UnsafeSequence>& v) {
                if (v.empty()) return;
                os << "\n### " << title << "\n\n";
                for (const auto& u : v) os << "- `" << join(u.sequence) << "` (r_max " << u.r_max << ")\n";
            };
            list("Agreements", r.alarms.agreements);
            list("Missed alarms", r.alarms.missed);
            list("False alarms", r.alarms.false_alarms);
            return;
        }
    }
}

void emit_report_files(const std::filesystem::path& dir, const AnalysisReport& r, std::optional<ReportFormat> only) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
    const std::pair<ReportFormat, const char*> all[] = {
        {ReportFormat::Json, "report.json"}, {ReportFormat::Csv, "report.csv"}, {ReportFormat::Markdown, "report.md"}};
    for (const auto& [fmt, name] : all) {
        if (only && *only != fmt) continue;
        std::ofstream out(dir / name, std::ios::binary);
        if (!out) throw IoError("cannot write '" + (dir / name).string() + "'");
        emit_report(out, r, fmt);
        if (!out) throw IoError("write failed for '" + (dir / name).string() + "'");
    }
}

}  // namespace hazsynth
