// hazsynth: command-line front end. Each verb reads and writes the documented file formats
// so stages compose through files.

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hazsynth/error.hpp"
#include "hazsynth/extractor.hpp"
#include "hazsynth/graph_io.hpp"
#include "hazsynth/harness.hpp"
#include "hazsynth/model_dsl.hpp"
#include "hazsynth/rng.hpp"
#include "hazsynth/scenario.hpp"
#include "hazsynth/search.hpp"
#include "hazsynth/simulator.hpp"
#include "hazsynth/synthesizer.hpp"

namespace fs = std::filesystem;
using namespace hazsynth;

namespace {

enum Exit { Ok = 0, Usage = 1, Model = 2, Resource = 3 };

struct Overrides {
    std::string config;
    std::optional<std::size_t> horizon, budget, max_len, seeds, max_states;
    std::optional<double> threshold, uct_c;
    std::optional<std::string> counting;
    std::optional<std::uint64_t> seed;
};

void add_config_flags(CLI::App* app, Overrides& o, bool search_flags) {
    app->add_option("--config", o.config, "Config file (JSON); defaults to $HAZSYNTH_CONFIG");
    app->add_option("--horizon", o.horizon, "Maximum events per extracted sequence");
    app->add_option("--counting", o.counting, "Horizon counting: exclude_terminal | all_events");
    app->add_option("--threshold", o.threshold, "Risk threshold for unsafe classification");
    app->add_option("--max-states", o.max_states, "State cap for flattening");
    if (search_flags) {
        app->add_option("--budget", o.budget, "Simulation episodes per method and seed");
        app->add_option("--max-len", o.max_len, "Sequence length for the baselines");
        app->add_option("--seeds", o.seeds, "Use seeds 1..k");
        app->add_option("--uct-c", o.uct_c, "UCT exploration constant");
    }
}

RunConfig effective_config(const Overrides& o) {
    RunConfig c;
    std::string path = o.config;
    if (path.empty())
        if (const char* env = std::getenv("HAZSYNTH_CONFIG"); env && *env) path = env;
    if (!path.empty()) c = load_config_file(path);
    if (o.horizon) c.horizon = *o.horizon;
    if (o.counting) c.counting = counting_from_string(*o.counting);
    if (o.budget) c.budget = *o.budget;
    if (o.max_len) c.max_len = *o.max_len;
    if (o.threshold) c.threshold = *o.threshold;
    if (o.uct_c) c.uct_c = *o.uct_c;
    if (o.max_states) c.max_states = *o.max_states;
    if (o.seeds) {
        c.seeds.clear();
        for (std::uint64_t i = 1; i <= *o.seeds; ++i) c.seeds.push_back(i);
    }
    validate_config(c);
    return c;
}

std::ofstream open_out(const fs::path& p) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw IoError("cannot write '" + p.string() + "'");
    return out;
}

std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + v[i];
    return s;
}

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    for (std::string w; in >> w;) {
        for (auto& ch : w)
            if (ch == ',') ch = ' ';
        std::istringstream parts(w);
        for (std::string p; parts >> p;) out.push_back(p);
    }
    return out;
}

int cmd_synth(const std::string& model_path, const std::string& out, const std::string& dot, const Overrides& o) {
    const RunConfig cfg = effective_config(o);
    const ModelSet m = load_model_file(model_path);
    auto split = split_plant_spec(m);
    FlattenOptions fo;
    fo.max_states = cfg.max_states;
    const Supervisor sup = synthesize(split.plant, split.spec, fo);
    std::cout << "model " << m.name << ": product " << sup.product.num_states() << " states, "
              << sup.product.num_transitions() << " transitions\n"
              << "supervisor: " << sup.automaton.num_states() << " states, " << sup.automaton.num_transitions()
              << " transitions; removed " << sup.removed_states.size() << " states, "
              << sup.removed_transitions.size() << " transitions" << (sup.empty ? " (empty)" : "") << '\n';
    if (!out.empty()) {
        save_supervisor(out, sup);
        std::cout << "wrote " << out << '\n';
    }
    if (!dot.empty()) {
        auto os = open_out(dot);
        write_dot(os, sup);
        std::cout << "wrote " << dot << '\n';
    }
    return Ok;
}

int cmd_extract(const std::string& sup_path, const std::string& model_path, const std::string& out,
                const std::string& csv, bool projections, const Overrides& o) {
    const RunConfig cfg = effective_config(o);
    Supervisor sup;
    if (!sup_path.empty()) {
        sup = load_supervisor(sup_path);
    } else if (!model_path.empty()) {
        const ModelSet m = load_model_file(model_path);
        auto split = split_plant_spec(m);
        FlattenOptions fo;
        fo.max_states = cfg.max_states;
        sup = synthesize(split.plant, split.spec, fo);
    } else {
        throw ConfigError("extract needs --supervisor or --model");
    }
    ExtractOptions eo;
    eo.horizon = cfg.horizon;
    eo.counting = cfg.counting;
    auto full = enumerate_unsafe(sup, eo);
    std::vector<EventSequence> proj;
    for (const auto& s : full) proj.push_back(project_proactive(s, sup.automaton.events));
    proj = dedup_projections(proj);
    std::cout << "horizon " << cfg.horizon << " (" << to_string(cfg.counting) << "): " << full.size()
              << " full sequences, " << proj.size() << " distinct proactive projections\n";
    const auto& chosen = projections ? proj : full;
    if (!out.empty()) {
        auto os = open_out(out);
        write_sequences_jsonl(os, chosen);
        std::cout << "wrote " << out << '\n';
    } else {
        for (const auto& s : chosen) std::cout << "  " << s.id << ": " << join(s.events) << '\n';
    }
    if (!csv.empty()) {
        auto os = open_out(csv);
        write_sequences_csv(os, chosen);
        std::cout << "wrote " << csv << '\n';
    }
    return Ok;
}

int cmd_simulate(const std::string& scn_path, const std::string& seq_path, const std::string& events,
                 std::uint64_t seed, std::size_t runs, const std::string& out_dir, const Overrides& o) {
    const RunConfig cfg = effective_config(o);
    const Scenario sc = apply_config(load_scenario_file(scn_path), cfg);
    std::vector<EventSequence> seqs;
    if (!seq_path.empty()) {
        std::ifstream in(seq_path);
        if (!in) throw IoError("cannot open sequence file '" + seq_path + "'");
        seqs = read_sequences_jsonl(in);
    }
    if (!events.empty()) {
        EventSequence s;
        s.id = seqs.size();
        s.kind = SequenceKind::ProactiveProjection;
        s.events = split_ws(events);
        seqs.push_back(s);
    }
    if (seqs.empty()) throw ConfigError("simulate needs --sequences or --events");
    if (runs == 0) throw ConfigError("--runs must be at least 1");

    nlohmann::ordered_json summary = nlohmann::ordered_json::array();
    std::size_t unsafe = 0, evaluated = 0;
    for (const auto& s : seqs) {
        if (s.events.empty()) continue;
        ++evaluated;
        double best = 0.0;
        nlohmann::ordered_json entry;
        entry["id"] = s.id;
        entry["events"] = s.events;
        entry["runs"] = nlohmann::ordered_json::array();
        for (std::size_t k = 0; k < runs; ++k) {
            const std::uint64_t sd = derive_seed(seed, s.id * runs + k);
            RiskTrace t = run_episode(sc, s.events, sd);
            best = std::max(best, t.r_max);
            auto j = nlohmann::ordered_json::parse(trace_summary_json(t).dump());
            nlohmann::ordered_json r;
            r["seed"] = sd;
            r["r_max"] = t.r_max;
            r["cause"] = to_string(t.cause);
            r["safety"] = to_string(classify_trace(t, cfg.threshold));
            r["infeasible"] = t.infeasible;
            r["duration"] = j["duration"];
            entry["runs"].push_back(r);
            if (!out_dir.empty()) {
                auto os = open_out(fs::path(out_dir) / ("trace_" + std::to_string(s.id) + "_" + std::to_string(k) + ".csv"));
                write_trace_csv(os, t);
            }
        }
        entry["r_max"] = best;
        entry["safety"] = best >= cfg.threshold ? "unsafe" : "safe";
        if (best >= cfg.threshold) ++unsafe;
        std::cout << std::setw(4) << s.id << "  r_max " << std::fixed << std::setprecision(4) << best
                  << std::defaultfloat << "  " << (best >= cfg.threshold ? "UNSAFE" : "safe  ") << "  "
                  << join(s.events) << '\n';
        summary.push_back(entry);
    }
    std::cout << unsafe << " of " << evaluated << " sequences unsafe at threshold " << cfg.threshold << '\n';
    if (!out_dir.empty()) {
        auto os = open_out(fs::path(out_dir) / "simulate.json");
        os << summary.dump(2) << '\n';
        std::cout << "wrote " << (fs::path(out_dir) / "simulate.json").string() << '\n';
    }
    return Ok;
}

int cmd_search(const std::string& method, const std::string& model_path, const std::string& scn_path,
               std::uint64_t seed, const std::string& out, const std::string& csv, const Overrides& o) {
    const RunConfig cfg = effective_config(o);
    const Scenario sc = apply_config(load_scenario_file(scn_path), cfg);
    Sequence alphabet;
    if (!model_path.empty()) {
        const ModelSet m = load_model_file(model_path);
        for (const auto& e : m.events)
            if (e.proactive) alphabet.push_back(e.name);
        validate_scenario(sc, &m.events);
    } else {
        for (const auto& [ev, b] : sc.bindings) alphabet.push_back(ev);
    }
    std::sort(alphabet.begin(), alphabet.end());
    const auto run = simulator_runner(sc, InfeasiblePolicy::Skip);
    SearchResult res;
    if (method == "random") {
        RandomSearchOptions ro{cfg.budget, cfg.max_len, seed, cfg.threshold};
        res = random_search(run, alphabet, ro);
    } else if (method == "mcts") {
        MctsOptions mo{cfg.budget, cfg.max_len, cfg.uct_c, seed, cfg.threshold};
        res = mcts_search(run, alphabet, mo);
    } else {
        throw ConfigError("unknown search method '" + method + "' (expected random or mcts)");
    }
    std::cout << method << ": " << res.episodes << " episodes, N = " << res.n << ", r_mean = " << res.r_mean << '\n';
    for (const auto& u : res.unsafe) std::cout << "  r_max " << u.r_max << "  " << join(u.sequence) << '\n';
    if (!out.empty()) {
        auto os = open_out(out);
        os << search_result_to_json(res, true).dump(2) << '\n';
        std::cout << "wrote " << out << '\n';
    }
    if (!csv.empty()) {
        auto os = open_out(csv);
        write_search_csv(os, res);
        std::cout << "wrote " << csv << '\n';
    }
    return Ok;
}

int cmd_compare(const std::string& model_path, const std::string& scn_path, const std::string& out_dir,
                const std::string& format, const Overrides& o) {
    const RunConfig cfg = effective_config(o);
    const ModelSet m = load_model_file(model_path);
    const Scenario sc = load_scenario_file(scn_path);
    const AnalysisReport rep = run_compare(m, sc, cfg);
    std::optional<ReportFormat> only;
    if (!format.empty()) only = report_format_from_string(format);
    if (out_dir.empty()) {
        emit_report(std::cout, rep, only.value_or(ReportFormat::Markdown));
        return Ok;
    }
    emit_report_files(out_dir, rep, only);
    emit_report(std::cout, rep, ReportFormat::Markdown);
    std::cout << "\nwrote reports to " << out_dir << '\n';
    return Ok;
}

int cmd_report(const std::string& in_path, const std::string& format, const std::string& out) {
    std::ifstream in(in_path);
    if (!in) throw IoError("cannot open report '" + in_path + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw IoError("report '" + in_path + "': " + e.what());
    }
    const AnalysisReport rep = report_from_json(j);
    const ReportFormat f = report_format_from_string(format.empty() ? "md" : format);
    if (out.empty()) {
        emit_report(std::cout, rep, f);
    } else {
        auto os = open_out(out);
        emit_report(os, rep, f);
    }
    return Ok;
}

int exit_code_for(const Error& e) {
    switch (e.category()) {
        case ErrorCategory::Lexical:
        case ErrorCategory::Syntax:
        case ErrorCategory::Validation: return Model;
        case ErrorCategory::Resource: return Resource;
        case ErrorCategory::Config:
        case ErrorCategory::Io: return Usage;
    }
    return Usage;
}

void print_error(const Error& e) {
    if (const auto* pe = dynamic_cast<const ParseError*>(&e)) {
        std::cerr << "error: " << to_string(e.category()) << " error at " << pe->line() << ':' << pe->column() << ": "
                  << pe->message() << '\n';
        return;
    }
    if (const auto* ve = dynamic_cast<const ValidationError*>(&e)) {
        std::cerr << "error: model validation failed\n";
        for (const auto& d : ve->diagnostics())
            std::cerr << "  " << (d.line ? "line " + std::to_string(d.line) + ": " : "") << d.message << '\n';
        return;
    }
    std::cerr << "error: " << e.what() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hazsynth: formal synthesis of hazardous human-robot behaviours and simulation-based evaluation"};
    app.require_subcommand(1);

    Overrides o;
    std::string model, scenario, supervisor, out, dot, csv, sequences, events, method = "mcts", format, input;
    std::uint64_t seed = 1;
    std::size_t runs = 1;
    bool projections = false;

    auto* synth = app.add_subcommand("synth", "Synthesize the supervisor of a model");
    synth->add_option("--model", model, "Model file (.des)")->required();
    synth->add_option("--out", out, "Supervisor file (JSON)");
    synth->add_option("--dot", dot, "Graphviz rendering with removed elements dashed");
    add_config_flags(synth, o, false);

    auto* extract = app.add_subcommand("extract", "Enumerate hazard-reaching event sequences");
    extract->add_option("--supervisor", supervisor, "Supervisor file from `synth`");
    extract->add_option("--model", model, "Model file; synthesizes first");
    extract->add_option("--out", out, "Sequence file (JSON lines)");
    extract->add_option("--csv", csv, "Also write CSV");
    extract->add_flag("--projections", projections, "Output distinct proactive projections instead of full sequences");
    add_config_flags(extract, o, false);

    auto* simulate = app.add_subcommand("simulate", "Replay sequences in the 2D simulator");
    simulate->add_option("--scenario", scenario, "Scenario file (.scn)")->required();
    simulate->add_option("--sequences", sequences, "Sequence file (JSON lines)");
    simulate->add_option("--events", events, "Inline sequence, space or comma separated");
    simulate->add_option("--seed", seed, "Base seed");
    simulate->add_option("--runs", runs, "Episodes per sequence");
    simulate->add_option("--out", out, "Directory for traces and summary");
    add_config_flags(simulate, o, false);

    auto* search = app.add_subcommand("search", "Simulation-only falsification baseline");
    search->add_option("--method", method, "random | mcts");
    search->add_option("--model", model, "Model file; its proactive events form the alphabet");
    search->add_option("--scenario", scenario, "Scenario file (.scn)")->required();
    search->add_option("--seed", seed, "Seed");
    search->add_option("--out", out, "Result file (JSON)");
    search->add_option("--csv", csv, "Per-episode CSV");
    add_config_flags(search, o, true);

    auto* compare = app.add_subcommand("compare", "Two-layer pipeline against MCTS and random search");
    compare->add_option("--model", model, "Model file (.des)")->required();
    compare->add_option("--scenario", scenario, "Scenario file (.scn)")->required();
    compare->add_option("--out", out, "Output directory for report.json/.csv/.md");
    compare->add_option("--format", format, "Only this format: json | csv | md");
    add_config_flags(compare, o, true);

    auto* report = app.add_subcommand("report", "Render a saved report.json");
    report->add_option("--in", input, "report.json")->required();
    report->add_option("--format", format, "json | csv | md");
    report->add_option("--out", out, "Output file; stdout when omitted");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? Ok : Usage;
    }

    try {
        if (*synth) return cmd_synth(model, out, dot, o);
        if (*extract) return cmd_extract(supervisor, model, out, csv, projections, o);
        if (*simulate) return cmd_simulate(scenario, sequences, events, seed, runs, out, o);
        if (*search) return cmd_search(method, model, scenario, seed, out, csv, o);
        if (*compare) return cmd_compare(model, scenario, out, format, o);
        if (*report) return cmd_report(input, format, out);
    } catch (const Error& e) {
        print_error(e);
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return Usage;
    }
    return Usage;
}
