#include "hazsynth/search.hpp"

#include <algorithm>
#include <limits>
#include <ostream>

#include <nlohmann/json.hpp>

#include "hazsynth/error.hpp"
#include "hazsynth/rng.hpp"

namespace hazsynth {

EpisodeRunner simulator_runner(const Scenario& scenario, InfeasiblePolicy policy) {
    return [&scenario, policy](const Sequence& events, std::uint64_t seed) {
        SimOptions opts;
        opts.infeasible = policy;
        opts.record_samples = false;
        RiskTrace t = run_episode(scenario, events, seed, opts);
        return EpisodeOutcome{std::move(t.executed), t.r_max, t.infeasible};
    };
}

void summarize(SearchResult& result) {
    std::map<Sequence, double> best;
    for (const auto& rec : result.records) {
        auto [it, fresh] = best.emplace(rec.sequence, rec.r_max);
        if (!fresh && rec.r_max > it->second) it->second = rec.r_max;
    }
    result.unsafe.clear();
    double sum = 0.0;
    for (const auto& [seq, r] : best) {
        if (r < result.threshold) continue;
        result.unsafe.push_back({seq, r});
        sum += r;
    }
    result.n = result.unsafe.size();
    result.r_mean = result.n ? sum / static_cast<double>(result.n) : 0.0;
    result.episodes = result.records.size();
}

namespace {

void check_common(std::size_t budget, std::size_t max_len, const Sequence& alphabet) {
    if (budget == 0) throw ConfigError("search budget must be at least 1");
    if (max_len == 0) throw ConfigError("search max_len must be at least 1");
    if (alphabet.empty()) throw ConfigError("search alphabet is empty");
}

SearchRecord evaluate(const EpisodeRunner& run, Sequence requested, std::uint64_t seed) {
    EpisodeOutcome o = run(requested, seed);
    SearchRecord rec;
    rec.sequence = std::move(o.executed);
    rec.requested = std::move(requested);
    rec.r_max = o.r_max;
    rec.seed = seed;
    rec.infeasible = o.infeasible;
    return rec;
}

}  // namespace

SearchResult random_search(const EpisodeRunner& run, const Sequence& alphabet, const RandomSearchOptions& opts) {
    check_common(opts.budget, opts.max_len, alphabet);
    SearchResult res;
    res.method = "random";
    res.threshold = opts.threshold;
    res.records.reserve(opts.budget);
    for (std::size_t i = 0; i < opts.budget; ++i) {
        Rng rng(derive_seed(opts.seed, 2 * i));
        Sequence seq;
        seq.reserve(opts.max_len);
        for (std::size_t k = 0; k < opts.max_len; ++k) seq.push_back(alphabet[rng.below(alphabet.size())]);
        res.records.push_back(evaluate(run, std::move(seq), derive_seed(opts.seed, 2 * i + 1)));
    }
    summarize(res);
    return res;
}

double uct_score(double total_reward, std::uint64_t visits, std::uint64_t parent_visits, double c) noexcept {
    if (visits == 0) return std::numeric_limits<double>::infinity();
    const double n = static_cast<double>(visits);
    return total_reward / n + c * std::sqrt(std::log(static_cast<double>(parent_visits)) / n);
}

SearchResult mcts_search(const EpisodeRunner& run, const Sequence& alphabet, const MctsOptions& opts,
                         std::vector<MctsNode>* tree_out) {
    check_common(opts.budget, opts.max_len, alphabet);
    if (!(opts.uct_c > 0.0)) throw ConfigError("uct_c must be positive");
    Sequence sorted = alphabet;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

    SearchResult res;
    res.method = "mcts";
    res.threshold = opts.threshold;
    res.records.reserve(opts.budget);
    std::vector<MctsNode> tree(1);
    Rng rollout_rng(derive_seed(opts.seed, 0x5eedULL));

    for (std::size_t it = 0; it < opts.budget; ++it) {
        std::vector<std::size_t> path{0};
        Sequence prefix;
        std::size_t node = 0;

        // Selection: descend through fully expanded nodes.
        while (tree[node].depth < opts.max_len && tree[node].children.size() == sorted.size()) {
            std::size_t best = 0;
            double best_score = -std::numeric_limits<double>::infinity();
            for (const auto& [ev, child] : tree[node].children) {  // lexicographic order
                const double s = uct_score(tree[child].total_reward, tree[child].visits, tree[node].visits, opts.uct_c);
                if (s > best_score) {
                    best_score = s;
                    best = child;
                }
            }
            node = best;
            path.push_back(node);
            prefix.push_back(tree[node].event);
        }

        // Expansion: the smallest untried event.
        if (tree[node].depth < opts.max_len) {
            for (const auto& ev : sorted) {
                if (tree[node].children.count(ev)) continue;
                MctsNode child;
                child.event = ev;
                child.parent = node;
                child.depth = tree[node].depth + 1;
                const std::size_t id = tree.size();
                tree[node].children.emplace(ev, id);
                tree.push_back(std::move(child));
                node = id;
                path.push_back(node);
                prefix.push_back(ev);
                break;
            }
        }

        // Rollout.
        Sequence seq = prefix;
        while (seq.size() < opts.max_len) seq.push_back(sorted[rollout_rng.below(sorted.size())]);
        SearchRecord rec = evaluate(run, std::move(seq), derive_seed(opts.seed, 2 * it + 1));
        const double reward = rec.r_max;
        res.records.push_back(std::move(rec));

        for (auto n : path) {
            tree[n].visits += 1;
            tree[n].total_reward += reward;
        }
    }
    summarize(res);
    if (tree_out) *tree_out = std::move(tree);
    return res;
}

nlohmann::json search_result_to_json(const SearchResult& r, bool include_records) {
    nlohmann::ordered_json j;
    j["method"] = r.method;
    j["episodes"] = r.episodes;
    j["threshold"] = r.threshold;
    j["N"] = r.n;
    j["r_mean"] = r.r_mean;
    if (r.empty_supervisor) j["empty_supervisor"] = true;
    j["unsafe"] = nlohmann::ordered_json::array();
    for (const auto& u : r.unsafe) j["unsafe"].push_back({{"sequence", u.sequence}, {"r_max", u.r_max}});
    if (include_records) {
        j["records"] = nlohmann::ordered_json::array();
        for (const auto& rec : r.records) {
            nlohmann::ordered_json x;
            x["sequence"] = rec.sequence;
            x["requested"] = rec.requested;
            x["r_max"] = rec.r_max;
            x["seed"] = rec.seed;
            x["infeasible"] = rec.infeasible;
            j["records"].push_back(x);
        }
    }
    return nlohmann::json::parse(j.dump());
}

SearchResult search_result_from_json(const nlohmann::json& j) {
    try {
        SearchResult r;
        r.method = j.at("method").get<std::string>();
        r.episodes = j.at("episodes").get<std::size_t>();
        r.threshold = j.at("threshold").get<double>();
        r.n = j.at("N").get<std::size_t>();
        r.r_mean = j.at("r_mean").get<double>();
        r.empty_supervisor = j.value("empty_supervisor", false);
        for (const auto& u : j.at("unsafe"))
            r.unsafe.push_back({u.at("sequence").get<Sequence>(), u.at("r_max").get<double>()});
        if (j.contains("records"))
            for (const auto& x : j["records"]) {
                SearchRecord rec;
                rec.sequence = x.at("sequence").get<Sequence>();
                rec.requested = x.at("requested").get<Sequence>();
                rec.r_max = x.at("r_max").get<double>();
                rec.seed = x.at("seed").get<std::uint64_t>();
                rec.infeasible = x.value("infeasible", false);
                r.records.push_back(std::move(rec));
            }
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("search result: ") + e.what());
    }
}

void write_search_csv(std::ostream& os, const SearchResult& r) {
    os << "method,episode,seed,r_max,unsafe,infeasible,sequence\n";
    const auto prec = os.precision(10);
    for (std::size_t i = 0; i < r.records.size(); ++i) {
        const auto& rec = r.records[i];
        os << r.method << ',' << i << ',' << rec.seed << ',' << rec.r_max << ','
           << (rec.r_max >= r.threshold ? 1 : 0) << ',' << (rec.infeasible ? 1 : 0) << ',';
        for (std::size_t k = 0; k < rec.sequence.size(); ++k) os << (k ? " " : "") << rec.sequence[k];
        os << '\n';
    }
    os.precision(prec);
}

}  // namespace hazsynth
