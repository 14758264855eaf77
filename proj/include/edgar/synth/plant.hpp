#pragma once

// Synthetic graphs with planted enrichment structure.
//
// Layout for a spec with n answers and targets t = 1..T:
//   SYN:anchor          the pinned Disease; every answer -treats-> anchor
//   SYN:a0001..         n answers of the answer type
//   SYN:t01..           graph targets (Gene, or Disease for Gene answers); k answers and h hidden
//                       candidates point at each with biolink:related_to
//   property targets    tag "planted_NN" under key "synth" on k answers and h
//                       hidden candidates
//   SYN:h01_001..       hidden candidates of target t
//   SYN:bg0001..        background nodes of the answer type (noise_nodes)
// Noise edges join uniformly chosen background/answer/hidden nodes with
// biolink:interacts_with and never touch the anchor or a planted target, so
// the planted K values hold whatever the noise level.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "edgar/error.hpp"
#include "edgar/pipeline.hpp"
#include "edgar/query.hpp"
#include "edgar/records.hpp"
#include "edgar/stats.hpp"
#include "edgar/store.hpp"

namespace edgar::synth {

struct PlantedTarget {
    RuleKind kind = RuleKind::graph;
    std::int64_t fan_in = 0;  // K
    std::int64_t overlap = 0; // k
    std::int64_t hidden = 0;  // h, always K - k
};

struct PlantSpec {
    std::uint64_t seed = 1;
    std::int64_t answer_count = 10;
    std::vector<PlantedTarget> targets;
    std::int64_t noise_nodes = 0;
    std::int64_t noise_edges = 0;
    std::string answer_type = "biolink:Drug";

    /// All problems at once; empty when the spec is feasible.
    std::vector<std::string> problems() const {
        std::vector<std::string> errs;
        if (answer_count < 1) errs.push_back("answer_count must be >= 1");
        if (noise_nodes < 0) errs.push_back("noise_nodes must be >= 0");
        if (noise_edges < 0) errs.push_back("noise_edges must be >= 0");
        if (answer_type != "biolink:Drug" && answer_type != "biolink:Gene") {
            errs.push_back("answer_type must be biolink:Drug or biolink:Gene");
        }
        for (std::size_t i = 0; i < targets.size(); ++i) {
            const auto& t = targets[i];
            const std::string at = "targets[" + std::to_string(i) + "]: ";
            if (t.overlap < 1) errs.push_back(at + "overlap k must be >= 1");
            if (t.overlap > t.fan_in) errs.push_back(at + "overlap k exceeds fan_in K");
            if (t.overlap > answer_count) errs.push_back(at + "overlap k exceeds answer_count n");
            if (t.hidden < 0) errs.push_back(at + "hidden_candidates must be >= 0");
            if (t.fan_in != t.overlap + t.hidden) errs.push_back(at + "fan_in must equal overlap + hidden_candidates");
        }
        if (noise_edges > 0 && noise_nodes + answer_count < 2) errs.push_back("noise edges need at least two nodes");
        return errs;
    }

    void validate() const {
        if (auto p = problems(); !p.empty()) throw ValidationError(std::move(p));
    }

    nlohmann::json to_json() const {
        nlohmann::json ts = nlohmann::json::array();
        for (const auto& t : targets) {
            ts.push_back({{"kind", std::string(to_string(t.kind))},
                          {"fan_in", t.fan_in},
                          {"overlap", t.overlap},
                          {"hidden_candidates", t.hidden}});
        }
        return {{"seed", seed},           {"answer_count", answer_count}, {"planted_targets", ts},
                {"noise_nodes", noise_nodes}, {"noise_edges", noise_edges}, {"answer_type", answer_type}};
    }

    /// hidden_candidates may be omitted and then defaults to fan_in - overlap.
    static PlantSpec from_json(const nlohmann::json& j) {
        std::vector<std::string> errs;
        PlantSpec s;
        if (!j.is_object()) throw ValidationError({"plant spec must be a JSON object"});
        auto integer = [&](const nlohmann::json& obj, const char* key, std::int64_t& dst, bool required) {
            auto it = obj.find(key);
            if (it == obj.end()) {
                if (required) errs.push_back(std::string(key) + " is required");
                return false;
            }
            if (!it->is_number_integer()) {
                errs.push_back(std::string(key) + " must be an integer");
                return false;
            }
            dst = it->get<std::int64_t>();
            return true;
        };
        for (const auto& [key, v] : j.items()) {
            if (key != "seed" && key != "answer_count" && key != "planted_targets" && key != "noise_nodes" &&
                key != "noise_edges" && key != "answer_type") {
                errs.push_back("unknown key '" + key + "'");
            }
        }
        std::int64_t seed = 1;
        integer(j, "seed", seed, true);
        s.seed = static_cast<std::uint64_t>(seed);
        integer(j, "answer_count", s.answer_count, true);
        integer(j, "noise_nodes", s.noise_nodes, false);
        integer(j, "noise_edges", s.noise_edges, false);
        if (auto it = j.find("answer_type"); it != j.end()) {
            if (it->is_string()) s.answer_type = it->get<std::string>();
            else errs.push_back("answer_type must be a string");
        }
        if (auto it = j.find("planted_targets"); it != j.end() && it->is_array()) {
            for (const auto& t : *it) {
                PlantedTarget pt;
                const auto kind = t.value("kind", std::string("graph"));
                if (kind == "graph") pt.kind = RuleKind::graph;
                else if (kind == "property") pt.kind = RuleKind::property;
                else errs.push_back("planted target kind must be graph or property");
                integer(t, "fan_in", pt.fan_in, true);
                integer(t, "overlap", pt.overlap, true);
                if (!integer(t, "hidden_candidates", pt.hidden, false)) pt.hidden = pt.fan_in - pt.overlap;
                s.targets.push_back(pt);
            }
        } else if (it != j.end()) {
            errs.push_back("planted_targets must be an array");
        }
        if (!errs.empty()) throw ValidationError(std::move(errs));
        s.validate();
        return s;
    }
};

struct PlantTruth {
    RuleTarget target;
    stats::EnrichmentCounts counts;
    double p = 1.0;
    std::vector<Curie> members;
    std::vector<Curie> hidden;
};

struct SynthGraph {
    std::vector<NodeRecord> nodes;
    std::vector<EdgeRecord> edges;
    nlohmann::json predicate_ontology;
    nlohmann::json category_ontology;
    std::vector<PlantTruth> truth;
    QueryRequest query;
    PlantSpec spec;
};

inline nlohmann::json synth_predicate_ontology() {
    using A = nlohmann::json;
    nlohmann::json parents = nlohmann::json::object();
    for (const char* p : {"biolink:treats", "biolink:interacts_with", "biolink:affects", "biolink:has_adverse_event",
                          "biolink:causes"}) {
        parents[p] = A::array({"biolink:related_to"});
    }
    return {{"roots", A::array({"biolink:related_to"})}, {"parents", parents}};
}

inline nlohmann::json synth_category_ontology() {
    using A = nlohmann::json;
    nlohmann::json parents = nlohmann::json::object();
    for (const char* c : {"biolink:Drug", "biolink:Disease", "biolink:Gene"}) {
        parents[c] = A::array({"biolink:NamedThing"});
    }
    return {{"roots", A::array({"biolink:NamedThing"})}, {"parents", parents}};
}

namespace detail {

inline std::string padded(std::int64_t v, int width) {
    std::string s = std::to_string(v);
    return std::string(static_cast<std::size_t>(std::max<int>(0, width - static_cast<int>(s.size()))), '0') + s;
}

/// Uniform index in [0, bound). mt19937_64 output is fully specified, unlike
/// the standard distributions, so files are identical across toolchains.
inline std::size_t pick(std::mt19937_64& rng, std::size_t bound) { return static_cast<std::size_t>(rng() % bound); }

inline std::vector<std::size_t> sample(std::mt19937_64& rng, std::size_t population, std::size_t count) {
    std::vector<std::size_t> idx(population);
    for (std::size_t i = 0; i < population; ++i) idx[i] = i;
    for (std::size_t i = 0; i < count; ++i) std::swap(idx[i], idx[i + pick(rng, population - i)]);
    idx.resize(count);
    std::sort(idx.begin(), idx.end());
    return idx;
}

inline NodeRecord make_node(std::string id, std::string name, std::string category) {
    NodeRecord n;
    n.id = Curie::parse(id);
    n.name = std::move(name);
    n.categories = {std::move(category)};
    return n;
}

inline EdgeRecord make_edge(const Curie& s, std::string p, const Curie& o) {
    EdgeRecord e;
    e.subject = s;
    e.predicate = std::move(p);
    e.object = o;
    e.source = "synth";
    return e;
}

} // namespace detail

/// generate(): deterministic for a fixed spec, including the seed.
inline SynthGraph generate(const PlantSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);
    SynthGraph g;
    g.spec = spec;
    g.predicate_ontology = synth_predicate_ontology();
    g.category_ontology = synth_category_ontology();

    const auto anchor = detail::make_node("SYN:anchor", "planted disease", "biolink:Disease");
    g.nodes.push_back(anchor);
    std::vector<Curie> answers;
    for (std::int64_t i = 1; i <= spec.answer_count; ++i) {
        auto n = detail::make_node("SYN:a" + detail::padded(i, 4), "answer " + std::to_string(i), spec.answer_type);
        answers.push_back(n.id);
        g.nodes.push_back(std::move(n));
        g.edges.push_back(detail::make_edge(answers.back(), "biolink:treats", anchor.id));
    }

    std::vector<Curie> typed = answers; // every node of the answer type, for noise
    for (std::size_t t = 0; t < spec.targets.size(); ++t) {
        const auto& pt = spec.targets[t];
        const std::string tn = detail::padded(static_cast<std::int64_t>(t + 1), 2);
        PlantTruth truth;
        for (std::size_t ix : detail::sample(rng, answers.size(), static_cast<std::size_t>(pt.overlap))) {
            truth.members.push_back(answers[ix]);
        }
        for (std::int64_t h = 1; h <= pt.hidden; ++h) {
            auto n = detail::make_node("SYN:h" + tn + "_" + detail::padded(h, 3),
                                       "hidden " + tn + "." + std::to_string(h), spec.answer_type);
            truth.hidden.push_back(n.id);
            typed.push_back(n.id);
            g.nodes.push_back(std::move(n));
        }
        std::vector<Curie> holders = truth.members;
        holders.insert(holders.end(), truth.hidden.begin(), truth.hidden.end());
        if (pt.kind == RuleKind::graph) {
            auto target = detail::make_node("SYN:t" + tn, "target " + tn,
                                            spec.answer_type == "biolink:Gene" ? "biolink:Disease" : "biolink:Gene");
            for (const auto& h : holders) g.edges.push_back(detail::make_edge(h, "biolink:related_to", target.id));
            truth.target = RuleTarget::graph(target.id, "biolink:related_to", Direction::out);
            g.nodes.push_back(std::move(target));
        } else {
            const std::string tag = "planted_" + tn;
            for (auto& n : g.nodes) {
                if (std::find(holders.begin(), holders.end(), n.id) != holders.end()) {
                    n.properties["synth"].push_back(tag);
                }
            }
            truth.target = RuleTarget::property("synth", tag);
        }
        g.truth.push_back(std::move(truth));
    }

    for (std::int64_t i = 1; i <= spec.noise_nodes; ++i) {
        auto n = detail::make_node("SYN:bg" + detail::padded(i, 5), "background " + std::to_string(i), spec.answer_type);
        typed.push_back(n.id);
        g.nodes.push_back(std::move(n));
    }

    if (spec.noise_edges > 0) {
        for (std::int64_t i = 0; i < spec.noise_edges; ++i) {
            const std::size_t a = detail::pick(rng, typed.size());
            std::size_t b = detail::pick(rng, typed.size() - 1);
            if (b >= a) ++b;
            g.edges.push_back(detail::make_edge(typed[a], "biolink:interacts_with", typed[b]));
        }
        // Random shared tags give the property scan something to reject.
        for (auto& n : g.nodes) {
            if (n.id == anchor.id || n.categories.front() != spec.answer_type || detail::pick(rng, 2) == 0) continue;
            n.properties["noise"].push_back("noise_" + detail::padded(static_cast<std::int64_t>(detail::pick(rng, 20)), 2));
        }
    }
    for (auto& n : g.nodes) {
        for (auto& [k, tags] : n.properties) {
            std::sort(tags.begin(), tags.end());
            tags.erase(std::unique(tags.begin(), tags.end()), tags.end());
        }
    }

    const auto N = static_cast<std::int64_t>(typed.size());
    for (std::size_t t = 0; t < g.truth.size(); ++t) {
        auto& truth = g.truth[t];
        const auto& pt = spec.targets[t];
        truth.counts = {N, pt.fan_in, spec.answer_count, pt.overlap};
        truth.p = stats::hypergeom_sf_exact(truth.counts).value;
    }

    g.query.query_graph.nodes["n0"] = QueryNode{std::vector<std::string>{anchor.id.str()}, std::nullopt};
    g.query.query_graph.nodes["n1"] = QueryNode{std::nullopt, std::vector<std::string>{spec.answer_type}};
    g.query.query_graph.edges["e0"] = QueryEdge{"n1", "n0", {"biolink:treats"}};
    return g;
}

inline nlohmann::json truth_to_json(const SynthGraph& g) {
    nlohmann::json targets = nlohmann::json::array();
    for (const auto& t : g.truth) {
        nlohmann::json members = nlohmann::json::array();
        for (const auto& m : t.members) members.push_back(m.str());
        nlohmann::json hidden = nlohmann::json::array();
        for (const auto& h : t.hidden) hidden.push_back(h.str());
        targets.push_back({{"target", t.target.canonical()},
                           {"kind", std::string(to_string(t.target.kind))},
                           {"counts", {{"N", t.counts.population_n}, {"K", t.counts.successes_k},
                                       {"n", t.counts.draws}, {"k", t.counts.observed}}},
                           {"p_exact", t.p},
                           {"members", members},
                           {"hidden_candidates", hidden}});
    }
    return {{"spec", g.spec.to_json()}, {"anchor", "SYN:anchor"}, {"targets", targets}};
}

/// Builds a store straight from in-memory records, expanded unless asked not to.
inline Store make_store(const nlohmann::json& predicate_ontology, const nlohmann::json& category_ontology,
                        std::vector<NodeRecord> nodes, std::vector<EdgeRecord> edges, bool expand = true) {
    Store raw(Ontology::from_json(OntologyKind::predicate, predicate_ontology),
              Ontology::from_json(OntologyKind::category, category_ontology), std::move(nodes), std::move(edges),
              false);
    return expand ? expand_redundant(raw) : raw;
}

inline Store make_store(const SynthGraph& g, bool expand = true) {
    return make_store(g.predicate_ontology, g.category_ontology, g.nodes, g.edges, expand);
}

/// Writes nodes.jsonl, edges.jsonl, both ontologies, truth.json and query.json.
inline void write_synth(const SynthGraph& g, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    auto open = [&](const char* name) {
        std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
        if (!out) throw IngestError("cannot write " + (dir / name).string());
        return out;
    };
    {
        auto out = open("nodes.jsonl");
        for (const auto& n : g.nodes) out << node_to_json(n).dump() << '\n';
    }
    {
        auto out = open("edges.jsonl");
        for (const auto& e : g.edges) out << edge_to_json(e).dump() << '\n';
    }
    open("predicate_ontology.json") << g.predicate_ontology.dump(2) << '\n';
    open("category_ontology.json") << g.category_ontology.dump(2) << '\n';
    open("truth.json") << truth_to_json(g).dump(2) << '\n';
    open("query.json") << request_to_json(g.query).dump(2) << '\n';
}

} // namespace edgar::synth
