#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <unordered_set>
#include <utility>
#include <vector>

#include "edgar/config.hpp"
#include "edgar/curie.hpp"
#include "edgar/error.hpp"
#include "edgar/parallel.hpp"
#include "edgar/query.hpp"
#include "edgar/stats.hpp"
#include "edgar/store.hpp"

namespace edgar {

// ---------------------------------------------------------------------------
// Stage types
// ---------------------------------------------------------------------------

struct LookupResult {
    Curie anchor;
    std::vector<std::string> relations;
    /// Orientation of the lookup edge seen from the anchor.
    Direction direction = Direction::in;
    std::string answer_type;
    /// Distinct, sorted by curie.
    std::vector<Curie> answers;

    std::size_t n() const noexcept { return answers.size(); }
    bool contains(const Curie& c) const { return std::binary_search(answers.begin(), answers.end(), c); }
};

enum class RuleKind { graph, property };

inline std::string_view to_string(RuleKind k) { return k == RuleKind::graph ? "graph" : "property"; }

/// What a group of answers has in common. For graph targets, `direction` is
/// the edge orientation seen from the answers: out means answer -predicate-> node.
struct RuleTarget {
    RuleKind kind = RuleKind::graph;
    Curie node;
    std::string predicate;
    Direction direction = Direction::out;
    std::string key;
    std::string tag;

    static RuleTarget graph(Curie node, std::string predicate, Direction dir) {
        RuleTarget t;
        t.kind = RuleKind::graph;
        t.node = std::move(node);
        t.predicate = std::move(predicate);
        t.direction = dir;
        return t;
    }
    static RuleTarget property(std::string key, std::string tag) {
        RuleTarget t;
        t.kind = RuleKind::property;
        t.key = std::move(key);
        t.tag = std::move(tag);
        return t;
    }

    /// Tie-break key: graph:CURIE:PREDICATE:DIRECTION or property:KEY:TAG.
    std::string canonical() const {
        if (kind == RuleKind::graph) {
            return "graph:" + node.str() + ":" + predicate + ":" + std::string(to_string(direction));
        }
        return "property:" + key + ":" + tag;
    }

    friend bool operator==(const RuleTarget& a, const RuleTarget& b) { return a.canonical() == b.canonical(); }
};

struct EnrichmentRule {
    RuleTarget target;
    /// Answers sharing the target, sorted by curie.
    std::vector<Curie> members;
    stats::EnrichmentCounts counts;
    stats::PValue p;
};

struct SupportingRule {
    std::size_t rule_index;
    std::string path;
};

struct InferredCandidate {
    Curie id;
    double best_p = 1.0;
    /// Ordered by rule index, i.e. by ascending rule p-value.
    std::vector<SupportingRule> supporting_rules;
    bool in_lookup = false;
};

struct EnrichmentSummary {
    /// Candidate commonalities that met the min_k floor and were tested.
    std::size_t tested = 0;
    /// Of those, how many had p < p0 (before the max_rules cap).
    std::size_t passed = 0;
};

struct StageTimings {
    double lookup_ms = 0;
    double enrichment_ms = 0;
    double inference_ms = 0;
};

/// Everything a query produces; rendered to JSON by result.hpp.
struct ResultMessage {
    QueryGraph query_graph;
    LookupResult lookup;
    std::vector<EnrichmentRule> rules;
    std::vector<InferredCandidate> candidates;
    EnrichmentSummary enrichment;
    StageTimings timings;
};

// ---------------------------------------------------------------------------
// Stage 1: lookup
// ---------------------------------------------------------------------------

inline LookupResult lookup(const Store& store, const LookupSpec& spec) {
    if (store.nodes().empty()) throw ValidationError({"store is empty"});
    std::vector<std::string> errs;
    const CatId type = store.categories().id_of(spec.answer_type);
    if (type == Ontology::npos) errs.push_back("unknown answer category '" + spec.answer_type + "'");
    std::vector<PredId> preds;
    for (const auto& p : spec.predicates) {
        const PredId id = store.predicates().id_of(p);
        if (id == Ontology::npos) errs.push_back("unknown predicate '" + p + "'");
        else preds.push_back(id);
    }
    if (!errs.empty()) throw ValidationError(std::move(errs));
    const NodeIx anchor = store.require(spec.anchor);

    std::vector<NodeIx> hits;
    for (PredId p : preds) {
        for (const auto& a : store.adjacency(anchor, p, spec.direction)) {
            if (a.other != anchor && store.has_category(a.other, type)) hits.push_back(a.other);
        }
    }
    std::sort(hits.begin(), hits.end());
    hits.erase(std::unique(hits.begin(), hits.end()), hits.end());

    LookupResult out;
    out.anchor = spec.anchor;
    out.relations = spec.predicates;
    out.direction = spec.direction;
    out.answer_type = spec.answer_type;
    out.answers.reserve(hits.size());
    for (NodeIx ix : hits) out.answers.push_back(store.node(ix).id);
    return out;
}

inline LookupResult lookup(const Store& store, const QueryGraph& query) {
    return lookup(store, to_lookup_spec(query));
}

// ---------------------------------------------------------------------------
// Stage 2: enrichment
// ---------------------------------------------------------------------------

namespace detail {

struct QueryContext {
    CatId type = Ontology::npos;
    NodeIx anchor = 0;
    std::vector<bool> excluded_predicates;
    std::vector<bool> excluded_nodes;
};

inline QueryContext make_context(const Store& store, const LookupResult& lookup, const PipelineConfig& config) {
    QueryContext ctx;
    ctx.type = store.categories().id_of(lookup.answer_type);
    if (ctx.type == Ontology::npos) throw ValidationError({"unknown answer category '" + lookup.answer_type + "'"});
    ctx.anchor = store.require(lookup.anchor);
    ctx.excluded_predicates = store.predicates().descendant_closure(
        std::vector<std::string>(config.predicate_exclusions.begin(), config.predicate_exclusions.end()));
    ctx.excluded_nodes.assign(store.nodes().size(), false);
    for (const auto& c : config.node_exclusions) {
        if (auto ix = store.index_of(c)) ctx.excluded_nodes[*ix] = true;
    }
    return ctx;
}

struct GraphKey {
    NodeIx node;
    PredId predicate;
    Direction direction;
    auto operator<=>(const GraphKey&) const = default;
};

} // namespace detail

/// enrich(): tests every commonality shared by at least min_k answers and
/// returns the significant ones sorted by (p, canonical target), capped at
/// max_rules.
inline std::vector<EnrichmentRule> enrich(const Store& store, const LookupResult& lookup, const PipelineConfig& config,
                                          EnrichmentSummary* summary = nullptr) {
    config.validate();
    EnrichmentSummary local;
    EnrichmentSummary& sum = summary ? *summary : local;
    sum = {};
    if (lookup.answers.empty()) return {};

    const auto ctx = detail::make_context(store, lookup, config);
    const auto population = static_cast<std::int64_t>(store.type_count(lookup.answer_type));
    const auto draws = static_cast<std::int64_t>(lookup.n());

    std::map<detail::GraphKey, std::vector<NodeIx>> graph_groups;
    std::map<std::pair<std::string, std::string>, std::vector<NodeIx>> property_groups;
    for (const auto& answer : lookup.answers) {
        const NodeIx a = store.require(answer);
        for (const auto& adj : store.adjacency(a)) {
            if (adj.other == ctx.anchor || ctx.excluded_nodes[adj.other]) continue;
            if (!store.edge_usable(adj.edge, ctx.excluded_predicates)) continue;
            auto& members = graph_groups[{adj.other, adj.predicate, adj.direction}];
            if (members.empty() || members.back() != a) members.push_back(a);
        }
        for (const auto& [key, tags] : store.node(a).properties) {
            for (const auto& tag : tags) property_groups[{key, tag}].push_back(a);
        }
    }

    struct Candidate {
        RuleTarget target;
        const std::vector<NodeIx>* members;
        std::optional<detail::GraphKey> graph;
    };
    std::vector<Candidate> candidates;
    for (const auto& [key, members] : graph_groups) {
        if (static_cast<std::int64_t>(members.size()) < config.min_k) continue;
        candidates.push_back({RuleTarget::graph(store.node(key.node).id, store.predicates().name_of(key.predicate),
                                                key.direction),
                              &members, key});
    }
    for (const auto& [key, members] : property_groups) {
        if (static_cast<std::int64_t>(members.size()) < config.min_k) continue;
        candidates.push_back({RuleTarget::property(key.first, key.second), &members, std::nullopt});
    }
    sum.tested = candidates.size();

    std::vector<std::optional<EnrichmentRule>> evaluated(candidates.size());
    parallel_for(candidates.size(), config.effective_threads(), [&](std::size_t i) {
        const auto& cand = candidates[i];
        std::int64_t successes = 0;
        if (cand.graph) {
            successes = static_cast<std::int64_t>(store.count_related(
                cand.graph->node, cand.graph->predicate, reverse(cand.graph->direction), ctx.type,
                &ctx.excluded_predicates));
        } else {
            for (NodeIx ix : store.property_holders(cand.target.key, cand.target.tag)) {
                successes += store.has_category(ix, ctx.type) ? 1 : 0;
            }
        }
        const auto observed = static_cast<std::int64_t>(cand.members->size());
        if (successes < observed) {
            throw DataInconsistencyError("target " + cand.target.canonical() + ": K=" + std::to_string(successes) +
                                         " is smaller than k=" + std::to_string(observed));
        }
        stats::EnrichmentCounts counts{population, successes, draws, observed};
        auto p = stats::enrichment_pvalue(counts, config.stats);
        if (!(p.value < config.p0)) return;
        EnrichmentRule rule;
        rule.target = cand.target;
        for (NodeIx ix : *cand.members) rule.members.push_back(store.node(ix).id);
        rule.counts = counts;
        rule.p = p;
        evaluated[i] = std::move(rule);
    });

    std::vector<EnrichmentRule> rules;
    for (auto& r : evaluated) {
        if (r) rules.push_back(std::move(*r));
    }
    sum.passed = rules.size();
    std::vector<std::pair<std::string, std::size_t>> keys;
    keys.reserve(rules.size());
    for (std::size_t i = 0; i < rules.size(); ++i) keys.emplace_back(rules[i].target.canonical(), i);
    std::sort(keys.begin(), keys.end(), [&](const auto& a, const auto& b) {
        const double pa = rules[a.second].p.value;
        const double pb = rules[b.second].p.value;
        if (pa != pb) return pa < pb;
        return a.first < b.first;
    });
    const auto keep = std::min<std::size_t>(keys.size(), static_cast<std::size_t>(config.max_rules));
    std::vector<EnrichmentRule> sorted;
    sorted.reserve(keep);
    for (std::size_t i = 0; i < keep; ++i) sorted.push_back(std::move(rules[keys[i].second]));
    return sorted;
}

// ---------------------------------------------------------------------------
// Stage 3: inference
// ---------------------------------------------------------------------------

namespace detail {

inline std::string arrow(Direction seen_from_left, const std::string& predicate) {
    return seen_from_left == Direction::out ? " -[" + predicate + "]-> " : " <-[" + predicate + "]- ";
}

inline std::string rule_path(const LookupResult& lookup, const EnrichmentRule& rule, const Curie& candidate) {
    std::string members = "{" + std::to_string(rule.members.size()) + " lookup answers}";
    if (rule.target.kind == RuleKind::property) {
        return members + " ∋ " + rule.target.key + "=" + rule.target.tag + " ∈ " + candidate.str();
    }
    std::string rel;
    for (const auto& r : lookup.relations) rel += (rel.empty() ? "" : "|") + r;
    return lookup.anchor.str() + arrow(lookup.direction, rel) + members +
           arrow(rule.target.direction, rule.target.predicate) + rule.target.node.str() +
           arrow(reverse(rule.target.direction), rule.target.predicate) + candidate.str();
}

} // namespace detail

/// infer(): applies each rule to the whole graph and merges the resulting
/// candidates, ranking them by their best supporting p-value.
inline std::vector<InferredCandidate> infer(const Store& store, const LookupResult& lookup,
                                            const std::vector<EnrichmentRule>& rules, const PipelineConfig& config) {
    if (rules.empty()) return {};
    const auto ctx = detail::make_context(store, lookup, config);

    std::vector<std::vector<NodeIx>> per_rule(rules.size());
    parallel_for(rules.size(), config.effective_threads(), [&](std::size_t i) {
        const auto& rule = rules[i];
        auto& out = per_rule[i];
        auto admit = [&](NodeIx ix) {
            return ix != ctx.anchor && !ctx.excluded_nodes[ix] && store.has_category(ix, ctx.type);
        };
        if (rule.target.kind == RuleKind::graph) {
            const NodeIx g = store.require(rule.target.node);
            const PredId p = store.predicates().id_of(rule.target.predicate);
            for (const auto& adj : store.adjacency(g, p, reverse(rule.target.direction))) {
                if (!admit(adj.other) || !store.edge_usable(adj.edge, ctx.excluded_predicates)) continue;
                if (out.empty() || out.back() != adj.other) out.push_back(adj.other);
            }
        } else {
            for (NodeIx ix : store.property_holders(rule.target.key, rule.target.tag)) {
                if (admit(ix)) out.push_back(ix);
            }
        }
    });

    std::map<NodeIx, std::vector<std::size_t>> support;
    for (std::size_t i = 0; i < rules.size(); ++i) {
        for (NodeIx ix : per_rule[i]) support[ix].push_back(i);
    }

    std::vector<InferredCandidate> out;
    out.reserve(support.size());
    for (const auto& [ix, rule_ids] : support) {
        InferredCandidate c;
        c.id = store.node(ix).id;
        c.in_lookup = lookup.contains(c.id);
        if (c.in_lookup && !config.include_lookup_in_results) continue;
        c.best_p = 1.0;
        for (std::size_t r : rule_ids) {
            c.best_p = std::min(c.best_p, rules[r].p.value);
            c.supporting_rules.push_back({r, detail::rule_path(lookup, rules[r], c.id)});
        }
        out.push_back(std::move(c));
    }
    std::sort(out.begin(), out.end(), [](const InferredCandidate& a, const InferredCandidate& b) {
        if (a.best_p != b.best_p) return a.best_p < b.best_p;
        return a.id < b.id;
    });
    return out;
}

// ---------------------------------------------------------------------------
// All three stages
// ---------------------------------------------------------------------------

namespace detail {

template <typename Fn>
auto run_stage(const char* stage, double& elapsed_ms, Fn&& fn) {
    const auto start = std::chrono::steady_clock::now();
    try {
        auto result = fn();
        elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        return result;
    } catch (Error& e) {
        if (e.stage().empty()) e.set_stage(stage);
        throw;
    }
}

} // namespace detail

inline ResultMessage run_pipeline(const Store& store, const QueryGraph& query, const PipelineConfig& config) {
    config.validate();
    ResultMessage msg;
    msg.query_graph = query;
    msg.lookup = detail::run_stage("lookup", msg.timings.lookup_ms, [&] { return lookup(store, query); });
    msg.rules = detail::run_stage("enrichment", msg.timings.enrichment_ms,
                                  [&] { return enrich(store, msg.lookup, config, &msg.enrichment); });
    msg.candidates = detail::run_stage("inference", msg.timings.inference_ms,
                                       [&] { return infer(store, msg.lookup, msg.rules, config); });
    return msg;
}

/// Applies per-request overrides on top of a base configuration.
inline PipelineConfig with_options(PipelineConfig config, const QueryOptions& options) {
    if (options.p0) config.p0 = *options.p0;
    if (options.max_rules) config.max_rules = *options.max_rules;
    if (options.min_k) config.min_k = *options.min_k;
    return config;
}

} // namespace edgar
