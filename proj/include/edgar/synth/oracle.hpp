#pragma once

// Test-only reference implementations. Everything here is written against the
// raw node/edge records and exact rational arithmetic, sharing no code with
// the indexed pipeline beyond the record types and ontology ancestry.

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "edgar/config.hpp"
#include "edgar/error.hpp"
#include "edgar/pipeline.hpp"
#include "edgar/store.hpp"

namespace edgar::synth {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

inline cpp_int binomial(std::int64_t n, std::int64_t r) {
    if (r < 0 || r > n) return 0;
    r = std::min(r, n - r);
    cpp_int out = 1;
    for (std::int64_t i = 1; i <= r; ++i) {
        out *= n - r + i;
        out /= i;
    }
    return out;
}

/// P(X >= k) for X ~ Hypergeom(N, K, n) as an exact fraction.
inline cpp_rational rational_sf(std::int64_t N, std::int64_t K, std::int64_t n, std::int64_t k) {
    cpp_int num = 0;
    for (std::int64_t i = std::max<std::int64_t>(k, 0); i <= std::min(n, K); ++i) {
        num += binomial(K, i) * binomial(N - K, n - i);
    }
    return cpp_rational(num, binomial(N, n));
}

inline double rational_sf_double(std::int64_t N, std::int64_t K, std::int64_t n, std::int64_t k) {
    return rational_sf(N, K, n, k).convert_to<double>();
}

inline constexpr std::size_t oracle_node_limit = 200;

struct OracleRule {
    RuleTarget target;
    std::vector<Curie> members;
    stats::EnrichmentCounts counts;
    cpp_rational p;
    double p_double = 1.0;
};

struct OracleCandidate {
    Curie id;
    double best_p = 1.0;
    std::vector<std::size_t> rule_indexes;
    bool in_lookup = false;
};

struct OracleOutput {
    std::vector<OracleRule> rules;
    std::vector<OracleCandidate> candidates;
};

/// Exhaustive re-derivation of enrichment and inference: every node of the
/// store, every predicate of the ontology and both directions are tried as a
/// graph target; every (key, tag) is tried as a property target.
inline OracleOutput brute_force_oracle(const Store& store, const LookupResult& lookup, const PipelineConfig& config) {
    if (store.nodes().size() > oracle_node_limit) {
        throw ValidationError({"brute_force_oracle: store has " + std::to_string(store.nodes().size()) +
                               " nodes, limit is " + std::to_string(oracle_node_limit)});
    }
    OracleOutput out;
    if (lookup.answers.empty()) return out;

    const auto& preds = store.predicates();
    const auto& cats = store.categories();
    const auto type = cats.id_of(lookup.answer_type);

    auto is_type = [&](const NodeRecord& n) {
        for (const auto& c : n.categories) {
            if (cats.is_ancestor_or_self(type, cats.id_of(c))) return true;
        }
        return false;
    };
    auto pred_excluded = [&](Ontology::Id p) {
        for (const auto& e : config.predicate_exclusions) {
            const auto id = preds.id_of(e);
            if (id != Ontology::npos && preds.is_ancestor_or_self(id, p)) return true;
        }
        return false;
    };
    // An edge is usable when some asserted edge between the same endpoints
    // with the same qualifiers has a non-excluded predicate at or below its own.
    auto usable = [&](const EdgeRecord& e) {
        const auto p = preds.id_of(e.predicate);
        for (const auto& a : store.edges()) {
            if (a.derived || a.subject != e.subject || a.object != e.object || a.qualifiers != e.qualifiers) continue;
            const auto ap = preds.id_of(a.predicate);
            if (preds.is_ancestor_or_self(p, ap) && !pred_excluded(ap)) return true;
        }
        return false;
    };

    std::map<std::string, const NodeRecord*> by_id;
    for (const auto& n : store.nodes()) by_id[n.id.str()] = &n;
    std::set<Curie> answers(lookup.answers.begin(), lookup.answers.end());
    std::vector<EdgeRecord> live;
    for (const auto& e : store.edges()) {
        if (usable(e)) live.push_back(e);
    }

    const auto N = static_cast<std::int64_t>(std::count_if(store.nodes().begin(), store.nodes().end(),
                                                           [&](const NodeRecord& n) { return is_type(n); }));
    const auto n = static_cast<std::int64_t>(answers.size());

    // related(G, P, d): typed nodes m with a live edge m -P-> G (d = out) or G -P-> m (d = in).
    auto related = [&](const Curie& g, const std::string& p, Direction d) {
        std::set<Curie> hits;
        for (const auto& e : live) {
            if (e.predicate != p) continue;
            const Curie* m = nullptr;
            if (d == Direction::out && e.object == g) m = &e.subject;
            if (d == Direction::in && e.subject == g) m = &e.object;
            if (m && is_type(*by_id.at(m->str()))) hits.insert(*m);
        }
        return hits;
    };
    auto holders = [&](const std::string& key, const std::string& tag) {
        std::set<Curie> hits;
        for (const auto& node : store.nodes()) {
            if (node.has_tag(key, tag) && is_type(node)) hits.insert(node.id);
        }
        return hits;
    };

    std::vector<OracleRule> all;
    auto consider = [&](RuleTarget target, const std::set<Curie>& related_set) {
        std::vector<Curie> members;
        for (const auto& a : answers) {
            if (related_set.contains(a)) members.push_back(a);
        }
        const auto k = static_cast<std::int64_t>(members.size());
        if (k < config.min_k) return;
        const auto K = static_cast<std::int64_t>(related_set.size());
        OracleRule r;
        r.target = std::move(target);
        r.members = std::move(members);
        r.counts = {N, K, n, k};
        r.p = rational_sf(N, K, n, k);
        r.p_double = r.p.convert_to<double>();
        if (r.p_double < config.p0) all.push_back(std::move(r));
    };

    for (const auto& g : store.nodes()) {
        if (g.id == lookup.anchor || config.node_exclusions.contains(g.id.str())) continue;
        for (Ontology::Id p = 0; p < preds.size(); ++p) {
            for (Direction d : {Direction::out, Direction::in}) {
                consider(RuleTarget::graph(g.id, preds.name_of(p), d), related(g.id, preds.name_of(p), d));
            }
        }
    }
    std::set<std::pair<std::string, std::string>> tags;
    for (const auto& node : store.nodes()) {
        for (const auto& [key, values] : node.properties) {
            for (const auto& v : values) tags.insert({key, v});
        }
    }
    for (const auto& [key, tag] : tags) consider(RuleTarget::property(key, tag), holders(key, tag));

    std::sort(all.begin(), all.end(), [](const OracleRule& a, const OracleRule& b) {
        if (a.p != b.p) return a.p < b.p;
        return a.target.canonical() < b.target.canonical();
    });
    if (all.size() > static_cast<std::size_t>(config.max_rules)) all.resize(static_cast<std::size_t>(config.max_rules));
    out.rules = std::move(all);

    std::map<Curie, OracleCandidate> cands;
    for (std::size_t i = 0; i < out.rules.size(); ++i) {
        const auto& r = out.rules[i];
        const auto hits = r.target.kind == RuleKind::graph ? related(r.target.node, r.target.predicate, r.target.direction)
                                                           : holders(r.target.key, r.target.tag);
        for (const auto& c : hits) {
            if (c == lookup.anchor || config.node_exclusions.contains(c.str())) continue;
            const bool in_lookup = answers.contains(c);
            if (in_lookup && !config.include_lookup_in_results) continue;
            auto& cand = cands[c];
            cand.id = c;
            cand.in_lookup = in_lookup;
            cand.best_p = std::min(cand.best_p, r.p_double);
            cand.rule_indexes.push_back(i);
        }
    }
    for (auto& [id, c] : cands) out.candidates.push_back(std::move(c));
    std::sort(out.candidates.begin(), out.candidates.end(), [](const OracleCandidate& a, const OracleCandidate& b) {
        return std::tie(a.best_p, a.id) < std::tie(b.best_p, b.id);
    });
    return out;
}

} // namespace edgar::synth
