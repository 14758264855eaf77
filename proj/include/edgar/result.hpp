#pragma once

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <iomanip>
#include <sstream>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "edgar/pipeline.hpp"
#include "edgar/query.hpp"
#include "edgar/store.hpp"

namespace edgar {

/// Scientific notation with 6 significant digits, e.g. "1.63000e-09".
inline std::string format_p(double p) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.5e", p);
    return buf;
}

/// p rounded to 6 significant digits, for the human-facing "p" fields.
inline double round_p(double p) { return std::strtod(format_p(p).c_str(), nullptr); }

/// FNV-1a over the bytes; rendered as 16 lowercase hex digits.
inline std::string content_hash(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

namespace detail {

inline nlohmann::json rule_json(const Store& store, const EnrichmentRule& rule, std::size_t index) {
    nlohmann::json j;
    j["rule_index"] = index;
    j["kind"] = std::string(to_string(rule.target.kind));
    if (rule.target.kind == RuleKind::graph) {
        j["target_id"] = rule.target.node.str();
        auto ix = store.index_of(rule.target.node);
        j["target_name"] = ix ? store.node(*ix).name : std::string{};
        j["predicate"] = rule.target.predicate;
        j["direction"] = std::string(to_string(rule.target.direction));
    } else {
        j["target_id"] = rule.target.key + ":" + rule.target.tag;
        j["target_name"] = rule.target.tag;
        j["property_key"] = rule.target.key;
    }
    auto members = nlohmann::json::array();
    for (const auto& m : rule.members) members.push_back(m.str());
    j["members"] = std::move(members);
    j["counts"] = {{"N", rule.counts.population_n},
                   {"K", rule.counts.successes_k},
                   {"n", rule.counts.draws},
                   {"k", rule.counts.observed}};
    j["p"] = round_p(rule.p.value);
    j["p_raw"] = rule.p.value;
    j["method"] = std::string(stats::to_string(rule.p.method));
    return j;
}

} // namespace detail

struct RenderOptions {
    /// Stage timings vary run to run; leaving them out keeps bodies byte-stable.
    bool include_timings = false;
};

inline nlohmann::json result_message_json(const Store& store, const ResultMessage& msg,
                                          const RenderOptions& options = {}) {
    nlohmann::json rules = nlohmann::json::array();
    for (std::size_t i = 0; i < msg.rules.size(); ++i) rules.push_back(detail::rule_json(store, msg.rules[i], i));

    nlohmann::json results = nlohmann::json::array();
    for (const auto& c : msg.candidates) {
        nlohmann::json r;
        r["node_binding"] = c.id.str();
        auto ix = store.index_of(c.id);
        r["name"] = ix ? store.node(*ix).name : std::string{};
        r["best_p"] = round_p(c.best_p);
        r["best_p_raw"] = c.best_p;
        r["in_lookup"] = c.in_lookup;
        r["n_rules"] = c.supporting_rules.size();
        nlohmann::json enrichments = nlohmann::json::array();
        for (const auto& s : c.supporting_rules) {
            auto e = rules[s.rule_index];
            e["path"] = s.path;
            enrichments.push_back(std::move(e));
        }
        r["enrichments"] = std::move(enrichments);
        results.push_back(std::move(r));
    }

    nlohmann::json answers = nlohmann::json::array();
    for (const auto& a : msg.lookup.answers) answers.push_back(a.str());
    nlohmann::json meta = {{"anchor", msg.lookup.anchor.str()},
                           {"answer_type", msg.lookup.answer_type},
                           {"lookup_n", msg.lookup.n()},
                           {"lookup_answers", std::move(answers)},
                           {"rules_pre_filter", msg.enrichment.tested},
                           {"rules_passed_threshold", msg.enrichment.passed},
                           {"rules_post_filter", msg.rules.size()},
                           {"inferred_m", msg.candidates.size()}};
    if (options.include_timings) {
        meta["runtime_ms"] = {{"lookup", msg.timings.lookup_ms},
                              {"enrichment", msg.timings.enrichment_ms},
                              {"inference", msg.timings.inference_ms}};
    }
    return {{"query_graph", query_graph_to_json(msg.query_graph)},
            {"results", std::move(results)},
            {"rules", std::move(rules)},
            {"meta", std::move(meta)}};
}

/// The exact body served by POST /v1/query and printed by `edgar query --format json`.
inline std::string render_json(const Store& store, const ResultMessage& msg, const RenderOptions& options = {}) {
    return result_message_json(store, msg, options).dump(2) + "\n";
}

inline constexpr std::string_view tsv_header = "rank\tcurie\tname\tbest_p\tn_rules\tin_lookup";

inline std::string render_tsv(const Store& store, const ResultMessage& msg) {
    std::ostringstream os;
    os << tsv_header << '\n';
    std::size_t rank = 0;
    for (const auto& c : msg.candidates) {
        auto ix = store.index_of(c.id);
        os << ++rank << '\t' << c.id << '\t' << (ix ? store.node(*ix).name : "") << '\t' << format_p(c.best_p) << '\t'
           << c.supporting_rules.size() << '\t' << (c.in_lookup ? "true" : "false") << '\n';
    }
    return os.str();
}

inline std::string render_pretty(const Store& store, const ResultMessage& msg) {
    std::ostringstream os;
    os << "lookup: " << msg.lookup.anchor << " <- " << msg.lookup.answer_type << "  n=" << msg.lookup.n() << '\n';
    os << "enrichment: " << msg.enrichment.tested << " tested, " << msg.rules.size() << " rules kept\n";
    os << "inference: " << msg.candidates.size() << " candidates\n\n";
    std::size_t name_w = 4;
    std::size_t curie_w = 5;
    for (const auto& c : msg.candidates) {
        auto ix = store.index_of(c.id);
        name_w = std::max(name_w, std::min<std::size_t>(40, ix ? store.node(*ix).name.size() : 0));
        curie_w = std::max(curie_w, c.id.str().size());
    }
    os << std::left << std::setw(6) << "rank" << std::setw(static_cast<int>(curie_w + 2)) << "curie"
       << std::setw(static_cast<int>(name_w + 2)) << "name" << std::setw(14) << "best_p" << std::setw(8) << "rules"
       << "lookup\n";
    std::size_t rank = 0;
    for (const auto& c : msg.candidates) {
        auto ix = store.index_of(c.id);
        std::string name = ix ? store.node(*ix).name : "";
        if (name.size() > 40) name = name.substr(0, 37) + "...";
        os << std::left << std::setw(6) << ++rank << std::setw(static_cast<int>(curie_w + 2)) << c.id.str()
           << std::setw(static_cast<int>(name_w + 2)) << name << std::setw(14) << format_p(c.best_p) << std::setw(8)
           << c.supporting_rules.size() << (c.in_lookup ? "yes" : "") << '\n';
    }
    return os.str();
}

} // namespace edgar
