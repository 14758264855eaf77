#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "edgar/curie.hpp"
#include "edgar/error.hpp"
#include "edgar/stats.hpp"

namespace edgar {

struct PipelineConfig {
    double p0 = 1e-5;
    std::int64_t max_rules = 1000;
    std::int64_t min_k = 2;
    std::set<std::string> node_exclusions{"NCBITaxon:9606", "CHEBI:24431", "CHEBI:33304"};
    /// Closed under descendants at use time.
    std::set<std::string> predicate_exclusions{
        "biolink:contraindicated_for", "biolink:causes",           "biolink:biomarker_for",
        "biolink:contributes_to",      "biolink:has_adverse_event", "biolink:causes_adverse_event"};
    bool include_lookup_in_results = true;
    stats::StatsConfig stats;
    /// Worker threads for enrichment and inference. Output never depends on it.
    unsigned threads = 0;

    unsigned effective_threads() const {
        if (threads > 0) return threads;
        const unsigned hw = std::thread::hardware_concurrency();
        return hw == 0 ? 1 : hw;
    }

    std::vector<std::string> problems() const {
        std::vector<std::string> out;
        if (!(p0 > 0.0 && p0 <= 1.0)) out.push_back("p0 must satisfy 0 < p0 <= 1");
        if (max_rules < 1) out.push_back("max_rules must be >= 1");
        if (min_k < 1) out.push_back("min_k must be >= 1");
        if (stats.poisson_threshold_n < 0) out.push_back("poisson_threshold_n must be >= 0");
        return out;
    }

    void validate() const {
        if (auto p = problems(); !p.empty()) throw ValidationError(std::move(p));
    }

    nlohmann::json to_json() const {
        return {{"p0", p0},
                {"max_rules", max_rules},
                {"min_k", min_k},
                {"node_exclusions", node_exclusions},
                {"predicate_exclusions", predicate_exclusions},
                {"include_lookup_in_results", include_lookup_in_results},
                {"stats",
                 {{"method", std::string(stats::to_string(stats.method))},
                  {"poisson_threshold_n", stats.poisson_threshold_n}}}};
    }

    /// Overlays the keys present in `j` on top of this config, collecting
    /// every problem before throwing.
    void apply_json(const nlohmann::json& j) {
        std::vector<std::string> errs;
        if (!j.is_object()) throw ValidationError({"config must be a JSON object"});
        for (const auto& [key, v] : j.items()) {
            if (key == "p0") {
                if (v.is_number()) p0 = v.get<double>(); else errs.push_back("p0 must be a number");
            } else if (key == "max_rules") {
                if (v.is_number_integer()) max_rules = v.get<std::int64_t>(); else errs.push_back("max_rules must be an integer");
            } else if (key == "min_k") {
                if (v.is_number_integer()) min_k = v.get<std::int64_t>(); else errs.push_back("min_k must be an integer");
            } else if (key == "node_exclusions") {
                if (!v.is_array()) {
                    errs.push_back("node_exclusions must be an array of curies");
                    continue;
                }
                node_exclusions.clear();
                for (const auto& x : v) {
                    if (!x.is_string() || !Curie::try_parse(x.get<std::string>())) {
                        errs.push_back("node_exclusions entries must be curies");
                    } else {
                        node_exclusions.insert(x.get<std::string>());
                    }
                }
            } else if (key == "predicate_exclusions") {
                if (!v.is_array()) {
                    errs.push_back("predicate_exclusions must be an array of predicate ids");
                    continue;
                }
                predicate_exclusions.clear();
                for (const auto& x : v) {
                    if (x.is_string()) predicate_exclusions.insert(x.get<std::string>());
                    else errs.push_back("predicate_exclusions entries must be strings");
                }
            } else if (key == "include_lookup_in_results") {
                if (v.is_boolean()) include_lookup_in_results = v.get<bool>();
                else errs.push_back("include_lookup_in_results must be a boolean");
            } else if (key == "stats") {
                if (!v.is_object()) {
                    errs.push_back("stats must be an object");
                    continue;
                }
                if (auto m = v.find("method"); m != v.end()) {
                    auto parsed = m->is_string() ? stats::parse_method_policy(m->get<std::string>()) : std::nullopt;
                    if (parsed) stats.method = *parsed;
                    else errs.push_back("stats.method must be one of auto, exact, poisson");
                }
                if (auto t = v.find("poisson_threshold_n"); t != v.end()) {
                    if (t->is_number_integer()) stats.poisson_threshold_n = t->get<std::int64_t>();
                    else errs.push_back("stats.poisson_threshold_n must be an integer");
                }
            } else if (key == "threads") {
                if (v.is_number_unsigned()) threads = v.get<unsigned>(); else errs.push_back("threads must be a non-negative integer");
            } else {
                errs.push_back("unknown config key '" + key + "'");
            }
        }
        for (auto& p : problems()) errs.push_back(std::move(p));
        if (!errs.empty()) throw ValidationError(std::move(errs));
    }

    static PipelineConfig from_file(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw ValidationError({"cannot open config file " + path.string()});
        PipelineConfig c;
        try {
            c.apply_json(nlohmann::json::parse(in));
        } catch (const nlohmann::json::parse_error& e) {
            throw ValidationError({"config " + path.string() + ": " + e.what()});
        }
        return c;
    }
};

} // namespace edgar
