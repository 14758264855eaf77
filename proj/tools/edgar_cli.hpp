#pragma once

// Command-line front end. run_cli() takes explicit streams so tests can drive
// it in-process.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "edgar/edgar.hpp"
#include "edgar/http.hpp"
#include "edgar/synth/ad_fixture.hpp"
#include "edgar/synth/plant.hpp"

namespace edgar::cli {

enum ExitCode : int { ok = 0, ingest_failed = 1, invalid = 2, not_found = 3, internal = 4 };

namespace detail {

inline std::string read_text(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw ValidationError({"cannot read " + p.string()});
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline std::size_t edit_distance(std::string_view a, std::string_view b) {
    std::vector<std::size_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t up = row[j];
            row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
            diag = up;
        }
    }
    return row[b.size()];
}

struct Globals {
    std::string store;
    std::string config;
    unsigned threads = 0;
    std::string format = "json";
};

struct QueryArgs {
    std::string query_file;
    std::string template_name;
    std::string curie;
    std::optional<double> p0;
    std::optional<std::int64_t> max_rules;
    std::optional<std::int64_t> min_k;
    std::string stats_method;
    std::optional<std::int64_t> poisson_threshold_n;
    bool emit_query = false;
    bool quiet = false;
};

inline void add_query_options(CLI::App* cmd, QueryArgs& q) {
    cmd->add_option("--query", q.query_file, "TRAPI-lite request file");
    cmd->add_option("--template", q.template_name, "built-in template name");
    cmd->add_option("--curie", q.curie, "pinned curie for --template");
    cmd->add_option("--p0", q.p0, "p-value threshold override");
    cmd->add_option("--max-rules", q.max_rules, "rule cap override");
    cmd->add_option("--min-k", q.min_k, "minimum shared answers per rule");
    cmd->add_option("--stats-method", q.stats_method, "auto, exact or poisson")
        ->check(CLI::IsMember({"auto", "exact", "poisson"}));
    cmd->add_option("--poisson-threshold-n", q.poisson_threshold_n, "population size above which auto uses Poisson");
    cmd->add_flag("--quiet", q.quiet, "no stage summary on stderr");
}

inline PipelineConfig load_config(const Globals& g) {
    PipelineConfig c = g.config.empty() ? PipelineConfig{} : PipelineConfig::from_file(g.config);
    if (g.threads > 0) c.threads = g.threads;
    return c;
}

inline std::filesystem::path store_path(const Globals& g) {
    if (!g.store.empty()) return g.store;
    if (const char* env = std::getenv(std::string(store_path_env).c_str()); env && *env) return env;
    throw ValidationError({"no store given: pass --store or set EDGAR_STORE_PATH"});
}

inline QueryRequest build_request(const QueryArgs& q) {
    QueryRequest req;
    if (!q.query_file.empty()) {
        if (!q.template_name.empty()) throw ValidationError({"--query and --template are mutually exclusive"});
        req = parse_request(read_text(q.query_file));
    } else if (!q.template_name.empty()) {
        if (q.curie.empty()) throw ValidationError({"--template needs --curie"});
        req.query_graph = make_template_query(q.template_name, Curie::parse(q.curie));
    } else {
        throw ValidationError({"give --query FILE or --template NAME --curie C"});
    }
    if (q.p0) req.options.p0 = q.p0;
    if (q.max_rules) req.options.max_rules = q.max_rules;
    if (q.min_k) req.options.min_k = q.min_k;
    return req;
}

inline PipelineConfig query_config(const Globals& g, const QueryArgs& q, const QueryRequest& req) {
    auto c = with_options(load_config(g), req.options);
    if (!q.stats_method.empty()) c.stats.method = *stats::parse_method_policy(q.stats_method);
    if (q.poisson_threshold_n) c.stats.poisson_threshold_n = *q.poisson_threshold_n;
    c.validate();
    return c;
}

/// One line shaped like the runtime table: lookup n, rules pre/post, inferred, timings.
inline void print_stage_summary(std::ostream& err, const ResultMessage& msg) {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "lookup n=%zu | enrichment %zu/%zu | inference %zu | runtime_ms lookup=%.3f enrichment=%.3f "
                  "inference=%.3f\n",
                  msg.lookup.n(), msg.enrichment.tested, msg.rules.size(), msg.candidates.size(), msg.timings.lookup_ms,
                  msg.timings.enrichment_ms, msg.timings.inference_ms);
    err << buf;
}

inline void print_store_stats(std::ostream& out, const Store& store, const std::string& format) {
    const auto m = store_manifest(store);
    if (format == "json") {
        out << m.dump(2) << '\n';
        return;
    }
    out << "nodes\t" << store.stats().node_count << "\nedges\t" << store.stats().edge_count << '\n';
    for (const auto& [cat, n] : store.stats().type_counts) out << cat << '\t' << n << '\n';
}

} // namespace detail

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"edgar: enrichment-driven reasoning over a biomedical knowledge graph", "edgar"};
    app.fallthrough();
    app.require_subcommand(1);
    detail::Globals g;
    app.add_option("--store", g.store, "store directory (default: $EDGAR_STORE_PATH)");
    app.add_option("--config", g.config, "pipeline config JSON");
    app.add_option("--threads", g.threads, "worker threads (default: hardware concurrency)");
    app.add_option("--format", g.format, "json, tsv or pretty")->check(CLI::IsMember({"json", "tsv", "pretty"}));

    // ingest
    auto* ingest_cmd = app.add_subcommand("ingest", "build a store directory from JSONL records and ontologies");
    std::string in_dir, nodes_file, edges_file, pred_file, cat_file, out_dir;
    bool lenient = false, no_expand = false;
    ingest_cmd->add_option("--from", in_dir, "directory holding nodes.jsonl, edges.jsonl and both ontologies");
    ingest_cmd->add_option("--nodes", nodes_file);
    ingest_cmd->add_option("--edges", edges_file);
    ingest_cmd->add_option("--predicates", pred_file, "predicate ontology JSON");
    ingest_cmd->add_option("--categories", cat_file, "category ontology JSON");
    ingest_cmd->add_option("--out", out_dir, "store directory to write")->required();
    ingest_cmd->add_flag("--lenient", lenient, "skip dangling edges instead of failing");
    ingest_cmd->add_flag("--no-expand", no_expand, "do not add redundant superclass edges");

    // expand
    auto* expand_cmd = app.add_subcommand("expand", "add redundant superclass edges to a store");
    std::string expand_out;
    expand_cmd->add_option("--out", expand_out, "destination (default: in place)");

    // query / explain
    detail::QueryArgs qa;
    auto* query_cmd = app.add_subcommand("query", "run lookup, enrichment and inference");
    detail::add_query_options(query_cmd, qa);
    query_cmd->add_flag("--emit-query", qa.emit_query, "print the request JSON and exit");
    auto* explain_cmd = app.add_subcommand("explain", "show the rules behind one inferred candidate");
    std::string candidate;
    detail::add_query_options(explain_cmd, qa);
    explain_cmd->add_option("--candidate", candidate)->required();

    // resolve
    auto* resolve_cmd = app.add_subcommand("resolve", "name to curie lookup");
    std::string resolve_text;
    std::size_t resolve_limit = default_resolve_limit;
    resolve_cmd->add_option("text", resolve_text)->required();
    resolve_cmd->add_option("--limit", resolve_limit)->check(CLI::PositiveNumber);

    // serve
    auto* serve_cmd = app.add_subcommand("serve", "serve the /v1 HTTP API");
    int port = 8080;
    std::string host = "127.0.0.1";
    serve_cmd->add_option("--port", port);
    serve_cmd->add_option("--host", host);

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "generate a planted synthetic graph or the AD fixture");
    std::string spec_file, synth_out;
    bool ad = false;
    synth_cmd->add_option("--spec", spec_file, "PlantSpec JSON");
    synth_cmd->add_flag("--ad-fixture", ad, "write the Alzheimer's disease fixture instead");
    synth_cmd->add_option("--out", synth_out)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return ok;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return invalid;
    }

    try {
        if (*ingest_cmd) {
            if (!in_dir.empty()) {
                const std::filesystem::path d = in_dir;
                if (nodes_file.empty()) nodes_file = (d / "nodes.jsonl").string();
                if (edges_file.empty()) edges_file = (d / "edges.jsonl").string();
                if (pred_file.empty()) pred_file = (d / "predicate_ontology.json").string();
                if (cat_file.empty()) cat_file = (d / "category_ontology.json").string();
            }
            if (nodes_file.empty() || edges_file.empty() || pred_file.empty() || cat_file.empty()) {
                throw ValidationError({"ingest needs --from DIR or all of --nodes --edges --predicates --categories"});
            }
            IngestReport report;
            auto store = ingest(nodes_file, edges_file, pred_file, cat_file, IngestOptions{lenient}, &report);
            if (!no_expand) store = expand_redundant(store);
            save_store(store, out_dir);
            if (lenient) err << "skipped " << report.skipped_dangling << " dangling edge(s)\n";
            for (const auto& s : report.skipped) err << "  " << s << '\n';
            detail::print_store_stats(out, store, g.format);
            return ok;
        }
        if (*expand_cmd) {
            const auto path = detail::store_path(g);
            auto store = expand_redundant(load_store(path));
            save_store(store, expand_out.empty() ? path : std::filesystem::path(expand_out));
            detail::print_store_stats(out, store, g.format);
            return ok;
        }
        if (*synth_cmd) {
            if (ad == !spec_file.empty()) throw ValidationError({"synth needs exactly one of --spec or --ad-fixture"});
            if (ad) {
                synth::write_ad_fixture(synth::ad_fixture(), synth_out);
            } else {
                nlohmann::json j;
                try {
                    j = nlohmann::json::parse(detail::read_text(spec_file));
                } catch (const nlohmann::json::parse_error& e) {
                    throw ValidationError({"spec " + spec_file + ": " + e.what()});
                }
                synth::write_synth(synth::generate(synth::PlantSpec::from_json(j)), synth_out);
            }
            out << "wrote " << synth_out << '\n';
            return ok;
        }
        if (*query_cmd && qa.emit_query) {
            out << request_to_json(detail::build_request(qa)).dump(2) << '\n';
            return ok;
        }
        if (*query_cmd || *explain_cmd) {
            const auto req = detail::build_request(qa);
            const auto config = detail::query_config(g, qa, req);
            const auto store = load_store(detail::store_path(g));
            const auto msg = run_pipeline(store, req.query_graph, config);
            if (!qa.quiet) detail::print_stage_summary(err, msg);
            if (*query_cmd) {
                if (g.format == "json") out << render_json(store, msg);
                else if (g.format == "tsv") out << render_tsv(store, msg);
                else out << render_pretty(store, msg);
                return ok;
            }
            const auto c = Curie::try_parse(candidate);
            const InferredCandidate* hit = nullptr;
            for (const auto& cand : msg.candidates) {
                if (c && cand.id == *c) hit = &cand;
            }
            if (!hit) {
                std::string best;
                std::size_t best_d = static_cast<std::size_t>(-1);
                for (const auto& cand : msg.candidates) {
                    const auto d = detail::edit_distance(candidate, cand.id.str());
                    if (d < best_d) best_d = d, best = cand.id.str();
                }
                err << "error: " << candidate << " is not among the " << msg.candidates.size() << " inferred candidates";
                if (!c || !store.index_of(*c)) err << " (and is not a node of the store)";
                if (!best.empty()) err << "; nearest match: " << best;
                err << '\n';
                return not_found;
            }
            if (g.format == "json") {
                auto j = result_message_json(store, msg);
                for (const auto& r : j["results"]) {
                    if (r["node_binding"] == hit->id.str()) out << r.dump(2) << '\n';
                }
                return ok;
            }
            const auto ix = store.index_of(hit->id);
            out << hit->id << "  " << (ix ? store.node(*ix).name : "") << "  best_p=" << format_p(hit->best_p) << "  "
                << hit->supporting_rules.size() << " supporting rule(s)\n";
            if (hit->in_lookup) {
                out << "note: " << hit->id << " is already a lookup answer; it overlaps the input set\n";
            }
            std::size_t i = 0;
            for (const auto& s : hit->supporting_rules) {
                const auto& r = msg.rules[s.rule_index];
                out << "\n[" << ++i << "] " << to_string(r.target.kind) << ' ';
                if (r.target.kind == RuleKind::graph) {
                    out << r.target.predicate << ' ' << to_string(r.target.direction) << ' ' << r.target.node;
                } else {
                    out << r.target.key << '=' << r.target.tag;
                }
                out << "  N=" << r.counts.population_n << " K=" << r.counts.successes_k << " n=" << r.counts.draws
                    << " k=" << r.counts.observed << "  p=" << format_p(r.p.value) << " (" << stats::to_string(r.p.method)
                    << ")\n    " << s.path << "\n    members:";
                for (const auto& m : r.members) out << ' ' << m;
                out << '\n';
            }
            return ok;
        }
        if (*resolve_cmd) {
            const auto store = load_store(detail::store_path(g));
            ResolverIndex index(store);
            const auto matches = index.resolve(resolve_text, resolve_limit);
            if (g.format == "json") {
                nlohmann::json arr = nlohmann::json::array();
                for (const auto& m : matches) {
                    arr.push_back({{"curie", m.curie.str()}, {"name", m.name}, {"match", std::string(to_string(m.match))}});
                }
                out << nlohmann::json{{"text", resolve_text}, {"matches", arr}}.dump(2) << '\n';
            } else {
                for (const auto& m : matches) out << m.curie << '\t' << m.name << '\t' << to_string(m.match) << '\n';
            }
            return ok;
        }
        if (*serve_cmd) {
            auto store = std::make_shared<const Store>(load_store(detail::store_path(g)));
            QueryService service(store, detail::load_config(g));
            const bool served = serve(service, host, port, [&](httplib::Server&) {
                err << "serving /v1 on http://" << host << ':' << port << " (" << store->stats().node_count
                    << " nodes)\n";
            });
            if (!served) {
                err << "error: cannot listen on " << host << ':' << port << '\n';
                return internal;
            }
            return ok;
        }
    } catch (const IngestError& e) {
        err << "ingest error: " << e.describe() << '\n';
        return ingest_failed;
    } catch (const ValidationError& e) {
        err << "invalid input: " << e.describe() << '\n';
        for (const auto& p : e.problems()) err << "  - " << p << '\n';
        return invalid;
    } catch (const DomainError& e) {
        err << "invalid input: " << e.describe() << '\n';
        return invalid;
    } catch (const NotFoundError& e) {
        err << "not found: " << e.describe() << '\n';
        return not_found;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return internal;
    }
    return ok;
}

} // namespace edgar::cli
