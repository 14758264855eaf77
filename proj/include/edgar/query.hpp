#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "edgar/curie.hpp"
#include "edgar/error.hpp"
#include "edgar/records.hpp"

// TRAPI-lite: the one-hop subset of a TRAPI message that the reasoner
// accepts. Exactly two nodes (one pinned by a single curie, one typed by a
// single category) and one edge between them. Anything else is rejected with
// the complete list of violations.

namespace edgar {

struct QueryNode {
    std::optional<std::vector<std::string>> ids;
    std::optional<std::vector<std::string>> categories;

    friend bool operator==(const QueryNode&, const QueryNode&) = default;
};

struct QueryEdge {
    std::string subject;
    std::string object;
    std::vector<std::string> predicates;

    friend bool operator==(const QueryEdge&, const QueryEdge&) = default;
};

struct QueryGraph {
    std::map<std::string, QueryNode> nodes;
    std::map<std::string, QueryEdge> edges;

    friend bool operator==(const QueryGraph&, const QueryGraph&) = default;

    /// Key of the node that carries ids. Only meaningful after validation.
    const std::string& pinned_key() const {
        for (const auto& [k, n] : nodes) {
            if (n.ids) return k;
        }
        throw ValidationError({"exactly one pinned node"});
    }
    const std::string& unpinned_key() const {
        for (const auto& [k, n] : nodes) {
            if (!n.ids) return k;
        }
        throw ValidationError({"exactly one unpinned node"});
    }
    const QueryEdge& edge() const {
        if (edges.size() != 1) throw ValidationError({"exactly one edge"});
        return edges.begin()->second;
    }
};

/// Per-request overrides carried in the "options" block.
struct QueryOptions {
    std::optional<double> p0;
    std::optional<std::int64_t> max_rules;
    std::optional<std::int64_t> min_k;

    bool empty() const { return !p0 && !max_rules && !min_k; }
    friend bool operator==(const QueryOptions&, const QueryOptions&) = default;
};

struct QueryRequest {
    QueryGraph query_graph;
    QueryOptions options;
};

/// Lookup parameters extracted from a validated query graph.
struct LookupSpec {
    Curie anchor;
    std::vector<std::string> predicates;
    /// Orientation of the lookup edge as seen from the anchor.
    Direction direction = Direction::in;
    std::string answer_type;
};

namespace detail {

inline void check_only_keys(const nlohmann::json& obj, std::initializer_list<std::string_view> allowed,
                            const std::string& where, std::vector<std::string>& errs) {
    for (const auto& [k, v] : obj.items()) {
        bool ok = false;
        for (auto a : allowed) ok = ok || a == k;
        if (!ok) errs.push_back(where + ": unsupported key '" + k + "'");
    }
}

inline std::optional<std::vector<std::string>> string_list(const nlohmann::json& v, const std::string& where,
                                                           std::vector<std::string>& errs) {
    if (!v.is_array()) {
        errs.push_back(where + " must be an array of strings");
        return std::nullopt;
    }
    std::vector<std::string> out;
    for (const auto& x : v) {
        if (!x.is_string()) {
            errs.push_back(where + " must be an array of strings");
            return std::nullopt;
        }
        out.push_back(x.get<std::string>());
    }
    return out;
}

inline void validate_graph(const QueryGraph& g, std::vector<std::string>& errs) {
    std::size_t pinned = 0;
    std::size_t unpinned = 0;
    for (const auto& [key, node] : g.nodes) {
        if (node.ids) {
            ++pinned;
            if (node.ids->size() != 1) errs.push_back("node '" + key + "': pinned node must list exactly one id");
            for (const auto& id : *node.ids) {
                if (!Curie::try_parse(id)) errs.push_back("node '" + key + "': invalid curie '" + id + "'");
            }
        } else if (node.categories) {
            ++unpinned;
            if (node.categories->size() != 1) {
                errs.push_back("node '" + key + "': unpinned node must list exactly one category");
            }
        } else {
            errs.push_back("node '" + key + "' has neither ids nor categories");
        }
    }
    if (pinned != 1) errs.push_back("exactly one pinned node is required (found " + std::to_string(pinned) + ")");
    if (unpinned != 1) errs.push_back("exactly one unpinned node is required (found " + std::to_string(unpinned) + ")");
    if (g.edges.size() != 1) errs.push_back("exactly one edge is required (found " + std::to_string(g.edges.size()) + ")");
    for (const auto& [key, e] : g.edges) {
        if (!g.nodes.contains(e.subject)) errs.push_back("edge '" + key + "': unknown subject node '" + e.subject + "'");
        if (!g.nodes.contains(e.object)) errs.push_back("edge '" + key + "': unknown object node '" + e.object + "'");
        if (e.subject == e.object) errs.push_back("edge '" + key + "': subject and object must differ");
        if (e.predicates.empty()) errs.push_back("edge '" + key + "': predicates must be non-empty");
        if (g.nodes.contains(e.subject) && g.nodes.contains(e.object) &&
            g.nodes.at(e.subject).ids.has_value() == g.nodes.at(e.object).ids.has_value()) {
            errs.push_back("edge '" + key + "' must connect the pinned node to the unpinned node");
        }
    }
}

} // namespace detail

/// parse_query(): full request (graph plus options). Throws ValidationError
/// listing every violation found.
inline QueryRequest parse_request(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError({std::string("JSON syntax error: ") + e.what()});
    }
    std::vector<std::string> errs;
    QueryRequest req;
    if (!j.is_object()) throw ValidationError({"request must be a JSON object"});
    detail::check_only_keys(j, {"message", "options"}, "request", errs);

    auto msg = j.find("message");
    if (msg == j.end() || !msg->is_object()) {
        errs.push_back("request.message must be an object");
    } else {
        detail::check_only_keys(*msg, {"query_graph"}, "message", errs);
        auto qg = msg->find("query_graph");
        if (qg == msg->end() || !qg->is_object()) {
            errs.push_back("message.query_graph must be an object");
        } else {
            detail::check_only_keys(*qg, {"nodes", "edges"}, "query_graph", errs);
            auto nodes = qg->find("nodes");
            if (nodes == qg->end() || !nodes->is_object()) {
                errs.push_back("query_graph.nodes must be an object");
            } else {
                for (const auto& [key, n] : nodes->items()) {
                    const std::string where = "node '" + key + "'";
                    if (!n.is_object()) {
                        errs.push_back(where + " must be an object");
                        continue;
                    }
                    detail::check_only_keys(n, {"ids", "categories"}, where, errs);
                    QueryNode qn;
                    if (auto ids = n.find("ids"); ids != n.end() && !ids->is_null()) {
                        qn.ids = detail::string_list(*ids, where + ".ids", errs);
                        if (!qn.ids) qn.ids = std::vector<std::string>{};
                    }
                    if (auto cats = n.find("categories"); cats != n.end() && !cats->is_null()) {
                        qn.categories = detail::string_list(*cats, where + ".categories", errs);
                    }
                    req.query_graph.nodes[key] = std::move(qn);
                }
            }
            auto edges = qg->find("edges");
            if (edges == qg->end() || !edges->is_object()) {
                errs.push_back("query_graph.edges must be an object");
            } else {
                for (const auto& [key, e] : edges->items()) {
                    const std::string where = "edge '" + key + "'";
                    if (!e.is_object()) {
                        errs.push_back(where + " must be an object");
                        continue;
                    }
                    detail::check_only_keys(e, {"subject", "object", "predicates"}, where, errs);
                    QueryEdge qe;
                    if (auto s = e.find("subject"); s != e.end() && s->is_string()) qe.subject = *s;
                    else errs.push_back(where + ".subject must be a string");
                    if (auto o = e.find("object"); o != e.end() && o->is_string()) qe.object = *o;
                    else errs.push_back(where + ".object must be a string");
                    if (auto p = e.find("predicates"); p != e.end()) {
                        if (auto list = detail::string_list(*p, where + ".predicates", errs)) qe.predicates = *list;
                    } else {
                        errs.push_back(where + ".predicates is required");
                    }
                    req.query_graph.edges[key] = std::move(qe);
                }
            }
            detail::validate_graph(req.query_graph, errs);
        }
    }

    if (auto opts = j.find("options"); opts != j.end()) {
        if (!opts->is_object()) {
            errs.push_back("options must be an object");
        } else {
            detail::check_only_keys(*opts, {"p0", "max_rules", "min_k"}, "options", errs);
            if (auto v = opts->find("p0"); v != opts->end()) {
                if (v->is_number() && v->get<double>() > 0 && v->get<double>() <= 1) req.options.p0 = v->get<double>();
                else errs.push_back("options.p0 must be a number in (0, 1]");
            }
            if (auto v = opts->find("max_rules"); v != opts->end()) {
                if (v->is_number_integer() && v->get<std::int64_t>() >= 1) req.options.max_rules = v->get<std::int64_t>();
                else errs.push_back("options.max_rules must be an integer >= 1");
            }
            if (auto v = opts->find("min_k"); v != opts->end()) {
                if (v->is_number_integer() && v->get<std::int64_t>() >= 1) req.options.min_k = v->get<std::int64_t>();
                else errs.push_back("options.min_k must be an integer >= 1");
            }
        }
    }
    if (!errs.empty()) throw ValidationError(std::move(errs));
    return req;
}

inline QueryGraph parse_query(std::string_view text) { return parse_request(text).query_graph; }

inline nlohmann::json query_graph_to_json(const QueryGraph& g) {
    nlohmann::json nodes = nlohmann::json::object();
    for (const auto& [k, n] : g.nodes) {
        nlohmann::json jn = nlohmann::json::object();
        if (n.ids) jn["ids"] = *n.ids;
        if (n.categories) jn["categories"] = *n.categories;
        nodes[k] = std::move(jn);
    }
    nlohmann::json edges = nlohmann::json::object();
    for (const auto& [k, e] : g.edges) {
        edges[k] = {{"subject", e.subject}, {"object", e.object}, {"predicates", e.predicates}};
    }
    return {{"nodes", nodes}, {"edges", edges}};
}

inline nlohmann::json request_to_json(const QueryRequest& r) {
    nlohmann::json j = {{"message", {{"query_graph", query_graph_to_json(r.query_graph)}}}};
    if (!r.options.empty()) {
        nlohmann::json o = nlohmann::json::object();
        if (r.options.p0) o["p0"] = *r.options.p0;
        if (r.options.max_rules) o["max_rules"] = *r.options.max_rules;
        if (r.options.min_k) o["min_k"] = *r.options.min_k;
        j["options"] = std::move(o);
    }
    return j;
}

/// Canonical serialisation; parse(serialize(q)) == q.
inline std::string serialize_request(const QueryRequest& r) { return request_to_json(r).dump(); }

inline LookupSpec to_lookup_spec(const QueryGraph& g) {
    std::vector<std::string> errs;
    detail::validate_graph(g, errs);
    if (!errs.empty()) throw ValidationError(std::move(errs));
    const auto& pinned = g.nodes.at(g.pinned_key());
    const auto& unpinned = g.nodes.at(g.unpinned_key());
    const auto& e = g.edge();
    LookupSpec spec;
    spec.anchor = Curie::parse(pinned.ids->front());
    spec.predicates = e.predicates;
    spec.direction = e.subject == g.pinned_key() ? Direction::out : Direction::in;
    spec.answer_type = unpinned.categories->front();
    return spec;
}

// ---------------------------------------------------------------------------
// Built-in question templates
// ---------------------------------------------------------------------------

struct QueryTemplate {
    std::string_view name;
    std::string_view question;
    std::string_view answer_category;
    std::string_view predicate;
};

inline constexpr QueryTemplate query_templates[] = {
    {"drug-treats-disease", "What Drugs treats Disease Y?", "biolink:Drug", "biolink:treats"},
    {"gene-associated-with-disease", "What Genes are genetically associated with Disease X?", "biolink:Gene",
     "biolink:genetically_associated_with"},
    {"process-affects-gene", "What are the Biological Processes and Molecular Activities that affect Genes X?",
     "biolink:BiologicalProcessOrActivity", "biolink:affects"},
};

/// Instantiates a template: the typed answer node is the edge subject and the
/// pinned curie is the object.
inline QueryGraph make_template_query(std::string_view name, const Curie& pinned) {
    for (const auto& t : query_templates) {
        if (t.name != name) continue;
        QueryGraph g;
        g.nodes["n0"] = QueryNode{std::vector<std::string>{pinned.str()}, std::nullopt};
        g.nodes["n1"] = QueryNode{std::nullopt, std::vector<std::string>{std::string(t.answer_category)}};
        g.edges["e0"] = QueryEdge{"n1", "n0", {std::string(t.predicate)}};
        return g;
    }
    std::string known;
    for (const auto& t : query_templates) known += (known.empty() ? "" : ", ") + std::string(t.name);
    throw ValidationError({"unknown template '" + std::string(name) + "' (known: " + known + ")"});
}

} // namespace edgar
