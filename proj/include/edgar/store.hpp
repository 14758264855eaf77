#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "edgar/curie.hpp"
#include "edgar/error.hpp"
#include "edgar/ontology.hpp"
#include "edgar/records.hpp"

namespace edgar {

using NodeIx = std::uint32_t;
using EdgeIx = std::uint32_t;
using PredId = Ontology::Id;
using CatId = Ontology::Id;

struct StoreStats {
    std::size_t node_count = 0;
    std::size_t edge_count = 0;
    /// category -> number of nodes whose ancestor-closed category set holds it
    std::map<std::string, std::size_t> type_counts;

    friend bool operator==(const StoreStats&, const StoreStats&) = default;

    nlohmann::json to_json() const {
        return {{"node_count", node_count}, {"edge_count", edge_count}, {"type_counts", type_counts}};
    }
};

/// One adjacency entry, seen from the node that owns the list.
struct Adjacency {
    PredId predicate;
    Direction direction; // out or in, never any
    NodeIx other;
    EdgeIx edge;
};

struct Neighbor {
    const EdgeRecord* edge;
    Curie other;
    Direction direction;
};

/// Immutable, fully indexed knowledge graph. Nodes are kept sorted by curie,
/// so NodeIx order coincides with curie order. Safe for any number of
/// concurrent readers once constructed.
class Store {
public:
    Store(Ontology predicates, Ontology categories, std::vector<NodeRecord> nodes,
          std::vector<EdgeRecord> edges, bool expanded = false)
        : predicates_(std::move(predicates)),
          categories_(std::move(categories)),
          nodes_(std::move(nodes)),
          edges_(std::move(edges)),
          expanded_(expanded) {
        index_nodes();
        canonicalize_edges();
        index_edges();
        compute_origins();
    }

    // ---- records --------------------------------------------------------

    const Ontology& predicates() const noexcept { return predicates_; }
    const Ontology& categories() const noexcept { return categories_; }
    const std::vector<NodeRecord>& nodes() const noexcept { return nodes_; }
    const std::vector<EdgeRecord>& edges() const noexcept { return edges_; }
    bool expanded() const noexcept { return expanded_; }
    const StoreStats& stats() const noexcept { return stats_; }

    std::optional<NodeIx> index_of(std::string_view curie) const {
        auto it = node_index_.find(std::string(curie));
        if (it == node_index_.end()) return std::nullopt;
        return it->second;
    }
    std::optional<NodeIx> index_of(const Curie& c) const { return index_of(c.str()); }

    NodeIx require(const Curie& c) const {
        if (auto ix = index_of(c)) return *ix;
        throw NotFoundError("unknown node " + c.str());
    }

    const NodeRecord& node(NodeIx ix) const { return nodes_.at(ix); }
    const EdgeRecord& edge(EdgeIx ix) const { return edges_.at(ix); }
    PredId edge_predicate(EdgeIx ix) const { return edge_pred_.at(ix); }

    // ---- categories -----------------------------------------------------

    /// Ancestor-closed categories of a node, sorted by id.
    std::span<const CatId> node_categories(NodeIx ix) const { return node_cats_.at(ix); }

    bool has_category(NodeIx ix, CatId cat) const {
        const auto& cs = node_cats_.at(ix);
        return std::binary_search(cs.begin(), cs.end(), cat);
    }
    bool has_category(NodeIx ix, std::string_view cat) const {
        const CatId id = categories_.id_of(cat);
        return id != Ontology::npos && has_category(ix, id);
    }

    std::size_t type_count(std::string_view cat) const {
        auto it = stats_.type_counts.find(std::string(cat));
        return it == stats_.type_counts.end() ? 0 : it->second;
    }

    // ---- adjacency ------------------------------------------------------

    /// All adjacency entries of a node sorted by (predicate id, direction, other, edge).
    std::span<const Adjacency> adjacency(NodeIx ix) const { return adjacency_.at(ix); }

    /// Entries restricted to one predicate and, unless `any`, one direction.
    std::span<const Adjacency> adjacency(NodeIx ix, PredId pred, Direction dir) const {
        const auto& all = adjacency_.at(ix);
        auto lo = std::lower_bound(all.begin(), all.end(), pred,
                                   [](const Adjacency& a, PredId p) { return a.predicate < p; });
        auto hi = std::upper_bound(lo, all.end(), pred,
                                   [](PredId p, const Adjacency& a) { return p < a.predicate; });
        if (dir != Direction::any) {
            auto mid = std::find_if(lo, hi, [](const Adjacency& a) { return a.direction == Direction::in; });
            if (dir == Direction::out) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        return {all.data() + (lo - all.begin()), static_cast<std::size_t>(hi - lo)};
    }

    /// neighbors(): every (edge, other endpoint) of `node`, optionally limited to a
    /// predicate set and a direction, ordered by (predicate, other curie).
    std::vector<Neighbor> neighbors(const Curie& node, const std::optional<std::set<std::string>>& predicates,
                                    Direction dir) const {
        const NodeIx ix = require(node);
        std::vector<const Adjacency*> hits;
        for (const auto& a : adjacency_[ix]) {
            if (dir != Direction::any && a.direction != dir) continue;
            if (predicates && !predicates->contains(predicates_.name_of(a.predicate))) continue;
            hits.push_back(&a);
        }
        std::sort(hits.begin(), hits.end(), [this](const Adjacency* a, const Adjacency* b) {
            const auto& pa = predicates_.name_of(a->predicate);
            const auto& pb = predicates_.name_of(b->predicate);
            return std::tie(pa, a->other, a->direction, a->edge) < std::tie(pb, b->other, b->direction, b->edge);
        });
        std::vector<Neighbor> out;
        out.reserve(hits.size());
        for (const auto* a : hits) out.push_back({&edges_[a->edge], nodes_[a->other].id, a->direction});
        return out;
    }

    /// count_related(): distinct nodes carrying `type_filter` (ancestor-closed)
    /// adjacent to `target` through `predicate` in direction `dir` (relative
    /// to the target). Parallel edges count once.
    std::size_t count_related(const Curie& target, std::string_view predicate, Direction dir,
                              std::string_view type_filter) const {
        const NodeIx ix = require(target);
        const PredId p = predicates_.id_of(predicate);
        const CatId c = categories_.id_of(type_filter);
        if (p == Ontology::npos || c == Ontology::npos) return 0;
        return count_related(ix, p, dir, c, nullptr);
    }

    /// Index-level variant. When `excluded` is given, only edges usable under
    /// that predicate exclusion mask are considered (see edge_usable()).
    std::size_t count_related(NodeIx target, PredId pred, Direction dir, CatId type,
                              const std::vector<bool>* excluded) const {
        std::size_t count = 0;
        NodeIx last = static_cast<NodeIx>(-1);
        // Entries for one (predicate, direction) are sorted by `other`, so
        // distinct counting only needs to compare with the previous hit. With
        // direction any the two runs are merged through a small set instead.
        if (dir == Direction::any) {
            std::set<NodeIx> seen;
            for (const auto& a : adjacency(target, pred, Direction::any)) {
                if (excluded && !edge_usable(a.edge, *excluded)) continue;
                if (has_category(a.other, type)) seen.insert(a.other);
            }
            return seen.size();
        }
        for (const auto& a : adjacency(target, pred, dir)) {
            if (a.other == last) continue;
            if (excluded && !edge_usable(a.edge, *excluded)) continue;
            if (!has_category(a.other, type)) continue;
            last = a.other;
            ++count;
        }
        return count;
    }

    // ---- properties -----------------------------------------------------

    /// nodes_with_property(): nodes holding tag under key and carrying
    /// `type_filter` (ancestor-closed). Unknown key/tag yields an empty set.
    std::vector<Curie> nodes_with_property(const std::string& key, const std::string& tag,
                                           std::string_view type_filter) const {
        std::vector<Curie> out;
        const CatId c = categories_.id_of(type_filter);
        if (c == Ontology::npos) return out;
        for (NodeIx ix : property_holders(key, tag)) {
            if (has_category(ix, c)) out.push_back(nodes_[ix].id);
        }
        return out;
    }

    /// All holders of (key, tag) regardless of category, in curie order.
    std::span<const NodeIx> property_holders(const std::string& key, const std::string& tag) const {
        auto it = property_index_.find({key, tag});
        if (it == property_index_.end()) return {};
        return it->second;
    }

    const std::map<std::pair<std::string, std::string>, std::vector<NodeIx>>& property_index() const noexcept {
        return property_index_;
    }

    // ---- redundancy provenance ------------------------------------------

    /// Predicates of the asserted edges (same endpoints and qualifiers) that
    /// justify this edge: its own predicate when asserted, plus every asserted
    /// descendant predicate.
    std::span<const PredId> edge_origins(EdgeIx ix) const { return origins_.at(ix); }

    /// An edge is usable under an exclusion mask when at least one of its
    /// origin predicates is not excluded. The mask is expected to be closed
    /// under descendants, so this also rejects derived edges that only exist
    /// because of an excluded assertion.
    bool edge_usable(EdgeIx ix, const std::vector<bool>& excluded) const {
        for (PredId p : origins_[ix]) {
            if (!excluded[p]) return true;
        }
        return false;
    }

private:
    void index_nodes() {
        std::sort(nodes_.begin(), nodes_.end(), [](const NodeRecord& a, const NodeRecord& b) { return a.id < b.id; });
        node_index_.reserve(nodes_.size());
        node_cats_.resize(nodes_.size());
        std::vector<std::size_t> type_counts(categories_.size(), 0);
        for (NodeIx ix = 0; ix < nodes_.size(); ++ix) {
            auto& n = nodes_[ix];
            if (!node_index_.emplace(n.id.str(), ix).second) {
                throw IngestError("duplicate node id " + n.id.str());
            }
            if (n.categories.empty()) throw IngestError("node " + n.id.str() + " has no categories");
            auto& closed = node_cats_[ix];
            for (const auto& c : n.categories) {
                const CatId id = categories_.id_of(c);
                if (id == Ontology::npos) {
                    throw IngestError("node " + n.id.str() + ": unknown category '" + c + "'");
                }
                closed.push_back(id);
                const auto& anc = categories_.ancestors(id);
                closed.insert(closed.end(), anc.begin(), anc.end());
            }
            std::sort(closed.begin(), closed.end());
            closed.erase(std::unique(closed.begin(), closed.end()), closed.end());
            for (CatId c : closed) ++type_counts[c];
            for (auto& [key, tags] : n.properties) {
                std::sort(tags.begin(), tags.end());
                tags.erase(std::unique(tags.begin(), tags.end()), tags.end());
                for (const auto& t : tags) property_index_[{key, t}].push_back(ix);
            }
        }
        stats_.node_count = nodes_.size();
        for (CatId c = 0; c < categories_.size(); ++c) {
            stats_.type_counts[categories_.name_of(c)] = type_counts[c];
        }
    }

    // Sorts edges canonically and enforces set semantics on
    // (subject, predicate, object, qualifiers); an asserted copy wins over a
    // derived one, otherwise the lexicographically smallest source wins.
    void canonicalize_edges() {
        for (const auto& e : edges_) {
            if (!node_index_.contains(e.subject.str())) {
                throw IngestError("edge endpoint " + e.subject.str() + " is not a known node");
            }
            if (!node_index_.contains(e.object.str())) {
                throw IngestError("edge endpoint " + e.object.str() + " is not a known node");
            }
            if (!predicates_.contains(e.predicate)) {
                throw IngestError("unknown predicate '" + e.predicate + "'");
            }
        }
        auto key = [](const EdgeRecord& e) {
            return std::tie(e.subject, e.predicate, e.object, e.qualifiers, e.derived, e.source);
        };
        std::sort(edges_.begin(), edges_.end(), [&](const EdgeRecord& a, const EdgeRecord& b) { return key(a) < key(b); });
        auto same = [](const EdgeRecord& a, const EdgeRecord& b) {
            return a.subject == b.subject && a.predicate == b.predicate && a.object == b.object &&
                   a.qualifiers == b.qualifiers;
        };
        edges_.erase(std::unique(edges_.begin(), edges_.end(), same), edges_.end());
        stats_.edge_count = edges_.size();
    }

    void index_edges() {
        adjacency_.assign(nodes_.size(), {});
        edge_pred_.resize(edges_.size());
        for (EdgeIx ix = 0; ix < edges_.size(); ++ix) {
            const auto& e = edges_[ix];
            const NodeIx s = node_index_.at(e.subject.str());
            const NodeIx o = node_index_.at(e.object.str());
            const PredId p = predicates_.id_of(e.predicate);
            edge_pred_[ix] = p;
            adjacency_[s].push_back({p, Direction::out, o, ix});
            adjacency_[o].push_back({p, Direction::in, s, ix});
        }
        for (auto& list : adjacency_) {
            std::sort(list.begin(), list.end(), [](const Adjacency& a, const Adjacency& b) {
                return std::tie(a.predicate, a.direction, a.other, a.edge) <
                       std::tie(b.predicate, b.direction, b.other, b.edge);
            });
        }
    }

    void compute_origins() {
        origins_.assign(edges_.size(), {});
        // Group edges sharing (subject, object, qualifiers).
        std::vector<EdgeIx> order(edges_.size());
        for (EdgeIx i = 0; i < order.size(); ++i) order[i] = i;
        auto group_key = [this](EdgeIx i) {
            const auto& e = edges_[i];
            return std::tie(e.subject, e.object, e.qualifiers);
        };
        std::stable_sort(order.begin(), order.end(), [&](EdgeIx a, EdgeIx b) { return group_key(a) < group_key(b); });
        std::size_t begin = 0;
        while (begin < order.size()) {
            std::size_t end = begin + 1;
            while (end < order.size() && group_key(order[end]) == group_key(order[begin])) ++end;
            for (std::size_t i = begin; i < end; ++i) {
                const EdgeIx ix = order[i];
                const PredId p = edge_pred_[ix];
                auto& orig = origins_[ix];
                for (std::size_t j = begin; j < end; ++j) {
                    const EdgeIx other = order[j];
                    if (edges_[other].derived) continue;
                    if (predicates_.is_ancestor_or_self(p, edge_pred_[other])) orig.push_back(edge_pred_[other]);
                }
                std::sort(orig.begin(), orig.end());
                orig.erase(std::unique(orig.begin(), orig.end()), orig.end());
                if (orig.empty()) {
                    const auto& e = edges_[ix];
                    throw IngestError("derived edge " + e.subject.str() + " -" + e.predicate + "-> " +
                                      e.object.str() + " has no asserted edge with a descendant predicate");
                }
            }
            begin = end;
        }
    }

    Ontology predicates_;
    Ontology categories_;
    std::vector<NodeRecord> nodes_;
    std::vector<EdgeRecord> edges_;
    bool expanded_ = false;

    StoreStats stats_;
    std::unordered_map<std::string, NodeIx> node_index_;
    std::vector<std::vector<CatId>> node_cats_;
    std::vector<std::vector<Adjacency>> adjacency_;
    std::vector<PredId> edge_pred_;
    std::vector<std::vector<PredId>> origins_;
    std::map<std::pair<std::string, std::string>, std::vector<NodeIx>> property_index_;
};

// ---------------------------------------------------------------------------
// Loading and saving
// ---------------------------------------------------------------------------

struct IngestOptions {
    /// Skip edges whose endpoints are missing instead of rejecting the file.
    bool lenient = false;
};

struct IngestReport {
    std::size_t node_lines = 0;
    std::size_t edge_lines = 0;
    std::size_t skipped_dangling = 0;
    std::vector<std::string> skipped;
};

namespace detail {

inline std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot open " + path.string());
    return in;
}

inline nlohmann::json read_json_file(const std::filesystem::path& path) {
    auto in = open_input(path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw IngestError(path.string() + ": " + e.what());
    }
}

/// Calls fn(json, line_number) for every non-blank line.
template <typename Fn>
void for_each_jsonl(const std::filesystem::path& path, Fn&& fn) {
    auto in = open_input(path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw IngestError(path.filename().string() + ": malformed JSON: " + e.what(), lineno);
        }
        try {
            fn(j, lineno);
        } catch (const IngestError& e) {
            if (e.line() != 0) throw;
            throw IngestError(path.filename().string() + ": " + e.what(), lineno);
        }
    }
}

} // namespace detail

/// ingest(): parses the four input files and builds an (unexpanded) store.
inline Store ingest(const std::filesystem::path& nodes_file, const std::filesystem::path& edges_file,
                    const std::filesystem::path& predicate_ontology, const std::filesystem::path& category_ontology,
                    const IngestOptions& options = {}, IngestReport* report = nullptr) {
    auto preds = Ontology::from_json(OntologyKind::predicate, detail::read_json_file(predicate_ontology));
    auto cats = Ontology::from_json(OntologyKind::category, detail::read_json_file(category_ontology));

    IngestReport local;
    IngestReport& rep = report ? *report : local;

    std::vector<NodeRecord> nodes;
    std::set<std::string> seen;
    detail::for_each_jsonl(nodes_file, [&](const nlohmann::json& j, std::size_t lineno) {
        auto n = node_from_json(j);
        for (const auto& c : n.categories) {
            if (!cats.contains(c)) throw IngestError("node " + n.id.str() + ": unknown category '" + c + "'", lineno);
        }
        if (!seen.insert(n.id.str()).second) throw IngestError("duplicate node id " + n.id.str(), lineno);
        nodes.push_back(std::move(n));
        ++rep.node_lines;
    });

    std::vector<EdgeRecord> edges;
    detail::for_each_jsonl(edges_file, [&](const nlohmann::json& j, std::size_t lineno) {
        auto e = edge_from_json(j);
        ++rep.edge_lines;
        if (!preds.contains(e.predicate)) throw IngestError("unknown predicate '" + e.predicate + "'", lineno);
        for (const Curie* end : {&e.subject, &e.object}) {
            if (!seen.contains(end->str())) {
                const std::string msg = "dangling edge " + e.subject.str() + " -" + e.predicate + "-> " +
                                        e.object.str() + ": unknown node " + end->str();
                if (!options.lenient) throw IngestError(msg, lineno);
                ++rep.skipped_dangling;
                rep.skipped.push_back(msg + " (line " + std::to_string(lineno) + ")");
                return;
            }
        }
        edges.push_back(std::move(e));
    });
    return Store(std::move(preds), std::move(cats), std::move(nodes), std::move(edges), false);
}

/// expand_redundant(): adds, for every asserted edge, one derived edge per
/// strict ancestor of its predicate. Qualifiers are copied verbatim, never
/// generalised. Idempotent.
inline Store expand_redundant(const Store& store) {
    std::vector<EdgeRecord> edges = store.edges();
    const auto& preds = store.predicates();
    const std::size_t asserted = edges.size();
    for (std::size_t i = 0; i < asserted; ++i) {
        if (edges[i].derived) continue;
        const PredId p = preds.id_of(edges[i].predicate);
        for (PredId a : preds.ancestors(p)) {
            EdgeRecord d;
            d.subject = edges[i].subject;
            d.predicate = preds.name_of(a);
            d.object = edges[i].object;
            d.qualifiers = edges[i].qualifiers;
            d.source = edges[i].source;
            d.derived = true;
            edges.push_back(std::move(d));
        }
    }
    return Store(store.predicates(), store.categories(), store.nodes(), std::move(edges), true);
}

inline nlohmann::json store_manifest(const Store& store) {
    std::size_t derived = 0;
    for (const auto& e : store.edges()) derived += e.derived ? 1 : 0;
    auto j = store.stats().to_json();
    j["format_version"] = 1;
    j["expanded"] = store.expanded();
    j["derived_edge_count"] = derived;
    j["asserted_edge_count"] = store.edges().size() - derived;
    return j;
}

/// Writes a store directory: records, ontologies and a stats manifest.
/// Indexes are rebuilt on load.
inline void save_store(const Store& store, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    auto open = [&](const char* name) {
        std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
        if (!out) throw IngestError("cannot write " + (dir / name).string());
        return out;
    };
    {
        auto out = open("nodes.jsonl");
        for (const auto& n : store.nodes()) out << node_to_json(n).dump() << '\n';
    }
    {
        auto out = open("edges.jsonl");
        for (const auto& e : store.edges()) out << edge_to_json(e).dump() << '\n';
    }
    open("predicate_ontology.json") << store.predicates().to_json().dump(2) << '\n';
    open("category_ontology.json") << store.categories().to_json().dump(2) << '\n';
    open("manifest.json") << store_manifest(store).dump(2) << '\n';
}

inline Store load_store(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw IngestError("store directory not found: " + dir.string());
    const auto manifest = detail::read_json_file(dir / "manifest.json");
    auto loaded = ingest(dir / "nodes.jsonl", dir / "edges.jsonl", dir / "predicate_ontology.json",
                         dir / "category_ontology.json");
    const bool expanded = manifest.value("expanded", false);
    if (!expanded) return loaded;
    return Store(loaded.predicates(), loaded.categories(), loaded.nodes(), loaded.edges(), true);
}

} // namespace edgar
