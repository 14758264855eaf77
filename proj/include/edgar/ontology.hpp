#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "edgar/error.hpp"

namespace edgar {

enum class OntologyKind { predicate, category };

inline std::string_view to_string(OntologyKind k) {
    return k == OntologyKind::predicate ? "predicate" : "category";
}

/// Directed acyclic is-a hierarchy over string identifiers. Closures are
/// computed once at construction; lookups afterwards are O(1) plus the size
/// of the answer.
class Ontology {
public:
    using Id = std::uint32_t;
    static constexpr Id npos = static_cast<Id>(-1);

    Ontology() = default;

    /// Builds from an id -> parents map. Every parent must itself be a key or
    /// a declared root. Throws IngestError naming the offending identifier, or
    /// the full cycle when the hierarchy is not acyclic.
    Ontology(OntologyKind kind, const std::map<std::string, std::vector<std::string>>& parents,
             const std::vector<std::string>& roots = {})
        : kind_(kind) {
        for (const auto& r : roots) intern(r);
        for (const auto& [id, ps] : parents) intern(id);
        for (const auto& [id, ps] : parents) {
            for (const auto& p : ps) {
                if (!index_.contains(p)) {
                    throw IngestError(std::string(to_string(kind_)) + " ontology: parent '" + p +
                                      "' of '" + id + "' is neither an entry nor a declared root");
                }
            }
        }
        parents_.assign(names_.size(), {});
        for (const auto& [id, ps] : parents) {
            auto& dst = parents_[index_.at(id)];
            for (const auto& p : ps) dst.push_back(index_.at(p));
            std::sort(dst.begin(), dst.end());
            dst.erase(std::unique(dst.begin(), dst.end()), dst.end());
        }
        for (const auto& r : roots) roots_.push_back(index_.at(r));
        std::sort(roots_.begin(), roots_.end());
        check_acyclic();
        build_closures();
    }

    /// Accepts {"roots": [...], "parents": {id: [parents]}} or the flat form
    /// where every key other than "roots" maps an id to its parents.
    static Ontology from_json(OntologyKind kind, const nlohmann::json& j) {
        if (!j.is_object()) {
            throw IngestError(std::string(to_string(kind)) + " ontology: expected a JSON object");
        }
        std::vector<std::string> roots;
        std::map<std::string, std::vector<std::string>> parents;
        auto read_list = [&](const std::string& key, const nlohmann::json& v) {
            if (!v.is_array()) {
                throw IngestError(std::string(to_string(kind)) + " ontology: entry '" + key +
                                  "' must be an array of strings");
            }
            std::vector<std::string> out;
            for (const auto& x : v) {
                if (!x.is_string()) {
                    throw IngestError(std::string(to_string(kind)) + " ontology: entry '" + key +
                                      "' must be an array of strings");
                }
                out.push_back(x.get<std::string>());
            }
            return out;
        };
        if (auto it = j.find("roots"); it != j.end()) roots = read_list("roots", *it);
        if (auto it = j.find("parents"); it != j.end()) {
            if (!it->is_object()) {
                throw IngestError(std::string(to_string(kind)) + " ontology: 'parents' must be an object");
            }
            for (const auto& [k, v] : it->items()) parents[k] = read_list(k, v);
        } else {
            for (const auto& [k, v] : j.items()) {
                if (k != "roots") parents[k] = read_list(k, v);
            }
        }
        return Ontology(kind, parents, roots);
    }

    nlohmann::json to_json() const {
        nlohmann::json parents = nlohmann::json::object();
        std::vector<std::string> roots;
        for (Id i = 0; i < names_.size(); ++i) {
            if (std::binary_search(roots_.begin(), roots_.end(), i) && parents_[i].empty()) {
                roots.push_back(names_[i]);
                continue;
            }
            auto arr = nlohmann::json::array();
            for (Id p : parents_[i]) arr.push_back(names_[p]);
            parents[names_[i]] = std::move(arr);
        }
        std::sort(roots.begin(), roots.end());
        return {{"roots", roots}, {"parents", parents}};
    }

    OntologyKind kind() const noexcept { return kind_; }
    std::size_t size() const noexcept { return names_.size(); }
    bool contains(std::string_view id) const { return index_.contains(std::string(id)); }

    Id id_of(std::string_view name) const {
        auto it = index_.find(std::string(name));
        return it == index_.end() ? npos : it->second;
    }
    const std::string& name_of(Id id) const { return names_.at(id); }

    /// Strict ancestors, sorted by id.
    const std::vector<Id>& ancestors(Id id) const { return ancestors_.at(id); }
    /// Strict descendants, sorted by id.
    const std::vector<Id>& descendants(Id id) const { return descendants_.at(id); }
    const std::vector<Id>& parents(Id id) const { return parents_.at(id); }

    bool is_ancestor_or_self(Id ancestor, Id id) const {
        if (ancestor == id) return true;
        const auto& a = ancestors_.at(id);
        return std::binary_search(a.begin(), a.end(), ancestor);
    }

    /// Strict ancestors by name, sorted lexicographically. Unknown -> empty.
    std::vector<std::string> ancestor_names(std::string_view name) const {
        std::vector<std::string> out;
        const Id id = id_of(name);
        if (id == npos) return out;
        for (Id a : ancestors_[id]) out.push_back(names_[a]);
        std::sort(out.begin(), out.end());
        return out;
    }

    /// Marks every id that is in `seeds` or descends from one of them.
    std::vector<bool> descendant_closure(const std::vector<std::string>& seeds) const {
        std::vector<bool> marked(names_.size(), false);
        for (const auto& s : seeds) {
            const Id id = id_of(s);
            if (id == npos) continue;
            marked[id] = true;
            for (Id d : descendants_[id]) marked[d] = true;
        }
        return marked;
    }

private:
    Id intern(const std::string& name) {
        auto [it, inserted] = index_.try_emplace(name, static_cast<Id>(names_.size()));
        if (inserted) names_.push_back(name);
        return it->second;
    }

    void check_acyclic() const {
        enum class Mark : std::uint8_t { white, grey, black };
        std::vector<Mark> mark(names_.size(), Mark::white);
        std::vector<Id> path;
        // Iterative DFS keeps the current path so a back edge can be reported verbatim.
        for (Id start = 0; start < names_.size(); ++start) {
            if (mark[start] != Mark::white) continue;
            std::vector<std::pair<Id, std::size_t>> stack{{start, 0}};
            mark[start] = Mark::grey;
            path.assign(1, start);
            while (!stack.empty()) {
                auto& [node, next] = stack.back();
                if (next < parents_[node].size()) {
                    const Id p = parents_[node][next++];
                    if (mark[p] == Mark::grey) {
                        auto from = std::find(path.begin(), path.end(), p);
                        std::string cycle;
                        for (auto it = from; it != path.end(); ++it) cycle += names_[*it] + " -> ";
                        cycle += names_[p];
                        throw IngestError("cycle in " + std::string(to_string(kind_)) +
                                          " ontology: " + cycle);
                    }
                    if (mark[p] == Mark::white) {
                        mark[p] = Mark::grey;
                        stack.emplace_back(p, 0);
                        path.push_back(p);
                    }
                } else {
                    mark[node] = Mark::black;
                    stack.pop_back();
                    path.pop_back();
                }
            }
        }
    }

    void build_closures() {
        ancestors_.assign(names_.size(), {});
        descendants_.assign(names_.size(), {});
        std::vector<bool> done(names_.size(), false);
        // Memoised post-order; acyclicity is already established.
        auto visit = [&](auto&& self, Id id) -> void {
            if (done[id]) return;
            auto& acc = ancestors_[id];
            for (Id p : parents_[id]) {
                self(self, p);
                acc.push_back(p);
                acc.insert(acc.end(), ancestors_[p].begin(), ancestors_[p].end());
            }
            std::sort(acc.begin(), acc.end());
            acc.erase(std::unique(acc.begin(), acc.end()), acc.end());
            done[id] = true;
        };
        for (Id i = 0; i < names_.size(); ++i) visit(visit, i);
        for (Id i = 0; i < names_.size(); ++i) {
            for (Id a : ancestors_[i]) descendants_[a].push_back(i);
        }
    }

    OntologyKind kind_ = OntologyKind::predicate;
    std::vector<std::string> names_;
    std::unordered_map<std::string, Id> index_;
    std::vector<std::vector<Id>> parents_;
    std::vector<Id> roots_;
    std::vector<std::vector<Id>> ancestors_;
    std::vector<std::vector<Id>> descendants_;
};

} // namespace edgar
