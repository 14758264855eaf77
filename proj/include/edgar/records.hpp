#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "edgar/curie.hpp"
#include "edgar/error.hpp"

namespace edgar {

/// Edge orientation relative to the node being queried: `out` means the node
/// is the subject, `in` means it is the object.
enum class Direction { out, in, any };

inline std::string_view to_string(Direction d) {
    switch (d) {
        case Direction::out: return "out";
        case Direction::in: return "in";
        case Direction::any: return "any";
    }
    return "any";
}

inline std::optional<Direction> parse_direction(std::string_view s) {
    if (s == "out") return Direction::out;
    if (s == "in") return Direction::in;
    if (s == "any") return Direction::any;
    return std::nullopt;
}

inline Direction reverse(Direction d) {
    if (d == Direction::out) return Direction::in;
    if (d == Direction::in) return Direction::out;
    return Direction::any;
}

struct NodeRecord {
    Curie id;
    std::string name;
    /// Most specific first.
    std::vector<std::string> categories;
    /// property key -> sorted, duplicate-free tag list
    std::map<std::string, std::vector<std::string>> properties;
    /// Keys we do not interpret; written back unchanged.
    nlohmann::json extra = nlohmann::json::object();

    bool has_tag(const std::string& key, const std::string& tag) const {
        auto it = properties.find(key);
        if (it == properties.end()) return false;
        return std::binary_search(it->second.begin(), it->second.end(), tag);
    }
};

struct EdgeRecord {
    Curie subject;
    std::string predicate;
    Curie object;
    std::map<std::string, std::string> qualifiers;
    std::string source;
    bool derived = false;
    nlohmann::json extra = nlohmann::json::object();
};

namespace detail {

inline std::string json_type_error(const char* field, const char* expected) {
    return std::string("field '") + field + "' must be " + expected;
}

inline Curie read_curie(const nlohmann::json& obj, const char* field) {
    auto it = obj.find(field);
    if (it == obj.end()) throw IngestError(std::string("missing required field '") + field + "'");
    if (!it->is_string()) throw IngestError(json_type_error(field, "a string"));
    auto c = Curie::try_parse(it->get<std::string>());
    if (!c) {
        throw IngestError(std::string("field '") + field + "' is not a valid curie: '" +
                          it->get<std::string>() + "'");
    }
    return *c;
}

} // namespace detail

inline NodeRecord node_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw IngestError("node line is not a JSON object");
    NodeRecord n;
    n.id = detail::read_curie(j, "id");
    if (auto it = j.find("name"); it != j.end()) {
        if (!it->is_string()) throw IngestError(detail::json_type_error("name", "a string"));
        n.name = it->get<std::string>();
    }
    auto cats = j.find("categories");
    if (cats == j.end() || !cats->is_array() || cats->empty()) {
        throw IngestError("node " + n.id.str() + ": 'categories' must be a non-empty array");
    }
    for (const auto& c : *cats) {
        if (!c.is_string()) throw IngestError(detail::json_type_error("categories", "an array of strings"));
        n.categories.push_back(c.get<std::string>());
    }
    if (auto props = j.find("properties"); props != j.end()) {
        if (!props->is_object()) throw IngestError(detail::json_type_error("properties", "an object"));
        for (const auto& [key, tags] : props->items()) {
            std::vector<std::string> list;
            if (tags.is_string()) {
                list.push_back(tags.get<std::string>());
            } else if (tags.is_array()) {
                for (const auto& t : tags) {
                    if (!t.is_string()) {
                        throw IngestError("node " + n.id.str() + ": property '" + key +
                                          "' must hold strings");
                    }
                    list.push_back(t.get<std::string>());
                }
            } else {
                throw IngestError("node " + n.id.str() + ": property '" + key +
                                  "' must be a string or array of strings");
            }
            std::sort(list.begin(), list.end());
            list.erase(std::unique(list.begin(), list.end()), list.end());
            if (!list.empty()) n.properties[key] = std::move(list);
        }
    }
    for (const auto& [k, v] : j.items()) {
        if (k != "id" && k != "name" && k != "categories" && k != "properties") n.extra[k] = v;
    }
    return n;
}

inline nlohmann::json node_to_json(const NodeRecord& n) {
    nlohmann::json j = n.extra;
    j["id"] = n.id.str();
    j["name"] = n.name;
    j["categories"] = n.categories;
    nlohmann::json props = nlohmann::json::object();
    for (const auto& [k, tags] : n.properties) props[k] = tags;
    j["properties"] = std::move(props);
    return j;
}

inline EdgeRecord edge_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw IngestError("edge line is not a JSON object");
    EdgeRecord e;
    e.subject = detail::read_curie(j, "subject");
    e.object = detail::read_curie(j, "object");
    auto pred = j.find("predicate");
    if (pred == j.end() || !pred->is_string() || pred->get<std::string>().empty()) {
        throw IngestError("edge: 'predicate' must be a non-empty string");
    }
    e.predicate = pred->get<std::string>();
    if (auto q = j.find("qualifiers"); q != j.end() && !q->is_null()) {
        if (!q->is_object()) throw IngestError(detail::json_type_error("qualifiers", "an object"));
        for (const auto& [k, v] : q->items()) {
            if (!v.is_string()) throw IngestError("qualifier '" + k + "' must be a string");
            e.qualifiers[k] = v.get<std::string>();
        }
    }
    if (auto s = j.find("source"); s != j.end()) {
        if (!s->is_string()) throw IngestError(detail::json_type_error("source", "a string"));
        e.source = s->get<std::string>();
    }
    if (auto d = j.find("derived"); d != j.end()) {
        if (!d->is_boolean()) throw IngestError(detail::json_type_error("derived", "a boolean"));
        e.derived = d->get<bool>();
    }
    for (const auto& [k, v] : j.items()) {
        if (k != "subject" && k != "predicate" && k != "object" && k != "qualifiers" &&
            k != "source" && k != "derived") {
            e.extra[k] = v;
        }
    }
    return e;
}

inline nlohmann::json edge_to_json(const EdgeRecord& e) {
    nlohmann::json j = e.extra;
    j["subject"] = e.subject.str();
    j["predicate"] = e.predicate;
    j["object"] = e.object.str();
    nlohmann::json q = nlohmann::json::object();
    for (const auto& [k, v] : e.qualifiers) q[k] = v;
    j["qualifiers"] = std::move(q);
    j["source"] = e.source;
    if (e.derived) j["derived"] = true;
    return j;
}

} // namespace edgar
