#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "edgar/curie.hpp"
#include "edgar/store.hpp"

namespace edgar {

enum class MatchKind { exact, prefix };

inline std::string_view to_string(MatchKind m) { return m == MatchKind::exact ? "exact" : "prefix"; }

struct NameMatch {
    Curie curie;
    std::string name;
    MatchKind match;
};

/// Case-fold (ASCII), trim, and collapse internal whitespace runs to one space.
inline std::string normalize_name(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (unsigned char c : text) {
        if (std::isspace(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out.push_back(' ');
        pending_space = false;
        out.push_back(static_cast<char>(std::tolower(c)));
    }
    return out;
}

/// Name-to-curie lookup. The local index is the default; a remote client can
/// implement the same interface.
class Resolver {
public:
    virtual ~Resolver() = default;
    virtual std::vector<NameMatch> resolve(std::string_view text, std::size_t limit) const = 0;
};

class ResolverIndex final : public Resolver {
public:
    explicit ResolverIndex(const Store& store) {
        for (const auto& n : store.nodes()) {
            auto key = normalize_name(n.name);
            if (!key.empty()) index_[key].push_back({n.id, n.name});
        }
        for (auto& [k, v] : index_) {
            std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        }
    }

    /// Exact matches first, then prefix matches; each group sorted by curie.
    std::vector<NameMatch> resolve(std::string_view text, std::size_t limit) const override {
        std::vector<NameMatch> out;
        const auto key = normalize_name(text);
        if (key.empty() || limit == 0) return out;
        if (auto it = index_.find(key); it != index_.end()) {
            for (const auto& [c, name] : it->second) out.push_back({c, name, MatchKind::exact});
        }
        std::vector<NameMatch> prefixed;
        for (auto it = index_.upper_bound(key); it != index_.end() && it->first.starts_with(key); ++it) {
            for (const auto& [c, name] : it->second) prefixed.push_back({c, name, MatchKind::prefix});
        }
        std::sort(prefixed.begin(), prefixed.end(), [](const auto& a, const auto& b) { return a.curie < b.curie; });
        out.insert(out.end(), prefixed.begin(), prefixed.end());
        if (out.size() > limit) out.resize(limit);
        return out;
    }

    std::size_t size() const noexcept { return index_.size(); }

private:
    std::map<std::string, std::vector<std::pair<Curie, std::string>>> index_;
};

inline std::vector<NameMatch> resolve_name(const Resolver& resolver, std::string_view text, std::size_t limit) {
    return resolver.resolve(text, limit);
}

} // namespace edgar
