#pragma once

#include <compare>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include "edgar/error.hpp"

namespace edgar {

/// Compact URI of the form PREFIX:LOCAL. Equality and ordering are plain
/// byte comparisons on the canonical string.
class Curie {
public:
    Curie() = default;

    static std::optional<Curie> try_parse(std::string_view text) {
        const auto colon = text.find(':');
        if (colon == std::string_view::npos || colon == 0 || colon + 1 == text.size()) {
            return std::nullopt;
        }
        if (text.find(':', colon + 1) != std::string_view::npos) return std::nullopt;
        Curie c;
        c.text_ = std::string(text);
        c.colon_ = colon;
        return c;
    }

    static Curie parse(std::string_view text) {
        if (auto c = try_parse(text)) return *c;
        throw ValidationError({"invalid curie '" + std::string(text) +
                               "': expected PREFIX:LOCAL with exactly one colon"});
    }

    const std::string& str() const noexcept { return text_; }
    std::string_view prefix() const { return std::string_view(text_).substr(0, colon_); }
    std::string_view local_id() const { return std::string_view(text_).substr(colon_ + 1); }
    bool empty() const noexcept { return text_.empty(); }

    friend bool operator==(const Curie& a, const Curie& b) noexcept { return a.text_ == b.text_; }
    friend std::strong_ordering operator<=>(const Curie& a, const Curie& b) noexcept {
        return a.text_.compare(b.text_) <=> 0;
    }
    friend std::ostream& operator<<(std::ostream& os, const Curie& c) { return os << c.text_; }

private:
    std::string text_;
    std::size_t colon_ = 0;
};

} // namespace edgar

template <>
struct std::hash<edgar::Curie> {
    std::size_t operator()(const edgar::Curie& c) const noexcept {
        return std::hash<std::string>{}(c.str());
    }
};
