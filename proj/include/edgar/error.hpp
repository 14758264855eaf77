#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace edgar {

/// Base class for every error raised by the library. Carries an optional
/// pipeline stage tag ("lookup", "enrichment", "inference") that is filled in
/// as the error propagates out of run_pipeline.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}

    const std::string& stage() const noexcept { return stage_; }
    void set_stage(std::string stage) { stage_ = std::move(stage); }

    std::string describe() const {
        return stage_.empty() ? std::string(what()) : "[" + stage_ + "] " + what();
    }

private:
    std::string stage_;
};

/// Malformed input file or inconsistent graph data found while loading.
class IngestError : public Error {
public:
    IngestError(const std::string& what, std::size_t line = 0)
        : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// One or more contract violations in a user-supplied query or config.
/// All violations are collected; what() joins them.
class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<std::string> problems)
        : Error(join(problems)), problems_(std::move(problems)) {}

    const std::vector<std::string>& problems() const noexcept { return problems_; }

private:
    static std::string join(const std::vector<std::string>& items) {
        std::string out;
        for (const auto& s : items) {
            if (!out.empty()) out += "; ";
            out += s;
        }
        return out;
    }

    std::vector<std::string> problems_;
};

class NotFoundError : public Error {
public:
    using Error::Error;
};

/// Statistical precondition violated (e.g. k > min(n, K)).
class DomainError : public Error {
public:
    DomainError(const std::string& field, const std::string& what)
        : Error(field + ": " + what), field_(field) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Index counts disagree with each other. Indicates corruption, never user error.
class DataInconsistencyError : public Error {
public:
    using Error::Error;
};

} // namespace edgar
