#pragma once

#include <chrono>
#include <cstdio>
#include <map>
#include <memory>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "edgar/config.hpp"
#include "edgar/error.hpp"
#include "edgar/pipeline.hpp"
#include "edgar/query.hpp"
#include "edgar/resolver.hpp"
#include "edgar/result.hpp"
#include "edgar/store.hpp"

namespace edgar {

struct HttpResponse {
    int status = 200;
    std::string body;
    std::map<std::string, std::string> headers;
};

inline constexpr std::string_view store_path_env = "EDGAR_STORE_PATH";
inline constexpr std::size_t default_resolve_limit = 10;

/// Request handlers over an immutable store snapshot. Every handler is a pure
/// function of (store, config, request body) and may run concurrently.
class QueryService {
public:
    QueryService(std::shared_ptr<const Store> store, PipelineConfig config)
        : store_(std::move(store)), config_(std::move(config)), resolver_(*store_) {
        config_.validate();
    }

    const Store& store() const noexcept { return *store_; }
    const PipelineConfig& config() const noexcept { return config_; }
    const ResolverIndex& resolver() const noexcept { return resolver_; }

    /// POST /v1/query
    HttpResponse query(std::string_view body) const {
        return guarded([&] {
            const auto start = std::chrono::steady_clock::now();
            const auto request = parse_request(body);
            const auto config = with_options(config_, request.options);
            config.validate();
            const auto msg = run_pipeline(*store_, request.query_graph, config);
            auto resp = finish(200, render_json(*store_, msg));
            const double total =
                std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
            char buf[128];
            std::snprintf(buf, sizeof buf, "lookup=%.3f;enrichment=%.3f;inference=%.3f;total=%.3f",
                          msg.timings.lookup_ms, msg.timings.enrichment_ms, msg.timings.inference_ms, total);
            resp.headers["X-Runtime-Ms"] = buf;
            return resp;
        });
    }

    /// POST /v1/resolve with {"text": ..., "limit": ...}
    HttpResponse resolve(std::string_view body) const {
        return guarded([&] {
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(body);
            } catch (const nlohmann::json::parse_error& e) {
                throw ValidationError({std::string("invalid JSON: ") + e.what()});
            }
            std::vector<std::string> errs;
            if (!j.is_object()) throw ValidationError({"resolve request must be a JSON object"});
            std::string text;
            std::size_t limit = default_resolve_limit;
            for (const auto& [key, v] : j.items()) {
                if (key == "text") {
                    if (v.is_string()) text = v.get<std::string>();
                    else errs.push_back("text must be a string");
                } else if (key == "limit") {
                    if (v.is_number_integer() && v.get<std::int64_t>() >= 1) limit = v.get<std::size_t>();
                    else errs.push_back("limit must be an integer >= 1");
                } else {
                    errs.push_back("unknown key '" + key + "'");
                }
            }
            if (!j.contains("text")) errs.push_back("text is required");
            if (!errs.empty()) throw ValidationError(std::move(errs));
            nlohmann::json matches = nlohmann::json::array();
            for (const auto& m : resolver_.resolve(text, limit)) {
                matches.push_back({{"curie", m.curie.str()}, {"name", m.name}, {"match", std::string(to_string(m.match))}});
            }
            return finish(200, nlohmann::json{{"text", text}, {"matches", std::move(matches)}}.dump(2) + "\n");
        });
    }

    /// GET /v1/health
    HttpResponse health() const {
        return guarded([&] {
            auto j = store_manifest(*store_);
            j["status"] = "ok";
            return finish(200, j.dump(2) + "\n");
        });
    }

    /// GET /v1/meta
    HttpResponse meta() const {
        return guarded([&] {
            nlohmann::json templates = nlohmann::json::array();
            for (const auto& t : query_templates) {
                templates.push_back({{"name", t.name},
                                     {"question", t.question},
                                     {"answer_category", t.answer_category},
                                     {"predicate", t.predicate}});
            }
            nlohmann::json j = {{"config", config_.to_json()}, {"templates", std::move(templates)}, {"api", "v1"}};
            return finish(200, j.dump(2) + "\n");
        });
    }

    static HttpResponse error_response(int status, std::vector<std::string> errors, const std::string& stage = {}) {
        nlohmann::json j = {{"status", status}, {"errors", std::move(errors)}};
        if (!stage.empty()) j["stage"] = stage;
        return finish(status, j.dump(2) + "\n");
    }

private:
    static HttpResponse finish(int status, std::string body) {
        HttpResponse r;
        r.status = status;
        r.headers["X-Content-Hash"] = content_hash(body);
        r.body = std::move(body);
        return r;
    }

    template <typename Fn>
    static HttpResponse guarded(Fn&& fn) {
        try {
            return fn();
        } catch (const ValidationError& e) {
            return error_response(400, e.problems(), e.stage());
        } catch (const DomainError& e) {
            return error_response(400, {e.what()}, e.stage());
        } catch (const NotFoundError& e) {
            return error_response(404, {e.what()}, e.stage());
        } catch (const Error& e) {
            return error_response(500, {e.what()}, e.stage());
        } catch (const std::exception& e) {
            return error_response(500, {std::string("internal error: ") + e.what()});
        }
    }

    std::shared_ptr<const Store> store_;
    PipelineConfig config_;
    ResolverIndex resolver_;
};

} // namespace edgar
