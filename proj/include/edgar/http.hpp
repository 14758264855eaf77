#pragma once

// HTTP binding for QueryService. Kept apart from service.hpp so the handlers
// can be used and tested without pulling in the socket layer.

#include <functional>
#include <iostream>
#include <string>

#include <httplib.h>

#include "edgar/service.hpp"

namespace edgar {

namespace detail {

inline void write_response(const HttpResponse& r, httplib::Response& res) {
    res.status = r.status;
    for (const auto& [k, v] : r.headers) res.set_header(k, v);
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_header("Access-Control-Expose-Headers", "X-Content-Hash, X-Runtime-Ms");
    res.set_content(r.body, "application/json");
}

} // namespace detail

/// Registers the /v1 routes on `server`.
inline void mount(httplib::Server& server, const QueryService& service) {
    server.Post("/v1/query", [&service](const httplib::Request& req, httplib::Response& res) {
        detail::write_response(service.query(req.body), res);
    });
    server.Post("/v1/resolve", [&service](const httplib::Request& req, httplib::Response& res) {
        detail::write_response(service.resolve(req.body), res);
    });
    server.Get("/v1/health", [&service](const httplib::Request&, httplib::Response& res) {
        detail::write_response(service.health(), res);
    });
    server.Get("/v1/meta", [&service](const httplib::Request&, httplib::Response& res) {
        detail::write_response(service.meta(), res);
    });
    server.Options(R"(/v1/.*)", [](const httplib::Request&, httplib::Response& res) {
        res.status = 204;
        res.set_header("Access-Control-Allow-Origin", "*");
        res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
    });
    server.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
        if (!res.body.empty()) return;
        auto r = QueryService::error_response(res.status, {"no route for " + req.method + " " + req.path});
        detail::write_response(r, res);
    });
}

/// Blocks serving on host:port until the server is stopped.
inline bool serve(const QueryService& service, const std::string& host, int port,
                  const std::function<void(httplib::Server&)>& on_ready = {}) {
    httplib::Server server;
    mount(server, service);
    if (!server.bind_to_port(host, port)) return false;
    if (on_ready) on_ready(server);
    return server.listen_after_bind();
}

} // namespace edgar
