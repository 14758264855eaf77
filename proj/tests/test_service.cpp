#include <gtest/gtest.h>

#include <future>
#include <thread>

#include "edgar/http.hpp"
#include "test_util.hpp"

using namespace edgar;
using namespace edgar::testing;

namespace {

const QueryService& service() {
    static const QueryService svc(std::make_shared<const Store>(ad_store()), PipelineConfig{});
    return svc;
}

std::string ad_body(const std::string& pinned = synth::ad_curie) {
    QueryRequest r;
    r.query_graph = make_template_query("drug-treats-disease", Curie::parse(pinned));
    return serialize_request(r);
}

} // namespace

TEST(Service, HealthReportsCounts) {
    const auto r = service().health();
    EXPECT_EQ(r.status, 200);
    const auto j = nlohmann::json::parse(r.body);
    EXPECT_EQ(j["status"], "ok");
    EXPECT_EQ(j["node_count"], ad_store().stats().node_count);
    EXPECT_EQ(j["edge_count"], ad_store().stats().edge_count);
    EXPECT_EQ(r.headers.at("X-Content-Hash"), content_hash(r.body));
}

TEST(Service, MetaListsTemplatesAndConfig) {
    const auto j = nlohmann::json::parse(service().meta().body);
    EXPECT_EQ(j["api"], "v1");
    EXPECT_EQ(j["templates"].size(), std::size(query_templates));
    EXPECT_EQ(j["config"]["p0"], 1e-5);
}

TEST(Service, QueryMatchesDirectPipeline) {
    const auto r = service().query(ad_body());
    ASSERT_EQ(r.status, 200) << r.body;
    const auto j = nlohmann::json::parse(r.body);
    EXPECT_EQ(j["meta"]["lookup_n"], 14);
    const auto direct = run_pipeline(ad_store(), ad_query(), PipelineConfig{});
    EXPECT_EQ(r.body, render_json(ad_store(), direct));
    EXPECT_TRUE(r.headers.contains("X-Runtime-Ms"));
    EXPECT_EQ(r.headers.at("X-Content-Hash"), content_hash(r.body));
}

TEST(Service, OptionsOverrideConfig) {
    auto j = nlohmann::json::parse(ad_body());
    j["options"] = {{"max_rules", 3}};
    const auto r = service().query(j.dump());
    ASSERT_EQ(r.status, 200);
    EXPECT_EQ(nlohmann::json::parse(r.body)["rules"].size(), 3u);
}

TEST(Service, UnknownCurieIs404) {
    const auto r = service().query(ad_body("MONDO:00004975"));
    EXPECT_EQ(r.status, 404);
    const auto j = nlohmann::json::parse(r.body);
    EXPECT_EQ(j["stage"], "lookup");
    EXPECT_NE(j["errors"][0].get<std::string>().find("MONDO:00004975"), std::string::npos);
}

TEST(Service, InvalidQueryIs400WithAllErrors) {
    const auto r = service().query(R"({"message":{"query_graph":{"nodes":{},"edges":{}}},"options":{"p0":-1}})");
    EXPECT_EQ(r.status, 400);
    const auto j = nlohmann::json::parse(r.body);
    EXPECT_GE(j["errors"].size(), 3u);
    EXPECT_EQ(service().query("not json").status, 400);
}

TEST(Service, IdenticalRequestsIdenticalBodies) {
    const auto a = service().query(ad_body());
    const auto b = service().query(ad_body());
    EXPECT_EQ(a.body, b.body);
    EXPECT_EQ(a.headers.at("X-Content-Hash"), b.headers.at("X-Content-Hash"));
}

TEST(Service, ConcurrentRequestsAgree) {
    const auto expected = service().query(ad_body()).body;
    std::vector<std::future<std::string>> futures;
    for (int i = 0; i < 8; ++i) {
        futures.push_back(std::async(std::launch::async, [] { return service().query(ad_body()).body; }));
    }
    for (auto& f : futures) EXPECT_EQ(f.get(), expected);
}

TEST(Service, Resolve) {
    auto r = service().resolve(R"({"text":"physostigmine"})");
    ASSERT_EQ(r.status, 200);
    auto j = nlohmann::json::parse(r.body);
    EXPECT_EQ(j["matches"][0]["curie"], "CHEBI:27953");
    EXPECT_EQ(j["matches"][0]["match"], "exact");
    EXPECT_EQ(service().resolve(R"({"text":"a","limit":0})").status, 400);
    EXPECT_EQ(service().resolve(R"({"limit":2})").status, 400);
    EXPECT_EQ(service().resolve(R"({"text":"a","bogus":1})").status, 400);
    j = nlohmann::json::parse(service().resolve(R"({"text":""})").body);
    EXPECT_TRUE(j["matches"].empty());
}

TEST(Http, EndpointsOverLoopback) {
    httplib::Server server;
    mount(server, service());
    const int port = server.bind_to_any_port("127.0.0.1");
    ASSERT_GT(port, 0);
    std::thread worker([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    httplib::Client client("127.0.0.1", port);
    auto health = client.Get("/v1/health");
    ASSERT_TRUE(health);
    EXPECT_EQ(health->status, 200);
    EXPECT_EQ(health->get_header_value("Access-Control-Allow-Origin"), "*");

    auto q = client.Post("/v1/query", ad_body(), "application/json");
    ASSERT_TRUE(q);
    EXPECT_EQ(q->status, 200);
    EXPECT_EQ(q->body, service().query(ad_body()).body);
    EXPECT_EQ(q->get_header_value("X-Content-Hash"), content_hash(q->body));

    auto bad = client.Post("/v1/query", "{}", "application/json");
    ASSERT_TRUE(bad);
    EXPECT_EQ(bad->status, 400);

    auto res = client.Post("/v1/resolve", R"({"text":"Alzheimer"})", "application/json");
    ASSERT_TRUE(res);
    EXPECT_EQ(nlohmann::json::parse(res->body)["matches"][0]["curie"], synth::ad_curie);

    auto meta = client.Get("/v1/meta");
    ASSERT_TRUE(meta);
    EXPECT_EQ(meta->status, 200);

    auto missing = client.Get("/v1/nothing");
    ASSERT_TRUE(missing);
    EXPECT_EQ(missing->status, 404);
    EXPECT_NO_THROW((void)nlohmann::json::parse(missing->body));

    auto preflight = client.Options("/v1/query");
    ASSERT_TRUE(preflight);
    EXPECT_EQ(preflight->status, 204);

    server.stop();
    worker.join();
}
