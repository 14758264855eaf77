#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace edgar;
using namespace edgar::testing;

TEST(Resolver, NormalizesNames) {
    EXPECT_EQ(normalize_name("  Alzheimer   Disease\t"), "alzheimer disease");
    EXPECT_EQ(normalize_name(""), "");
    EXPECT_EQ(normalize_name("   "), "");
}

TEST(Resolver, PrefixMatchFindsDisease) {
    const ResolverIndex index(ad_store());
    const auto hits = resolve_name(index, "Alzheimer", 10);
    ASSERT_FALSE(hits.empty());
    EXPECT_EQ(hits[0].curie.str(), synth::ad_curie);
    EXPECT_EQ(hits[0].match, MatchKind::prefix);
}

TEST(Resolver, ExactMatchIsCaseInsensitive) {
    const ResolverIndex index(ad_store());
    const auto hits = index.resolve("PHYSOSTIGMINE", 10);
    ASSERT_FALSE(hits.empty());
    EXPECT_EQ(hits[0].curie.str(), "CHEBI:27953");
    EXPECT_EQ(hits[0].match, MatchKind::exact);
}

TEST(Resolver, EmptyTextAndZeroLimit) {
    const ResolverIndex index(ad_store());
    EXPECT_TRUE(index.resolve("", 10).empty());
    EXPECT_TRUE(index.resolve("   ", 10).empty());
    EXPECT_TRUE(index.resolve("physostigmine", 0).empty());
    EXPECT_TRUE(index.resolve("zzzz no such name", 10).empty());
}

TEST(Resolver, ExactBeforePrefixAndLimitApplies) {
    const Store s(small_predicates(), small_categories(),
                  {node("X:3", "aspirin", "biolink:Drug"), node("X:1", "aspirin low dose", "biolink:Drug"),
                   node("X:2", "Aspirin", "biolink:Drug"), node("X:0", "aspirin ec", "biolink:Drug")},
                  {});
    const ResolverIndex index(s);
    const auto hits = index.resolve("aspirin", 10);
    ASSERT_EQ(hits.size(), 4u);
    EXPECT_EQ(hits[0].curie.str(), "X:2");
    EXPECT_EQ(hits[1].curie.str(), "X:3");
    EXPECT_EQ(hits[0].match, MatchKind::exact);
    EXPECT_EQ(hits[2].curie.str(), "X:0");
    EXPECT_EQ(hits[3].curie.str(), "X:1");
    EXPECT_EQ(hits[3].match, MatchKind::prefix);
    EXPECT_EQ(index.resolve("aspirin", 3).size(), 3u);
}

TEST(Result, PRoundingAndFormatting) {
    EXPECT_EQ(format_p(1.6312345e-9), "1.63123e-09");
    EXPECT_EQ(round_p(1.6312345e-9), 1.63123e-9);
    EXPECT_EQ(round_p(0.0), 0.0);
    EXPECT_EQ(format_p(1.0), "1.00000e+00");
}

TEST(Result, ContentHashIsFnv1a) {
    EXPECT_EQ(content_hash(""), "cbf29ce484222325");
    EXPECT_EQ(content_hash("a"), "af63dc4c8601ec8c");
    EXPECT_EQ(content_hash("foobar"), "85944171f73967e8");
}

TEST(Result, JsonShape) {
    const auto msg = run_pipeline(ad_store(), ad_query(), PipelineConfig{});
    const auto j = nlohmann::json::parse(render_json(ad_store(), msg));
    for (const char* key : {"query_graph", "results", "rules", "meta"}) EXPECT_TRUE(j.contains(key)) << key;
    EXPECT_EQ(j["meta"]["lookup_n"], 14);
    EXPECT_EQ(j["meta"]["anchor"], synth::ad_curie);
    EXPECT_EQ(j["meta"]["inferred_m"], msg.candidates.size());
    EXPECT_EQ(j["meta"]["rules_post_filter"], msg.rules.size());
    EXPECT_FALSE(j["meta"].contains("runtime_ms"));
    EXPECT_EQ(j["results"].size(), msg.candidates.size());
    const auto& first = j["results"][0];
    for (const char* key : {"node_binding", "name", "best_p", "best_p_raw", "in_lookup", "n_rules", "enrichments"}) {
        EXPECT_TRUE(first.contains(key)) << key;
    }
    const auto& e = first["enrichments"][0];
    for (const char* key : {"kind", "target_id", "target_name", "members", "counts", "p", "p_raw", "method", "path"}) {
        EXPECT_TRUE(e.contains(key)) << key;
    }
    EXPECT_EQ(e["p"].get<double>(), round_p(e["p_raw"].get<double>()));
    EXPECT_EQ(first["n_rules"], first["enrichments"].size());
    const auto timed = nlohmann::json::parse(render_json(ad_store(), msg, {.include_timings = true}));
    EXPECT_TRUE(timed["meta"].contains("runtime_ms"));
}

TEST(Result, TsvHeaderAndRows) {
    const auto msg = run_pipeline(ad_store(), ad_query(), PipelineConfig{});
    const auto tsv = render_tsv(ad_store(), msg);
    EXPECT_EQ(tsv.substr(0, tsv.find('\n')), "rank\tcurie\tname\tbest_p\tn_rules\tin_lookup");
    EXPECT_EQ(static_cast<std::size_t>(std::count(tsv.begin(), tsv.end(), '\n')), msg.candidates.size() + 1);
    EXPECT_NE(tsv.find("CHEBI:27953\tphysostigmine"), std::string::npos);
}

TEST(Result, PrettyMentionsCounts) {
    const auto msg = run_pipeline(ad_store(), ad_query(), PipelineConfig{});
    const auto text = render_pretty(ad_store(), msg);
    EXPECT_NE(text.find("n=14"), std::string::npos);
    EXPECT_NE(text.find("CHEBI:27953"), std::string::npos);
}
