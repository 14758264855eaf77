#include <gtest/gtest.h>

#include "edgar/synth/oracle.hpp"
#include "edgar/synth/plant.hpp"
#include "test_util.hpp"

using namespace edgar;
using namespace edgar::synth;
using namespace edgar::testing;

namespace {

PlantSpec clean_spec(std::uint64_t seed) {
    PlantSpec s;
    s.seed = seed;
    s.answer_count = 12;
    s.targets = {{RuleKind::graph, 8, 6, 2}, {RuleKind::property, 7, 6, 1}, {RuleKind::graph, 5, 5, 0}};
    s.noise_nodes = 150;
    return s;
}

std::string dir_bytes(const std::filesystem::path& dir) {
    std::string all;
    for (const char* f : {"nodes.jsonl", "edges.jsonl", "predicate_ontology.json", "category_ontology.json",
                          "truth.json", "query.json"}) {
        all += read_file(dir / f);
    }
    return all;
}

} // namespace

TEST(Synth, SameSeedSameFiles) {
    TempDir a, b;
    auto spec = clean_spec(4);
    spec.noise_edges = 300;
    write_synth(generate(spec), a.path());
    write_synth(generate(spec), b.path());
    EXPECT_EQ(dir_bytes(a.path()), dir_bytes(b.path()));
    spec.seed = 5;
    TempDir c;
    write_synth(generate(spec), c.path());
    EXPECT_NE(dir_bytes(a.path()), dir_bytes(c.path()));
}

TEST(Synth, FullOverlapHasClosedFormP) {
    PlantSpec s;
    s.seed = 1;
    s.answer_count = 4;
    s.targets = {{RuleKind::graph, 4, 4, 0}};
    s.noise_nodes = 40;
    const auto g = generate(s);
    ASSERT_EQ(g.truth.size(), 1u);
    EXPECT_EQ(g.truth[0].counts, (stats::EnrichmentCounts{44, 4, 4, 4}));
    // one favourable draw out of C(44, 4)
    EXPECT_NEAR(g.truth[0].p, rational_sf_double(44, 4, 4, 4), 1e-18);
    EXPECT_NEAR(g.truth[0].p, 1.0 / 135751.0, 1e-18);
}

TEST(Synth, NoNoiseCandidatesAreExactlyHidden) {
    const auto g = generate(clean_spec(9));
    const auto store = make_store(g);
    const auto msg = run_pipeline(store, g.query.query_graph, PipelineConfig{});
    std::set<Curie> hidden;
    for (const auto& t : g.truth) {
        ASSERT_LT(t.p, 1e-5);
        hidden.insert(t.hidden.begin(), t.hidden.end());
    }
    std::set<Curie> new_candidates;
    for (const auto& c : msg.candidates) {
        if (!c.in_lookup) new_candidates.insert(c.id);
    }
    EXPECT_EQ(new_candidates, hidden);
    ASSERT_EQ(msg.rules.size(), g.truth.size());
    for (const auto& t : g.truth) {
        const auto it = std::find_if(msg.rules.begin(), msg.rules.end(),
                                     [&](const EnrichmentRule& r) { return r.target == t.target; });
        ASSERT_NE(it, msg.rules.end()) << t.target.canonical();
        EXPECT_EQ(it->counts, t.counts);
        EXPECT_EQ(it->members, t.members);
        EXPECT_NEAR(it->p.value, t.p, 1e-12);
    }
}

TEST(Synth, InfeasibleSpecRejected) {
    PlantSpec s;
    s.answer_count = 3;
    s.targets = {{RuleKind::graph, 2, 3, 0}, {RuleKind::graph, 9, 4, 5}, {RuleKind::graph, 9, 2, 2}};
    try {
        generate(s);
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_GE(e.problems().size(), 3u);
    }
}

TEST(Synth, SpecJsonRoundTrip) {
    auto s = clean_spec(3);
    s.noise_edges = 10;
    const auto back = PlantSpec::from_json(s.to_json());
    EXPECT_EQ(back.to_json(), s.to_json());
    EXPECT_THROW(PlantSpec::from_json(nlohmann::json{{"seed", 1}}), ValidationError);
    EXPECT_THROW(PlantSpec::from_json(nlohmann::json{{"seed", 1}, {"answer_count", 2}, {"extra", 0}}), ValidationError);
    const auto defaulted = PlantSpec::from_json(
        nlohmann::json::parse(R"({"seed":1,"answer_count":4,"planted_targets":[{"kind":"property","fan_in":6,"overlap":3}]})"));
    EXPECT_EQ(defaulted.targets[0].hidden, 3);
}

TEST(Synth, GeneAnswersUseOtherTargetCategory) {
    auto s = clean_spec(2);
    s.answer_type = "biolink:Gene";
    const auto g = generate(s);
    const auto store = make_store(g);
    const auto msg = run_pipeline(store, g.query.query_graph, PipelineConfig{});
    EXPECT_EQ(msg.rules.size(), g.truth.size());
    for (const auto& r : msg.rules) EXPECT_EQ(r.counts.population_n, g.truth[0].counts.population_n);
}

TEST(Oracle, GuardsNodeCount) {
    auto s = clean_spec(1);
    s.noise_nodes = 300;
    const auto g = generate(s);
    const auto store = make_store(g);
    const auto l = lookup(store, g.query.query_graph);
    EXPECT_THROW(brute_force_oracle(store, l, PipelineConfig{}), ValidationError);
}

TEST(Oracle, EmptyLookupEmptyOutput) {
    const auto g = generate(clean_spec(1));
    const auto store = make_store(g);
    LookupResult l = lookup(store, g.query.query_graph);
    l.answers.clear();
    const auto out = brute_force_oracle(store, l, PipelineConfig{});
    EXPECT_TRUE(out.rules.empty());
    EXPECT_TRUE(out.candidates.empty());
}

TEST(Oracle, ExcludedPredicatesOnlyGiveNoRules) {
    // every shared neighbor hangs off an excluded predicate or its descendant
    std::vector<NodeRecord> nodes{node("X:dis", "d", "biolink:Disease"), node("X:ae", "nausea", "biolink:PhenotypicFeature")};
    std::vector<EdgeRecord> edges;
    for (int i = 0; i < 6; ++i) {
        const auto id = "X:drug" + std::to_string(i);
        nodes.push_back(node(id, id, "biolink:Drug"));
        edges.push_back(edge(id, "biolink:treats", "X:dis"));
        edges.push_back(edge(id, i % 2 ? "biolink:has_adverse_event" : "biolink:causes_adverse_event", "X:ae"));
    }
    for (int i = 0; i < 30; ++i) nodes.push_back(node("X:bg" + std::to_string(i), "", "biolink:Drug"));
    const auto store = expand_redundant(Store(small_predicates(), small_categories(), nodes, edges));
    PipelineConfig cfg;
    cfg.p0 = 1.0;
    const auto msg = run_pipeline(store, make_template_query("drug-treats-disease", Curie::parse("X:dis")), cfg);
    EXPECT_EQ(msg.lookup.n(), 6u);
    EXPECT_TRUE(msg.rules.empty());
    const auto oracle = brute_force_oracle(store, msg.lookup, cfg);
    EXPECT_TRUE(oracle.rules.empty());
}

TEST(Oracle, AgreesWithPipelineUnderNoise) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        PlantSpec s;
        s.seed = seed;
        s.answer_count = 10;
        s.targets = {{RuleKind::graph, 6, 4, 2}, {RuleKind::property, 5, 3, 2}};
        s.noise_nodes = 100;
        s.noise_edges = 250;
        const auto g = generate(s);
        const auto store = make_store(g);
        PipelineConfig cfg;
        cfg.p0 = 0.01;
        const auto msg = run_pipeline(store, g.query.query_graph, cfg);
        const auto oracle = brute_force_oracle(store, msg.lookup, cfg);
        ASSERT_EQ(msg.rules.size(), oracle.rules.size()) << seed;
        for (std::size_t i = 0; i < msg.rules.size(); ++i) {
            EXPECT_EQ(msg.rules[i].target.canonical(), oracle.rules[i].target.canonical());
            EXPECT_NEAR(msg.rules[i].p.value, oracle.rules[i].p_double, 1e-12);
        }
        ASSERT_EQ(msg.candidates.size(), oracle.candidates.size()) << seed;
    }
}

TEST(AdFixture, ShippedFilesMatchGenerator) {
    TempDir dir;
    write_ad_fixture(ad_fixture(), dir.path());
    const auto shipped = source_dir() / "fixtures" / "ad";
    for (const char* f : {"nodes.jsonl", "edges.jsonl", "predicate_ontology.json", "category_ontology.json",
                          "manifest.json", "query.json"}) {
        EXPECT_EQ(read_file(dir / f), read_file(shipped / f)) << f;
    }
}

TEST(AdFixture, ShippedQueryParses) {
    const auto req = parse_request(read_file(source_dir() / "fixtures" / "ad" / "query.json"));
    EXPECT_EQ(req.query_graph, ad_query());
}

TEST(AdFixture, PopulationIsThreeThousandDrugs) {
    EXPECT_EQ(ad_store().type_count("biolink:Drug"), static_cast<std::size_t>(ad_population));
}
