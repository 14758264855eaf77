#include <gtest/gtest.h>

#include "edgar/synth/oracle.hpp"
#include "edgar/synth/plant.hpp"
#include "test_util.hpp"

using namespace edgar;
using namespace edgar::testing;

namespace {

const ResultMessage& ad_result() {
    static const ResultMessage msg = run_pipeline(ad_store(), ad_query(), PipelineConfig{});
    return msg;
}

bool holds_target(const Store& store, const EnrichmentRule& rule, const Curie& c) {
    const NodeIx ix = store.require(c);
    if (rule.target.kind == RuleKind::property) return store.node(ix).has_tag(rule.target.key, rule.target.tag);
    // the candidate sits at the far end of the rule's edge, seen from the target
    for (const auto& n : store.neighbors(rule.target.node, std::set<std::string>{rule.target.predicate},
                                         reverse(rule.target.direction))) {
        if (n.other == c) return true;
    }
    return false;
}

} // namespace

TEST(Lookup, AdFixtureFourteenAnswers) {
    const auto& l = ad_result().lookup;
    EXPECT_EQ(l.n(), 14u);
    for (const char* id : {"CHEBI:8874", "CHEBI:53289", "CHEBI:42944"}) {
        EXPECT_TRUE(l.contains(Curie::parse(id))) << id;
    }
    EXPECT_TRUE(std::is_sorted(l.answers.begin(), l.answers.end()));
}

TEST(Lookup, AnswersAdjacentAndTyped) {
    const auto& s = ad_store();
    const auto& l = ad_result().lookup;
    for (const auto& a : l.answers) {
        EXPECT_TRUE(s.has_category(s.require(a), "biolink:Drug"));
        bool adjacent = false;
        for (const auto& n : s.neighbors(a, std::set<std::string>{"biolink:treats"}, Direction::out)) {
            adjacent |= n.other == l.anchor;
        }
        EXPECT_TRUE(adjacent) << a;
    }
}

TEST(Lookup, NoMatchingEdgesGivesEmpty) {
    const auto q = make_template_query("drug-treats-disease", Curie::parse("HP:0002018"));
    const auto msg = run_pipeline(ad_store(), q, PipelineConfig{});
    EXPECT_EQ(msg.lookup.n(), 0u);
    EXPECT_TRUE(msg.rules.empty());
    EXPECT_TRUE(msg.candidates.empty());
}

TEST(Lookup, UnknownAnchorIsNotFoundWithStage) {
    const auto q = make_template_query("drug-treats-disease", Curie::parse("MONDO:00004975"));
    try {
        run_pipeline(ad_store(), q, PipelineConfig{});
        FAIL();
    } catch (const NotFoundError& e) {
        EXPECT_EQ(e.stage(), "lookup");
    }
}

TEST(Lookup, EmptyStoreIsValidationError) {
    const Store empty(small_predicates(), small_categories(), {}, {});
    try {
        run_pipeline(empty, make_template_query("drug-treats-disease", Curie::parse("X:1")), PipelineConfig{});
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.stage(), "lookup");
    }
}

TEST(Lookup, UnknownPredicateRejected) {
    auto q = ad_query();
    q.edges["e0"].predicates = {"biolink:cures"};
    EXPECT_THROW(lookup(ad_store(), q), ValidationError);
}

TEST(Enrich, RuleInvariants) {
    const auto& msg = ad_result();
    const PipelineConfig cfg;
    ASSERT_FALSE(msg.rules.empty());
    EXPECT_LE(msg.rules.size(), static_cast<std::size_t>(cfg.max_rules));
    for (std::size_t i = 0; i < msg.rules.size(); ++i) {
        const auto& r = msg.rules[i];
        EXPECT_LT(r.p.value, cfg.p0);
        EXPECT_GE(r.counts.observed, 2);
        EXPECT_EQ(static_cast<std::size_t>(r.counts.observed), r.members.size());
        EXPECT_EQ(static_cast<std::size_t>(r.counts.draws), msg.lookup.n());
        EXPECT_EQ(r.counts.population_n, synth::ad_population);
        EXPECT_EQ(r.p.value, stats::hypergeom_sf_exact(r.counts).value);
        if (r.target.kind == RuleKind::graph) EXPECT_NE(r.target.node, msg.lookup.anchor);
        for (const auto& m : r.members) {
            EXPECT_TRUE(msg.lookup.contains(m));
            EXPECT_TRUE(holds_target(ad_store(), r, m)) << r.target.canonical() << " " << m;
        }
        if (i > 0) {
            const auto& q = msg.rules[i - 1];
            EXPECT_TRUE(q.p.value < r.p.value ||
                        (q.p.value == r.p.value && q.target.canonical() < r.target.canonical()));
        }
    }
}

TEST(Enrich, ExcludedPredicatesAndNodesNeverAppear) {
    const auto& msg = ad_result();
    const PipelineConfig cfg;
    const auto& preds = ad_store().predicates();
    const auto excluded = preds.descendant_closure({cfg.predicate_exclusions.begin(), cfg.predicate_exclusions.end()});
    for (const auto& r : msg.rules) {
        if (r.target.kind != RuleKind::graph) continue;
        EXPECT_FALSE(excluded[preds.id_of(r.target.predicate)]) << r.target.canonical();
        EXPECT_FALSE(cfg.node_exclusions.contains(r.target.node.str())) << r.target.canonical();
        EXPECT_NE(r.target.node.str(), "HP:0002018");
    }
}

TEST(Enrich, NeurotransmitterAgentLeadsPropertyRules) {
    for (const auto& r : ad_result().rules) {
        if (r.target.kind != RuleKind::property) continue;
        EXPECT_EQ(r.target.tag, "neurotransmitter_agent");
        EXPECT_EQ(r.counts.observed, 8);
        EXPECT_EQ(r.counts.draws, 14);
        break;
    }
}

TEST(Enrich, SingleAnswerGivesNoRules) {
    LookupResult l = ad_result().lookup;
    l.answers.resize(1);
    EnrichmentSummary sum;
    EXPECT_TRUE(enrich(ad_store(), l, PipelineConfig{}, &sum).empty());
    EXPECT_EQ(sum.tested, 0u);
}

TEST(Enrich, TinyThresholdGivesNothing) {
    PipelineConfig cfg;
    cfg.p0 = 1e-300;
    const auto msg = run_pipeline(ad_store(), ad_query(), cfg);
    EXPECT_TRUE(msg.rules.empty());
    EXPECT_TRUE(msg.candidates.empty());
    EXPECT_EQ(msg.lookup.n(), 14u);
}

TEST(Enrich, MaxRulesKeepsPrefix) {
    PipelineConfig cfg;
    cfg.max_rules = 5;
    const auto capped = run_pipeline(ad_store(), ad_query(), cfg);
    ASSERT_EQ(capped.rules.size(), 5u);
    for (std::size_t i = 0; i < 5; ++i) {
        EXPECT_EQ(capped.rules[i].target.canonical(), ad_result().rules[i].target.canonical());
    }
    EXPECT_EQ(capped.enrichment.passed, ad_result().enrichment.passed);
}

TEST(Enrich, InvalidConfigRejected) {
    PipelineConfig cfg;
    cfg.p0 = 0;
    cfg.max_rules = 0;
    try {
        run_pipeline(ad_store(), ad_query(), cfg);
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.problems().size(), 2u);
    }
}

TEST(Infer, CandidateInvariants) {
    const auto& msg = ad_result();
    const PipelineConfig cfg;
    const auto& s = ad_store();
    ASSERT_FALSE(msg.candidates.empty());
    for (std::size_t i = 0; i < msg.candidates.size(); ++i) {
        const auto& c = msg.candidates[i];
        ASSERT_FALSE(c.supporting_rules.empty());
        double best = 1.0;
        for (const auto& sr : c.supporting_rules) {
            const auto& r = msg.rules.at(sr.rule_index);
            best = std::min(best, r.p.value);
            EXPECT_TRUE(holds_target(s, r, c.id)) << c.id << " " << r.target.canonical();
            EXPECT_FALSE(sr.path.empty());
        }
        EXPECT_EQ(c.best_p, best);
        EXPECT_EQ(c.in_lookup, msg.lookup.contains(c.id));
        EXPECT_TRUE(s.has_category(s.require(c.id), "biolink:Drug"));
        EXPECT_FALSE(cfg.node_exclusions.contains(c.id.str()));
        EXPECT_NE(c.id, msg.lookup.anchor);
        if (i > 0) {
            const auto& p = msg.candidates[i - 1];
            EXPECT_TRUE(p.best_p < c.best_p || (p.best_p == c.best_p && p.id < c.id));
        }
    }
}

TEST(Infer, PhysostigmineIsTopNewCandidate) {
    const auto& msg = ad_result();
    const InferredCandidate* top = nullptr;
    for (const auto& c : msg.candidates) {
        if (!c.in_lookup) {
            top = &c;
            break;
        }
    }
    ASSERT_NE(top, nullptr);
    EXPECT_EQ(top->id.str(), "CHEBI:27953");
    EXPECT_GE(top->supporting_rules.size(), 11u);
    bool has_property = false;
    bool has_graph = false;
    for (const auto& sr : top->supporting_rules) {
        const auto& t = msg.rules[sr.rule_index].target;
        has_property |= t.kind == RuleKind::property && t.tag == "neurotransmitter_agent";
        has_graph |= t.kind == RuleKind::graph;
    }
    EXPECT_TRUE(has_property);
    EXPECT_TRUE(has_graph);
}

TEST(Infer, ExcludingLookupDropsFlaggedRows) {
    PipelineConfig cfg;
    cfg.include_lookup_in_results = false;
    const auto msg = run_pipeline(ad_store(), ad_query(), cfg);
    std::size_t flagged = 0;
    for (const auto& c : ad_result().candidates) flagged += c.in_lookup ? 1 : 0;
    EXPECT_GT(flagged, 0u);
    EXPECT_EQ(msg.candidates.size(), ad_result().candidates.size() - flagged);
    for (const auto& c : msg.candidates) EXPECT_FALSE(c.in_lookup);
}

TEST(Infer, NoRulesNoCandidates) {
    EXPECT_TRUE(infer(ad_store(), ad_result().lookup, {}, PipelineConfig{}).empty());
}

TEST(Pipeline, ThreadCountDoesNotChangeOutput) {
    for (unsigned threads : {1u, 2u, 7u}) {
        PipelineConfig cfg;
        cfg.threads = threads;
        const auto msg = run_pipeline(ad_store(), ad_query(), cfg);
        EXPECT_EQ(render_json(ad_store(), msg), render_json(ad_store(), ad_result())) << threads;
    }
}

TEST(Pipeline, DisconnectedUnrelatedNodesChangeNothing) {
    auto fx = synth::ad_fixture();
    for (int i = 0; i < 200; ++i) {
        const std::string a = "NOISE:a" + std::to_string(i);
        const std::string b = "NOISE:b" + std::to_string(i);
        fx.nodes.push_back(node(a, "noise", "biolink:Publication"));
        fx.nodes.push_back(node(b, "noise", "biolink:Publication"));
        fx.edges.push_back(edge(a, "biolink:related_to", b));
    }
    const auto bigger = synth::make_store(fx);
    const auto msg = run_pipeline(bigger, ad_query(), PipelineConfig{});
    EXPECT_EQ(render_json(bigger, msg), render_json(ad_store(), ad_result()));
}

TEST(Pipeline, LookupOfOneYieldsNoRules) {
    auto g = synth::generate(synth::PlantSpec{.seed = 3, .answer_count = 1, .targets = {}, .noise_nodes = 20, .noise_edges = 30});
    const auto store = synth::make_store(g);
    const auto msg = run_pipeline(store, g.query.query_graph, PipelineConfig{});
    EXPECT_EQ(msg.lookup.n(), 1u);
    EXPECT_TRUE(msg.rules.empty());
    EXPECT_TRUE(msg.candidates.empty());
}

TEST(Pipeline, MatchesBruteForceOnSmallGraph) {
    synth::PlantSpec spec;
    spec.seed = 11;
    spec.answer_count = 6;
    spec.targets = {{RuleKind::graph, 5, 4, 1}, {RuleKind::property, 4, 3, 1}};
    spec.noise_nodes = 60;
    spec.noise_edges = 150;
    const auto g = synth::generate(spec);
    const auto store = synth::make_store(g);
    PipelineConfig cfg;
    cfg.p0 = 0.05;
    const auto msg = run_pipeline(store, g.query.query_graph, cfg);
    const auto oracle = synth::brute_force_oracle(store, msg.lookup, cfg);
    ASSERT_EQ(msg.rules.size(), oracle.rules.size());
    for (std::size_t i = 0; i < msg.rules.size(); ++i) {
        EXPECT_EQ(msg.rules[i].target.canonical(), oracle.rules[i].target.canonical());
        EXPECT_EQ(msg.rules[i].counts, oracle.rules[i].counts);
        EXPECT_EQ(msg.rules[i].members, oracle.rules[i].members);
    }
    ASSERT_EQ(msg.candidates.size(), oracle.candidates.size());
    for (std::size_t i = 0; i < msg.candidates.size(); ++i) EXPECT_EQ(msg.candidates[i].id, oracle.candidates[i].id);
}
