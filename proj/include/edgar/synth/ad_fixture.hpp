#pragma once

// Miniature Alzheimer's disease graph: the 14 lookup drugs, the 8 ChEBI-role
// groups and 12 graph targets they share, and the inferable drugs hanging off
// those targets. Background drugs pad every group to a chosen K so that each
// rule clears p0 = 1e-5 under the exact test, in a fixed p order.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "edgar/query.hpp"
#include "edgar/records.hpp"
#include "edgar/stats.hpp"
#include "edgar/synth/plant.hpp"

namespace edgar::synth {

inline constexpr std::int64_t ad_population = 3000;
inline constexpr const char* ad_curie = "MONDO:0004975";

struct NamedNode {
    const char* curie;
    const char* name;
};

struct LookupDrug {
    const char* curie;
    const char* name;
    const char* source;
};

inline constexpr LookupDrug ad_lookup_drugs[] = {
    {"CHEBI:57589", "O-acetyl-L-carnitine", "drugcentral"}, {"CHEBI:8874", "rivastigmine", "drugcentral"},
    {"CHEBI:9086", "(-)-selegiline", "hetionet"},           {"CHEBI:3048", "benzatropine", "hetionet"},
    {"CHEBI:15355", "acetylcholine", "drugmechdb"},         {"CHEBI:8888", "ropinirole", "hetionet"},
    {"CHEBI:64312", "memantine", "hetionet"},               {"CHEBI:8707", "quetiapine", "hetionet"},
    {"UNII:12PYH0FTU9", "LECANEMAB", "drugcentral"},         {"CHEBI:45980", "tacrine", "drugcentral"},
    {"CHEBI:5613", "haloperidol", "hetionet"},              {"UNII:105J35OE21", "ADUCANUMAB", "drugcentral"},
    {"CHEBI:42944", "galanthamine", "drugcentral"},         {"CHEBI:53289", "donepezil", "hetionet"},
};

inline constexpr NamedNode ad_inferable_drugs[] = {
    {"CHEBI:27953", "physostigmine"},
    {"CHEBI:553827", "bambuterol"},
    {"CHEBI:9150", "simvastatin"},
    {"CHEBI:8711", "quinacrine"},
    {"CHEBI:3510", "ceftibuten"},
    {"CHEBI:69478", "cannabidiol"},
    {"CHEBI:7514", "neostigmine"},
    {"CHEBI:45713", "trans-resveratrol"},
    {"CHEBI:4754", "econazole"},
    {"CHEBI:93248", "2-(6R,7R)-7-[[2-(2-amino-4-thiazolyl)-(carboxymethoxyimino)-1-oxoethyl]amino]-3-ethenyl-8-oxo-"
                    "5-thia-1-azabicyclo[4.2.0]oct-2-ene-2-carboxylic acid"},
};

/// One enrichment group of the fixture. Graph groups point drug -predicate-> target.
struct AdGroup {
    RuleKind kind;
    const char* target; // curie for graph groups, tag for property groups
    const char* target_name;
    const char* target_category;
    const char* predicate;
    std::vector<const char*> members;
    std::vector<const char*> inferable;
    std::int64_t fan_in; // K
};

inline constexpr const char* ad_property_key = "chebi_role";

inline const std::vector<AdGroup>& ad_groups() {
    using enum RuleKind;
    static const std::vector<AdGroup> groups = {
        {property, "neurotransmitter_agent", "neurotransmitter agent", nullptr, nullptr,
         {"CHEBI:3048", "CHEBI:64312", "CHEBI:15355", "CHEBI:8707", "CHEBI:5613", "CHEBI:8888", "CHEBI:8874", "CHEBI:42944"},
         {"CHEBI:27953"}, 93},
        {property, "antidyskinesia_agent", "antidyskinesia agent", nullptr, nullptr,
         {"CHEBI:64312", "CHEBI:8888", "CHEBI:5613", "CHEBI:3048"}, {}, 7},
        {property, "dopaminergic_agent", "dopaminergic agent", nullptr, nullptr,
         {"CHEBI:64312", "CHEBI:8888", "CHEBI:8707", "CHEBI:5613"}, {}, 17},
        {property, "antiparkinson_drug", "antiparkinson drug", nullptr, nullptr,
         {"CHEBI:64312", "CHEBI:8888", "CHEBI:3048"}, {}, 5},
        {property, "cholinergic_drug", "cholinergic drug", nullptr, nullptr,
         {"CHEBI:15355", "CHEBI:8874", "CHEBI:3048", "CHEBI:42944"}, {"CHEBI:27953", "CHEBI:7514"}, 23},
        {property, "central_nervous_system_drug", "central nervous system drug", nullptr, nullptr,
         {"CHEBI:3048", "CHEBI:64312", "CHEBI:8707", "CHEBI:5613", "CHEBI:8888"}, {}, 53},
        {property, "ec_3.1.1_carboxylic_ester_hydrolase_inhibitor", "EC 3.1.1 carboxylic ester hydrolase inhibitor",
         nullptr, nullptr, {"CHEBI:53289", "CHEBI:45980", "CHEBI:8874", "CHEBI:42944"},
         {"CHEBI:27953", "CHEBI:553827"}, 30},
        {property, "ec_3.1.1.8_cholinesterase_inhibitor", "EC 3.1.1.8 cholinesterase inhibitor", nullptr, nullptr,
         {"CHEBI:53289", "CHEBI:8874", "CHEBI:42944"}, {"CHEBI:27953", "CHEBI:553827", "CHEBI:7514"}, 10},

        {graph, "NCBIGene:100033901", "BCHE", "biolink:Gene", "biolink:decreases_activity_of",
         {"CHEBI:8874", "CHEBI:53289", "CHEBI:42944", "CHEBI:45980"}, {"CHEBI:27953", "CHEBI:553827", "CHEBI:45713"}, 8},
        {graph, "UniProtKB:P81908", "CHLE_HORSE Cholinesterase (sprot)", "biolink:Protein", "biolink:binds",
         {"CHEBI:8874", "CHEBI:53289", "CHEBI:42944", "CHEBI:45980"}, {"CHEBI:27953", "CHEBI:8711", "CHEBI:93248"}, 16},
        {graph, "MONDO:0005180", "Parkinson disease", "biolink:Disease", "biolink:ameliorates_condition",
         {"CHEBI:8874", "CHEBI:64312", "CHEBI:3048", "CHEBI:8888", "CHEBI:9086"}, {"CHEBI:69478"}, 40},
        {graph, "MONDO:0007488", "Lewy body dementia", "biolink:Disease", "biolink:treats",
         {"CHEBI:8874", "CHEBI:53289", "CHEBI:42944"}, {"CHEBI:9150"}, 6},
        {graph, "NCBIGene:11423", "Ache", "biolink:Gene", "biolink:decreases_activity_of",
         {"CHEBI:8874", "CHEBI:53289", "CHEBI:42944", "CHEBI:45980"}, {"CHEBI:27953", "CHEBI:7514", "CHEBI:8711"}, 22},
        {graph, "NCBIGene:43", "ACHE", "biolink:Gene", "biolink:binds",
         {"CHEBI:8874", "CHEBI:53289", "CHEBI:42944", "CHEBI:45980"}, {"CHEBI:27953", "CHEBI:7514"}, 22},
        {graph, "UniProtKB:P04058", "ACES_TETCF Acetylcholinesterase (sprot)", "biolink:Protein",
         "biolink:decreases_activity_of", {"CHEBI:8874", "CHEBI:53289", "CHEBI:42944", "CHEBI:45980"},
         {"CHEBI:27953", "CHEBI:4754"}, 22},
        {graph, "NCBIGene:590", "BCHE", "biolink:Gene", "biolink:affects_abundance_of",
         {"CHEBI:8874", "CHEBI:15355", "CHEBI:53289", "CHEBI:45980", "CHEBI:42944"},
         {"CHEBI:27953", "CHEBI:553827", "CHEBI:9150"}, 60},
        {graph, "NCBIGene:83817", "Ache", "biolink:Gene", "biolink:decreases_activity_of",
         {"CHEBI:8874", "CHEBI:53289", "CHEBI:42944", "CHEBI:45980"}, {"CHEBI:27953", "CHEBI:45713"}, 29},
        {graph, "NCBIGene:1145", "CHRNE", "biolink:Gene", "biolink:decreases_activity_of",
         {"CHEBI:53289", "CHEBI:42944", "CHEBI:45980"}, {"CHEBI:7514"}, 9},
        {graph, "NCBIGene:25229", "Chrm1", "biolink:Gene", "biolink:related_to",
         {"CHEBI:15355", "CHEBI:3048", "CHEBI:45980", "CHEBI:8707", "CHEBI:5613"}, {"CHEBI:3510"}, 66},
        {graph, "NCBIGene:25111", "Chrm4", "biolink:Gene", "biolink:related_to",
         {"CHEBI:8707", "CHEBI:15355", "CHEBI:5613", "CHEBI:45980"}, {"CHEBI:93248", "CHEBI:69478"}, 32},
        // Shared by only two answers and common enough to stay above p0.
        {graph, "NCBIGene:351", "APP", "biolink:Gene", "biolink:binds", {"UNII:12PYH0FTU9", "UNII:105J35OE21"}, {}, 5},
    };
    return groups;
}

inline nlohmann::json ad_predicate_ontology() {
    const std::pair<const char*, const char*> links[] = {
        {"biolink:affects", "biolink:related_to"},
        {"biolink:affects_activity_of", "biolink:affects"},
        {"biolink:decreases_activity_of", "biolink:affects_activity_of"},
        {"biolink:affects_abundance_of", "biolink:affects"},
        {"biolink:interacts_with", "biolink:related_to"},
        {"biolink:physically_interacts_with", "biolink:interacts_with"},
        {"biolink:binds", "biolink:physically_interacts_with"},
        {"biolink:treats_or_applied_or_studied_to_treat", "biolink:related_to"},
        {"biolink:treats", "biolink:treats_or_applied_or_studied_to_treat"},
        {"biolink:ameliorates_condition", "biolink:treats_or_applied_or_studied_to_treat"},
        {"biolink:in_taxon", "biolink:related_to"},
        {"biolink:has_adverse_event", "biolink:related_to"},
        {"biolink:causes_adverse_event", "biolink:has_adverse_event"},
        {"biolink:contraindicated_for", "biolink:related_to"},
        {"biolink:contributes_to", "biolink:related_to"},
        {"biolink:causes", "biolink:contributes_to"},
        {"biolink:biomarker_for", "biolink:related_to"},
        {"biolink:genetically_associated_with", "biolink:related_to"},
        {"biolink:mentions", "biolink:related_to"},
    };
    nlohmann::json parents = nlohmann::json::object();
    for (const auto& [child, parent] : links) parents[child] = nlohmann::json::array({parent});
    return {{"roots", nlohmann::json::array({"biolink:related_to"})}, {"parents", parents}};
}

inline nlohmann::json ad_category_ontology() {
    const std::pair<const char*, const char*> links[] = {
        {"biolink:BiologicalEntity", "biolink:NamedThing"},
        {"biolink:ChemicalEntity", "biolink:NamedThing"},
        {"biolink:Drug", "biolink:ChemicalEntity"},
        {"biolink:Gene", "biolink:BiologicalEntity"},
        {"biolink:Protein", "biolink:BiologicalEntity"},
        {"biolink:DiseaseOrPhenotypicFeature", "biolink:BiologicalEntity"},
        {"biolink:Disease", "biolink:DiseaseOrPhenotypicFeature"},
        {"biolink:PhenotypicFeature", "biolink:DiseaseOrPhenotypicFeature"},
        {"biolink:BiologicalProcessOrActivity", "biolink:BiologicalEntity"},
        {"biolink:OrganismTaxon", "biolink:NamedThing"},
        {"biolink:Publication", "biolink:NamedThing"},
    };
    nlohmann::json parents = nlohmann::json::object();
    for (const auto& [child, parent] : links) parents[child] = nlohmann::json::array({parent});
    return {{"roots", nlohmann::json::array({"biolink:NamedThing"})}, {"parents", parents}};
}

struct AdFixture {
    std::vector<NodeRecord> nodes;
    std::vector<EdgeRecord> edges;
    nlohmann::json predicate_ontology;
    nlohmann::json category_ontology;
    nlohmann::json manifest;
    QueryRequest query;
};

/// ad_fixture(): fully deterministic; no randomness involved.
inline AdFixture ad_fixture() {
    AdFixture fx;
    fx.predicate_ontology = ad_predicate_ontology();
    fx.category_ontology = ad_category_ontology();
    std::map<std::string, std::size_t> index;
    auto add_node = [&](const std::string& id, const std::string& name, std::vector<std::string> cats) {
        NodeRecord n;
        n.id = Curie::parse(id);
        n.name = name;
        n.categories = std::move(cats);
        index[id] = fx.nodes.size();
        fx.nodes.push_back(std::move(n));
    };
    auto add_edge = [&](const std::string& s, const std::string& p, const std::string& o, const std::string& source) {
        EdgeRecord e;
        e.subject = Curie::parse(s);
        e.predicate = p;
        e.object = Curie::parse(o);
        e.source = source;
        fx.edges.push_back(std::move(e));
    };
    const std::vector<std::string> drug = {"biolink:Drug", "biolink:ChemicalEntity"};

    add_node(ad_curie, "Alzheimer disease", {"biolink:Disease"});
    add_node("NCBITaxon:9606", "Homo sapiens", {"biolink:OrganismTaxon"});
    add_node("HP:0002018", "Nausea", {"biolink:PhenotypicFeature"});
    for (const auto& d : ad_lookup_drugs) add_node(d.curie, d.name, drug);
    for (const auto& d : ad_inferable_drugs) add_node(d.curie, d.name, drug);
    const auto named_drugs = static_cast<std::int64_t>(std::size(ad_lookup_drugs) + std::size(ad_inferable_drugs));
    std::vector<std::string> background;
    for (std::int64_t i = 1; i <= ad_population - named_drugs; ++i) {
        const auto num = detail::padded(i, 4);
        background.push_back("FIXTURE:bg_drug_" + num);
        add_node(background.back(), "background drug " + num, drug);
    }
    for (const auto& g : ad_groups()) {
        if (g.kind == RuleKind::graph && !index.contains(g.target)) add_node(g.target, g.target_name, {g.target_category});
    }

    for (const auto& d : ad_lookup_drugs) {
        add_edge(d.curie, "biolink:treats", ad_curie, d.source);
        // Shared by every answer but filtered: excluded node, excluded predicate.
        add_edge(d.curie, "biolink:in_taxon", "NCBITaxon:9606", "fixture");
        add_edge(d.curie, "biolink:has_adverse_event", "HP:0002018", "fixture");
    }

    nlohmann::json groups = nlohmann::json::array();
    std::size_t cursor = 0;
    for (const auto& g : ad_groups()) {
        std::vector<std::string> holders(g.members.begin(), g.members.end());
        holders.insert(holders.end(), g.inferable.begin(), g.inferable.end());
        const auto padding = g.fan_in - static_cast<std::int64_t>(holders.size());
        std::vector<std::string> padded_with;
        for (std::int64_t i = 0; i < padding; ++i) padded_with.push_back(background.at(cursor++));
        holders.insert(holders.end(), padded_with.begin(), padded_with.end());
        for (const auto& h : holders) {
            if (g.kind == RuleKind::graph) {
                add_edge(h, g.predicate, g.target, "fixture");
            } else {
                auto& tags = fx.nodes[index.at(h)].properties[ad_property_key];
                tags.push_back(g.target);
                std::sort(tags.begin(), tags.end());
            }
        }
        const auto k = static_cast<std::int64_t>(g.members.size());
        const stats::EnrichmentCounts counts{ad_population, g.fan_in, static_cast<std::int64_t>(std::size(ad_lookup_drugs)), k};
        nlohmann::json jg = {{"kind", std::string(to_string(g.kind))},
                             {"target_name", g.target_name},
                             {"members", g.members},
                             {"inferable", g.inferable},
                             {"background_holders", padding},
                             {"counts", {{"N", counts.population_n}, {"K", counts.successes_k},
                                         {"n", counts.draws}, {"k", counts.observed}}},
                             {"p_exact", stats::hypergeom_sf_exact(counts).value}};
        if (g.kind == RuleKind::graph) {
            jg["target"] = g.target;
            jg["predicate"] = g.predicate;
            jg["direction"] = "out";
        } else {
            jg["property_key"] = ad_property_key;
            jg["tag"] = g.target;
        }
        groups.push_back(std::move(jg));
    }

    nlohmann::json lookup = nlohmann::json::array();
    for (const auto& d : ad_lookup_drugs) lookup.push_back(d.curie);
    nlohmann::json inferable = nlohmann::json::array();
    for (const auto& d : ad_inferable_drugs) inferable.push_back(d.curie);
    fx.manifest = {{"fixture", "ad"},
                   {"anchor", ad_curie},
                   {"answer_type", "biolink:Drug"},
                   {"population_N", ad_population},
                   {"background_drugs", background.size()},
                   {"lookup", lookup},
                   {"inferable", inferable},
                   {"groups", groups},
                   {"filtered_commonalities",
                    {{"excluded_node", "NCBITaxon:9606 via biolink:in_taxon"},
                     {"excluded_predicate", "HP:0002018 via biolink:has_adverse_event"}}}};
    fx.query.query_graph = make_template_query("drug-treats-disease", Curie::parse(ad_curie));
    return fx;
}

inline Store make_store(const AdFixture& fx, bool expand = true) {
    return make_store(fx.predicate_ontology, fx.category_ontology, fx.nodes, fx.edges, expand);
}

/// Writes the raw fixture inputs plus manifest.json and query.json.
inline void write_ad_fixture(const AdFixture& fx, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    auto open = [&](const char* name) {
        std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
        if (!out) throw IngestError("cannot write " + (dir / name).string());
        return out;
    };
    {
        auto out = open("nodes.jsonl");
        for (const auto& n : fx.nodes) out << node_to_json(n).dump() << '\n';
    }
    {
        auto out = open("edges.jsonl");
        for (const auto& e : fx.edges) out << edge_to_json(e).dump() << '\n';
    }
    open("predicate_ontology.json") << fx.predicate_ontology.dump(2) << '\n';
    open("category_ontology.json") << fx.category_ontology.dump(2) << '\n';
    open("manifest.json") << fx.manifest.dump(2) << '\n';
    open("query.json") << request_to_json(fx.query).dump(2) << '\n';
}

} // namespace edgar::synth
