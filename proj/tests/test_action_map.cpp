#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>

namespace cm = clickmine;
using namespace testing_support;

namespace {

std::optional<std::string> label_of(std::string_view method, const std::string& path, const cm::RuleSet& rs)
{
    auto m = cm::map_request(method, path, rs);
    if (!m) return std::nullopt;
    return rs.vocabulary().name(m->label);
}

cm::Errc compile_error(std::string_view text)
{
    try {
        (void)cm::compile_ruleset(text);
    } catch (const cm::Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error for: " << text;
    return cm::Errc::io;
}

struct Witness {
    std::string_view method;
    std::string path;
    std::string_view label;
};

// One request per interface label, written against the URL conventions.
const std::vector<Witness>& witnesses()
{
    static const std::vector<Witness> w = {
        {"GET", "/", "Browse Main Page"},
        {"GET", "/ontologies", "Browse Ontologies"},
        {"GET", "/search", "Browse Search"},
        {"GET", "/help/faq", "Browse Help"},
        {"GET", "/mappings", "Browse Mappings"},
        {"GET", "/recommender", "Browse Recommender"},
        {"POST", "/annotator", "Browse Annotator"},
        {"GET", "/resource_index/resources", "Browse Resource Index"},
        {"GET", "/projects/NCBO", "Browse Projects"},
        {"GET", "/notes/123", "Browse Notes"},
        {"GET", "/ontologies/NCIT", "Ontology Summary"},
        {"GET", "/ontologies/NCIT/classes", "Browse Ontology Classes"},
        {"GET", "/ontologies/NCIT/classes/C12345", "Browse Ontology Class"},
        {"GET", "/ontologies/NCIT/classes/C12345/tree", "Browse Ontology Class Tree"},
        {"GET", "/ontologies/NCIT/mappings", "Browse Ontology Mappings"},
        {"GET", "/ontologies/NCIT/analytics", "Ontology Analytics"},
        {"GET", "/ontologies/NCIT/widgets", "Browse Ontology Widgets"},
        {"GET", "/ontologies/NCIT/visualize", "Browse Ontology Visualization"},
        {"GET", "/ontologies/NCIT/notes", "Browse Ontology Notes"},
        {"GET", "/ontologies/NCIT/properties", "Browse Ontology Properties"},
        {"GET", "/ontologies/NCIT/widgets/jump_to", "Browse Widgets"},
        {"GET", "/ontologies/NCIT/properties/tree", "Browse Ontology Property Tree"},
        {"GET", "/ontologies/NCIT/classes/C12345/notes", "Browse Class Notes"},
        {"GET", "/ontologies/new", "Create Ontology Submission"},
        {"POST", "/validate_ontology_file", "Validate Ontology File"},
        {"GET", "/virtual_appliance", "Virtual Appliance Download"},
        {"GET", "/ontologies/NCIT/submissions/4", "Browse Ontology Submission"},
        {"GET", "/login", "Login"},
        {"GET", "/logout", "Log-Out"},
        {"GET", "/accounts/new", "Sign-Up"},
        {"GET", "/lost_pass", "Lost Password"},
        {"GET", "/accounts/alice", "Browse Account"},
        {"POST", "/feedback", "Feedback"},
    };
    return w;
}

}  // namespace

TEST(CompileRuleset, DefaultHas34Labels)
{
    const auto& rs = default_rules();
    EXPECT_EQ(rs.vocabulary().size(), 34u);
    EXPECT_EQ(rs.vocabulary().name(rs.vocabulary().break_id()), "BREAK");
    std::size_t control = 0;
    for (const auto& l : rs.vocabulary().labels()) {
        EXPECT_EQ(l.id, &l - rs.vocabulary().labels().data());
        control += l.category == cm::LabelCategory::control ? 1 : 0;
    }
    EXPECT_EQ(control, 1u);
}

TEST(CompileRuleset, SingleRule)
{
    auto rs = cm::compile_ruleset("GET ^/$ => Browse Main Page\n");
    EXPECT_EQ(rs.size(), 1u);
    EXPECT_EQ(rs.vocabulary().size(), 2u);
    EXPECT_TRUE(rs.vocabulary().find("Browse Main Page"));
    EXPECT_TRUE(rs.vocabulary().find("BREAK"));
    EXPECT_EQ(label_of("GET", "/", rs), "Browse Main Page");
    EXPECT_EQ(label_of("POST", "/", rs), std::nullopt);
}

TEST(CompileRuleset, Errors)
{
    EXPECT_EQ(compile_error("GET ([ => Browse Main Page\n"), cm::Errc::bad_pattern);
    EXPECT_EQ(compile_error("GET ^/$ => Browse Everything\n"), cm::Errc::unknown_label);
    EXPECT_EQ(compile_error("# only comments\n\n"), cm::Errc::empty_ruleset);
    EXPECT_EQ(compile_error("GET ^/$ Browse Main Page\n"), cm::Errc::bad_pattern);
}

TEST(CompileRuleset, ErrorNamesLine)
{
    try {
        (void)cm::compile_ruleset("GET ^/$ => Browse Main Page\n# x\n* ([ => Login\n");
        FAIL();
    } catch (const cm::Error& e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    }
}

TEST(MapRequest, SessionExamplePairs)
{
    const auto& rs = default_rules();
    EXPECT_EQ(label_of("GET", "/", rs), "Browse Main Page");
    EXPECT_EQ(label_of("GET", "/login", rs), "Login");
    EXPECT_EQ(label_of("POST", "/login", rs), "Login");
    EXPECT_EQ(label_of("GET", "/ontologies/MCCV", rs), "Ontology Summary");
    EXPECT_EQ(label_of("GET", "/ontologies/MCCV/submissions/new", rs), "Create Ontology Submission");
    EXPECT_EQ(label_of("POST", "/ontologies/MCCV/submissions", rs), "Create Ontology Submission");
    EXPECT_EQ(label_of("GET", "/ontologies/success/MCCV", rs), "Create Ontology Submission");
}

TEST(MapRequest, UnmappedPaths)
{
    const auto& rs = default_rules();
    EXPECT_EQ(label_of("GET", "/favicon.ico", rs), std::nullopt);
    EXPECT_EQ(label_of("GET", "/robots.txt", rs), std::nullopt);
    EXPECT_EQ(label_of("GET", "/ontologies/A/unknown/x", rs), std::nullopt);
}

TEST(MapRequest, OntologyAttribution)
{
    const auto& rs = default_rules();
    auto m = cm::map_request("GET", "/ontologies/RXNORM/classes/123", rs);
    ASSERT_TRUE(m);
    EXPECT_EQ(m->ontology, "RXNORM");
    // edit-content labels capture the acronym but are not attributed
    auto e = cm::map_request("GET", "/ontologies/MCCV/submissions/new", rs);
    ASSERT_TRUE(e);
    EXPECT_EQ(e->ontology, "");
    EXPECT_EQ(cm::map_request("GET", "/search", rs)->ontology, "");
}

TEST(MapRequest, EveryLabelHasAWitness)
{
    const auto& rs = default_rules();
    std::vector<std::string> covered;
    for (const auto& w : witnesses()) {
        EXPECT_EQ(label_of(w.method, w.path, rs), std::string(w.label)) << w.method << ' ' << w.path;
        covered.emplace_back(w.label);
    }
    for (const auto& l : rs.vocabulary().labels()) {
        if (l.id == rs.vocabulary().break_id()) continue;
        EXPECT_NE(std::find(covered.begin(), covered.end(), l.name), covered.end()) << l.name;
    }
}

TEST(MapRequest, Deterministic)
{
    const auto& rs = default_rules();
    for (const auto& w : witnesses()) {
        auto a = cm::map_request(w.method, w.path, rs);
        auto b = cm::map_request(w.method, w.path, rs);
        ASSERT_EQ(a.has_value(), b.has_value());
        if (a) {
            EXPECT_EQ(a->label, b->label);
            EXPECT_EQ(a->ontology, b->ontology);
        }
    }
}

TEST(MapRequest, FirstMatchWinsForOverlappingRules)
{
    auto specific_first = cm::compile_ruleset("* ^/ontologies/[^/]+$ => Ontology Summary\n* ^/ontologies => Browse Ontologies\n");
    auto general_first = cm::compile_ruleset("* ^/ontologies => Browse Ontologies\n* ^/ontologies/[^/]+$ => Ontology Summary\n");
    EXPECT_EQ(label_of("GET", "/ontologies/GO", specific_first), "Ontology Summary");
    EXPECT_EQ(label_of("GET", "/ontologies/GO", general_first), "Browse Ontologies");
}

TEST(MapRequest, DisjointRulesCommute)
{
    const std::string a = "* ^/help(/.*)?$ => Browse Help\n";
    const std::string b = "* ^/search(/.*)?$ => Browse Search\n";
    const std::string c = "GET ^/$ => Browse Main Page\n";
    std::vector<std::string> parts{a, b, c};
    std::sort(parts.begin(), parts.end());
    std::vector<std::optional<std::string>> reference;
    bool first = true;
    do {
        auto rs = cm::compile_ruleset(parts[0] + parts[1] + parts[2]);
        std::vector<std::optional<std::string>> got;
        for (std::string p : {"/", "/help", "/help/x", "/search", "/searching", "/other"}) got.push_back(label_of("GET", p, rs));
        if (first) reference = got;
        EXPECT_EQ(got, reference);
        first = false;
    } while (std::next_permutation(parts.begin(), parts.end()));
}

TEST(MapRequest, DefaultRulesOrderedSpecificFirst)
{
    // Whenever two default rules both match a witness, the earlier rule must
    // produce the witness's intended label.
    const auto& rs = default_rules();
    for (const auto& w : witnesses()) {
        std::vector<std::string> hits;
        for (const auto& rule : rs.rules()) {
            if (rule.method && *rule.method != w.method) continue;
            if (boost::regex_search(w.path, rule.regex)) hits.push_back(rs.vocabulary().name(rule.label));
        }
        ASSERT_FALSE(hits.empty()) << w.path;
        EXPECT_EQ(hits.front(), w.label) << w.path;
    }
}
