#include "oracles.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>

namespace cm = clickmine;
using namespace testing_support;

namespace {

// One session per entry of `resources`; "" marks an unattributed action.
cm::UserTrace trace_with(const std::string& user, const std::vector<std::string>& resources, cm::LabelId label = 1)
{
    cm::UserTrace t;
    t.user = user;
    for (const auto& r : resources) {
        t.sequence.push_back(label);
        t.resources.push_back(r);
    }
    t.sessions = {{{}, {}, resources.size()}};
    return t;
}

std::vector<std::string> repeat(const std::string& r, std::size_t n) { return std::vector<std::string>(n, r); }

std::vector<std::string> concat(std::initializer_list<std::vector<std::string>> parts)
{
    std::vector<std::string> out;
    for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
}

cm::ResourceProfile profile(const std::string& name, std::vector<std::int64_t> per_cluster)
{
    cm::ResourceProfile p;
    p.resource = name;
    p.cluster_action_counts = Eigen::Map<cm::CountVector>(per_cluster.data(), static_cast<Eigen::Index>(per_cluster.size()));
    p.visits = static_cast<std::size_t>(p.cluster_action_counts.sum());
    return p;
}

struct ContrastCorpus {
    cm::SyntheticLog log;
    cm::Corpus corpus;
    std::unordered_map<std::string, std::size_t> cluster_of;
    std::vector<cm::ResourceProfile> profiles;
};

const ContrastCorpus& contrast()
{
    static const ContrastCorpus c = [] {
        ContrastCorpus out;
        auto archetypes = cm::parse_archetypes(contrast_archetypes_json, default_rules().vocabulary());
        cm::SynthOptions o;
        o.seed = 99;
        o.users_per_archetype = 150;
        out.log = cm::generate_synthetic_log(archetypes, default_rules(), o);
        out.corpus = corpus_of(out.log);
        for (const auto& u : out.log.truth.users) out.cluster_of[u.user] = u.archetype;
        const auto& v = out.corpus.vocabulary;
        auto att = cm::extract_resource_traces(out.corpus.traces, v.break_id());
        out.profiles = cm::aggregate_cluster_actions(out.corpus.traces, att, out.cluster_of, 2, v.size());
        return out;
    }();
    return c;
}

const cm::ResourceProfile& find(const std::vector<cm::ResourceProfile>& ps, const std::string& name)
{
    for (const auto& p : ps)
        if (p.resource == name) return p;
    throw std::runtime_error("no profile " + name);
}

}  // namespace

TEST(ExtractResourceTraces, EvenSplitAttributesBoth)
{
    std::vector<cm::UserTrace> t{trace_with("u", concat({repeat("CPT", 5), repeat("RXNORM", 5)}))};
    auto a = cm::extract_resource_traces(t, 0);
    EXPECT_EQ(a.size(), 2u);
    EXPECT_EQ(a["CPT"], std::vector<std::size_t>{0});
    EXPECT_EQ(a["RXNORM"], std::vector<std::size_t>{0});
}

TEST(ExtractResourceTraces, Threshold)
{
    std::vector<cm::UserTrace> t{trace_with("below", concat({repeat("X", 19), repeat("", 81)})),
                                 trace_with("at", concat({repeat("X", 20), repeat("", 80)}))};
    auto a = cm::extract_resource_traces(t, 0);
    EXPECT_EQ(a["X"], std::vector<std::size_t>{1});
}

TEST(ExtractResourceTraces, BreakIsNotAnAction)
{
    // four one-action sessions, one on X: 1 of 4 actions, three BREAKs between
    cm::UserTrace t;
    t.user = "u";
    t.sequence = {1, 9, 1, 9, 1, 9, 1};
    t.resources = {"X", "", "", "", "", "", ""};
    t.sessions.assign(4, cm::SessionSpan{{}, {}, 1});
    auto a = cm::extract_resource_traces(std::vector<cm::UserTrace>{t}, 9);
    EXPECT_EQ(a.count("X"), 1u);
    auto strict = cm::extract_resource_traces(std::vector<cm::UserTrace>{t}, 9, 26.0);
    EXPECT_EQ(strict.count("X"), 0u);
}

TEST(ExtractResourceTraces, MatchesRecountOracle)
{
    auto corpus = corpus_of(small_log(77, 40));
    const auto brk = corpus.vocabulary.break_id();
    std::vector<std::vector<std::string>> res;
    std::vector<std::vector<bool>> is_break;
    for (const auto& t : corpus.traces) {
        res.push_back(t.resources);
        std::vector<bool> b;
        for (auto l : t.sequence) b.push_back(l == brk);
        is_break.push_back(b);
    }
    for (double pct : {5.0, 20.0, 50.0}) {
        auto got = cm::extract_resource_traces(corpus.traces, brk, pct);
        auto want = oracle::recount_attribution(res, is_break, pct);
        EXPECT_EQ(got, want) << pct;
    }
}

TEST(ExtractResourceTraces, RaisingThresholdNeverAdds)
{
    auto corpus = corpus_of(small_log(78, 30));
    const auto brk = corpus.vocabulary.break_id();
    std::set<std::pair<std::string, std::size_t>> prev;
    bool first = true;
    for (double pct = 0.0; pct <= 100.0; pct += 5.0) {
        std::set<std::pair<std::string, std::size_t>> cur;
        for (const auto& [r, users] : cm::extract_resource_traces(corpus.traces, brk, pct))
            for (auto u : users) cur.insert({r, u});
        if (!first) {
            EXPECT_TRUE(std::includes(prev.begin(), prev.end(), cur.begin(), cur.end())) << pct;
        }
        prev = std::move(cur);
        first = false;
    }
}

TEST(AggregateClusterActions, SingleUserRank)
{
    std::vector<cm::UserTrace> t{trace_with("u", repeat("R", 17))};
    auto att = cm::extract_resource_traces(t, 9);
    auto p = cm::aggregate_cluster_actions(t, att, {{"u", 2}}, 4, 10);
    ASSERT_EQ(p.size(), 1u);
    EXPECT_EQ(p[0].cluster_action_counts, (cm::CountVector(4) << 0, 0, 17, 0).finished());
    EXPECT_EQ(p[0].cluster_rank[2], 1u);
    EXPECT_EQ(p[0].visits, 17u);
    EXPECT_EQ(p[0].user_count, 1u);
}

TEST(AggregateClusterActions, UnassignedUser)
{
    std::vector<cm::UserTrace> t{trace_with("u", repeat("R", 3))};
    auto att = cm::extract_resource_traces(t, 9);
    try {
        (void)cm::aggregate_cluster_actions(t, att, {{"someone else", 0}}, 2, 10);
        FAIL();
    } catch (const cm::Error& e) {
        EXPECT_EQ(e.code(), cm::Errc::unassigned_user);
    }
}

TEST(AggregateClusterActions, MatchesGeneratorTallies)
{
    auto log = small_log(79, 30);
    auto corpus = corpus_of(log);
    std::unordered_map<std::string, std::size_t> cluster_of;
    std::map<std::string, std::size_t> actions_of;
    for (const auto& u : log.truth.users) {
        cluster_of[u.user] = u.archetype;
        actions_of[u.user] = u.actions;
    }
    const auto brk = corpus.vocabulary.break_id();
    auto att = cm::extract_resource_traces(corpus.traces, brk);
    auto profiles = cm::aggregate_cluster_actions(corpus.traces, att, cluster_of, log.truth.archetypes.size(),
                                                  corpus.vocabulary.size());
    std::set<std::size_t> distinct;
    std::size_t user_sum = 0;
    for (const auto& p : profiles) {
        EXPECT_EQ(p.visits, log.truth.resource_actions.at(p.resource)) << p.resource;
        std::int64_t expect = 0;
        cm::CountVector per(static_cast<Eigen::Index>(log.truth.archetypes.size()));
        per.setZero();
        for (auto u : att.at(p.resource)) {
            const auto& user = corpus.traces[u].user;
            expect += static_cast<std::int64_t>(actions_of[user]);
            per(static_cast<Eigen::Index>(cluster_of[user])) += static_cast<std::int64_t>(actions_of[user]);
            distinct.insert(u);
        }
        EXPECT_EQ(p.cluster_action_counts.sum(), expect);
        EXPECT_EQ(p.cluster_action_counts, per);
        EXPECT_EQ(p.action_total, static_cast<std::size_t>(expect));
        user_sum += p.user_count;
    }
    EXPECT_GE(user_sum, distinct.size());
}

TEST(RankDescending, CompetitionWithIndexTies)
{
    cm::CountVector v(5);
    v << 3, 9, 3, 0, 9;
    EXPECT_EQ(cm::rank_descending(v), (std::vector<std::size_t>{3, 1, 4, 5, 2}));
}

TEST(TransitionDiff, IdenticalProfilesGiveZero)
{
    const auto& c = contrast();
    const auto& p = find(c.profiles, "GO");
    auto d = cm::transition_diff(p, p, c.corpus.vocabulary.break_id());
    EXPECT_EQ(d.diff.cwiseAbs().maxCoeff(), 0.0);
}

TEST(TransitionDiff, Antisymmetric)
{
    const auto& c = contrast();
    const auto brk = c.corpus.vocabulary.break_id();
    for (auto scale : {cm::DiffScale::probability, cm::DiffScale::log_ratio}) {
        auto ab = cm::transition_diff(find(c.profiles, "GO"), find(c.profiles, "RXNORM"), brk, 0.15, 10, scale);
        auto ba = cm::transition_diff(find(c.profiles, "RXNORM"), find(c.profiles, "GO"), brk, 0.15, 10, scale);
        EXPECT_EQ(ab.labels_shown, ba.labels_shown);
        EXPECT_TRUE(ab.diff == -ba.diff);
        if (scale == cm::DiffScale::probability) {
            EXPECT_LE(ab.diff.cwiseAbs().maxCoeff(), 1.0);
        }
    }
}

TEST(TransitionDiff, FlatResourceFavoursSearchToClass)
{
    const auto& c = contrast();
    const auto& v = c.corpus.vocabulary;
    auto d = cm::transition_diff(find(c.profiles, "RXNORM"), find(c.profiles, "GO"), v.break_id());
    auto pos = [&](const std::string& name) {
        auto it = std::find(d.labels_shown.begin(), d.labels_shown.end(), v.at(name));
        EXPECT_NE(it, d.labels_shown.end()) << name;
        return static_cast<Eigen::Index>(it - d.labels_shown.begin());
    };
    const double entry = d.diff(pos("Browse Search"), pos("Browse Ontology Class"));
    EXPECT_GE(entry, 0.1);
    EXPECT_LT(d.diff(pos("Browse Ontology Class"), pos("Browse Ontology Class Tree")), 0.0);
    EXPECT_EQ(std::count(d.labels_shown.begin(), d.labels_shown.end(), v.break_id()), 0);
    EXPECT_EQ(d.histogram_a, find(c.profiles, "RXNORM").label_counts);
}

TEST(TransitionDiff, TopLabelsByCombinedFrequency)
{
    const auto& c = contrast();
    const auto& a = find(c.profiles, "RXNORM");
    const auto& b = find(c.profiles, "GO");
    auto d = cm::transition_diff(a, b, c.corpus.vocabulary.break_id(), 0.15, 3);
    ASSERT_EQ(d.labels_shown.size(), 3u);
    const cm::CountVector combined = a.label_counts + b.label_counts;
    for (std::size_t i = 1; i < d.labels_shown.size(); ++i) {
        EXPECT_GE(combined(d.labels_shown[i - 1]), combined(d.labels_shown[i]));
    }
}

TEST(ProjectResources, TooFewResources)
{
    std::vector<cm::ResourceProfile> one{profile("A", {1, 2, 3})};
    try {
        (void)cm::project_resources(one);
        FAIL();
    } catch (const cm::Error& e) {
        EXPECT_EQ(e.code(), cm::Errc::too_few_resources);
    }
}

TEST(ProjectResources, IdenticalProfilesShareCoordinates)
{
    std::vector<cm::ResourceProfile> ps{profile("A", {5, 1, 0}), profile("B", {5, 1, 0}), profile("C", {0, 3, 9}),
                                        profile("D", {2, 2, 2})};
    auto land = cm::project_resources(ps);
    auto row = [&](const std::string& r) {
        auto it = std::find(land.resources.begin(), land.resources.end(), r);
        return land.coordinates.row(it - land.resources.begin());
    };
    EXPECT_LE((row("A") - row("B")).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_EQ(land.extremes.size(), land.model.rank());
}

TEST(ProjectResources, TranslationInvariant)
{
    std::mt19937_64 rng(3);
    std::vector<cm::ResourceProfile> ps, shifted;
    for (int i = 0; i < 8; ++i) {
        std::vector<std::int64_t> v(4), w(4);
        for (int k = 0; k < 4; ++k) {
            v[k] = static_cast<std::int64_t>(rng() % 100);
            w[k] = v[k] + 1000 * (k + 1);
        }
        ps.push_back(profile("R" + std::to_string(i), v));
        shifted.push_back(profile("R" + std::to_string(i), w));
        // keep the visit ordering identical in both sets
        shifted.back().visits = ps.back().visits;
    }
    auto a = cm::project_resources(ps);
    auto b = cm::project_resources(shifted);
    EXPECT_EQ(a.resources, b.resources);
    EXPECT_LE((a.coordinates - b.coordinates).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(ProjectResources, TopByVisits)
{
    std::vector<cm::ResourceProfile> ps{profile("small", {1, 0}), profile("big", {50, 40}), profile("mid", {9, 9})};
    auto land = cm::project_resources(ps, 2, 3);
    EXPECT_EQ(land.resources, (std::vector<std::string>{"big", "mid"}));
    EXPECT_EQ(land.coordinates.rows(), 2);
}

TEST(ProjectResources, FamiliesSeparateAlongFirstAxis)
{
    const auto& c = contrast();
    auto land = cm::project_resources(c.profiles, 50, 2);
    const std::set<std::string> tree{"GO", "DOID", "HP"};
    std::vector<double> t, f;
    for (std::size_t i = 0; i < land.resources.size(); ++i) {
        (tree.count(land.resources[i]) ? t : f).push_back(land.coordinates(static_cast<Eigen::Index>(i), 0));
    }
    ASSERT_EQ(t.size(), 3u);
    ASSERT_EQ(f.size(), 3u);
    auto mean = [](const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); };
    auto spread = [](const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()) - *std::min_element(v.begin(), v.end()); };
    EXPECT_GT(std::abs(mean(t) - mean(f)), std::max(spread(t), spread(f)));
}
