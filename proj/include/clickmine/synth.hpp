#pragma once
#ifndef CLICKMINE_SYNTH_HPP
#define CLICKMINE_SYNTH_HPP

// Seeded synthetic access-log generator driven by behaviour archetypes.

#include "clickmine/action_map.hpp"
#include "clickmine/error.hpp"
#include "clickmine/log_ingest.hpp"
#include "clickmine/markov.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <ostream>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace clickmine {

/// Shifted geometric: min + G with G geometric on {0, 1, ...}; mean >= min.
struct LengthDistribution {
    double mean = 1.0;
    std::size_t min = 1;

    /// Continuation probability of the geometric part.
    [[nodiscard]] double q() const
    {
        const double extra = mean - static_cast<double>(min);
        return extra / (extra + 1.0);
    }
    /// P(L > t)
    [[nodiscard]] double survival(std::size_t t) const
    {
        if (t < min) return 1.0;
        return std::pow(q(), static_cast<double>(t - min + 1));
    }
};

struct ArchetypeSpec {
    std::string name;
    /// Row-stochastic over the vocabulary. The BREAK row is the distribution
    /// of a session's first action; no row moves into BREAK.
    Matrix transition_profile;
    LengthDistribution session_length{8.0, 1};
    LengthDistribution sessions_per_user{3.0, 1};
    std::map<std::string, double> resource_affinity;
    double resource_focus = 0.8;  // chance an ontology action targets the user's home resource
};

namespace synth_detail {

inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// In (0, 1]
inline double uniform_open(std::mt19937_64& rng) { return 1.0 - uniform01(rng); }

inline std::size_t draw_length(const LengthDistribution& d, std::mt19937_64& rng)
{
    const double q = d.q();
    if (q <= 0.0) return d.min;
    const double g = std::floor(std::log(uniform_open(rng)) / std::log(q));
    return d.min + static_cast<std::size_t>(std::min(g, 1e6));
}

template <class Row>
std::size_t draw_categorical(const Row& weights, std::mt19937_64& rng)
{
    double total = 0.0;
    for (Eigen::Index i = 0; i < weights.size(); ++i) total += weights(i);
    double u = uniform01(rng) * total;
    Eigen::Index last = 0;
    for (Eigen::Index i = 0; i < weights.size(); ++i) {
        if (weights(i) <= 0.0) continue;
        last = i;
        if (u < weights(i)) return static_cast<std::size_t>(i);
        u -= weights(i);
    }
    return static_cast<std::size_t>(last);
}

inline std::string draw_key(const std::map<std::string, double>& weights, std::mt19937_64& rng)
{
    double total = 0.0;
    for (const auto& [k, w] : weights) total += w;
    double u = uniform01(rng) * total;
    for (const auto& [k, w] : weights) {
        if (u < w) return k;
        u -= w;
    }
    return weights.rbegin()->first;
}

inline std::string ipv4(std::uint32_t base, std::uint32_t offset)
{
    const std::uint32_t a = base + offset;
    return std::to_string(a >> 24) + "." + std::to_string((a >> 16) & 255U) + "." +
           std::to_string((a >> 8) & 255U) + "." + std::to_string(a & 255U);
}

struct PathTemplate {
    std::string_view label;
    std::string_view method;
    std::string_view path;   // {r} = resource, {c} = class id, {u} = account
    std::string_view query;
};

inline constexpr std::array<PathTemplate, 33> path_templates{{
    {"Browse Main Page", "GET", "/", ""},
    {"Browse Ontologies", "GET", "/ontologies", ""},
    {"Browse Search", "GET", "/search", "q={c}"},
    {"Browse Help", "GET", "/help", ""},
    {"Browse Mappings", "GET", "/mappings", ""},
    {"Browse Recommender", "GET", "/recommender", ""},
    {"Browse Annotator", "GET", "/annotator", ""},
    {"Browse Resource Index", "GET", "/resource_index", ""},
    {"Browse Projects", "GET", "/projects", ""},
    {"Browse Notes", "GET", "/notes", ""},
    {"Ontology Summary", "GET", "/ontologies/{r}", ""},
    {"Browse Ontology Classes", "GET", "/ontologies/{r}/classes", ""},
    {"Browse Ontology Class", "GET", "/ontologies/{r}/classes/{c}", ""},
    {"Browse Ontology Class Tree", "GET", "/ontologies/{r}/classes/{c}/tree", ""},
    {"Browse Ontology Mappings", "GET", "/ontologies/{r}/mappings", ""},
    {"Ontology Analytics", "GET", "/ontologies/{r}/analytics", ""},
    {"Browse Ontology Widgets", "GET", "/ontologies/{r}/widgets", ""},
    {"Browse Ontology Visualization", "GET", "/ontologies/{r}/visualize", ""},
    {"Browse Ontology Notes", "GET", "/ontologies/{r}/notes", ""},
    {"Browse Ontology Properties", "GET", "/ontologies/{r}/properties", ""},
    {"Browse Widgets", "GET", "/ontologies/{r}/widgets/jump_to", ""},
    {"Browse Ontology Property Tree", "GET", "/ontologies/{r}/properties/tree", ""},
    {"Browse Class Notes", "GET", "/ontologies/{r}/classes/{c}/notes", ""},
    {"Create Ontology Submission", "GET", "/ontologies/{r}/submissions/new", ""},
    {"Validate Ontology File", "POST", "/validate_ontology_file", ""},
    {"Virtual Appliance Download", "GET", "/virtual_appliance", ""},
    {"Browse Ontology Submission", "GET", "/ontologies/{r}/submissions/{n}", ""},
    {"Login", "GET", "/login", ""},
    {"Log-Out", "GET", "/logout", ""},
    {"Sign-Up", "GET", "/accounts/new", ""},
    {"Lost Password", "GET", "/lost_pass", ""},
    {"Browse Account", "GET", "/accounts/{u}", ""},
    {"Feedback", "GET", "/feedback", ""},
}};

inline const PathTemplate& template_for(std::string_view label)
{
    for (const auto& t : path_templates) {
        if (t.label == label) return t;
    }
    throw Error(Errc::vocabulary_mismatch, "no request template for label '" + std::string(label) + "'");
}

inline std::string expand(std::string_view pattern, const std::string& resource, const std::string& cls,
                          const std::string& account)
{
    std::string out;
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        if (pattern[i] == '{' && i + 2 < pattern.size() && pattern[i + 2] == '}') {
            switch (pattern[i + 1]) {
            case 'r': out += resource; break;
            case 'c': out += cls; break;
            case 'u': out += account; break;
            case 'n': out += std::to_string(cls.size() % 7 + 1); break;
            default: out.append(pattern.substr(i, 3)); break;
            }
            i += 2;
        } else {
            out += pattern[i];
        }
    }
    return out;
}

inline constexpr std::array<std::string_view, 6> browser_agents{{
    "Mozilla/5.0 (Windows NT 10.0; Win64; x64) AppleWebKit/537.36 (KHTML, like Gecko) Chrome/50.0.2661.102 Safari/537.36",
    "Mozilla/5.0 (Macintosh; Intel Mac OS X 10_11_4) AppleWebKit/601.5.17 (KHTML, like Gecko) Version/9.1 Safari/601.5.17",
    "Mozilla/5.0 (X11; Ubuntu; Linux x86_64; rv:46.0) Gecko/20100101 Firefox/46.0",
    "Mozilla/5.0 (Windows NT 6.1; WOW64; Trident/7.0; rv:11.0) like Gecko",
    "Mozilla/5.0 (Windows NT 6.1; WOW64; rv:45.0) Gecko/20100101 Firefox/45.0",
    "Mozilla/5.0 (iPad; CPU OS 9_3_2 like Mac OS X) AppleWebKit/601.1.46 (KHTML, like Gecko) Version/9.0 Mobile/13F69 Safari/601.1",
}};

inline constexpr std::array<std::string_view, 4> crawler_agents{{
    "Mozilla/5.0 (compatible; Googlebot/2.1; +http://www.google.com/bot.html)",
    "Mozilla/5.0 (compatible; bingbot/2.0; +http://www.bing.com/bingbot.htm)",
    "Mozilla/5.0 (compatible; Yahoo! Slurp; http://help.yahoo.com/help/us/ysearch/slurp)",
    "Baiduspider+(+http://www.baidu.com/search/spider.htm)",
}};

inline constexpr std::array<std::string_view, 5> asset_paths{{
    "/assets/application.js", "/assets/application.css", "/favicon.ico", "/ajax/classes/treeview",
    "/images/logo.png",
}};

}  // namespace synth_detail

/// Expected per-session visit frequencies of an archetype (normalized).
inline Vector expected_label_frequencies(const ArchetypeSpec& a, LabelId break_id)
{
    const auto n = a.transition_profile.rows();
    Vector state = a.transition_profile.row(break_id).transpose();
    Vector occupancy = Vector::Zero(n);
    double mass = 0.0;
    for (std::size_t t = 0; t < 100000; ++t) {
        const double alive = a.session_length.survival(t);
        if (t > a.session_length.min && alive < 1e-15) break;
        occupancy += alive * state;
        mass += alive;
        state = a.transition_profile.transpose() * state;
    }
    return occupancy / mass;
}

/// i.i.d. archetype: every row (and the start row) equals `frequencies`.
inline Matrix iid_profile(const Vector& frequencies, LabelId break_id)
{
    const auto n = frequencies.size();
    Vector f = frequencies;
    f(break_id) = 0.0;
    f /= f.sum();
    Matrix P(n, n);
    for (Eigen::Index i = 0; i < n; ++i) P.row(i) = f.transpose();
    return P;
}

inline void validate_archetype(const ArchetypeSpec& a, const ActionVocabulary& vocab)
{
    const auto n = static_cast<Eigen::Index>(vocab.size());
    if (a.transition_profile.rows() != n || a.transition_profile.cols() != n) {
        throw Error(Errc::vocabulary_mismatch, "archetype '" + a.name + "' profile is " +
                                                   std::to_string(a.transition_profile.rows()) + "x" +
                                                   std::to_string(a.transition_profile.cols()) +
                                                   ", vocabulary has " + std::to_string(n) + " labels");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        const double s = a.transition_profile.row(i).sum();
        if (std::abs(s - 1.0) > 1e-9 || a.transition_profile.row(i).minCoeff() < 0.0) {
            throw Error(Errc::invalid_argument,
                        "archetype '" + a.name + "' row " + vocab.name(static_cast<LabelId>(i)) +
                            " is not a probability distribution");
        }
        if (a.transition_profile(i, vocab.break_id()) != 0.0) {
            throw Error(Errc::invalid_argument, "archetype '" + a.name + "' moves into BREAK");
        }
    }
    for (const auto* d : {&a.session_length, &a.sessions_per_user}) {
        if (d->min < 1 || !(d->mean >= static_cast<double>(d->min))) {
            throw Error(Errc::invalid_argument, "archetype '" + a.name + "' needs mean >= min >= 1");
        }
    }
    for (const auto& [r, w] : a.resource_affinity) {
        if (r.empty() || r.find('/') != std::string::npos || !(w >= 0.0)) {
            throw Error(Errc::invalid_argument, "archetype '" + a.name + "' has a bad resource entry");
        }
    }
}

/// Parses the archetype config (JSON). Each archetype gives either
///   "start": {label: weight}, "transitions": {from: {to: weight}}
/// (rows not listed restart from "start"), or "iid_from": <archetype name>,
/// which draws every action independently from that archetype's expected
/// label frequencies and copies its session parameters.
inline std::vector<ArchetypeSpec> parse_archetypes(std::string_view text, const ActionVocabulary& vocab)
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::invalid_argument, std::string("archetype config: ") + e.what());
    }
    const auto n = static_cast<Eigen::Index>(vocab.size());
    const LabelId brk = vocab.break_id();
    auto label = [&](const std::string& name) {
        auto id = vocab.find(name);
        if (!id || *id == brk) {
            throw Error(Errc::vocabulary_mismatch, "archetype label '" + name + "' is not in the vocabulary");
        }
        return *id;
    };
    auto row_from = [&](const nlohmann::json& weights) {
        Vector row = Vector::Zero(n);
        for (const auto& [name, w] : weights.items()) row(label(name)) += w.get<double>();
        const double s = row.sum();
        if (!(s > 0.0)) throw Error(Errc::invalid_argument, "archetype row has no positive weight");
        return Vector(row / s);
    };
    auto length = [](const nlohmann::json& j, LengthDistribution fallback) {
        if (j.is_null()) return fallback;
        LengthDistribution d;
        d.mean = j.value("mean", fallback.mean);
        d.min = j.value("min", std::size_t{1});
        return d;
    };

    std::vector<ArchetypeSpec> out;
    const auto& list = doc.at("archetypes");
    for (const auto& j : list) {
        ArchetypeSpec a;
        a.name = j.at("name").get<std::string>();
        a.session_length = length(j.value("session_length", nlohmann::json()), a.session_length);
        a.sessions_per_user = length(j.value("sessions_per_user", nlohmann::json()), a.sessions_per_user);
        a.resource_focus = j.value("resource_focus", a.resource_focus);
        if (j.contains("resource_affinity")) {
            a.resource_affinity = j.at("resource_affinity").get<std::map<std::string, double>>();
        }
        if (j.contains("iid_from")) {
            a.transition_profile.resize(0, 0);
        } else {
            const Vector start = row_from(j.at("start"));
            a.transition_profile.resize(n, n);
            for (Eigen::Index i = 0; i < n; ++i) a.transition_profile.row(i) = start.transpose();
            const nlohmann::json rows = j.value("transitions", nlohmann::json::object());
            for (const auto& [from, row] : rows.items()) {
                a.transition_profile.row(label(from)) = row_from(row).transpose();
            }
        }
        out.push_back(std::move(a));
    }
    for (std::size_t k = 0; k < out.size(); ++k) {
        if (!list[k].contains("iid_from")) continue;
        const auto source_name = list[k].at("iid_from").get<std::string>();
        auto src = std::find_if(out.begin(), out.end(), [&](const ArchetypeSpec& s) { return s.name == source_name; });
        if (src == out.end() || src->transition_profile.size() == 0) {
            throw Error(Errc::invalid_argument, "iid_from '" + source_name + "' must name an explicit archetype");
        }
        out[k].transition_profile = iid_profile(expected_label_frequencies(*src, brk), brk);
        out[k].session_length = src->session_length;
        out[k].sessions_per_user = src->sessions_per_user;
        if (!list[k].contains("resource_affinity")) out[k].resource_affinity = src->resource_affinity;
    }
    for (const auto& a : out) validate_archetype(a, vocab);
    return out;
}

struct SynthOptions {
    std::size_t users_per_archetype = 500;
    std::uint64_t seed = 0;
    double bot_fraction = 0.0;    // share of all emitted lines
    double asset_rate = 0.3;      // chance of an asset request after an action
    std::size_t bot_count = 20;   // distinct crawler addresses
    int utc_offset_minutes = -420;
    Timestamp epoch = std::chrono::sys_days{std::chrono::year{2016} / 1 / 1};
    double start_spread_days = 60.0;
};

struct UserTruth {
    std::string user;
    std::size_t archetype = 0;
    std::size_t sessions = 0;
    std::size_t actions = 0;
    std::vector<LabelId> sequence;       // BREAK-joined
    std::vector<std::string> resources;  // aligned with sequence
};

struct GroundTruth {
    std::vector<std::string> archetypes;
    std::vector<UserTruth> users;              // generation order
    std::map<std::string, std::size_t> resource_actions;  // attributed actions per resource
    std::size_t human_lines = 0;  // lines that survive filtering
    std::size_t asset_lines = 0;
    std::size_t bot_lines = 0;
    std::size_t total_lines = 0;
    std::uint64_t seed = 0;

    [[nodiscard]] std::size_t session_count() const
    {
        std::size_t s = 0;
        for (const auto& u : users) s += u.sessions;
        return s;
    }
    [[nodiscard]] std::size_t action_count() const
    {
        std::size_t s = 0;
        for (const auto& u : users) s += u.actions;
        return s;
    }
};

struct SyntheticLog {
    std::vector<RequestRecord> records;  // chronological
    GroundTruth truth;
    int utc_offset_minutes = 0;

    void write(std::ostream& out) const
    {
        for (const auto& r : records) out << format_log_line(r, utc_offset_minutes) << '\n';
    }
};

/// Verifies that every label an archetype can emit round-trips through the
/// ruleset: its request template maps back to the same label.
inline void check_vocabulary(std::span<const ArchetypeSpec> archetypes, const RuleSet& rules)
{
    const auto& vocab = rules.vocabulary();
    for (const auto& a : archetypes) {
        validate_archetype(a, vocab);
        for (Eigen::Index j = 0; j < a.transition_profile.cols(); ++j) {
            const auto id = static_cast<LabelId>(j);
            if (id == vocab.break_id() || a.transition_profile.col(j).maxCoeff() <= 0.0) continue;
            const auto& t = synth_detail::template_for(vocab.name(id));
            const std::string path = synth_detail::expand(t.path, "RES", "C0001", "u1");
            auto mapped = map_request(t.method, path, rules);
            if (!mapped || mapped->label != id) {
                throw Error(Errc::vocabulary_mismatch, "'" + std::string(t.method) + " " + path +
                                                           "' does not map back to '" + vocab.name(id) + "'");
            }
        }
    }
}

inline SyntheticLog generate_synthetic_log(std::span<const ArchetypeSpec> archetypes, const RuleSet& rules,
                                           const SynthOptions& opts = {})
{
    using namespace synth_detail;
    check_vocabulary(archetypes, rules);
    if (!(opts.bot_fraction >= 0.0 && opts.bot_fraction < 1.0)) {
        throw Error(Errc::invalid_argument, "bot fraction must lie in [0, 1)");
    }
    const auto& vocab = rules.vocabulary();
    const LabelId brk = vocab.break_id();

    std::seed_seq seq{static_cast<std::uint32_t>(opts.seed), static_cast<std::uint32_t>(opts.seed >> 32)};
    std::mt19937_64 rng(seq);

    SyntheticLog log;
    log.utc_offset_minutes = opts.utc_offset_minutes;
    GroundTruth& truth = log.truth;
    truth.seed = opts.seed;
    for (const auto& a : archetypes) truth.archetypes.push_back(a.name);

    struct Line {
        std::int64_t t;
        std::size_t order;
        RequestRecord rec;
    };
    std::vector<Line> lines;
    const std::int64_t epoch = opts.epoch.time_since_epoch().count();

    std::uint32_t user_index = 0;
    for (std::size_t k = 0; k < archetypes.size(); ++k) {
        const auto& a = archetypes[k];
        for (std::size_t u = 0; u < opts.users_per_archetype; ++u, ++user_index) {
            UserTruth ut;
            ut.user = ipv4(0x0A000001U, user_index);
            ut.archetype = k;
            const std::string agent(browser_agents[rng() % browser_agents.size()]);
            const std::string account = "u" + std::to_string(user_index);
            const std::string home = a.resource_affinity.empty() ? std::string("ONT") : draw_key(a.resource_affinity, rng);

            auto t = epoch + static_cast<std::int64_t>(uniform01(rng) * opts.start_spread_days * 86400.0);
            const std::size_t sessions = draw_length(a.sessions_per_user, rng);
            for (std::size_t s = 0; s < sessions; ++s) {
                if (s > 0) {
                    ut.sequence.push_back(brk);
                    ut.resources.emplace_back();
                    t += 1800 + static_cast<std::int64_t>(-86400.0 * std::log(uniform_open(rng)));
                }
                const std::size_t len = draw_length(a.session_length, rng);
                std::size_t state = brk;
                for (std::size_t step = 0; step < len; ++step) {
                    if (step > 0) {
                        // heavy-tailed think time, capped below the session gap
                        const double gap = 4.0 * std::pow(uniform_open(rng), -1.0 / 1.3);
                        t += std::clamp<std::int64_t>(static_cast<std::int64_t>(gap), 1, 1799);
                    }
                    state = draw_categorical(a.transition_profile.row(static_cast<Eigen::Index>(state)), rng);
                    const auto id = static_cast<LabelId>(state);
                    const auto& tmpl = template_for(vocab.name(id));
                    std::string resource;
                    if (tmpl.path.find("{r}") != std::string_view::npos) {
                        resource = a.resource_affinity.empty() || uniform01(rng) < a.resource_focus
                                       ? home
                                       : draw_key(a.resource_affinity, rng);
                    }
                    const std::string cls = "C" + std::to_string(1000 + rng() % 9000);
                    RequestRecord rec;
                    rec.ip = ut.user;
                    rec.timestamp = Timestamp{std::chrono::seconds{t}};
                    rec.method = std::string(tmpl.method);
                    rec.path = expand(tmpl.path, resource, cls, account);
                    rec.query = expand(tmpl.query, resource, cls, account);
                    rec.status = 200;
                    rec.useragent = agent;
                    lines.push_back({t, lines.size(), rec});
                    ++truth.human_lines;

                    const bool attributed = vocab[id].category == LabelCategory::ontology_page;
                    ut.sequence.push_back(id);
                    ut.resources.push_back(attributed ? resource : std::string());
                    if (attributed) ++truth.resource_actions[resource];
                    ++ut.actions;

                    if (uniform01(rng) < opts.asset_rate) {
                        RequestRecord asset = rec;
                        asset.method = "GET";
                        asset.path = std::string(asset_paths[rng() % asset_paths.size()]);
                        asset.query.clear();
                        lines.push_back({t, lines.size(), std::move(asset)});
                        ++truth.asset_lines;
                    }
                }
                ++ut.sessions;
            }
            truth.users.push_back(std::move(ut));
        }
    }

    if (opts.bot_fraction > 0.0) {
        const double human = static_cast<double>(lines.size());
        const auto bots = static_cast<std::size_t>(std::llround(human * opts.bot_fraction / (1.0 - opts.bot_fraction)));
        std::int64_t span_end = epoch;
        for (const auto& l : lines) span_end = std::max(span_end, l.t);
        for (std::size_t b = 0; b < bots; ++b) {
            const std::size_t who = rng() % std::max<std::size_t>(opts.bot_count, 1);
            const auto& tmpl = path_templates[rng() % path_templates.size()];
            RequestRecord rec;
            rec.ip = ipv4(0x42F90001U, static_cast<std::uint32_t>(who));
            const auto t = epoch + static_cast<std::int64_t>(uniform01(rng) * static_cast<double>(span_end - epoch + 1));
            rec.timestamp = Timestamp{std::chrono::seconds{t}};
            rec.method = "GET";
            rec.path = expand(tmpl.path, "ONT" + std::to_string(rng() % 50), "C" + std::to_string(rng() % 9000),
                              "u" + std::to_string(who));
            rec.status = 200;
            rec.useragent = std::string(crawler_agents[who % crawler_agents.size()]);
            lines.push_back({t, lines.size(), std::move(rec)});
            ++truth.bot_lines;
        }
    }

    std::sort(lines.begin(), lines.end(),
              [](const Line& x, const Line& y) { return x.t != y.t ? x.t < y.t : x.order < y.order; });
    log.records.reserve(lines.size());
    for (auto& l : lines) log.records.push_back(std::move(l.rec));
    truth.total_lines = log.records.size();
    return log;
}

inline nlohmann::json to_json(const GroundTruth& g, const ActionVocabulary& vocab)
{
    nlohmann::json j;
    j["seed"] = g.seed;
    j["archetypes"] = g.archetypes;
    j["lines"] = {{"total", g.total_lines}, {"human", g.human_lines}, {"asset", g.asset_lines}, {"bot", g.bot_lines}};
    j["sessions"] = g.session_count();
    j["actions"] = g.action_count();
    j["resource_actions"] = g.resource_actions;
    auto& users = j["users"] = nlohmann::json::array();
    for (const auto& u : g.users) {
        std::vector<std::string> names;
        names.reserve(u.sequence.size());
        for (auto id : u.sequence) names.push_back(vocab.name(id));
        users.push_back({{"user", u.user},
                         {"archetype", u.archetype},
                         {"sessions", u.sessions},
                         {"actions", u.actions},
                         {"sequence", names},
                         {"resources", u.resources}});
    }
    return j;
}

}  // namespace clickmine

#endif  // CLICKMINE_SYNTH_HPP
