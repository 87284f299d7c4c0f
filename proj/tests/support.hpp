#pragma once

#include "clickmine/clickmine.hpp"

#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace testing_support {

namespace cm = clickmine;

inline const cm::RuleSet& default_rules()
{
    static const cm::RuleSet rules = cm::compile_ruleset(cm::defaults::rules);
    return rules;
}

inline const cm::FilterConfig& default_filter()
{
    static const cm::FilterConfig filter = cm::FilterConfig::compile(
        cm::defaults::useragent_blacklist, cm::defaults::ip_blacklist, cm::defaults::asset_patterns);
    return filter;
}

inline const std::vector<cm::ArchetypeSpec>& default_archetypes()
{
    static const auto archetypes = cm::parse_archetypes(cm::defaults::archetypes, default_rules().vocabulary());
    return archetypes;
}

inline cm::SyntheticLog small_log(std::uint64_t seed, std::size_t users = 20, double bots = 0.0)
{
    cm::SynthOptions o;
    o.seed = seed;
    o.users_per_archetype = users;
    o.bot_fraction = bots;
    return cm::generate_synthetic_log(default_archetypes(), default_rules(), o);
}

// Two behaviour families on disjoint resource sets: tree browsers walk the
// class hierarchy, flat searchers jump straight from search to classes and
// never open a tree.
inline constexpr std::string_view contrast_archetypes_json = R"({
  "archetypes": [
    {
      "name": "Tree Browsers",
      "session_length": {"mean": 10, "min": 3},
      "sessions_per_user": {"mean": 3, "min": 1},
      "resource_affinity": {"GO": 1, "DOID": 1, "HP": 1},
      "start": {"Browse Search": 1},
      "transitions": {
        "Browse Search": {"Ontology Summary": 0.5, "Browse Ontology Class": 0.3, "Browse Search": 0.2},
        "Ontology Summary": {"Browse Ontology Class Tree": 0.8, "Browse Ontology Class": 0.2},
        "Browse Ontology Class Tree": {"Browse Ontology Class Tree": 0.6, "Browse Ontology Class": 0.4},
        "Browse Ontology Class": {"Browse Ontology Class Tree": 0.5, "Browse Search": 0.5}
      }
    },
    {
      "name": "Flat Searchers",
      "session_length": {"mean": 10, "min": 3},
      "sessions_per_user": {"mean": 3, "min": 1},
      "resource_affinity": {"RXNORM": 1, "SNOMEDCT": 1, "MESH": 1},
      "start": {"Browse Search": 1},
      "transitions": {
        "Browse Search": {"Browse Ontology Class": 0.9, "Browse Search": 0.1},
        "Browse Ontology Class": {"Browse Search": 0.6, "Browse Ontology Class": 0.4}
      }
    }
  ]
})";

// Renders records as log lines and returns both the text and views into it.
struct RenderedLog {
    std::string text;
    std::vector<std::string_view> lines;
};

inline RenderedLog render(const cm::SyntheticLog& log)
{
    RenderedLog out;
    for (const auto& r : log.records) {
        out.text += cm::format_log_line(r, log.utc_offset_minutes);
        out.text += '\n';
    }
    std::string_view all = out.text;
    while (!all.empty()) {
        auto nl = all.find('\n');
        out.lines.push_back(all.substr(0, nl));
        all.remove_prefix(nl + 1);
    }
    return out;
}

inline cm::Corpus corpus_of(const cm::SyntheticLog& log, std::size_t jobs = 1)
{
    auto text = render(log);
    auto r = cm::ingest_lines(text.lines, default_filter(), default_rules(), {cm::LogFormat::combined, cm::UserKey::ip, jobs});
    return cm::build_corpus(std::move(r.events), default_rules().vocabulary());
}

inline std::vector<cm::LabelId> labels(const cm::ActionVocabulary& v, const std::vector<std::string>& names)
{
    std::vector<cm::LabelId> out;
    for (const auto& n : names) out.push_back(v.at(n));
    return out;
}

// Scratch directory removed on destruction.
struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& tag)
    {
        std::random_device rd;
        path = std::filesystem::temp_directory_path() / ("clickmine-" + tag + "-" + std::to_string(rd()));
        std::filesystem::create_directories(path);
    }
    ~TempDir()
    {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
};

}  // namespace testing_support
