#pragma once
#ifndef CLICKMINE_ACTION_MAP_HPP
#define CLICKMINE_ACTION_MAP_HPP

// Ordered regex rules that turn requests into action labels.

#include "clickmine/error.hpp"
#include "clickmine/log_ingest.hpp"

#include <boost/regex.hpp>

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace clickmine {

using LabelId = std::uint16_t;

enum class LabelCategory { main_page, ontology_page, edit_content, user_account, control };

constexpr std::string_view to_string(LabelCategory c) noexcept
{
    switch (c) {
    case LabelCategory::main_page: return "MainPage";
    case LabelCategory::ontology_page: return "OntologyPage";
    case LabelCategory::edit_content: return "EditContent";
    case LabelCategory::user_account: return "UserAccount";
    case LabelCategory::control: return "Control";
    }
    return "Unknown";
}

struct ActionLabel {
    LabelId id = 0;
    std::string name;
    LabelCategory category = LabelCategory::main_page;
};

inline constexpr std::string_view break_label_name = "BREAK";

struct CatalogEntry {
    std::string_view name;
    LabelCategory category;
};

/// The portal's user-interface actions, in presentation order. Vocabularies
/// are always a subset of this catalog (in this order) followed by BREAK.
inline constexpr std::array<CatalogEntry, 33> label_catalog{{
    {"Browse Main Page", LabelCategory::main_page},
    {"Browse Ontologies", LabelCategory::main_page},
    {"Browse Search", LabelCategory::main_page},
    {"Browse Help", LabelCategory::main_page},
    {"Browse Mappings", LabelCategory::main_page},
    {"Browse Recommender", LabelCategory::main_page},
    {"Browse Annotator", LabelCategory::main_page},
    {"Browse Resource Index", LabelCategory::main_page},
    {"Browse Projects", LabelCategory::main_page},
    {"Browse Notes", LabelCategory::main_page},
    {"Ontology Summary", LabelCategory::ontology_page},
    {"Browse Ontology Classes", LabelCategory::ontology_page},
    {"Browse Ontology Class", LabelCategory::ontology_page},
    {"Browse Ontology Class Tree", LabelCategory::ontology_page},
    {"Browse Ontology Mappings", LabelCategory::ontology_page},
    {"Ontology Analytics", LabelCategory::ontology_page},
    {"Browse Ontology Widgets", LabelCategory::ontology_page},
    {"Browse Ontology Visualization", LabelCategory::ontology_page},
    {"Browse Ontology Notes", LabelCategory::ontology_page},
    {"Browse Ontology Properties", LabelCategory::ontology_page},
    {"Browse Widgets", LabelCategory::ontology_page},
    {"Browse Ontology Property Tree", LabelCategory::ontology_page},
    {"Browse Class Notes", LabelCategory::ontology_page},
    {"Create Ontology Submission", LabelCategory::edit_content},
    {"Validate Ontology File", LabelCategory::edit_content},
    {"Virtual Appliance Download", LabelCategory::edit_content},
    {"Browse Ontology Submission", LabelCategory::edit_content},
    {"Login", LabelCategory::user_account},
    {"Log-Out", LabelCategory::user_account},
    {"Sign-Up", LabelCategory::user_account},
    {"Lost Password", LabelCategory::user_account},
    {"Browse Account", LabelCategory::user_account},
    {"Feedback", LabelCategory::user_account},
}};

class ActionVocabulary {
public:
    ActionVocabulary() = default;

    /// Builds a vocabulary from catalog names (any order, duplicates ignored);
    /// labels are laid out in catalog order with BREAK appended last.
    static ActionVocabulary from_names(const std::vector<std::string>& names)
    {
        ActionVocabulary v;
        for (const auto& entry : label_catalog) {
            if (std::find(names.begin(), names.end(), entry.name) != names.end()) {
                v.labels_.push_back({static_cast<LabelId>(v.labels_.size()), std::string(entry.name),
                                     entry.category});
            }
        }
        for (const auto& n : names) {
            if (n != break_label_name && !v.find(n)) {
                throw Error(Errc::unknown_label, "'" + n + "' is not a known action label");
            }
        }
        v.labels_.push_back({static_cast<LabelId>(v.labels_.size()), std::string(break_label_name),
                             LabelCategory::control});
        return v;
    }

    /// All 33 catalog labels plus BREAK.
    static ActionVocabulary full()
    {
        std::vector<std::string> names;
        for (const auto& e : label_catalog) {
            names.emplace_back(e.name);
        }
        return from_names(names);
    }

    [[nodiscard]] std::size_t size() const noexcept { return labels_.size(); }
    [[nodiscard]] const std::vector<ActionLabel>& labels() const noexcept { return labels_; }
    [[nodiscard]] const ActionLabel& operator[](LabelId id) const { return labels_.at(id); }
    [[nodiscard]] const std::string& name(LabelId id) const { return labels_.at(id).name; }
    [[nodiscard]] LabelId break_id() const noexcept { return static_cast<LabelId>(labels_.size() - 1); }

    [[nodiscard]] std::optional<LabelId> find(std::string_view name) const
    {
        for (const auto& l : labels_) {
            if (l.name == name) {
                return l.id;
            }
        }
        return std::nullopt;
    }

    /// Like find() but throws Error{unknown_label}.
    [[nodiscard]] LabelId at(std::string_view name) const
    {
        if (auto id = find(name)) {
            return *id;
        }
        throw Error(Errc::unknown_label, "label '" + std::string(name) + "' not in vocabulary");
    }

    friend bool operator==(const ActionVocabulary& a, const ActionVocabulary& b)
    {
        return std::equal(a.labels_.begin(), a.labels_.end(), b.labels_.begin(), b.labels_.end(),
                          [](const ActionLabel& x, const ActionLabel& y) {
                              return x.id == y.id && x.name == y.name && x.category == y.category;
                          });
    }

private:
    std::vector<ActionLabel> labels_;
};

struct MappingRule {
    std::optional<std::string> method;  // nullopt matches any verb
    std::string pattern;
    LabelId label = 0;
    int ontology_group = 0;  // capture group holding the resource acronym; 0 = none
    std::size_t line = 0;
    boost::regex regex;
    std::string literal_prefix;  // cheap pre-check derived from the pattern
};

/// A label plus the resource the request was attributed to (empty if none).
struct MappedAction {
    LabelId label = 0;
    std::string ontology;

    friend bool operator==(const MappedAction&, const MappedAction&) = default;
};

namespace detail {

// Longest literal string every match must start with, for patterns anchored
// with '^'. Empty when no safe prefix can be derived.
inline std::string literal_prefix_of(std::string_view pattern)
{
    if (!pattern.starts_with('^') || pattern.find('|') != std::string_view::npos) {
        return {};
    }
    static constexpr std::string_view meta = ".[]()|*+?{}\\^$";
    std::string prefix;
    for (std::size_t i = 1; i < pattern.size(); ++i) {
        char c = pattern[i];
        if (meta.find(c) != std::string_view::npos) {
            if ((c == '?' || c == '*' || c == '{') && !prefix.empty()) {
                prefix.pop_back();  // previous char is optional
            }
            break;
        }
        prefix.push_back(c);
    }
    return prefix;
}

inline std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())) != 0) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())) != 0) s.remove_suffix(1);
    return s;
}

}  // namespace detail

class RuleSet {
public:
    RuleSet() = default;
    RuleSet(ActionVocabulary vocabulary, std::vector<MappingRule> rules)
        : vocabulary_(std::move(vocabulary))
        , rules_(std::move(rules))
    {
    }

    [[nodiscard]] const ActionVocabulary& vocabulary() const noexcept { return vocabulary_; }
    [[nodiscard]] const std::vector<MappingRule>& rules() const noexcept { return rules_; }
    [[nodiscard]] std::size_t size() const noexcept { return rules_.size(); }

private:
    ActionVocabulary vocabulary_;
    std::vector<MappingRule> rules_;
};

/// Compiles rule-file text. Each rule line reads
///   VERB|* REGEX => LABEL [@GROUP]
/// with '#' starting a comment. Errors name the offending line.
inline RuleSet compile_ruleset(std::string_view text)
{
    struct Pending {
        std::optional<std::string> method;
        std::string pattern;
        std::string label;
        int group = 0;
        std::size_t line = 0;
    };
    std::vector<Pending> pending;
    std::size_t line_no = 0;
    while (!text.empty()) {
        std::size_t nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        std::string_view body = detail::trim(line);
        if (body.empty() || body.front() == '#') {
            continue;
        }
        auto where = " (line " + std::to_string(line_no) + ")";
        std::size_t sp = body.find_first_of(" \t");
        std::size_t arrow = body.rfind("=>");
        if (sp == std::string_view::npos || arrow == std::string_view::npos || arrow < sp) {
            throw Error(Errc::bad_pattern, "expected 'VERB REGEX => LABEL'" + where);
        }
        Pending p;
        p.line = line_no;
        std::string_view verb = body.substr(0, sp);
        if (verb != "*") {
            if (!std::all_of(verb.begin(), verb.end(), [](char c) { return c >= 'A' && c <= 'Z'; })) {
                throw Error(Errc::bad_pattern, "bad method '" + std::string(verb) + "'" + where);
            }
            p.method = std::string(verb);
        }
        p.pattern = std::string(detail::trim(body.substr(sp, arrow - sp)));
        std::string_view rhs = detail::trim(body.substr(arrow + 2));
        if (auto at = rhs.rfind('@'); at != std::string_view::npos) {
            std::string_view group = detail::trim(rhs.substr(at + 1));
            if (!detail::parse_fixed_digits(group, p.group) || p.group < 1) {
                throw Error(Errc::bad_pattern, "bad ontology group '" + std::string(group) + "'" + where);
            }
            rhs = detail::trim(rhs.substr(0, at));
        }
        if (p.pattern.empty() || rhs.empty()) {
            throw Error(Errc::bad_pattern, "empty pattern or label" + where);
        }
        p.label = std::string(rhs);
        pending.push_back(std::move(p));
    }
    if (pending.empty()) {
        throw Error(Errc::empty_ruleset, "rule file contains no rules");
    }

    std::vector<std::string> names;
    for (const auto& p : pending) {
        auto known = std::find_if(label_catalog.begin(), label_catalog.end(),
                                  [&](const CatalogEntry& e) { return e.name == p.label; });
        if (known == label_catalog.end()) {
            throw Error(Errc::unknown_label,
                        "'" + p.label + "' is not a known action label (line " + std::to_string(p.line) + ")");
        }
        names.push_back(p.label);
    }
    ActionVocabulary vocab = ActionVocabulary::from_names(names);

    std::vector<MappingRule> rules;
    rules.reserve(pending.size());
    for (auto& p : pending) {
        MappingRule r;
        r.method = std::move(p.method);
        r.label = vocab.at(p.label);
        r.ontology_group = p.group;
        r.line = p.line;
        try {
            r.regex = boost::regex(p.pattern, boost::regex::perl);
        } catch (const boost::regex_error& err) {
            throw Error(Errc::bad_pattern,
                        "'" + p.pattern + "' (line " + std::to_string(p.line) + "): " + err.what());
        }
        if (static_cast<std::size_t>(p.group) > r.regex.mark_count()) {
            throw Error(Errc::bad_pattern, "ontology group @" + std::to_string(p.group) +
                                               " exceeds capture count (line " + std::to_string(p.line) + ")");
        }
        r.literal_prefix = detail::literal_prefix_of(p.pattern);
        r.pattern = std::move(p.pattern);
        rules.push_back(std::move(r));
    }
    return RuleSet(std::move(vocab), std::move(rules));
}

/// First-match lookup. The resource acronym is only reported for
/// ontology-page labels.
inline std::optional<MappedAction> map_request(std::string_view method, const std::string& path,
                                               const RuleSet& rs)
{
    boost::smatch m;
    for (const auto& rule : rs.rules()) {
        if (rule.method && *rule.method != method) {
            continue;
        }
        if (!rule.literal_prefix.empty() && !std::string_view(path).starts_with(rule.literal_prefix)) {
            continue;
        }
        if (!boost::regex_search(path, m, rule.regex)) {
            continue;
        }
        MappedAction out{rule.label, {}};
        if (rule.ontology_group > 0 &&
            rs.vocabulary()[rule.label].category == LabelCategory::ontology_page &&
            m[rule.ontology_group].matched) {
            out.ontology = m[rule.ontology_group].str();
        }
        return out;
    }
    return std::nullopt;
}

inline std::optional<MappedAction> map_request(const RequestRecord& r, const RuleSet& rs)
{
    return map_request(r.method, r.path, rs);
}

}  // namespace clickmine

#endif  // CLICKMINE_ACTION_MAP_HPP
