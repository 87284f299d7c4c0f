#pragma once
#ifndef CLICKMINE_PIPELINE_HPP
#define CLICKMINE_PIPELINE_HPP

// End-to-end orchestration: ingest -> map -> sessionize -> features ->
// elbow -> cluster -> pca -> compare, with every stage's artifacts written
// to one output directory.

#include "clickmine/action_map.hpp"
#include "clickmine/cluster.hpp"
#include "clickmine/compare.hpp"
#include "clickmine/defaults.hpp"
#include "clickmine/error.hpp"
#include "clickmine/features.hpp"
#include "clickmine/io.hpp"
#include "clickmine/log_ingest.hpp"
#include "clickmine/pca.hpp"
#include "clickmine/sessions.hpp"

#include <json.hpp>

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

namespace clickmine {

inline constexpr std::string_view version = "0.1.0";

enum class UserKey { ip, remote_user, ip_useragent };

constexpr std::string_view to_string(UserKey k) noexcept
{
    switch (k) {
    case UserKey::ip: return "ip";
    case UserKey::remote_user: return "remote-user";
    case UserKey::ip_useragent: return "ip-useragent";
    }
    return "ip";
}

/// Identity of the request's user. remote-user falls back to the IP when
/// the %u field is empty.
inline std::string user_key_of(const RequestRecord& r, UserKey key)
{
    switch (key) {
    case UserKey::ip: return r.ip;
    case UserKey::remote_user: return r.remote_user.empty() ? r.ip : r.remote_user;
    case UserKey::ip_useragent: return r.ip + " " + r.useragent;
    }
    return r.ip;
}

struct IngestOptions {
    LogFormat format = LogFormat::combined;
    UserKey user_key = UserKey::ip;
    std::size_t jobs = 1;
};

/// Reduction funnel. parsed = lines - malformed - bad_timestamp;
/// filtered = parsed - dropped_*; mapped = filtered - unmapped.
struct IngestCounts {
    std::size_t lines = 0;
    std::size_t parsed = 0;
    std::size_t malformed = 0;
    std::size_t bad_timestamp = 0;
    std::size_t dropped_useragent = 0;
    std::size_t dropped_ip = 0;
    std::size_t dropped_asset = 0;
    std::size_t filtered = 0;
    std::size_t mapped = 0;
    std::size_t unmapped = 0;

    IngestCounts& operator+=(const IngestCounts& o)
    {
        lines += o.lines;
        parsed += o.parsed;
        malformed += o.malformed;
        bad_timestamp += o.bad_timestamp;
        dropped_useragent += o.dropped_useragent;
        dropped_ip += o.dropped_ip;
        dropped_asset += o.dropped_asset;
        filtered += o.filtered;
        mapped += o.mapped;
        unmapped += o.unmapped;
        return *this;
    }
    friend bool operator==(const IngestCounts&, const IngestCounts&) = default;
};

struct IngestResult {
    std::vector<Event> events;  // in input order
    IngestCounts counts;
    std::map<std::string, std::size_t> unmapped_paths;
};

namespace pipeline_detail {

inline void ingest_chunk(std::span<const std::string_view> lines, const FilterConfig& filter, const RuleSet& rules,
                         const IngestOptions& opts, IngestResult& out)
{
    RequestRecord rec;
    for (auto line : lines) {
        ++out.counts.lines;
        switch (parse_log_line_into(line, opts.format, rec)) {
        case ParseStatus::malformed: ++out.counts.malformed; continue;
        case ParseStatus::bad_timestamp: ++out.counts.bad_timestamp; continue;
        case ParseStatus::ok: ++out.counts.parsed; break;
        }
        switch (filter.classify(rec)) {
        case FilterVerdict::useragent: ++out.counts.dropped_useragent; continue;
        case FilterVerdict::ip: ++out.counts.dropped_ip; continue;
        case FilterVerdict::asset: ++out.counts.dropped_asset; continue;
        case FilterVerdict::keep: ++out.counts.filtered; break;
        }
        auto mapped = map_request(rec.method, rec.path, rules);
        if (!mapped) {
            ++out.counts.unmapped;
            ++out.unmapped_paths[rec.path];
            continue;
        }
        ++out.counts.mapped;
        out.events.push_back(Event{user_key_of(rec, opts.user_key), rec.timestamp, mapped->label,
                                   std::move(mapped->ontology)});
    }
}

}  // namespace pipeline_detail

/// Parse, filter and map. Lines are split into contiguous chunks, one per
/// worker; results are concatenated in input order, so the output does not
/// depend on the worker count.
inline IngestResult ingest_lines(std::span<const std::string_view> lines, const FilterConfig& filter,
                                 const RuleSet& rules, const IngestOptions& opts = {})
{
    const std::size_t jobs = std::clamp<std::size_t>(opts.jobs, 1, std::max<std::size_t>(lines.size(), 1));
    if (jobs == 1) {
        IngestResult out;
        pipeline_detail::ingest_chunk(lines, filter, rules, opts, out);
        return out;
    }
    std::vector<IngestResult> parts(jobs);
    {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (lines.size() + jobs - 1) / jobs;
        for (std::size_t j = 0; j < jobs; ++j) {
            const std::size_t begin = std::min(lines.size(), j * chunk);
            const std::size_t end = std::min(lines.size(), begin + chunk);
            pool.emplace_back([&, j, begin, end] {
                pipeline_detail::ingest_chunk(lines.subspan(begin, end - begin), filter, rules, opts, parts[j]);
            });
        }
    }
    IngestResult out;
    std::size_t total = 0;
    for (const auto& p : parts) total += p.events.size();
    out.events.reserve(total);
    for (auto& p : parts) {
        out.counts += p.counts;
        std::move(p.events.begin(), p.events.end(), std::back_inserter(out.events));
        for (const auto& [path, c] : p.unmapped_paths) out.unmapped_paths[path] += c;
    }
    return out;
}

/// Restores per-user chronological order: stable sort by (user, timestamp).
inline void order_events(std::vector<Event>& events)
{
    std::stable_sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
        return a.user != b.user ? a.user < b.user : a.timestamp < b.timestamp;
    });
}

struct Corpus {
    ActionVocabulary vocabulary;
    std::vector<Session> sessions;
    std::vector<UserTrace> traces;
    UsageStats stats;
};

inline Corpus build_corpus(std::vector<Event> events, const ActionVocabulary& vocab,
                           double gap_minutes = default_gap_minutes)
{
    order_events(events);
    Corpus c;
    c.vocabulary = vocab;
    c.sessions = sessionize(events, gap_minutes);
    c.traces = build_user_traces(c.sessions, vocab.break_id());
    c.stats = compute_usage_stats(c.sessions);
    return c;
}

struct PipelineConfig {
    std::vector<fs::path> logs;
    fs::path rules;                // empty: built-in rules
    fs::path useragent_blacklist;  // empty: built-in lists
    fs::path ip_blacklist;
    fs::path asset_patterns;
    fs::path output_dir = "clickmine-out";
    LogFormat log_format = LogFormat::combined;
    UserKey user_key = UserKey::ip;
    double gap_minutes = default_gap_minutes;
    double alpha = default_alpha;
    FeatureKind feature_kind = FeatureKind::stationary;
    double tol = 1e-10;
    std::size_t max_iter = 100000;
    std::size_t K = 0;  // 0: take the elbow's suggestion
    std::size_t k_min = 1;
    std::size_t k_max = 25;
    double knee_fraction = 0.05;
    std::uint64_t seed = 0;
    std::size_t restarts = 10;
    std::size_t pca_components = 3;
    double threshold_pct = default_threshold_pct;
    std::size_t top_actions = 10;
    std::size_t top_resources = 50;
    std::vector<std::string> compare_pair;  // empty: the two most visited resources
    std::size_t jobs = 1;
};

inline nlohmann::json to_json(const PipelineConfig& c)
{
    std::vector<std::string> logs;
    for (const auto& p : c.logs) logs.push_back(p.string());
    return {{"logs", logs},
            {"rules", c.rules.string()},
            {"ua_blacklist", c.useragent_blacklist.string()},
            {"ip_blacklist", c.ip_blacklist.string()},
            {"asset_patterns", c.asset_patterns.string()},
            {"log_format", c.log_format == LogFormat::combined ? "combined" : "common"},
            {"user_key", to_string(c.user_key)},
            {"gap_minutes", c.gap_minutes},
            {"alpha", c.alpha},
            {"features", to_string(c.feature_kind)},
            {"tol", c.tol},
            {"max_iter", c.max_iter},
            {"k", c.K},
            {"k_range", {c.k_min, c.k_max}},
            {"knee_fraction", c.knee_fraction},
            {"seed", c.seed},
            {"restarts", c.restarts},
            {"pca_components", c.pca_components},
            {"threshold_pct", c.threshold_pct},
            {"top_actions", c.top_actions},
            {"top_resources", c.top_resources},
            {"compare_pair", c.compare_pair},
            {"jobs", c.jobs}};
}

inline RuleSet load_rules(const PipelineConfig& c)
{
    return compile_ruleset(c.rules.empty() ? std::string(defaults::rules) : read_file(c.rules));
}

inline FilterConfig load_filter(const PipelineConfig& c)
{
    auto pick = [](const fs::path& p, std::string_view fallback) {
        return p.empty() ? std::string(fallback) : read_file(p);
    };
    return FilterConfig::compile(pick(c.useragent_blacklist, defaults::useragent_blacklist),
                                 pick(c.ip_blacklist, defaults::ip_blacklist),
                                 pick(c.asset_patterns, defaults::asset_patterns));
}

template <class F>
auto run_stage(const std::string& name, F&& body)
{
    try {
        return body();
    } catch (const StageError&) {
        throw;
    } catch (const Error& e) {
        throw StageError(name, e);
    }
}

// ---------------------------------------------------------------------------
// Stage artifacts

inline nlohmann::json to_json(const IngestCounts& c)
{
    return {{"lines", c.lines},
            {"parsed", c.parsed},
            {"malformed", c.malformed},
            {"bad_timestamp", c.bad_timestamp},
            {"dropped_useragent", c.dropped_useragent},
            {"dropped_ip", c.dropped_ip},
            {"dropped_asset", c.dropped_asset},
            {"filtered", c.filtered},
            {"mapped", c.mapped},
            {"unmapped", c.unmapped}};
}

inline nlohmann::json to_json(const UsageStats& s)
{
    return {{"users", s.user_count},
            {"requests", s.event_count},
            {"sessions", s.session_count},
            {"single_request_sessions", s.single_request_sessions},
            {"requests_in_multi_request_sessions", s.event_count - s.single_request_sessions},
            {"mean_session_duration_s", s.mean_session_duration()},
            {"median_session_duration_s", s.median_session_duration()},
            {"median_requests_per_user", histogram_median(s.requests_per_user)},
            {"median_inter_request_s", histogram_median(s.inter_request_seconds)}};
}

struct IngestStage {
    IngestCounts counts;
    Corpus corpus;
};

/// Reads the configured logs and writes traces.jsonl, stats.json, the
/// histogram CSVs and diagnostics.json.
inline IngestStage run_ingest(const PipelineConfig& c)
{
    return run_stage("ingest", [&] {
        const RuleSet rules = load_rules(c);
        const FilterConfig filter = load_filter(c);
        LineBuffer buf = read_log_files(c.logs);
        if (buf.lines.empty()) {
            throw Error(Errc::empty_input, "no log lines in the input");
        }
        IngestResult r = ingest_lines(buf.lines, filter, rules, {c.log_format, c.user_key, c.jobs});
        buf = {};
        if (r.events.empty()) {
            throw Error(Errc::empty_input, "no request survived parsing, filtering and mapping");
        }
        IngestStage out;
        out.counts = r.counts;
        out.corpus = build_corpus(std::move(r.events), rules.vocabulary(), c.gap_minutes);

        const auto& dir = c.output_dir;
        write_traces_file(dir / "traces.jsonl", out.corpus.traces, out.corpus.vocabulary);
        const auto& st = out.corpus.stats;
        write_json(dir / "stats.json", to_json(st));
        write_histogram_csv(dir / "hist_inter_request_seconds.csv", st.inter_request_seconds);
        write_histogram_csv(dir / "hist_requests_per_user.csv", st.requests_per_user);
        write_histogram_csv(dir / "hist_ontologies_per_user.csv", st.ontologies_per_user);
        write_histogram_csv(dir / "hist_requests_per_session.csv", st.requests_per_session);
        write_histogram_csv(dir / "hist_session_durations.csv", st.session_durations);

        std::vector<std::pair<std::string, std::size_t>> top(r.unmapped_paths.begin(), r.unmapped_paths.end());
        std::stable_sort(top.begin(), top.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
        top.resize(std::min<std::size_t>(top.size(), 50));
        nlohmann::json unmapped = nlohmann::json::array();
        for (const auto& [path, n] : top) unmapped.push_back({{"path", path}, {"count", n}});
        write_json(dir / "diagnostics.json", {{"counts", to_json(r.counts)}, {"top_unmapped_paths", unmapped}});
        return out;
    });
}

inline FeatureMatrix run_features(const Corpus& corpus, const PipelineConfig& c)
{
    return run_stage("features", [&] {
        FeatureOptions fo;
        fo.kind = c.feature_kind;
        fo.alpha = c.alpha;
        fo.stationary.tol = c.tol;
        fo.stationary.max_iter = c.max_iter;
        fo.jobs = c.jobs;
        FeatureMatrix F = build_features(corpus.traces, corpus.vocabulary.size(), fo);
        write_features_csv(c.output_dir / "features.csv", F, corpus.vocabulary);
        return F;
    });
}

struct ClusterStage {
    ElbowCurve elbow;
    ClusterModel model;
    std::vector<ClusterProfile> profiles;
};

inline void write_profiles(const fs::path& dir, const std::vector<ClusterProfile>& profiles,
                           const ActionVocabulary& vocab)
{
    std::ostringstream report;
    nlohmann::json j = nlohmann::json::array();
    for (const auto& p : profiles) {
        char line[160];
        std::snprintf(line, sizeof line, "Cluster %zu: %zu users, avg %.2f actions (median %.1f)\n", p.cluster,
                      p.size, p.mean_actions, p.median_actions);
        report << line;
        nlohmann::json tr = nlohmann::json::array();
        for (const auto& t : p.top_transitions) {
            report << "  " << vocab.name(t.from) << " -> " << vocab.name(t.to) << ": " << t.count << '\n';
            tr.push_back({{"from", vocab.name(t.from)}, {"to", vocab.name(t.to)}, {"count", t.count}});
        }
        j.push_back({{"cluster", p.cluster},
                     {"users", p.size},
                     {"mean_actions", p.mean_actions},
                     {"median_actions", p.median_actions},
                     {"top_transitions", tr}});

        auto out = open_output(dir / ("cluster_" + std::to_string(p.cluster) + "_labels.csv"));
        out << "label,count\n";
        for (const auto& l : vocab.labels()) out << csv_field(l.name) << ',' << p.label_histogram(l.id) << '\n';
    }
    write_text(dir / "profiles.txt", report.str());
    write_json(dir / "profiles.json", j);
}

/// Elbow over [k_min, k_max] and the final K-means fit. Writes elbow.csv,
/// assignments.csv, centroids.csv and, when traces are given, the profiles.
inline ClusterStage run_cluster(const FeatureMatrix& F, const ActionVocabulary& vocab,
                                std::span<const UserTrace> traces, const PipelineConfig& c)
{
    return run_stage("cluster", [&] {
        ClusterStage out;
        KMeansOptions ko;
        ko.seed = c.seed;
        ko.restarts = c.restarts;
        ElbowOptions eo;
        eo.k_min = c.k_min;
        eo.k_max = std::min(c.k_max, F.rows());
        eo.knee_fraction = c.knee_fraction;
        out.elbow = explained_variance_curve(F.X, eo, ko);
        {
            auto f = open_output(c.output_dir / "elbow.csv");
            f << "K,explained_variance\n";
            for (const auto& p : out.elbow.points) f << p.K << ',' << format_double(p.explained_variance) << '\n';
        }
        const std::size_t K = c.K > 0 ? c.K : std::max<std::size_t>(out.elbow.knee, 1);
        out.model = kmeans_fit(F, K, ko);
        write_assignments_csv(c.output_dir / "assignments.csv", F.user_ids, out.model.assignments);
        std::vector<std::string> ids, cols;
        for (std::size_t k = 0; k < K; ++k) ids.push_back(std::to_string(k));
        for (const auto& l : vocab.labels()) cols.push_back(l.name);
        write_matrix_csv(c.output_dir / "centroids.csv", "cluster", ids, cols, out.model.centroids);
        if (!traces.empty()) {
            out.profiles = profile_clusters(out.model, traces, vocab.size(), c.top_actions);
            write_profiles(c.output_dir, out.profiles, vocab);
        }
        return out;
    });
}

inline std::vector<std::string> pc_names(std::size_t r)
{
    std::vector<std::string> out;
    for (std::size_t k = 1; k <= r; ++k) out.push_back("PC" + std::to_string(k));
    return out;
}

inline nlohmann::json to_json(const PcaModel& m)
{
    nlohmann::json comps = nlohmann::json::array();
    for (Eigen::Index k = 0; k < m.components.rows(); ++k) {
        comps.push_back({{"component", "PC" + std::to_string(k + 1)},
                         {"eigenvalue", m.eigenvalues(k)},
                         {"explained_variance_ratio", m.explained_variance_ratio(k)},
                         {"cumulative_ratio", m.cumulative_ratio(k)}});
    }
    return {{"requested_components", m.requested_components}, {"rank", m.rank()}, {"components", comps}};
}

/// PCA of the feature matrix: loadings.csv, coordinates.csv and pca.json.
/// `clusters` (optional) adds a cluster column to the coordinates.
inline PcaModel run_pca(const FeatureMatrix& F, const ActionVocabulary& vocab, std::span<const std::size_t> clusters,
                        const PipelineConfig& c)
{
    return run_stage("pca", [&] {
        const std::size_t r = std::min<std::size_t>(c.pca_components, std::min(F.rows(), F.cols()));
        PcaModel m = pca_fit(F.X, r);
        std::vector<std::string> labels;
        for (const auto& l : vocab.labels()) labels.push_back(l.name);
        const Matrix loadings = m.components.transpose();
        write_matrix_csv(c.output_dir / "loadings.csv", "label", labels, pc_names(m.rank()), loadings);
        const Matrix coords = pca_project(m, F.X);
        std::vector<std::vector<std::string>> extra;
        if (!clusters.empty()) {
            for (auto k : clusters) extra.push_back({std::to_string(k)});
        }
        write_matrix_csv(c.output_dir / "coordinates.csv", "id", F.user_ids, pc_names(m.rank()), coords,
                         clusters.empty() ? std::vector<std::string>{} : std::vector<std::string>{"cluster"}, extra);
        nlohmann::json j = to_json(m);
        nlohmann::json ext = nlohmann::json::array();
        for (const auto& e : loading_extremes(m)) {
            ext.push_back({{"component", "PC" + std::to_string(e.component + 1)},
                           {"min_label", vocab.name(static_cast<LabelId>(e.min_feature))},
                           {"min_coefficient", e.min_coefficient},
                           {"max_label", vocab.name(static_cast<LabelId>(e.max_feature))},
                           {"max_coefficient", e.max_coefficient}});
        }
        j["extremes"] = ext;
        write_json(c.output_dir / "pca.json", j);
        return m;
    });
}

struct CompareStage {
    std::vector<ResourceProfile> profiles;
    std::optional<ResourceLandscape> landscape;
    std::optional<TransitionDiff> diff;
};

inline nlohmann::json to_json(const TransitionDiff& d, const ActionVocabulary& vocab)
{
    std::vector<std::string> labels;
    std::vector<std::int64_t> ha, hb;
    for (auto id : d.labels_shown) {
        labels.push_back(vocab.name(id));
        ha.push_back(d.histogram_a(id));
        hb.push_back(d.histogram_b(id));
    }
    std::vector<std::vector<double>> values;
    for (Eigen::Index i = 0; i < d.diff.rows(); ++i) {
        values.emplace_back(d.diff.row(i).begin(), d.diff.row(i).end());
    }
    return {{"resource_a", d.resource_a},
            {"resource_b", d.resource_b},
            {"scale", d.scale == DiffScale::probability ? "probability" : "log_ratio"},
            {"labels", labels},
            {"histogram_a", ha},
            {"histogram_b", hb},
            {"values", values}};
}

/// Resource attribution, per-cluster aggregation, the resource landscape
/// and one transition diff.
inline CompareStage run_compare(std::span<const UserTrace> traces, const ActionVocabulary& vocab,
                                const std::unordered_map<std::string, std::size_t>& cluster_of, std::size_t K,
                                const PipelineConfig& c)
{
    return run_stage("compare", [&] {
        CompareStage out;
        const Attribution attribution = extract_resource_traces(traces, vocab.break_id(), c.threshold_pct);
        out.profiles = aggregate_cluster_actions(traces, attribution, cluster_of, K, vocab.size());
        std::stable_sort(out.profiles.begin(), out.profiles.end(), [](const auto& a, const auto& b) {
            return a.visits != b.visits ? a.visits > b.visits : a.resource < b.resource;
        });
        {
            auto f = open_output(c.output_dir / "resource_profiles.csv");
            f << "resource,visits,users";
            for (std::size_t k = 0; k < K; ++k) f << ",cluster_" << k;
            f << '\n';
            for (const auto& p : out.profiles) {
                f << csv_field(p.resource) << ',' << p.visits << ',' << p.user_count;
                for (std::size_t k = 0; k < K; ++k) f << ',' << p.cluster_action_counts(static_cast<Eigen::Index>(k));
                f << '\n';
            }
        }
        std::ostringstream header;
        header << "Users are attributed to a resource when at least " << c.threshold_pct
               << "% of their actions target it.\n"
               << "Actions are all trace tokens except BREAK; unattributed actions count in the denominator.\n"
               << "visits = actions on the resource over all users; users = attributed users;\n"
               << "cluster_k = actions of attributed users in behaviour cluster k.\n"
               << "Resources with at least one attributed user: " << out.profiles.size() << "\n";
        write_text(c.output_dir / "compare_report.txt", header.str());

        if (out.profiles.size() >= 2) {
            out.landscape = project_resources(out.profiles, c.top_resources, c.pca_components);
            write_matrix_csv(c.output_dir / "resource_coordinates.csv", "id", out.landscape->resources,
                             pc_names(out.landscape->model.rank()), out.landscape->coordinates);
            nlohmann::json j = to_json(out.landscape->model);
            nlohmann::json ext = nlohmann::json::array();
            for (const auto& e : out.landscape->extremes) {
                ext.push_back({{"component", "PC" + std::to_string(e.component + 1)},
                               {"min_cluster", e.min_feature},
                               {"min_coefficient", e.min_coefficient},
                               {"max_cluster", e.max_feature},
                               {"max_coefficient", e.max_coefficient}});
            }
            j["extremes"] = ext;
            write_json(c.output_dir / "resource_pca.json", j);

            std::string a = out.profiles[0].resource;
            std::string b = out.profiles[1].resource;
            if (c.compare_pair.size() == 2) {
                a = c.compare_pair[0];
                b = c.compare_pair[1];
            }
            auto find = [&](const std::string& name) -> const ResourceProfile& {
                for (const auto& p : out.profiles) {
                    if (p.resource == name) return p;
                }
                throw Error(Errc::invalid_argument, "resource '" + name + "' has no attributed users");
            };
            out.diff = transition_diff(find(a), find(b), vocab.break_id(), c.alpha, c.top_actions);
            write_json(c.output_dir / ("diff_" + a + "_" + b + ".json"), to_json(*out.diff, vocab));
        } else if (c.compare_pair.size() == 2) {
            throw Error(Errc::too_few_resources, "need two attributed resources to compare");
        }
        return out;
    });
}

struct RunResult {
    IngestStage ingest;
    FeatureMatrix features;
    ClusterStage cluster;
    PcaModel pca;
    CompareStage compare;
    nlohmann::json manifest;
};

/// The full pipeline. Artifacts of completed stages stay on disk when a
/// later stage fails; the error names the failing stage.
inline RunResult run_pipeline(const PipelineConfig& c)
{
    RunResult r;
    fs::create_directories(c.output_dir);
    r.ingest = run_ingest(c);
    const auto& corpus = r.ingest.corpus;
    r.features = run_features(corpus, c);
    r.cluster = run_cluster(r.features, corpus.vocabulary, corpus.traces, c);
    r.pca = run_pca(r.features, corpus.vocabulary, r.cluster.model.assignments, c);
    std::unordered_map<std::string, std::size_t> cluster_of;
    for (std::size_t i = 0; i < r.features.user_ids.size(); ++i) {
        cluster_of[r.features.user_ids[i]] = r.cluster.model.assignments[i];
    }
    r.compare = run_compare(corpus.traces, corpus.vocabulary, cluster_of, r.cluster.model.K, c);

    std::vector<std::size_t> sizes(r.cluster.model.K, 0);
    for (auto a : r.cluster.model.assignments) ++sizes[a];
    r.manifest = {{"version", version},
                  {"config", to_json(c)},
                  {"stages",
                   {{"ingest", to_json(r.ingest.counts)},
                    {"sessionize",
                     {{"users", corpus.stats.user_count},
                      {"sessions", corpus.stats.session_count},
                      {"events", corpus.stats.event_count}}},
                    {"features", {{"rows", r.features.rows()}, {"columns", r.features.cols()}, {"kind", to_string(c.feature_kind)}}},
                    {"cluster",
                     {{"k", r.cluster.model.K},
                      {"suggested_k", r.cluster.elbow.knee},
                      {"inertia", r.cluster.model.inertia},
                      {"sizes", sizes}}},
                    {"pca", to_json(r.pca)},
                    {"compare", {{"resources", r.compare.profiles.size()}}}}}};
    write_json(c.output_dir / "manifest.json", r.manifest);
    return r;
}

}  // namespace clickmine

#endif  // CLICKMINE_PIPELINE_HPP
