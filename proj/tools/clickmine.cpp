// clickmine command-line interface.

#include "clickmine/clickmine.hpp"

#include <CLI11.hpp>
#include <zlib.h>

#include <cctype>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

namespace cm = clickmine;

namespace {

const std::map<std::string, cm::LogFormat> log_formats{{"combined", cm::LogFormat::combined},
                                                       {"common", cm::LogFormat::common}};
const std::map<std::string, cm::UserKey> user_keys{{"ip", cm::UserKey::ip},
                                                   {"remote-user", cm::UserKey::remote_user},
                                                   {"ip-useragent", cm::UserKey::ip_useragent}};
const std::map<std::string, cm::FeatureKind> feature_kinds{{"stationary", cm::FeatureKind::stationary},
                                                           {"pageviews", cm::FeatureKind::pageviews}};

struct EnumText {
    std::string log_format = "combined";
    std::string user_key = "ip";
    std::string features = "stationary";
};

void add_output(CLI::App* app, cm::PipelineConfig& c)
{
    app->add_option("-o,--out", c.output_dir, "Output directory")->capture_default_str();
}

void add_ingest_options(CLI::App* app, cm::PipelineConfig& c, EnumText& e)
{
    app->add_option("--log", c.logs, "Access-log files (plain or gzip)")->required()->check(CLI::ExistingFile);
    app->add_option("--log-format", e.log_format, "combined or common")
        ->capture_default_str()
        ->check(CLI::IsMember(log_formats, CLI::ignore_case));
    app->add_option("--rules", c.rules, "Action-label rule file (default: built-in)")->check(CLI::ExistingFile);
    app->add_option("--ua-blacklist", c.useragent_blacklist, "User-agent blacklist")->check(CLI::ExistingFile);
    app->add_option("--ip-blacklist", c.ip_blacklist, "IP/CIDR blacklist")->check(CLI::ExistingFile);
    app->add_option("--asset-patterns", c.asset_patterns, "Asset path patterns")->check(CLI::ExistingFile);
    app->add_option("--gap-minutes", c.gap_minutes, "Session inactivity threshold")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    app->add_option("--user-key", e.user_key, "ip, remote-user or ip-useragent")
        ->capture_default_str()
        ->check(CLI::IsMember(user_keys, CLI::ignore_case));
}

void add_feature_options(CLI::App* app, cm::PipelineConfig& c, EnumText& e)
{
    app->add_option("--features", e.features, "stationary or pageviews")
        ->capture_default_str()
        ->check(CLI::IsMember(feature_kinds, CLI::ignore_case));
    app->add_option("--alpha", c.alpha, "Teleportation factor")->capture_default_str()->check(CLI::NonNegativeNumber);
    app->add_option("--tol", c.tol, "Power-iteration tolerance")->capture_default_str();
    app->add_option("--max-iter", c.max_iter, "Power-iteration limit")->capture_default_str();
}

void add_cluster_options(CLI::App* app, cm::PipelineConfig& c, std::string& k_range)
{
    app->add_option("--k", c.K, "Number of clusters (0: elbow suggestion)")->capture_default_str();
    app->add_option("--k-range", k_range, "Elbow range, e.g. 1..25")->capture_default_str();
    app->add_option("--seed", c.seed, "Random seed")->capture_default_str();
    app->add_option("--restarts", c.restarts, "K-means restarts")->capture_default_str()->check(CLI::PositiveNumber);
    app->add_option("--knee-fraction", c.knee_fraction, "Elbow threshold as a fraction of the first gain")
        ->capture_default_str();
}

void add_compare_options(CLI::App* app, cm::PipelineConfig& c)
{
    app->add_option("--threshold-pct", c.threshold_pct, "Attribution threshold in percent")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 100.0));
    app->add_option("--top-actions", c.top_actions, "Labels shown in diffs and profiles")->capture_default_str();
    app->add_option("--top-resources", c.top_resources, "Resources in the landscape PCA")->capture_default_str();
    app->add_option("--pair", c.compare_pair, "Two resources to diff")->expected(2);
}

void add_pca_options(CLI::App* app, cm::PipelineConfig& c)
{
    app->add_option("--pca-components", c.pca_components, "Principal components")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
}

void apply_k_range(const std::string& text, cm::PipelineConfig& c)
{
    auto sep = text.find("..");
    std::size_t len = 2;
    if (sep == std::string::npos) {
        sep = text.find(':');
        len = 1;
    }
    if (sep == std::string::npos) {
        throw CLI::ValidationError("--k-range", "expected LO..HI");
    }
    try {
        c.k_min = std::stoul(text.substr(0, sep));
        c.k_max = std::stoul(text.substr(sep + len));
    } catch (const std::exception&) {
        throw CLI::ValidationError("--k-range", "expected LO..HI");
    }
    if (c.k_min < 1 || c.k_min > c.k_max) {
        throw CLI::ValidationError("--k-range", "need 1 <= LO <= HI");
    }
}

cm::ActionVocabulary vocabulary_of(const std::vector<std::string>& labels)
{
    auto vocab = cm::ActionVocabulary::from_names(labels);
    std::vector<std::string> names;
    for (const auto& l : vocab.labels()) names.push_back(l.name);
    if (names != labels) {
        throw cm::Error(cm::Errc::vocabulary_mismatch, "feature columns are not in catalog order");
    }
    return vocab;
}

/// Traces reordered to match `users`; users without a trace are an error.
std::vector<cm::UserTrace> align_traces(std::vector<cm::UserTrace> traces, const std::vector<std::string>& users)
{
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < traces.size(); ++i) index[traces[i].user] = i;
    std::vector<cm::UserTrace> out;
    out.reserve(users.size());
    for (const auto& u : users) {
        auto it = index.find(u);
        if (it == index.end()) {
            throw cm::Error(cm::Errc::dimension_mismatch, "user " + u + " has no trace");
        }
        out.push_back(std::move(traces[it->second]));
    }
    return out;
}

std::unordered_map<std::string, std::size_t> read_cluster_map(const cm::fs::path& path, std::size_t& K)
{
    std::unordered_map<std::string, std::size_t> out;
    K = 0;
    for (auto& [user, k] : cm::read_assignments_csv(path)) {
        K = std::max(K, k + 1);
        out[user] = k;
    }
    return out;
}

void write_log(const cm::fs::path& path, const cm::SyntheticLog& log)
{
    std::ostringstream text;
    log.write(text);
    const std::string s = text.str();
    if (path.extension() == ".gz") {
        if (path.has_parent_path()) cm::fs::create_directories(path.parent_path());
        gzFile f = gzopen(path.string().c_str(), "wb");
        if (f == nullptr || gzwrite(f, s.data(), static_cast<unsigned>(s.size())) != static_cast<int>(s.size())) {
            if (f != nullptr) gzclose(f);
            throw cm::Error(cm::Errc::io, "cannot write " + path.string());
        }
        gzclose(f);
    } else {
        cm::write_text(path, s);
    }
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Mine browsing-behaviour types from web server access logs"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(cm::version));

    cm::PipelineConfig cfg;
    EnumText enum_text;
    std::string k_range = "1..25";
    cm::fs::path traces_path, features_path, assignments_path, archetypes_path, truth_path;
    cm::fs::path synth_out = "synthetic.log";
    std::size_t users = 500;
    double bots = 0.0;

    auto* ingest = app.add_subcommand("ingest", "Parse, filter, map and sessionize access logs");
    add_ingest_options(ingest, cfg, enum_text);
    add_output(ingest, cfg);
    ingest->add_option("--jobs", cfg.jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);

    auto* features = app.add_subcommand("features", "Per-user feature matrix from a traces file");
    features->add_option("--traces", traces_path, "traces.jsonl")->required()->check(CLI::ExistingFile);
    add_feature_options(features, cfg, enum_text);
    add_output(features, cfg);
    features->add_option("--jobs", cfg.jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);

    auto* cluster = app.add_subcommand("cluster", "Elbow curve and K-means clustering");
    cluster->add_option("--input", features_path, "features.csv")->required()->check(CLI::ExistingFile);
    cluster->add_option("--traces", traces_path, "traces.jsonl, for cluster profiles")->check(CLI::ExistingFile);
    add_cluster_options(cluster, cfg, k_range);
    cluster->add_option("--top-actions", cfg.top_actions, "Transitions listed per cluster")->capture_default_str();
    add_output(cluster, cfg);

    auto* pca = app.add_subcommand("pca", "Principal component analysis of a feature matrix");
    pca->add_option("--input", features_path, "features.csv")->required()->check(CLI::ExistingFile);
    pca->add_option("--assignments", assignments_path, "assignments.csv")->check(CLI::ExistingFile);
    add_pca_options(pca, cfg);
    add_output(pca, cfg);

    auto* compare = app.add_subcommand("compare", "Compare resources by the behaviour mix they attract");
    compare->add_option("--traces", traces_path, "traces.jsonl")->required()->check(CLI::ExistingFile);
    compare->add_option("--assignments", assignments_path, "assignments.csv")->required()->check(CLI::ExistingFile);
    add_compare_options(compare, cfg);
    add_pca_options(compare, cfg);
    compare->add_option("--alpha", cfg.alpha, "Teleportation factor")->capture_default_str();
    add_output(compare, cfg);

    auto* synth = app.add_subcommand("synth", "Generate a synthetic access log with ground truth");
    synth->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
    synth->add_option("--users", users, "Users per archetype")->capture_default_str();
    synth->add_option("--bots", bots, "Fraction of crawler lines")->capture_default_str()->check(CLI::Range(0.0, 0.99));
    synth->add_option("--archetypes", archetypes_path, "Archetype config (default: built-in)")
        ->check(CLI::ExistingFile);
    synth->add_option("--rules", cfg.rules, "Rule file the log must map through")->check(CLI::ExistingFile);
    synth->add_option("-o,--out", synth_out, "Log file to write (.gz compresses)")->capture_default_str();
    synth->add_option("--truth", truth_path, "Ground-truth JSON (default: <out>.truth.json)");

    auto* run = app.add_subcommand("run", "Run the whole pipeline");
    run->set_config("--config", "", "TOML/INI configuration file");
    add_ingest_options(run, cfg, enum_text);
    add_feature_options(run, cfg, enum_text);
    add_cluster_options(run, cfg, k_range);
    add_pca_options(run, cfg);
    add_compare_options(run, cfg);
    add_output(run, cfg);
    run->add_option("--jobs", cfg.jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
        if (cluster->parsed() || run->parsed()) apply_k_range(k_range, cfg);
        auto lower = [](std::string t) {
            for (auto& ch : t) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
            return t;
        };
        cfg.log_format = log_formats.at(lower(enum_text.log_format));
        cfg.user_key = user_keys.at(lower(enum_text.user_key));
        cfg.feature_kind = feature_kinds.at(lower(enum_text.features));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (ingest->parsed()) {
            auto out = cm::run_ingest(cfg);
            std::cout << cm::to_json(out.counts).dump(2) << '\n';
        } else if (features->parsed()) {
            auto tf = cm::run_stage("features", [&] { return cm::read_traces_file(traces_path); });
            cm::Corpus corpus;
            corpus.vocabulary = tf.vocabulary;
            corpus.traces = std::move(tf.traces);
            auto F = cm::run_features(corpus, cfg);
            std::cout << "wrote " << F.rows() << " x " << F.cols() << " features\n";
        } else if (cluster->parsed()) {
            auto table = cm::run_stage("cluster", [&] { return cm::read_features_csv(features_path); });
            auto vocab = cm::run_stage("cluster", [&] { return vocabulary_of(table.labels); });
            std::vector<cm::UserTrace> traces;
            if (!traces_path.empty()) {
                traces = cm::run_stage("cluster", [&] {
                    return align_traces(cm::read_traces_file(traces_path).traces, table.features.user_ids);
                });
            }
            auto st = cm::run_cluster(table.features, vocab, traces, cfg);
            std::cout << "K = " << st.model.K << " (suggested " << st.elbow.knee << "), inertia "
                      << st.model.inertia << '\n';
        } else if (pca->parsed()) {
            auto table = cm::run_stage("pca", [&] { return cm::read_features_csv(features_path); });
            auto vocab = cm::run_stage("pca", [&] { return vocabulary_of(table.labels); });
            std::vector<std::size_t> clusters;
            if (!assignments_path.empty()) {
                std::size_t K = 0;
                auto map = cm::run_stage("pca", [&] { return read_cluster_map(assignments_path, K); });
                for (const auto& u : table.features.user_ids) {
                    auto it = map.find(u);
                    if (it == map.end()) {
                        throw cm::StageError("pca", cm::Error(cm::Errc::unassigned_user, "user " + u + " has no cluster"));
                    }
                    clusters.push_back(it->second);
                }
            }
            auto m = cm::run_pca(table.features, vocab, clusters, cfg);
            std::cout << cm::to_json(m).dump(2) << '\n';
        } else if (compare->parsed()) {
            auto tf = cm::run_stage("compare", [&] { return cm::read_traces_file(traces_path); });
            std::size_t K = 0;
            auto map = cm::run_stage("compare", [&] { return read_cluster_map(assignments_path, K); });
            auto st = cm::run_compare(tf.traces, tf.vocabulary, map, K, cfg);
            std::cout << st.profiles.size() << " resources with attributed users\n";
        } else if (synth->parsed()) {
            cm::run_stage("synth", [&] {
                const auto rules = cm::load_rules(cfg);
                const auto text = archetypes_path.empty() ? std::string(cm::defaults::archetypes)
                                                          : cm::read_file(archetypes_path);
                const auto archetypes = cm::parse_archetypes(text, rules.vocabulary());
                cm::SynthOptions so;
                so.seed = cfg.seed;
                so.users_per_archetype = users;
                so.bot_fraction = bots;
                const auto log = cm::generate_synthetic_log(archetypes, rules, so);
                write_log(synth_out, log);
                const auto truth = truth_path.empty() ? cm::fs::path(synth_out.string() + ".truth.json") : truth_path;
                cm::write_json(truth, cm::to_json(log.truth, rules.vocabulary()));
                std::cout << "wrote " << log.records.size() << " lines (" << log.truth.bot_lines << " bot, "
                          << log.truth.asset_lines << " asset) to " << synth_out.string() << '\n';
                return 0;
            });
        } else if (run->parsed()) {
            auto r = cm::run_pipeline(cfg);
            std::cout << r.manifest["stages"].dump(2) << '\n';
        }
    } catch (const cm::Error& e) {
        std::cerr << "clickmine: " << e.what() << '\n';
        return 2;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "clickmine: IoError: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
