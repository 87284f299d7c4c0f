#pragma once
#ifndef CLICKMINE_CLUSTER_HPP
#define CLICKMINE_CLUSTER_HPP

// K-means over user feature vectors, the explained-variance (elbow) curve and
// per-cluster profiles.

#include "clickmine/error.hpp"
#include "clickmine/markov.hpp"
#include "clickmine/sessions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace clickmine {

enum class FeatureKind { stationary, pageviews };

constexpr std::string_view to_string(FeatureKind k) noexcept
{
    return k == FeatureKind::stationary ? "stationary" : "pageviews";
}

struct FeatureMatrix {
    std::vector<std::string> user_ids;
    Matrix X;  // one row per user
    FeatureKind kind = FeatureKind::stationary;

    [[nodiscard]] std::size_t rows() const noexcept { return static_cast<std::size_t>(X.rows()); }
    [[nodiscard]] std::size_t cols() const noexcept { return static_cast<std::size_t>(X.cols()); }
};

struct KMeansOptions {
    std::uint64_t seed = 0;
    std::size_t restarts = 10;
    double tol = 1e-6;  // max centroid displacement that counts as converged
    std::size_t max_iter = 300;
};

struct ClusterModel {
    std::size_t K = 0;
    Matrix centroids;                      // K x n
    std::vector<std::size_t> assignments;  // one per row of the input
    double inertia = 0.0;
    std::uint64_t seed = 0;
    std::size_t restarts = 0;
    std::size_t iterations = 0;            // Lloyd iterations of the winning run
    std::vector<double> inertia_history;   // of the winning run, one entry per assignment step
};

namespace detail {

// Portable uniform double in [0, 1) from a 64-bit engine.
inline double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double squared_distance(const Matrix& A, Eigen::Index i, const Matrix& B, Eigen::Index j)
{
    return (A.row(i) - B.row(j)).squaredNorm();
}

// argmin over centroids, ties resolved to the lowest cluster id.
inline std::size_t nearest(const Matrix& X, Eigen::Index i, const Matrix& C, double& best)
{
    std::size_t arg = 0;
    best = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < C.rows(); ++k) {
        double d = squared_distance(X, i, C, k);
        if (d < best) {
            best = d;
            arg = static_cast<std::size_t>(k);
        }
    }
    return arg;
}

// Samples an index with probability proportional to weights; uniform if all zero.
inline std::size_t sample_weighted(const std::vector<double>& w, std::mt19937_64& rng)
{
    double total = std::accumulate(w.begin(), w.end(), 0.0);
    if (!(total > 0.0)) {
        return static_cast<std::size_t>(unit_uniform(rng) * static_cast<double>(w.size()));
    }
    double r = unit_uniform(rng) * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        acc += w[i];
        if (r < acc) {
            return i;
        }
    }
    for (std::size_t i = w.size(); i-- > 0;) {
        if (w[i] > 0.0) return i;
    }
    return 0;
}

// k-means++ seeding of centroids [first, K) given the ones already placed.
inline void seed_plus_plus(const Matrix& X, Matrix& C, std::size_t first, std::mt19937_64& rng)
{
    const auto m = X.rows();
    std::vector<double> d2(static_cast<std::size_t>(m), std::numeric_limits<double>::infinity());
    if (first == 0) {
        auto idx = static_cast<Eigen::Index>(unit_uniform(rng) * static_cast<double>(m));
        C.row(0) = X.row(idx);
        first = 1;
    }
    for (Eigen::Index i = 0; i < m; ++i) {
        for (std::size_t k = 0; k < first; ++k) {
            d2[static_cast<std::size_t>(i)] =
                std::min(d2[static_cast<std::size_t>(i)], squared_distance(X, i, C, static_cast<Eigen::Index>(k)));
        }
    }
    for (auto k = static_cast<Eigen::Index>(first); k < C.rows(); ++k) {
        auto idx = static_cast<Eigen::Index>(sample_weighted(d2, rng));
        C.row(k) = X.row(idx);
        for (Eigen::Index i = 0; i < m; ++i) {
            d2[static_cast<std::size_t>(i)] = std::min(d2[static_cast<std::size_t>(i)], squared_distance(X, i, C, k));
        }
    }
}

struct LloydResult {
    Matrix centroids;
    std::vector<std::size_t> assignments;
    double inertia = 0.0;
    std::size_t iterations = 0;
    std::vector<double> history;
};

inline double assign_all(const Matrix& X, const Matrix& C, std::vector<std::size_t>& a)
{
    double inertia = 0.0;
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        double d = 0.0;
        a[static_cast<std::size_t>(i)] = nearest(X, i, C, d);
        inertia += d;
    }
    return inertia;
}

inline LloydResult lloyd_pass(const Matrix& X, Matrix C, const KMeansOptions& opts)
{
    const auto m = X.rows();
    const auto K = C.rows();
    LloydResult r;
    r.assignments.assign(static_cast<std::size_t>(m), 0);
    for (std::size_t it = 1; it <= opts.max_iter; ++it) {
        r.history.push_back(assign_all(X, C, r.assignments));
        r.iterations = it;

        Matrix next = Matrix::Zero(K, X.cols());
        std::vector<std::size_t> sizes(static_cast<std::size_t>(K), 0);
        for (Eigen::Index i = 0; i < m; ++i) {
            auto a = r.assignments[static_cast<std::size_t>(i)];
            next.row(static_cast<Eigen::Index>(a)) += X.row(i);
            ++sizes[a];
        }
        for (Eigen::Index k = 0; k < K; ++k) {
            if (sizes[static_cast<std::size_t>(k)] > 0) {
                next.row(k) /= static_cast<double>(sizes[static_cast<std::size_t>(k)]);
                continue;
            }
            // Empty cluster: move it onto the point farthest from its own centroid.
            Eigen::Index far = 0;
            double far_d = -1.0;
            for (Eigen::Index i = 0; i < m; ++i) {
                auto a = static_cast<Eigen::Index>(r.assignments[static_cast<std::size_t>(i)]);
                if (sizes[static_cast<std::size_t>(a)] <= 1) {
                    continue;
                }
                double d = squared_distance(X, i, C, a);
                if (d > far_d) {
                    far_d = d;
                    far = i;
                }
            }
            if (far_d >= 0.0) {
                --sizes[r.assignments[static_cast<std::size_t>(far)]];
                r.assignments[static_cast<std::size_t>(far)] = static_cast<std::size_t>(k);
                sizes[static_cast<std::size_t>(k)] = 1;
            }
            next.row(k) = X.row(far);
        }
        double shift = 0.0;
        for (Eigen::Index k = 0; k < K; ++k) {
            shift = std::max(shift, (next.row(k) - C.row(k)).norm());
        }
        C = std::move(next);
        if (shift <= opts.tol) {
            break;
        }
    }
    // Final assignment so the stored labels are the argmin of the stored centroids.
    r.inertia = assign_all(X, C, r.assignments);
    r.history.push_back(r.inertia);
    r.centroids = std::move(C);
    return r;
}

/// Single-point transfers: moves a point to another cluster whenever that
/// lowers the inertia, accounting for both centroid shifts. Returns true if
/// anything moved; C is left at the means of the new partition.
inline bool transfer_pass(const Matrix& X, Matrix& C, std::vector<std::size_t>& a)
{
    const auto m = X.rows();
    const auto K = C.rows();
    std::vector<double> sizes(static_cast<std::size_t>(K), 0.0);
    Matrix sums = Matrix::Zero(K, X.cols());
    for (Eigen::Index i = 0; i < m; ++i) {
        sums.row(static_cast<Eigen::Index>(a[static_cast<std::size_t>(i)])) += X.row(i);
        sizes[a[static_cast<std::size_t>(i)]] += 1.0;
    }
    for (Eigen::Index k = 0; k < K; ++k) {
        if (sizes[static_cast<std::size_t>(k)] > 0.0) C.row(k) = sums.row(k) / sizes[static_cast<std::size_t>(k)];
    }
    bool any = false;
    for (bool moved = true; moved;) {
        moved = false;
        for (Eigen::Index i = 0; i < m; ++i) {
            const auto from = a[static_cast<std::size_t>(i)];
            const double n_from = sizes[from];
            if (n_from <= 1.0) continue;
            const double loss = n_from / (n_from - 1.0) * squared_distance(X, i, C, static_cast<Eigen::Index>(from));
            std::size_t to = from;
            double best = loss;
            for (Eigen::Index k = 0; k < K; ++k) {
                const auto ku = static_cast<std::size_t>(k);
                if (ku == from) continue;
                const double gain = sizes[ku] / (sizes[ku] + 1.0) * squared_distance(X, i, C, k);
                if (gain < best) {
                    best = gain;
                    to = ku;
                }
            }
            if (to == from || !(best < loss * (1.0 - 1e-12))) continue;
            const auto f = static_cast<Eigen::Index>(from);
            const auto t = static_cast<Eigen::Index>(to);
            sums.row(f) -= X.row(i);
            sums.row(t) += X.row(i);
            sizes[from] -= 1.0;
            sizes[to] += 1.0;
            C.row(f) = sums.row(f) / sizes[from];
            C.row(t) = sums.row(t) / sizes[to];
            a[static_cast<std::size_t>(i)] = to;
            moved = any = true;
        }
    }
    return any;
}

/// Lloyd iterations, then single-point transfers; repeated until a transfer
/// pass leaves the partition alone.
inline LloydResult lloyd(const Matrix& X, Matrix C, const KMeansOptions& opts)
{
    LloydResult r = lloyd_pass(X, std::move(C), opts);
    for (std::size_t round = 0; round < opts.max_iter; ++round) {
        Matrix next = r.centroids;
        auto a = r.assignments;
        if (!transfer_pass(X, next, a)) break;
        LloydResult again = lloyd_pass(X, std::move(next), opts);
        if (!(again.inertia < r.inertia)) break;
        again.history.insert(again.history.begin(), r.history.begin(), r.history.end());
        again.iterations += r.iterations;
        r = std::move(again);
    }
    return r;
}

inline void check_fit_args(const Matrix& X, std::size_t K)
{
    if (X.rows() == 0 || X.cols() == 0) {
        throw Error(Errc::empty_matrix, "feature matrix is empty");
    }
    if (K == 0 || K > static_cast<std::size_t>(X.rows())) {
        throw Error(Errc::k_too_large, "K = " + std::to_string(K) + " must be in [1, " +
                                           std::to_string(X.rows()) + "]");
    }
}

inline std::mt19937_64 restart_engine(std::uint64_t seed, std::size_t restart)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(restart)};
    return std::mt19937_64(seq);
}

inline ClusterModel best_of(std::vector<LloydResult>& runs, std::size_t K, const KMeansOptions& opts)
{
    std::size_t best = 0;
    for (std::size_t i = 1; i < runs.size(); ++i) {
        if (runs[i].inertia < runs[best].inertia) {
            best = i;
        }
    }
    ClusterModel model;
    model.K = K;
    model.centroids = std::move(runs[best].centroids);
    model.assignments = std::move(runs[best].assignments);
    model.inertia = runs[best].inertia;
    model.iterations = runs[best].iterations;
    model.inertia_history = std::move(runs[best].history);
    model.seed = opts.seed;
    model.restarts = opts.restarts;
    return model;
}

}  // namespace detail

/// Sum of squared distances to the column mean.
inline double total_sum_of_squares(const Matrix& X)
{
    if (X.rows() == 0) {
        return 0.0;
    }
    Eigen::RowVectorXd mean = X.colwise().mean();
    return (X.rowwise() - mean).squaredNorm();
}

/// Best-of-restarts k-means: k-means++ seeding, Lloyd iterations and a
/// single-point transfer polish. Deterministic in (data, K, seed, restarts).
inline ClusterModel kmeans_fit(const Matrix& X, std::size_t K, const KMeansOptions& opts = {})
{
    detail::check_fit_args(X, K);
    std::vector<detail::LloydResult> runs;
    const std::size_t restarts = std::max<std::size_t>(1, opts.restarts);
    for (std::size_t r = 0; r < restarts; ++r) {
        auto rng = detail::restart_engine(opts.seed, r);
        Matrix C(static_cast<Eigen::Index>(K), X.cols());
        detail::seed_plus_plus(X, C, 0, rng);
        runs.push_back(detail::lloyd(X, std::move(C), opts));
    }
    return detail::best_of(runs, K, opts);
}

inline ClusterModel kmeans_fit(const FeatureMatrix& F, std::size_t K, const KMeansOptions& opts = {})
{
    return kmeans_fit(F.X, K, opts);
}

/// Warm start: keeps `previous` centroids and seeds the remaining ones with
/// k-means++ sampling. The resulting inertia never exceeds previous.inertia.
inline ClusterModel kmeans_fit_nested(const Matrix& X, const ClusterModel& previous, std::size_t K,
                                      const KMeansOptions& opts = {})
{
    detail::check_fit_args(X, K);
    if (previous.K >= K) {
        throw Error(Errc::invalid_argument, "nested fit needs a model with fewer clusters");
    }
    std::vector<detail::LloydResult> runs;
    const std::size_t restarts = std::max<std::size_t>(1, opts.restarts);
    for (std::size_t r = 0; r < restarts; ++r) {
        auto rng = detail::restart_engine(opts.seed ^ (0x9e3779b97f4a7c15ULL * K), r);
        Matrix C(static_cast<Eigen::Index>(K), X.cols());
        C.topRows(static_cast<Eigen::Index>(previous.K)) = previous.centroids;
        detail::seed_plus_plus(X, C, previous.K, rng);
        runs.push_back(detail::lloyd(X, std::move(C), opts));
    }
    return detail::best_of(runs, K, opts);
}

enum class ElbowMode { independent, nested };

struct ElbowPoint {
    std::size_t K = 0;
    double explained_variance = 0.0;
    double inertia = 0.0;
};

struct ElbowCurve {
    std::vector<ElbowPoint> points;
    std::size_t knee = 0;  // suggested K; 0 if the curve has fewer than two points

    /// EV(K) - EV(K-1); requires both K and K-1 on the curve.
    [[nodiscard]] double marginal_gain(std::size_t K) const
    {
        const ElbowPoint* cur = nullptr;
        const ElbowPoint* prev = nullptr;
        for (const auto& p : points) {
            if (p.K == K) cur = &p;
            if (p.K + 1 == K) prev = &p;
        }
        if (cur == nullptr || prev == nullptr) {
            throw Error(Errc::invalid_argument, "K and K-1 must both be on the curve");
        }
        return cur->explained_variance - prev->explained_variance;
    }
};

struct ElbowOptions {
    std::size_t k_min = 1;
    std::size_t k_max = 25;
    ElbowMode mode = ElbowMode::independent;
    double knee_fraction = 0.05;  // of the K=1 -> 2 gain
};

/// Largest K whose marginal EV gain exceeds `fraction` of the gain from
/// K = 1 to K = 2. Needs K = 1 and 2 on the curve.
inline std::size_t suggest_knee(const ElbowCurve& curve, double fraction)
{
    double base = 0.0;
    bool have_base = false;
    for (const auto& p : curve.points) {
        if (p.K == 2) {
            try {
                base = curve.marginal_gain(2);
                have_base = true;
            } catch (const Error&) {
            }
        }
    }
    if (!have_base) {
        return 0;
    }
    std::size_t knee = 2;
    for (const auto& p : curve.points) {
        if (p.K <= 2) continue;
        try {
            if (curve.marginal_gain(p.K) > fraction * base) {
                knee = p.K;
            }
        } catch (const Error&) {
        }
    }
    return knee;
}

/// EV(K) = 1 - inertia(K) / total SS for each K in [k_min, k_max]; EV is 1
/// everywhere when all points coincide.
inline ElbowCurve explained_variance_curve(const Matrix& X, const ElbowOptions& eopts = {},
                                           const KMeansOptions& kopts = {})
{
    if (X.rows() == 0) {
        throw Error(Errc::empty_matrix, "feature matrix is empty");
    }
    if (eopts.k_min < 1 || eopts.k_min > eopts.k_max || eopts.k_max > static_cast<std::size_t>(X.rows())) {
        throw Error(Errc::k_too_large, "K range [" + std::to_string(eopts.k_min) + ", " +
                                           std::to_string(eopts.k_max) + "] must lie in [1, " +
                                           std::to_string(X.rows()) + "]");
    }
    const double total = total_sum_of_squares(X);
    ElbowCurve curve;
    ClusterModel prev;
    for (std::size_t K = eopts.k_min; K <= eopts.k_max; ++K) {
        ClusterModel model = (eopts.mode == ElbowMode::nested && K > 1)
                                 ? (prev.K == K - 1 ? kmeans_fit_nested(X, prev, K, kopts)
                                                    : kmeans_fit_nested(X, kmeans_fit(X, K - 1, kopts), K, kopts))
                                 : kmeans_fit(X, K, kopts);
        double ev = total > 0.0 ? 1.0 - model.inertia / total : 1.0;
        curve.points.push_back({K, std::clamp(ev, 0.0, 1.0), model.inertia});
        prev = std::move(model);
    }
    curve.knee = suggest_knee(curve, eopts.knee_fraction);
    return curve;
}

struct ClusterProfile {
    std::size_t cluster = 0;
    std::size_t size = 0;
    double mean_actions = 0.0;
    double median_actions = 0.0;
    CountVector label_histogram;  // summed page views, BREAK included
    TransitionCounts transitions; // summed per-user counts

    struct Transition {
        LabelId from = 0;
        LabelId to = 0;
        std::int64_t count = 0;
    };
    std::vector<Transition> top_transitions;
};

/// Per-cluster sizes, action counts and aggregate histograms. `traces` must
/// be aligned with the rows the model was fit on; "actions" exclude BREAK.
inline std::vector<ClusterProfile> profile_clusters(const ClusterModel& model, std::span<const UserTrace> traces,
                                                    std::size_t n_labels, std::size_t top_transitions = 10)
{
    if (traces.size() != model.assignments.size()) {
        throw Error(Errc::dimension_mismatch, "traces and assignments differ in length");
    }
    std::vector<ClusterProfile> profiles(model.K);
    std::vector<std::vector<std::size_t>> actions(model.K);
    for (std::size_t c = 0; c < model.K; ++c) {
        profiles[c].cluster = c;
        profiles[c].label_histogram = CountVector::Zero(static_cast<Eigen::Index>(n_labels));
        profiles[c].transitions = TransitionCounts(n_labels);
    }
    for (std::size_t u = 0; u < traces.size(); ++u) {
        auto c = model.assignments[u];
        auto& p = profiles[c];
        ++p.size;
        actions[c].push_back(traces[u].action_count());
        p.label_histogram += page_view_vector(traces[u].sequence, n_labels);
        p.transitions += count_transitions(traces[u].sequence, n_labels);
    }
    for (std::size_t c = 0; c < model.K; ++c) {
        auto& p = profiles[c];
        auto& a = actions[c];
        if (!a.empty()) {
            std::sort(a.begin(), a.end());
            p.mean_actions = static_cast<double>(std::accumulate(a.begin(), a.end(), std::size_t{0})) /
                             static_cast<double>(a.size());
            p.median_actions = a.size() % 2 == 1
                                   ? static_cast<double>(a[a.size() / 2])
                                   : 0.5 * static_cast<double>(a[a.size() / 2 - 1] + a[a.size() / 2]);
        }
        std::vector<ClusterProfile::Transition> all;
        for (Eigen::Index i = 0; i < p.transitions.counts.rows(); ++i) {
            for (Eigen::Index j = 0; j < p.transitions.counts.cols(); ++j) {
                if (auto cnt = p.transitions.counts(i, j); cnt > 0) {
                    all.push_back({static_cast<LabelId>(i), static_cast<LabelId>(j), cnt});
                }
            }
        }
        std::stable_sort(all.begin(), all.end(), [](const auto& x, const auto& y) { return x.count > y.count; });
        all.resize(std::min(all.size(), top_transitions));
        p.top_transitions = std::move(all);
    }
    return profiles;
}

/// Fraction of points whose cluster's majority class matches their own class.
inline double purity(std::span<const std::size_t> clusters, std::span<const std::size_t> classes)
{
    if (clusters.size() != classes.size()) {
        throw Error(Errc::dimension_mismatch, "cluster and class vectors differ in length");
    }
    if (clusters.empty()) {
        return 1.0;
    }
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> joint;
    for (std::size_t i = 0; i < clusters.size(); ++i) {
        ++joint[{clusters[i], classes[i]}];
    }
    std::map<std::size_t, std::size_t> best;
    for (const auto& [key, count] : joint) {
        best[key.first] = std::max(best[key.first], count);
    }
    std::size_t hits = 0;
    for (const auto& [c, count] : best) hits += count;
    return static_cast<double>(hits) / static_cast<double>(clusters.size());
}

}  // namespace clickmine

#endif  // CLICKMINE_CLUSTER_HPP
