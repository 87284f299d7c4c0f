#pragma once
#ifndef CLICKMINE_COMPARE_HPP
#define CLICKMINE_COMPARE_HPP

// Per-resource behaviour comparison: threshold attribution of users to
// resources, cluster-level action aggregation, transition-matrix differences
// and the resource PCA landscape.

#include "clickmine/action_map.hpp"
#include "clickmine/cluster.hpp"
#include "clickmine/error.hpp"
#include "clickmine/markov.hpp"
#include "clickmine/pca.hpp"
#include "clickmine/sessions.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace clickmine {

inline constexpr double default_threshold_pct = 20.0;

/// resource -> indices (into the trace list) of users attributed to it.
using Attribution = std::map<std::string, std::vector<std::size_t>>;

/// A user is attributed to resource r iff their actions on r make up at
/// least threshold_pct percent of all their actions. BREAK tokens are not
/// actions; unattributed actions count in the denominator only.
inline Attribution extract_resource_traces(std::span<const UserTrace> traces, LabelId break_id,
                                           double threshold_pct = default_threshold_pct)
{
    Attribution out;
    std::map<std::string, std::size_t> per_resource;
    for (std::size_t u = 0; u < traces.size(); ++u) {
        const auto& t = traces[u];
        per_resource.clear();
        std::size_t total = 0;
        for (std::size_t i = 0; i < t.sequence.size(); ++i) {
            if (t.sequence[i] == break_id) {
                continue;
            }
            ++total;
            if (i < t.resources.size() && !t.resources[i].empty()) {
                ++per_resource[t.resources[i]];
            }
        }
        if (total == 0) {
            continue;
        }
        for (const auto& [resource, count] : per_resource) {
            if (100.0 * static_cast<double>(count) >= threshold_pct * static_cast<double>(total)) {
                out[resource].push_back(u);
            }
        }
    }
    return out;
}

struct ResourceProfile {
    std::string resource;
    std::size_t visits = 0;      // actions attributed to this resource, over all users
    std::size_t user_count = 0;  // attributed users
    CountVector cluster_action_counts;  // per behaviour cluster: actions of attributed users
    std::vector<std::size_t> cluster_rank;  // 1 = cluster with the most actions
    CountVector label_counts;    // label frequencies over attributed traces
    TransitionCounts counts;     // summed over attributed traces
    std::size_t action_total = 0;
};

/// Competition ranking (1 = largest); ties go to the lower index.
inline std::vector<std::size_t> rank_descending(const CountVector& v)
{
    std::vector<std::size_t> order(static_cast<std::size_t>(v.size()));
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return v(static_cast<Eigen::Index>(a)) > v(static_cast<Eigen::Index>(b));
    });
    std::vector<std::size_t> rank(order.size());
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        rank[order[pos]] = pos + 1;
    }
    return rank;
}

/// Per-resource aggregation grouped by behaviour cluster. `cluster_of` maps
/// user id to cluster; an attributed user missing from it is an error.
inline std::vector<ResourceProfile> aggregate_cluster_actions(
    std::span<const UserTrace> traces, const Attribution& attribution,
    const std::unordered_map<std::string, std::size_t>& cluster_of, std::size_t K, std::size_t n_labels)
{
    std::map<std::string, std::size_t> visits;
    for (const auto& t : traces) {
        for (const auto& r : t.resources) {
            if (!r.empty()) ++visits[r];
        }
    }
    std::vector<ResourceProfile> profiles;
    for (const auto& [resource, users] : attribution) {
        ResourceProfile p;
        p.resource = resource;
        p.visits = visits[resource];
        p.user_count = users.size();
        p.cluster_action_counts = CountVector::Zero(static_cast<Eigen::Index>(K));
        p.label_counts = CountVector::Zero(static_cast<Eigen::Index>(n_labels));
        p.counts = TransitionCounts(n_labels);
        for (std::size_t u : users) {
            const auto& t = traces[u];
            auto it = cluster_of.find(t.user);
            if (it == cluster_of.end()) {
                throw Error(Errc::unassigned_user, "user " + t.user + " attributed to " + resource +
                                                       " has no cluster assignment");
            }
            if (it->second >= K) {
                throw Error(Errc::invalid_argument, "cluster id " + std::to_string(it->second) + " >= K");
            }
            const auto actions = static_cast<std::int64_t>(t.action_count());
            p.cluster_action_counts(static_cast<Eigen::Index>(it->second)) += actions;
            p.action_total += static_cast<std::size_t>(actions);
            p.label_counts += page_view_vector(t.sequence, n_labels);
            p.counts += count_transitions(t.sequence, n_labels);
        }
        p.cluster_rank = rank_descending(p.cluster_action_counts);
        profiles.push_back(std::move(p));
    }
    return profiles;
}

enum class DiffScale { probability, log_ratio };

struct TransitionDiff {
    std::string resource_a;
    std::string resource_b;
    std::vector<LabelId> labels_shown;  // by descending combined frequency
    Matrix diff;                        // t x t, rows = from, cols = to
    CountVector histogram_a;
    CountVector histogram_b;
    DiffScale scale = DiffScale::probability;
};

/// Fits a smoothed chain per resource and returns P_a - P_b restricted to
/// the top_t most frequent non-BREAK labels (log P_a - log P_b under
/// DiffScale::log_ratio).
inline TransitionDiff transition_diff(const ResourceProfile& a, const ResourceProfile& b, LabelId break_id,
                                      double alpha = default_alpha, std::size_t top_t = 10,
                                      DiffScale scale = DiffScale::probability)
{
    if (a.counts.size() != b.counts.size() || a.label_counts.size() != b.label_counts.size()) {
        throw Error(Errc::dimension_mismatch, "profiles use different vocabularies");
    }
    if (scale == DiffScale::log_ratio && !(alpha > 0.0)) {
        throw Error(Errc::invalid_argument, "log-ratio diff needs alpha > 0");
    }
    TransitionModel pa = build_transition_model(a.counts, alpha);
    TransitionModel pb = build_transition_model(b.counts, alpha);

    const CountVector combined = a.label_counts + b.label_counts;
    std::vector<LabelId> order;
    for (Eigen::Index i = 0; i < combined.size(); ++i) {
        if (static_cast<LabelId>(i) != break_id) order.push_back(static_cast<LabelId>(i));
    }
    std::stable_sort(order.begin(), order.end(), [&](LabelId x, LabelId y) { return combined(x) > combined(y); });
    order.resize(std::min(order.size(), top_t));

    TransitionDiff out;
    out.resource_a = a.resource;
    out.resource_b = b.resource;
    out.labels_shown = order;
    out.histogram_a = a.label_counts;
    out.histogram_b = b.label_counts;
    out.scale = scale;
    const auto t = static_cast<Eigen::Index>(order.size());
    out.diff.resize(t, t);
    for (Eigen::Index i = 0; i < t; ++i) {
        for (Eigen::Index j = 0; j < t; ++j) {
            const double x = pa.P(order[i], order[j]);
            const double y = pb.P(order[i], order[j]);
            out.diff(i, j) = scale == DiffScale::probability ? x - y : std::log(x) - std::log(y);
        }
    }
    return out;
}

struct ResourceLandscape {
    std::vector<std::string> resources;  // selected, by descending visits
    Matrix coordinates;                  // one row per selected resource
    PcaModel model;                      // over cluster-action count vectors
    std::vector<LoadingExtremes> extremes;  // feature index = cluster id
};

/// PCA over the cluster-action vectors of the top_m most visited resources.
inline ResourceLandscape project_resources(std::span<const ResourceProfile> profiles, std::size_t top_m = 50,
                                           std::size_t r = 3)
{
    std::vector<const ResourceProfile*> chosen;
    for (const auto& p : profiles) chosen.push_back(&p);
    std::stable_sort(chosen.begin(), chosen.end(), [](const ResourceProfile* x, const ResourceProfile* y) {
        return x->visits != y->visits ? x->visits > y->visits : x->resource < y->resource;
    });
    chosen.resize(std::min(chosen.size(), top_m));
    if (chosen.size() < 2) {
        throw Error(Errc::too_few_resources, "need at least two resources, have " + std::to_string(chosen.size()));
    }
    const auto K = chosen.front()->cluster_action_counts.size();
    Matrix X(static_cast<Eigen::Index>(chosen.size()), K);
    ResourceLandscape out;
    for (std::size_t i = 0; i < chosen.size(); ++i) {
        if (chosen[i]->cluster_action_counts.size() != K) {
            throw Error(Errc::dimension_mismatch, "profiles disagree on the cluster count");
        }
        X.row(static_cast<Eigen::Index>(i)) = chosen[i]->cluster_action_counts.cast<double>().transpose();
        out.resources.push_back(chosen[i]->resource);
    }
    const std::size_t comps = std::min<std::size_t>(r, std::min<std::size_t>(chosen.size(), static_cast<std::size_t>(K)));
    out.model = pca_fit(X, comps);
    out.coordinates = pca_project(out.model, X);
    out.extremes = loading_extremes(out.model);
    return out;
}

}  // namespace clickmine

#endif  // CLICKMINE_COMPARE_HPP
