#pragma once
#ifndef CLICKMINE_FEATURES_HPP
#define CLICKMINE_FEATURES_HPP

#include "clickmine/cluster.hpp"
#include "clickmine/markov.hpp"
#include "clickmine/sessions.hpp"

#include <algorithm>
#include <span>
#include <thread>
#include <vector>

namespace clickmine {

struct FeatureOptions {
    FeatureKind kind = FeatureKind::stationary;
    double alpha = default_alpha;
    StationaryOptions stationary{};
    std::size_t jobs = 1;
};

/// One row per trace: the stationary distribution of the user's smoothed
/// chain, or raw page-view counts.
inline FeatureMatrix build_features(std::span<const UserTrace> traces, std::size_t n_labels,
                                    const FeatureOptions& opts = {})
{
    FeatureMatrix F;
    F.kind = opts.kind;
    F.X.resize(static_cast<Eigen::Index>(traces.size()), static_cast<Eigen::Index>(n_labels));
    for (const auto& t : traces) F.user_ids.push_back(t.user);

    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t u = begin; u < end; ++u) {
            const auto row = static_cast<Eigen::Index>(u);
            if (opts.kind == FeatureKind::pageviews) {
                F.X.row(row) = page_view_vector(traces[u].sequence, n_labels).cast<double>().transpose();
            } else {
                auto model = build_transition_model(count_transitions(traces[u].sequence, n_labels), opts.alpha);
                F.X.row(row) = stationary_distribution(model, opts.stationary).pi.transpose();
            }
        }
    };
    const std::size_t jobs = std::clamp<std::size_t>(opts.jobs, 1, std::max<std::size_t>(traces.size(), 1));
    if (jobs == 1) {
        work(0, traces.size());
        return F;
    }
    std::vector<std::jthread> pool;
    const std::size_t chunk = (traces.size() + jobs - 1) / jobs;
    for (std::size_t j = 0; j < jobs; ++j) {
        const std::size_t begin = j * chunk;
        const std::size_t end = std::min(traces.size(), begin + chunk);
        if (begin < end) pool.emplace_back(work, begin, end);
    }
    pool.clear();
    return F;
}

}  // namespace clickmine

#endif  // CLICKMINE_FEATURES_HPP
