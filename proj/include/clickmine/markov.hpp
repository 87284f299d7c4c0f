#pragma once
#ifndef CLICKMINE_MARKOV_HPP
#define CLICKMINE_MARKOV_HPP

// First-order Markov chains over action labels: transition counts,
// teleportation smoothing and the stationary distribution.

#include "clickmine/action_map.hpp"
#include "clickmine/error.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <span>
#include <string>

namespace clickmine {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using CountMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using CountVector = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

inline constexpr double default_alpha = 0.15;

/// a(i, j) = number of observed i -> j transitions.
struct TransitionCounts {
    CountMatrix counts;

    TransitionCounts() = default;
    explicit TransitionCounts(std::size_t n)
        : counts(CountMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)))
    {
    }
    explicit TransitionCounts(CountMatrix c)
        : counts(std::move(c))
    {
    }

    [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(counts.rows()); }
    [[nodiscard]] std::int64_t total() const { return counts.sum(); }

    TransitionCounts& operator+=(const TransitionCounts& other)
    {
        if (other.counts.rows() != counts.rows()) {
            throw Error(Errc::dimension_mismatch, "cannot add count matrices of different size");
        }
        counts += other.counts;
        return *this;
    }
};

/// Row-stochastic transition matrix after teleportation smoothing.
struct TransitionModel {
    double alpha = default_alpha;
    Matrix P;

    [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(P.rows()); }
};

enum class StationaryMethod { power_iteration, direct_solve };

struct StationaryOptions {
    double tol = 1e-10;
    std::size_t max_iter = 100000;
    StationaryMethod method = StationaryMethod::power_iteration;
    bool fallback_to_direct = true;  // on NoConvergence
};

struct StationaryDistribution {
    Vector pi;
    StationaryMethod method = StationaryMethod::power_iteration;
    std::size_t iterations = 0;
    double residual = 0.0;  // ||pi^T P - pi^T||_1
};

namespace detail {

inline void check_labels(std::span<const LabelId> trace, std::size_t n)
{
    for (std::size_t i = 0; i < trace.size(); ++i) {
        if (trace[i] >= n) {
            throw Error(Errc::label_out_of_range, "label " + std::to_string(trace[i]) + " at position " +
                                                      std::to_string(i) + " exceeds state count " +
                                                      std::to_string(n));
        }
    }
}

}  // namespace detail

inline TransitionCounts count_transitions(std::span<const LabelId> trace, std::size_t n)
{
    detail::check_labels(trace, n);
    TransitionCounts tc(n);
    for (std::size_t i = 1; i < trace.size(); ++i) {
        tc.counts(trace[i - 1], trace[i]) += 1;
    }
    return tc;
}

/// P(i, j) = (a(i, j) + alpha / n) / (rowsum(i) + alpha): add alpha/n to
/// every count, then normalize rows.
inline TransitionModel build_transition_model(const TransitionCounts& tc, double alpha = default_alpha)
{
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
        throw Error(Errc::invalid_argument, "alpha must be a finite non-negative number");
    }
    const auto n = static_cast<Eigen::Index>(tc.size());
    if (n == 0) {
        throw Error(Errc::empty_matrix, "transition counts have no states");
    }
    TransitionModel model;
    model.alpha = alpha;
    model.P.resize(n, n);
    const double teleport = alpha / static_cast<double>(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double rowsum = static_cast<double>(tc.counts.row(i).sum());
        if (rowsum == 0.0 && alpha == 0.0) {
            throw Error(Errc::zero_row_without_teleport,
                        "state " + std::to_string(i) + " has no outgoing transitions and alpha = 0");
        }
        const double denom = rowsum + alpha;
        for (Eigen::Index j = 0; j < n; ++j) {
            model.P(i, j) = (static_cast<double>(tc.counts(i, j)) + teleport) / denom;
        }
    }
    return model;
}

inline double stationary_residual(const TransitionModel& model, const Vector& pi)
{
    return (model.P.transpose() * pi - pi).lpNorm<1>();
}

/// Solves (P^T - I) pi = 0 with sum(pi) = 1 by replacing the last equation
/// with the normalization constraint.
inline StationaryDistribution stationary_direct(const TransitionModel& model)
{
    const auto n = static_cast<Eigen::Index>(model.size());
    Eigen::MatrixXd system = model.P.transpose();
    system -= Eigen::MatrixXd::Identity(n, n);
    system.row(n - 1).setOnes();
    Vector rhs = Vector::Zero(n);
    rhs(n - 1) = 1.0;
    Vector pi = system.fullPivLu().solve(rhs);
    pi = pi.cwiseMax(0.0);
    pi /= pi.sum();
    StationaryDistribution out;
    out.pi = std::move(pi);
    out.method = StationaryMethod::direct_solve;
    out.residual = stationary_residual(model, out.pi);
    return out;
}

/// Left principal eigenvector of P. Power iteration starts from the uniform
/// vector and stops once successive iterates differ by at most tol in l1
/// (which bounds the fixed-point residual by tol).
inline StationaryDistribution stationary_distribution(const TransitionModel& model,
                                                      const StationaryOptions& opts = {})
{
    const auto n = static_cast<Eigen::Index>(model.size());
    if (n == 0) {
        throw Error(Errc::empty_matrix, "transition model has no states");
    }
    if (opts.method == StationaryMethod::direct_solve) {
        return stationary_direct(model);
    }
    Vector pi = Vector::Constant(n, 1.0 / static_cast<double>(n));
    Vector next(n);
    const auto& Pt = model.P.transpose();
    for (std::size_t it = 1; it <= opts.max_iter; ++it) {
        next.noalias() = Pt * pi;
        next /= next.sum();
        const double delta = (next - pi).lpNorm<1>();
        pi.swap(next);
        if (delta <= opts.tol) {
            StationaryDistribution out;
            out.pi = std::move(pi);
            out.method = StationaryMethod::power_iteration;
            out.iterations = it;
            out.residual = stationary_residual(model, out.pi);
            return out;
        }
    }
    if (opts.fallback_to_direct) {
        auto out = stationary_direct(model);
        out.iterations = opts.max_iter;
        return out;
    }
    throw Error(Errc::no_convergence,
                "power iteration did not reach tol " + std::to_string(opts.tol) + " within " +
                    std::to_string(opts.max_iter) + " iterations");
}

/// Static page-view counts: multiplicity of each label in the trace.
inline CountVector page_view_vector(std::span<const LabelId> trace, std::size_t n)
{
    detail::check_labels(trace, n);
    CountVector views = CountVector::Zero(static_cast<Eigen::Index>(n));
    for (LabelId l : trace) {
        views(l) += 1;
    }
    return views;
}

}  // namespace clickmine

#endif  // CLICKMINE_MARKOV_HPP
