#pragma once
#ifndef CLICKMINE_PCA_HPP
#define CLICKMINE_PCA_HPP

#include "clickmine/error.hpp"
#include "clickmine/markov.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

namespace clickmine {

/// Principal axes of mean-centred data. Components are unit rows sorted by
/// decreasing variance; each row's largest-magnitude coefficient is positive.
struct PcaModel {
    Vector mean;
    Matrix components;                 // r x n
    Vector eigenvalues;                // variances along the kept axes
    Vector explained_variance_ratio;   // per component
    Vector cumulative_ratio;
    std::size_t requested_components = 0;  // > rows(components) when truncated to the data rank

    [[nodiscard]] std::size_t rank() const noexcept { return static_cast<std::size_t>(components.rows()); }
    [[nodiscard]] bool truncated() const noexcept { return requested_components > rank(); }
};

/// Covariance-eigendecomposition PCA. When r exceeds the numerical rank of
/// the centred data, r is truncated and `requested_components` records the
/// original request.
inline PcaModel pca_fit(const Matrix& X, std::size_t r = 3)
{
    const auto m = X.rows();
    const auto n = X.cols();
    if (m < 2) {
        throw Error(Errc::invalid_argument, "PCA needs at least two rows");
    }
    if (r == 0 || r > static_cast<std::size_t>(std::min(m, n))) {
        throw Error(Errc::invalid_argument, "component count " + std::to_string(r) + " must be in [1, " +
                                                std::to_string(std::min(m, n)) + "]");
    }
    PcaModel model;
    model.requested_components = r;
    model.mean = X.colwise().mean().transpose();
    Eigen::MatrixXd centred = X.rowwise() - model.mean.transpose();
    Eigen::MatrixXd cov = (centred.transpose() * centred) / static_cast<double>(m - 1);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) {
        throw Error(Errc::no_convergence, "covariance eigendecomposition failed");
    }
    // Eigen returns ascending eigenvalues; walk from the top.
    Vector values = solver.eigenvalues().cwiseMax(0.0);
    const double total = values.sum();
    const double max_value = values.size() > 0 ? values.maxCoeff() : 0.0;
    const double rank_tol = std::max(max_value, 1.0) * static_cast<double>(std::max(m, n)) * 1e-13;
    std::size_t kept = 0;
    for (std::size_t k = 0; k < r; ++k) {
        if (values(n - 1 - static_cast<Eigen::Index>(k)) > rank_tol) ++kept;
    }
    const auto rk = static_cast<Eigen::Index>(kept);
    model.components.resize(rk, n);
    model.eigenvalues.resize(rk);
    model.explained_variance_ratio.resize(rk);
    model.cumulative_ratio.resize(rk);
    double running = 0.0;
    for (Eigen::Index k = 0; k < rk; ++k) {
        Eigen::VectorXd axis = solver.eigenvectors().col(n - 1 - k);
        Eigen::Index big = 0;
        for (Eigen::Index j = 1; j < n; ++j) {
            if (std::abs(axis(j)) > std::abs(axis(big)) + 1e-12) big = j;
        }
        if (axis(big) < 0.0) axis = -axis;
        model.components.row(k) = axis.transpose();
        model.eigenvalues(k) = values(n - 1 - k);
        model.explained_variance_ratio(k) = total > 0.0 ? values(n - 1 - k) / total : 0.0;
        running += model.explained_variance_ratio(k);
        model.cumulative_ratio(k) = running;
    }
    return model;
}

/// (X - mean) * components^T
inline Matrix pca_project(const PcaModel& model, const Matrix& X)
{
    if (X.cols() != model.mean.size()) {
        throw Error(Errc::dimension_mismatch, "expected " + std::to_string(model.mean.size()) + " columns, got " +
                                                  std::to_string(X.cols()));
    }
    return (X.rowwise() - model.mean.transpose()) * model.components.transpose();
}

/// Inverse of pca_project on the retained subspace.
inline Matrix pca_reconstruct(const PcaModel& model, const Matrix& coords)
{
    if (coords.cols() != model.components.rows()) {
        throw Error(Errc::dimension_mismatch, "coordinate width does not match component count");
    }
    Matrix out = coords * model.components;
    out.rowwise() += model.mean.transpose();
    return out;
}

/// Axis annotation: the features with the smallest and largest coefficient.
struct LoadingExtremes {
    std::size_t component = 0;
    std::size_t min_feature = 0;
    double min_coefficient = 0.0;
    std::size_t max_feature = 0;
    double max_coefficient = 0.0;
};

inline std::vector<LoadingExtremes> loading_extremes(const PcaModel& model)
{
    std::vector<LoadingExtremes> out;
    for (Eigen::Index k = 0; k < model.components.rows(); ++k) {
        LoadingExtremes e;
        e.component = static_cast<std::size_t>(k);
        Eigen::Index lo = 0, hi = 0;
        e.min_coefficient = model.components.row(k).minCoeff(&lo);
        e.max_coefficient = model.components.row(k).maxCoeff(&hi);
        e.min_feature = static_cast<std::size_t>(lo);
        e.max_feature = static_cast<std::size_t>(hi);
        out.push_back(e);
    }
    return out;
}

}  // namespace clickmine

#endif  // CLICKMINE_PCA_HPP
