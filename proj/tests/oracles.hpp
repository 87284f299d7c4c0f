#pragma once

// Brute-force reference implementations used to check the library. They use
// plain std::vector arithmetic so they share no code path with Eigen.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

using Mat = std::vector<std::vector<double>>;

struct StampedEvent {
    std::string user;
    std::int64_t t = 0;
};

// Session index per event, recomputed from scratch for every event by
// counting the boundaries before it.
inline std::vector<std::size_t> naive_session_ids(const std::vector<StampedEvent>& ev, double gap_seconds)
{
    std::vector<std::size_t> ids(ev.size(), 0);
    for (std::size_t i = 0; i < ev.size(); ++i) {
        std::size_t boundaries = 0;
        for (std::size_t j = 1; j <= i; ++j) {
            bool cut = ev[j].user != ev[j - 1].user ||
                       static_cast<double>(ev[j].t - ev[j - 1].t) >= gap_seconds;
            if (cut) ++boundaries;
        }
        ids[i] = boundaries;
    }
    return ids;
}

inline double group_ss(const Mat& X, const std::vector<std::size_t>& rows)
{
    if (rows.empty()) return 0.0;
    const std::size_t n = X[0].size();
    std::vector<double> mean(n, 0.0);
    for (auto r : rows)
        for (std::size_t j = 0; j < n; ++j) mean[j] += X[r][j];
    for (auto& v : mean) v /= static_cast<double>(rows.size());
    double ss = 0.0;
    for (auto r : rows)
        for (std::size_t j = 0; j < n; ++j) ss += (X[r][j] - mean[j]) * (X[r][j] - mean[j]);
    return ss;
}

// Minimum inertia over every split into two non-empty groups.
inline double best_two_partition_inertia(const Mat& X)
{
    const std::size_t m = X.size();
    double best = std::numeric_limits<double>::infinity();
    // point 0 is pinned to group A, which enumerates each split once
    for (std::uint32_t mask = 0; mask < (1u << (m - 1)); ++mask) {
        std::vector<std::size_t> a{0}, b;
        for (std::size_t i = 1; i < m; ++i) ((mask >> (i - 1)) & 1u ? b : a).push_back(i);
        if (b.empty()) continue;
        best = std::min(best, group_ss(X, a) + group_ss(X, b));
    }
    return best;
}

// Cyclic Jacobi rotations on a symmetric matrix. Returns eigenvalues sorted
// descending and the matching eigenvectors as columns of `vectors`.
inline std::vector<double> jacobi_eigen(Mat A, Mat* vectors = nullptr, int sweeps = 100)
{
    const std::size_t n = A.size();
    Mat V(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) V[i][i] = 1.0;
    for (int s = 0; s < sweeps; ++s) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += A[p][q] * A[p][q];
        if (off < 1e-30) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(A[p][q]) < 1e-300) continue;
                const double theta = (A[q][q] - A[p][p]) / (2.0 * A[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = A[k][p], akq = A[k][q];
                    A[k][p] = c * akp - sn * akq;
                    A[k][q] = sn * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = A[p][k], aqk = A[q][k];
                    A[p][k] = c * apk - sn * aqk;
                    A[q][k] = sn * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = V[k][p], vkq = V[k][q];
                    V[k][p] = c * vkp - sn * vkq;
                    V[k][q] = sn * vkp + c * vkq;
                }
            }
        }
    }
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return A[a][a] > A[b][b]; });
    std::vector<double> values;
    for (auto i : order) values.push_back(A[i][i]);
    if (vectors != nullptr) {
        vectors->assign(n, std::vector<double>(n, 0.0));
        for (std::size_t c = 0; c < n; ++c)
            for (std::size_t r = 0; r < n; ++r) (*vectors)[r][c] = V[r][order[c]];
    }
    return values;
}

// Sample covariance (divide by m - 1) of the rows of X.
inline Mat covariance(const Mat& X)
{
    const std::size_t m = X.size(), n = X[0].size();
    std::vector<double> mean(n, 0.0);
    for (const auto& row : X)
        for (std::size_t j = 0; j < n; ++j) mean[j] += row[j] / static_cast<double>(m);
    Mat C(n, std::vector<double>(n, 0.0));
    for (const auto& row : X)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) C[i][j] += (row[i] - mean[i]) * (row[j] - mean[j]);
    for (auto& row : C)
        for (auto& v : row) v /= static_cast<double>(m - 1);
    return C;
}

// Stationary vector of a row-stochastic P: Gaussian elimination with partial
// pivoting on (P^T - I) with the first equation replaced by sum(pi) = 1.
inline std::vector<double> gauss_stationary(const Mat& P)
{
    const std::size_t n = P.size();
    Mat A(n, std::vector<double>(n + 1, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) A[i][j] = P[j][i] - (i == j ? 1.0 : 0.0);
    }
    for (std::size_t j = 0; j < n; ++j) A[0][j] = 1.0;
    A[0][n] = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        std::swap(A[col], A[piv]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = A[r][col] / A[col][col];
            for (std::size_t k = col; k <= n; ++k) A[r][k] -= f * A[col][k];
        }
    }
    std::vector<double> pi(n);
    for (std::size_t i = 0; i < n; ++i) pi[i] = A[i][n] / A[i][i];
    return pi;
}

// Teleport smoothing written out entry by entry.
inline Mat smoothed_chain(const std::vector<int>& trace, std::size_t n, double alpha)
{
    Mat W(n, std::vector<double>(n, alpha / static_cast<double>(n)));
    for (std::size_t i = 1; i < trace.size(); ++i) W[trace[i - 1]][trace[i]] += 1.0;
    for (auto& row : W) {
        double s = 0.0;
        for (double v : row) s += v;
        for (double& v : row) v /= s;
    }
    return W;
}

// resource -> attributed user positions, by recounting every pair.
inline std::map<std::string, std::vector<std::size_t>> recount_attribution(
    const std::vector<std::vector<std::string>>& per_user_resources,
    const std::vector<std::vector<bool>>& per_user_is_break, double pct)
{
    std::map<std::string, std::vector<std::size_t>> out;
    for (std::size_t u = 0; u < per_user_resources.size(); ++u) {
        const auto& res = per_user_resources[u];
        const auto& brk = per_user_is_break[u];
        std::size_t actions = 0;
        for (std::size_t i = 0; i < res.size(); ++i) actions += brk[i] ? 0 : 1;
        std::vector<std::string> seen;
        for (std::size_t i = 0; i < res.size(); ++i) {
            if (res[i].empty() || std::find(seen.begin(), seen.end(), res[i]) != seen.end()) continue;
            seen.push_back(res[i]);
            std::size_t hits = 0;
            for (std::size_t k = 0; k < res.size(); ++k) hits += res[k] == res[i] ? 1 : 0;
            if (static_cast<double>(hits) / static_cast<double>(actions) >= pct / 100.0) out[res[i]].push_back(u);
        }
    }
    return out;
}

}  // namespace oracle
