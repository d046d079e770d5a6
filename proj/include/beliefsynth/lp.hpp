#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace beliefsynth {

/// Outcome of a small dense linear program.
struct LpResult {
    bool feasible = false;
    bool bounded = true;
    double value = 0.0;
    std::vector<double> x;
};

namespace detail {

inline constexpr double kLpEps = 1e-9;

/**
 * Two-phase primal simplex on a dense tableau with Bland's rule.
 *
 *   maximize c.x   subject to   A x <= b,  E x = f,  x >= 0.
 *
 * Sized for the tiny programs the pruning tests produce (a handful of
 * variables, tens of rows); no scaling, no sparsity.
 */
inline LpResult simplex_solve(const std::vector<double>& c,
                              const std::vector<std::vector<double>>& A,
                              const std::vector<double>& b,
                              const std::vector<std::vector<double>>& E,
                              const std::vector<double>& f) {
    const std::size_t n = c.size();
    const std::size_t m_ub = A.size();
    const std::size_t m_eq = E.size();
    const std::size_t m = m_ub + m_eq;

    // Columns: n structural, m_ub slacks, then one artificial per row.
    const std::size_t n_slack = m_ub;
    const std::size_t n_art = m;
    const std::size_t width = n + n_slack + n_art;

    std::vector<std::vector<double>> T(m, std::vector<double>(width + 1, 0.0));
    std::vector<std::size_t> basis(m);

    for (std::size_t i = 0; i < m_ub; ++i) {
        for (std::size_t j = 0; j < n; ++j) T[i][j] = A[i][j];
        T[i][n + i] = 1.0;
        T[i][width] = b[i];
    }
    for (std::size_t i = 0; i < m_eq; ++i) {
        const std::size_t r = m_ub + i;
        for (std::size_t j = 0; j < n; ++j) T[r][j] = E[i][j];
        T[r][width] = f[i];
    }
    // Normalize to nonnegative right-hand sides, then add artificials.
    for (std::size_t i = 0; i < m; ++i) {
        if (T[i][width] < 0.0)
            for (std::size_t j = 0; j <= width; ++j) T[i][j] = -T[i][j];
        T[i][n + n_slack + i] = 1.0;
        basis[i] = n + n_slack + i;
    }

    auto pivot = [&](std::size_t row, std::size_t col) {
        const double p = T[row][col];
        for (std::size_t j = 0; j <= width; ++j) T[row][j] /= p;
        for (std::size_t i = 0; i < m; ++i) {
            if (i == row) continue;
            const double factor = T[i][col];
            if (factor == 0.0) continue;
            for (std::size_t j = 0; j <= width; ++j) T[i][j] -= factor * T[row][j];
        }
        basis[row] = col;
    };

    // Runs simplex for the objective row `z` restricted to columns < limit;
    // returns false when unbounded.
    auto run = [&](std::vector<double>& z, std::size_t limit) -> bool {
        for (std::size_t pivots = 0;; ++pivots) {
            if (pivots > 100000) throw std::runtime_error("simplex pivot limit exceeded");
            std::size_t col = width;
            for (std::size_t j = 0; j < limit; ++j) {  // Bland: first improving column
                if (z[j] > kLpEps) {
                    col = j;
                    break;
                }
            }
            if (col == width) return true;
            std::size_t row = m;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < m; ++i) {
                if (T[i][col] > kLpEps) {
                    const double ratio = T[i][width] / T[i][col];
                    if (ratio < best - kLpEps
                        || (ratio < best + kLpEps && (row == m || basis[i] < basis[row]))) {
                        best = ratio;
                        row = i;
                    }
                }
            }
            if (row == m) return false;
            pivot(row, col);
            const double zp = z[col];
            for (std::size_t j = 0; j <= width; ++j) z[j] -= zp * T[row][j];
        }
    };

    // Phase 1: drive the artificials out.
    std::vector<double> z1(width + 1, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j <= width; ++j) z1[j] += T[i][j];
    for (std::size_t j = n + n_slack; j < width; ++j) z1[j] = 0.0;
    if (!run(z1, n + n_slack)) return {};
    if (z1[width] > 1e-7) return {};  // infeasible

    // Pivot any artificial still basic (degenerate) onto a structural column.
    for (std::size_t i = 0; i < m; ++i) {
        if (basis[i] < n + n_slack) continue;
        std::size_t col = width;
        for (std::size_t j = 0; j < n + n_slack; ++j)
            if (std::abs(T[i][j]) > kLpEps) {
                col = j;
                break;
            }
        if (col != width) pivot(i, col);
    }

    // Phase 2 on the real objective, expressed over the current basis.
    std::vector<double> z2(width + 1, 0.0);
    for (std::size_t j = 0; j < n; ++j) z2[j] = c[j];
    for (std::size_t i = 0; i < m; ++i) {
        if (basis[i] >= n) continue;
        const double coef = z2[basis[i]];
        if (coef == 0.0) continue;
        for (std::size_t j = 0; j <= width; ++j) z2[j] -= coef * T[i][j];
    }
    LpResult res;
    if (!run(z2, n + n_slack)) {
        res.feasible = true;
        res.bounded = false;
        return res;
    }
    res.feasible = true;
    res.x.assign(n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        if (basis[i] < n) res.x[basis[i]] = T[i][width];
    res.value = 0.0;
    for (std::size_t j = 0; j < n; ++j) res.value += c[j] * res.x[j];
    return res;
}

} // namespace detail

/// max c.x s.t. A x <= b, E x = f, x >= 0.
inline LpResult solve_lp(const std::vector<double>& c, const std::vector<std::vector<double>>& A,
                         const std::vector<double>& b, const std::vector<std::vector<double>>& E,
                         const std::vector<double>& f) {
    return detail::simplex_solve(c, A, b, E, f);
}

/**
 * Lark advantage of theta against a set of rivals: the maximum over the
 * belief simplex of  min_k (theta - rival_k) . b, i.e. the largest margin d
 * such that theta beats every rival by d at some belief.  The optional
 * witness receives the maximizing belief.  An empty rival set yields +inf.
 */
inline double lark_advantage(const std::vector<double>& theta,
                             const std::vector<const std::vector<double>*>& rivals,
                             std::vector<double>* witness = nullptr) {
    const std::size_t n = theta.size();
    if (rivals.empty()) {
        if (witness) witness->assign(n, 1.0 / static_cast<double>(n));
        return std::numeric_limits<double>::infinity();
    }
    // Variables: b (n entries) plus d split into u - v.  Rows: for every
    // rival, (rival - theta).b + u - v <= 0; equality sum b = 1.
    std::vector<double> c(n + 2, 0.0);
    c[n] = 1.0;
    c[n + 1] = -1.0;
    std::vector<std::vector<double>> A;
    std::vector<double> rhs;
    for (const auto* rival : rivals) {
        std::vector<double> row(n + 2, 0.0);
        for (std::size_t i = 0; i < n; ++i) row[i] = (*rival)[i] - theta[i];
        row[n] = 1.0;
        row[n + 1] = -1.0;
        A.push_back(std::move(row));
        rhs.push_back(0.0);
    }
    std::vector<std::vector<double>> E(1, std::vector<double>(n + 2, 0.0));
    for (std::size_t i = 0; i < n; ++i) E[0][i] = 1.0;
    std::vector<double> f{1.0};
    const LpResult res = solve_lp(c, A, rhs, E, f);
    if (!res.feasible || !res.bounded)
        return -std::numeric_limits<double>::infinity();  // cannot happen on the simplex
    if (witness) witness->assign(res.x.begin(), res.x.begin() + static_cast<long>(n));
    return res.value;
}

} // namespace beliefsynth
