// Small dense two-phase simplex solver, used only as an independent oracle in
// tests (e.g. brute-force optimal transport on tiny histograms).
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace lp_oracle {

// Minimizes c.dot(x) subject to A x = b, x >= 0 (b must be nonnegative).
// Two-phase tableau simplex with Bland's rule; throws on infeasibility.
inline double solve_lp(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                       const Eigen::VectorXd& c, Eigen::VectorXd* x_out = nullptr) {
    const int m = static_cast<int>(A.rows());
    const int n = static_cast<int>(A.cols());
    if (b.minCoeff() < 0) throw std::runtime_error("solve_lp: b must be >= 0");

    // Tableau over original + artificial variables, with the objective rows last:
    // row m   = phase-2 reduced costs, row m+1 = phase-1 reduced costs.
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m + 2, n + m + 1);
    T.block(0, 0, m, n) = A;
    T.block(0, n, m, m) = Eigen::MatrixXd::Identity(m, m);
    T.block(0, n + m, m, 1) = b;
    T.block(m, 0, 1, n) = c.transpose();
    for (int i = 0; i < m; ++i) T.row(m + 1) -= T.row(i);  // phase-1 cost of artificials

    std::vector<int> basis(m);
    for (int i = 0; i < m; ++i) basis[i] = n + i;

    auto pivot = [&](int row, int col) {
        T.row(row) /= T(row, col);
        for (int r = 0; r < m + 2; ++r)
            if (r != row && std::abs(T(r, col)) > 0) T.row(r) -= T(r, col) * T.row(row);
        basis[row] = col;
    };
    auto run_phase = [&](int obj_row, int num_cols) {
        for (int iter = 0; iter < 100000; ++iter) {
            int col = -1;  // Bland: first improving column
            for (int j = 0; j < num_cols; ++j)
                if (T(obj_row, j) < -1e-10) { col = j; break; }
            if (col < 0) return;
            int row = -1;
            double best = 0;
            for (int i = 0; i < m; ++i) {
                if (T(i, col) <= 1e-12) continue;
                const double ratio = T(i, n + m) / T(i, col);
                if (row < 0 || ratio < best - 1e-12 ||
                    (ratio < best + 1e-12 && basis[i] < basis[row])) {
                    row = i;
                    best = ratio;
                }
            }
            if (row < 0) throw std::runtime_error("solve_lp: unbounded");
            pivot(row, col);
        }
        throw std::runtime_error("solve_lp: iteration limit");
    };

    run_phase(m + 1, n + m);
    if (T(m + 1, n + m) < -1e-8) throw std::runtime_error("solve_lp: infeasible");
    // Drive any artificial still in the basis out (degenerate case).
    for (int i = 0; i < m; ++i) {
        if (basis[i] < n) continue;
        int col = -1;
        for (int j = 0; j < n; ++j)
            if (std::abs(T(i, j)) > 1e-10) { col = j; break; }
        if (col >= 0) pivot(i, col);
    }
    run_phase(m, n);

    if (x_out) {
        *x_out = Eigen::VectorXd::Zero(n);
        for (int i = 0; i < m; ++i)
            if (basis[i] < n) (*x_out)[basis[i]] = T(i, n + m);
    }
    return -T(m, n + m);
}

// Exact 1-Wasserstein distance between histograms on the n-point circle with
// geodesic ground cost, solved as a transportation LP.
inline double circle_w1_lp(const Eigen::VectorXd& mass_a, const Eigen::VectorXd& mass_b) {
    const int n = static_cast<int>(mass_a.size());
    const double h = 1.0 / n;
    // Row constraints for a, column constraints for b (last one dropped as redundant).
    const int m = 2 * n - 1;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, n * n);
    Eigen::VectorXd b(m), c(n * n);
    for (int i = 0; i < n; ++i) {
        b[i] = mass_a[i];
        for (int j = 0; j < n; ++j) {
            A(i, i * n + j) = 1.0;
            if (j < n - 1) A(n + j, i * n + j) = 1.0;
            const int gap = std::abs(i - j);
            c[i * n + j] = h * std::min(gap, n - gap);
        }
    }
    for (int j = 0; j < n - 1; ++j) b[n + j] = mass_b[j];
    return solve_lp(A, b, c);
}

}  // namespace lp_oracle
