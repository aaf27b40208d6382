#include "mfglab/ergodic.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace mfglab {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double horizon_value(const ModelConfig& cfg, const ProbMeasure& m0, double T, double dt,
                     const ErgodicOptions& opts) {
    if (opts.solver == ValueSolver::variational) {
        auto [traj, rep] = solve_variational(cfg, m0.grid, m0, T, dt, opts.tol, std::nullopt,
                                             opts.solver_opts);
        return rep.value;
    }
    auto [traj, rep] = solve_fbs(cfg, m0.grid, m0, T, dt, opts.tol, opts.solver_opts);
    return evaluate_cost(cfg, traj);
}

double energy(const ModelConfig& cfg, const Field& u, const ProbMeasure& m) {
    check(u.grid == m.grid, "energy: grid mismatch");
    const TorusGrid& g = u.grid;
    const double h = g.cell_volume();
    const Vec du = gradient(u).values.col(0);
    Field dm_field(g);
    dm_field.values = m.density;
    const Vec dm = gradient(dm_field).values.col(0);
    double c = h * du.dot(dm);  // == - int (div grad u) m, exact on the grid
    for (std::int64_t i = 0; i < g.num_nodes(); ++i)
        c += h * (0.5 * du[i] * du[i] + cfg.potential(g.point(i, 0))) * m.density[i];
    return c - coupling_value(cfg, m);
}

EnergyDiagnostic energy_drift(const ModelConfig& cfg, const Trajectory& traj,
                              double lambda_hat) {
    check(traj.has_u, "energy_drift: trajectory does not carry u");
    EnergyDiagnostic diag;
    const int M = traj.steps();
    diag.times = traj.times;
    diag.c_values.resize(M + 1);
    for (int j = 0; j <= M; ++j) diag.c_values[j] = energy(cfg, traj.u[j], traj.m[j]);
    diag.drift = diag.c_values.maxCoeff() - diag.c_values.minCoeff();
    if (!std::isnan(lambda_hat))
        diag.terminal_gap = std::abs(diag.c_values.mean() - lambda_hat);
    return diag;
}

LambdaEstimate estimate_lambda_slope(const ModelConfig& cfg, const ProbMeasure& m0,
                                     const std::vector<double>& horizons, double dt,
                                     const ErgodicOptions& opts) {
    check(horizons.size() >= 3, "estimate_lambda_slope: need at least 3 horizons");
    check(std::is_sorted(horizons.begin(), horizons.end()),
          "estimate_lambda_slope: horizons must be increasing");
    const int k = static_cast<int>(horizons.size());
    Vec T(k), U(k);
    for (int i = 0; i < k; ++i) {
        T[i] = horizons[i];
        U[i] = horizon_value(cfg, m0, horizons[i], dt, opts);
    }
    // Least-squares line U = a + b T; lambda-hat = -b.
    const double Tm = T.mean(), Um = U.mean();
    const double b = (T.array() - Tm).matrix().dot((U.array() - Um).matrix()) /
                     (T.array() - Tm).matrix().squaredNorm();
    const double a = Um - b * Tm;
    LambdaEstimate est;
    est.value = -b;
    est.method = LambdaMethod::slope;
    est.horizons = horizons;
    est.chi_intercept = a;
    est.fit_residual = std::sqrt((U - (a + b * T.array()).matrix()).squaredNorm() / k);
    est.increment_value = -(U[k - 1] - U[k - 2]) / (T[k - 1] - T[k - 2]);
    return est;
}

CorrectorTable corrector_table(const ModelConfig& cfg, const std::vector<ProbMeasure>& probes,
                               const std::vector<std::string>& probe_ids, double T,
                               double lambda_hat, double dt, const ErgodicOptions& opts) {
    check(!probes.empty(), "corrector_table: empty probe panel");
    check(probe_ids.size() == probes.size(), "corrector_table: id/probe count mismatch");
    CorrectorTable table;
    table.probes = probes;
    table.probe_ids = probe_ids;
    table.horizon = T;
    table.lambda_used = lambda_hat;
    const int k = static_cast<int>(probes.size());
    table.chi_hat.resize(k);
    for (int i = 0; i < k; ++i)
        table.chi_hat[i] = horizon_value(cfg, probes[i], T, dt, opts) + lambda_hat * T;
    table.lipschitz_ratios = Mat::Zero(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) {
            const double d = wasserstein1(probes[i], probes[j]);
            if (d > 1e-12) {
                const double r = std::abs(table.chi_hat[i] - table.chi_hat[j]) / d;
                table.lipschitz_ratios(i, j) = table.lipschitz_ratios(j, i) = r;
            }
        }
    return table;
}

double xi_monotonicity(const ModelConfig& cfg, const ProbMeasure& m0, double T,
                       const std::vector<double>& sample_times, double lambda_hat, double dt,
                       const ErgodicOptions& opts) {
    check(std::is_sorted(sample_times.begin(), sample_times.end()),
          "xi_monotonicity: sample times must be increasing");
    std::vector<double> xi;
    for (double t : sample_times) {
        check(t >= 0.0 && t < T, "xi_monotonicity: sample time outside [0, T)");
        // Time homogeneity: U^T(t, m0) is the value of the horizon T - t problem.
        xi.push_back(horizon_value(cfg, m0, T - t, dt, opts) + lambda_hat * (T - t));
    }
    double max_inc = 0.0;
    for (std::size_t i = 1; i < xi.size(); ++i)
        max_inc = std::max(max_inc, xi[i] - xi[i - 1]);
    return max_inc;
}

std::vector<ProbMeasure> probe_panel(const TorusGrid& grid, unsigned seed) {
    check(grid.dim == 1, "probe_panel: 1-D grids only");
    const std::int64_t n = grid.num_nodes();
    auto bump = [&](double center, double kappa) {
        Vec d(n);
        for (std::int64_t i = 0; i < n; ++i)
            d[i] = std::exp(kappa * std::cos(2 * kPi * (grid.point(i, 0) - center)));
        return ProbMeasure::normalized(grid, d);
    };
    std::vector<ProbMeasure> panel;
    panel.push_back(ProbMeasure::uniform(grid));
    panel.push_back(bump(0.5, 1.0));   // mild concentration
    panel.push_back(bump(0.5, 4.0));   // strong concentration
    panel.push_back(bump(0.2, 2.0));   // shifted
    panel.push_back(bump(0.7, 2.0));   // shifted
    {
        Vec mix = 0.5 * bump(0.15, 3.0).density + 0.5 * bump(0.65, 3.0).density;
        panel.push_back(ProbMeasure::normalized(grid, mix));
    }
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(0.2, 1.0);
    for (int r = 0; r < 2; ++r) {
        Vec d(n);
        for (std::int64_t i = 0; i < n; ++i) d[i] = u(rng);
        panel.push_back(ProbMeasure::normalized(grid, d));
    }
    return panel;
}

std::vector<std::string> probe_panel_ids() {
    return {"uniform", "bump_k1", "bump_k4", "bump_x02", "bump_x07",
            "mixture", "random_a", "random_b"};
}

}  // namespace mfglab
