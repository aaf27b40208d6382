// Ergodic-constant estimation from long horizons, the conserved energy
// c(u, m), corrector tables chi = U^T + lambda T on probe measures, and the
// time-monotonicity check for xi.
#pragma once

#include <limits>
#include <vector>

#include "mfglab/mfg_solver.hpp"

namespace mfglab {

enum class LambdaMethod { slope, increment, n_particle };

struct LambdaEstimate {
    double value = 0.0;  // lambda-hat
    LambdaMethod method = LambdaMethod::slope;
    std::vector<double> horizons;
    double fit_residual = 0.0;     // RMS residual of the least-squares line
    double increment_value = 0.0;  // increment variant over the two largest horizons
    double chi_intercept = 0.0;    // intercept, a chi(m0) proxy
    std::string probe_id;
};

struct CorrectorTable {
    std::vector<ProbMeasure> probes;
    std::vector<std::string> probe_ids;
    Vec chi_hat;          // chi-hat per probe, U^T(0, m_i) + lambda_hat T
    double horizon = 0.0;
    double lambda_used = 0.0;
    Mat lipschitz_ratios;  // |chi_i - chi_j| / W1(m_i, m_j), 0 on the diagonal
    double max_lipschitz() const {
        return lipschitz_ratios.size() ? lipschitz_ratios.maxCoeff() : 0.0;
    }
};

struct EnergyDiagnostic {
    Vec times;
    Vec c_values;
    double drift = 0.0;         // max |c(t) - c(s)| over stored times
    double terminal_gap = 0.0;  // |mean c - lambda_hat| when lambda_hat supplied
};

// Which finite-horizon solver supplies the value function U^T.
enum class ValueSolver { variational, fbs };

struct ErgodicOptions {
    ValueSolver solver = ValueSolver::variational;
    double tol = 1e-9;
    SolverOptions solver_opts;
};

// Finite-horizon value U^T(0, m0) by the selected solver.
double horizon_value(const ModelConfig& cfg, const ProbMeasure& m0, double T, double dt,
                     const ErgodicOptions& opts = {});

// Conserved energy c(u, m) = int (H(x,Du) - Lap u) dm - F(m); the Laplacian
// term is evaluated as +<Du, Dm> (exact summation by parts with the centered
// operators), which makes it agree with the Mather weak-KAM identity on the
// grid to machine precision.
double energy(const ModelConfig& cfg, const Field& u, const ProbMeasure& m);

// Energy at every stored time of a PDE-solver trajectory.
EnergyDiagnostic energy_drift(const ModelConfig& cfg, const Trajectory& traj,
                              double lambda_hat = std::numeric_limits<double>::quiet_NaN());

// Least-squares slope of T -> U^T(0, m0); lambda-hat = -slope. Also reports
// the increment variant over the two largest horizons.
LambdaEstimate estimate_lambda_slope(const ModelConfig& cfg, const ProbMeasure& m0,
                                     const std::vector<double>& horizons, double dt,
                                     const ErgodicOptions& opts = {});

// chi-hat(m_i) = U^T(0, m_i) + lambda_hat T per probe, with pairwise
// Lipschitz ratios against wasserstein1.
CorrectorTable corrector_table(const ModelConfig& cfg, const std::vector<ProbMeasure>& probes,
                               const std::vector<std::string>& probe_ids, double T,
                               double lambda_hat, double dt, const ErgodicOptions& opts = {});

// Evaluates xi(t) = U^T(t, m0) + lambda_hat (T - t) at the sample times and
// returns the max increase over consecutive pairs (should be <= tolerance).
double xi_monotonicity(const ModelConfig& cfg, const ProbMeasure& m0, double T,
                       const std::vector<double>& sample_times, double lambda_hat, double dt,
                       const ErgodicOptions& opts = {});

// Default 8-probe panel: uniform, two concentrations of a von-Mises-like
// bump, two shifted bumps, a two-bump mixture, two seeded random histograms.
std::vector<ProbMeasure> probe_panel(const TorusGrid& grid, unsigned seed);
std::vector<std::string> probe_panel_ids();

}  // namespace mfglab
