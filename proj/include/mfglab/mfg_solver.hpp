// Finite-horizon potential MFG solvers: direct variational minimization over
// (density, flux) paths and fictitious play on the forward-backward PDE
// system, plus trajectory cost evaluation and persistence.
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mfglab/model.hpp"

namespace mfglab {

// Time-indexed (m, alpha, w, u) path on [0, T]; m at times t_j = j dt,
// controls alpha/w indexed the same way and acting on [t_j, t_{j+1}).
struct Trajectory {
    double dt = 0.0;
    Vec times;                    // size M+1
    std::vector<ProbMeasure> m;   // size M+1
    std::vector<VectorField> alpha;  // size M+1 (last entry unused by the cost)
    std::vector<VectorField> w;      // flux, w = m * alpha nodewise
    std::vector<Field> u;            // present only for PDE-solver output
    bool has_u = false;
    double fp_residual = 0.0;     // defect of the discrete Fokker-Planck scheme

    int steps() const { return static_cast<int>(m.size()) - 1; }
    const TorusGrid& grid() const { return m.front().grid; }
};

struct SolveReport {
    double value = 0.0;  // discrete finite-horizon value at (0, m0)
    int iterations = 0;
    double gap = 0.0;    // final optimality / fixed-point gap
    std::string method;
};

// Optional terminal cost Phi(m(T)) with its density gradient (d Phi / d density_i);
// a missing gradient is treated as zero (nearest-probe table functionals).
struct TerminalCost {
    std::function<double(const ProbMeasure&)> value;
    std::function<Vec(const ProbMeasure&)> gradient;  // may be null
};

struct SolverOptions {
    int max_iterations = 4000;
    double cfl_safety = 0.5;  // fbs: require dt <= cfl_safety * h / max |drift|
};

// Minimizes the time-discretized cost sum dt [ int H*(x, w/m) dm + F(m) ]
// over flux paths, with the density eliminated through the implicit-diffusion
// Fokker-Planck step m_{j+1} = (I - dt Lap)^{-1} (m_j + dt div w_j).
// The integrand is the perspective form m H*(x, w/m), extended by 0 at
// (m, w) = (0, 0) and +inf for m = 0, w != 0.
std::pair<Trajectory, SolveReport> solve_variational(
    const ModelConfig& cfg, const TorusGrid& grid, const ProbMeasure& m0, double T,
    double dt, double tol, const std::optional<TerminalCost>& terminal = std::nullopt,
    const SolverOptions& opts = {});

// Fictitious play on the optimality system: backward HJB solves (implicit
// diffusion, explicit Hamiltonian) against the averaged density path, forward
// Fokker-Planck with upwinded transport, 1/k averaging of the density path.
std::pair<Trajectory, SolveReport> solve_fbs(
    const ModelConfig& cfg, const TorusGrid& grid, const ProbMeasure& m0, double T,
    double dt, double tol, const SolverOptions& opts = {});

// Running cost of a trajectory: sum over steps of
// dt [ int H*(x, alpha_j) dm_j + F(m_j) ], the same discrete functional the
// solvers optimize (interval cost sampled at the interval start).
double evaluate_cost(const ModelConfig& cfg, const Trajectory& traj);

// |U(0,m0) - [cost on [0,t_mid] + U(t_mid, m(t_mid))]| from fresh solves.
double dynamic_programming_gap(const ModelConfig& cfg, const ProbMeasure& m0, double T,
                               double t_mid, double dt, double tol);

// Directory persistence: `meta` text file plus per-time torus-field files.
void save_trajectory(const std::string& dir, const Trajectory& traj,
                     const SolveReport& report);
Trajectory load_trajectory(const std::string& dir);

}  // namespace mfglab
