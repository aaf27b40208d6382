// Ergodic cell problem on (T^1)^N: long-time marching for (v^N, lambda^N),
// Bernstein/Lipschitz diagnostics, and the projected functional W^N with its
// sub-corrector residual.
#pragma once

#include "mfglab/model.hpp"

namespace mfglab {

// Tensor grid over N particles on the n-point circle, flattened row-major.
struct ParticleGrid {
    int d = 1;  // per-particle dimension (only 1 is supported)
    int N = 1;
    int n = 2;
    std::int64_t memory_budget = std::int64_t(1) << 24;

    ParticleGrid() = default;
    ParticleGrid(int N_, int n_, std::int64_t budget = std::int64_t(1) << 24)
        : N(N_), n(n_), memory_budget(budget) {
        check(N >= 1, "ParticleGrid: N >= 1");
        check(n >= 2, "ParticleGrid: n >= 2");
        check(num_nodes_checked() <= memory_budget, "ParticleGrid: node budget exceeded");
    }
    TorusGrid tensor_grid() const { return TorusGrid(N, n); }
    std::int64_t num_nodes() const { return tensor_grid().num_nodes(); }

  private:
    std::int64_t num_nodes_checked() const {
        std::int64_t total = 1;
        for (int k = 0; k < N; ++k) {
            check(total <= memory_budget / n + 1, "ParticleGrid: node budget exceeded");
            total *= n;
        }
        return total;
    }
};

struct ParticleSolution {
    ParticleGrid pgrid;
    Vec v;                         // v^N at tensor-grid nodes, recentered to integral 0
    double lambda_N = 0.0;
    double normalization_gap = 0.0;  // |integral of v| after recentering
    double bernstein_sup = 0.0;      // max over nodes of N sum_i |D_i v|^2
    double symmetry_gap = 0.0;       // max |v(x) - v(sigma x)| over sampled permutations
    double glivenko_rate = 1.0;      // eps_N, N^(-1/2) for d < 4
    double increment_spread = 0.0;   // nodewise spread of the final increment rate
    int iterations = 0;
};

struct CellOptions {
    double dt = 0.0;        // 0 means: 0.5 * spacing
    double max_time = 50.0; // marching-time budget before declaring non-convergence
    int symmetry_samples = 16;
};

// Long-time marching of dv/dt = sum_i Lap_i v - (1/N) sum_i H(x_i, N D_i v) + F(m^N_x)
// with implicit diffusion; lambda^N = -(steady mean increment rate), which
// makes the fixed point solve the cell equation
// -sum_i Lap_i v + (1/N) sum_i [H(x_i, N D_i v) - F(m^N_x)] = lambda^N.
ParticleSolution solve_cell_problem(const ModelConfig& cfg, int N, int n, double tol,
                                    const CellOptions& opts = {});

// Returns bernstein_sup (recomputed from the value table).
double bernstein_check(const ParticleSolution& sol);

// Max over sampled node pairs of |v(x)-v(y)| / W1(m^N_x, m^N_y); pairs with
// coinciding empirical measures are skipped.
double lipschitz_wasserstein_check(const ParticleSolution& sol, int pair_samples,
                                   unsigned seed);

// Empirical measure m^N_x of a tensor-grid node as a histogram on the n-grid.
ProbMeasure empirical_measure(const ParticleGrid& pgrid, std::int64_t node);

struct WNProjection {
    double value = 0.0;  // W^N(m) = int v^N d m^{(x) N}
    Field flat;          // first variation (delta W^N / delta m)(m, y)
    VectorField dm;      // D_m W^N(m, y) = d/dy of the first variation
    Field div_dm;        // div_y D_m W^N(m, y)
};
// Tensor quadrature of v^N against m^(tensor N), using the symmetry of v^N to
// reduce the k-slot sums to N times a single-slot contraction.
WNProjection project_WN(const ParticleSolution& sol, const ProbMeasure& m);

// Left side of the sub-corrector inequality minus lambda^N:
// -int div_y D_m W^N dm + int [H(y, D_m W^N) - F(m)] dm - lambda^N.
double subsolution_residual(const ModelConfig& cfg, const ParticleSolution& sol,
                            const ProbMeasure& m);

// Writes the `cell.tsv` row fields and the value table (torus-field header
// extended with an N= token).
void save_particle_solution(const std::string& path, const ParticleSolution& sol);

}  // namespace mfglab
