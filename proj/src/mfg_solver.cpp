#include "mfglab/mfg_solver.hpp"

#include <Eigen/LU>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace mfglab {

namespace {

constexpr double kDensityFloor = 1e-12;

// Dense LU of the implicit diffusion step (I - dt Lap_h) on a 1-D grid.
struct Heat1D {
    Eigen::PartialPivLU<Mat> lu;
    Heat1D(const TorusGrid& g, double dt) {
        const int n = g.n;
        const double r = dt / (g.spacing() * g.spacing());
        Mat A = Mat::Zero(n, n);
        for (int i = 0; i < n; ++i) {
            A(i, i) = 1.0 + 2.0 * r;
            A(i, (i + 1) % n) -= r;
            A(i, (i + n - 1) % n) -= r;
        }
        lu.compute(A);
    }
    Vec solve(const Vec& rhs) const { return lu.solve(rhs); }
};

// Centered periodic first difference, (v_{i+1} - v_{i-1}) / (2h).
Vec centered_diff(const Vec& v, double h) {
    const int n = static_cast<int>(v.size());
    Vec out(n);
    for (int i = 0; i < n; ++i) out[i] = (v[(i + 1) % n] - v[(i + n - 1) % n]) / (2 * h);
    return out;
}

// Discrete coupling value and its gradient with respect to raw density entries.
double coupling_value_density(const ModelConfig& cfg, const TorusGrid& g, const Vec& d) {
    const double h = g.cell_volume();
    switch (cfg.coupling_kind) {
        case CouplingKind::constant: return cfg.c0;
        case CouplingKind::linear: return h * cfg.linear_samples.dot(d);
        case CouplingKind::quadratic_kernel: return h * h * d.dot(cfg.kernel_samples * d);
    }
    return 0.0;
}
Vec coupling_grad_density(const ModelConfig& cfg, const TorusGrid& g, const Vec& d) {
    const double h = g.cell_volume();
    switch (cfg.coupling_kind) {
        case CouplingKind::constant: return Vec::Zero(d.size());
        case CouplingKind::linear: return h * cfg.linear_samples;
        case CouplingKind::quadratic_kernel: return 2.0 * h * h * (cfg.kernel_samples * d);
    }
    return Vec::Zero(d.size());
}

Vec potential_on_grid(const ModelConfig& cfg, const TorusGrid& g) {
    Vec V = Vec::Zero(g.num_nodes());
    if (cfg.hamiltonian_kind == HamiltonianKind::quadratic_plus_potential)
        for (std::int64_t i = 0; i < g.num_nodes(); ++i) V[i] = cfg.potential(g.point(i, 0));
    return V;
}

// Forward density path under m_{j+1} = S (m_j + dt D w_j); returns false when
// a density goes negative (infeasible flux for the perspective cost).
bool forward_density(const Heat1D& heat, const Vec& m0, const Mat& w, double dt, double h,
                     Mat* out) {
    const int n = static_cast<int>(m0.size());
    const int M = static_cast<int>(w.cols());
    out->resize(n, M + 1);
    out->col(0) = m0;
    for (int j = 0; j < M; ++j) {
        Vec rhs = out->col(j) + dt * centered_diff(w.col(j), h);
        out->col(j + 1) = heat.solve(rhs);
        if (out->col(j + 1).minCoeff() < -1e-13) return false;
    }
    return true;
}

struct VariationalProblem {
    const ModelConfig& cfg;
    TorusGrid grid;
    Vec m0;
    double dt;
    int M;
    Vec V;  // potential samples on the grid
    Heat1D heat;
    const std::optional<TerminalCost>& terminal;

    VariationalProblem(const ModelConfig& c, const TorusGrid& g, const Vec& m0_, double dt_,
                       int M_, const std::optional<TerminalCost>& term)
        : cfg(c), grid(g), m0(m0_), dt(dt_), M(M_), V(potential_on_grid(c, g)),
          heat(g, dt_), terminal(term) {}

    double objective(const Mat& w, Mat* ms) const {
        if (!forward_density(heat, m0, w, dt, grid.spacing(), ms))
            return std::numeric_limits<double>::infinity();
        const double h = grid.cell_volume();
        double J = 0.0;
        for (int j = 0; j < M; ++j) {
            const auto m = ms->col(j);
            double kin = 0.0;
            for (int i = 0; i < grid.n; ++i)
                kin += w(i, j) * w(i, j) / (2.0 * std::max(m[i], kDensityFloor));
            J += dt * (h * (kin - V.dot(m)) + coupling_value_density(cfg, grid, m));
        }
        if (terminal) J += terminal->value(ProbMeasure(grid, ms->col(M)));
        return J;
    }

    // Reverse-mode gradient through the eliminated Fokker-Planck constraint;
    // the diffusion matrix is symmetric and the centered divergence is the
    // exact negative transpose of the centered gradient.
    Mat gradient(const Mat& w, const Mat& ms) const {
        const int n = grid.n;
        const double h = grid.cell_volume();
        Mat g(n, M);
        Vec adj = Vec::Zero(n);  // d J / d m_{j+1}, built backwards
        if (terminal && terminal->gradient)
            adj = terminal->gradient(ProbMeasure(grid, ms.col(M)));
        for (int j = M - 1; j >= 0; --j) {
            Vec s_adj = heat.solve(adj);  // S^T = S
            for (int i = 0; i < n; ++i)
                g(i, j) = dt * h * w(i, j) / std::max(ms(i, j), kDensityFloor);
            g.col(j) -= dt * centered_diff(s_adj, grid.spacing());  // D^T = -grad
            // Accumulate d(running cost_j)/d m_j and push through m_j.
            Vec dldm = coupling_grad_density(cfg, grid, ms.col(j));
            for (int i = 0; i < n; ++i) {
                const double mi = std::max(ms(i, j), kDensityFloor);
                dldm[i] += h * (-w(i, j) * w(i, j) / (2.0 * mi * mi) - V[i]);
            }
            adj = s_adj + dt * dldm;
        }
        return g;
    }
};

Trajectory make_trajectory(const TorusGrid& grid, double dt, const Mat& ms, const Mat& w_flux) {
    const int M = static_cast<int>(w_flux.cols());
    Trajectory traj;
    traj.dt = dt;
    traj.times = Vec::LinSpaced(M + 1, 0.0, M * dt);
    traj.m.reserve(M + 1);
    traj.alpha.assign(M + 1, VectorField(grid));
    traj.w.assign(M + 1, VectorField(grid));
    for (int j = 0; j <= M; ++j) {
        Vec d = ms.col(j).cwiseMax(0.0);
        traj.m.emplace_back(ProbMeasure::normalized(grid, d));
        if (j < M) {
            traj.w[j].values.col(0) = w_flux.col(j);
            for (int i = 0; i < grid.n; ++i)
                traj.alpha[j].values(i, 0) = w_flux(i, j) / std::max(ms(i, j), kDensityFloor);
        }
    }
    return traj;
}

int step_count(double T, double dt) {
    const int M = static_cast<int>(std::lround(T / dt));
    check(M >= 1 && std::abs(M * dt - T) <= 1e-9 * std::max(1.0, T),
          "solver: T must be an integer multiple of dt");
    return M;
}

}  // namespace

std::pair<Trajectory, SolveReport> solve_variational(
    const ModelConfig& cfg, const TorusGrid& grid, const ProbMeasure& m0, double T,
    double dt, double tol, const std::optional<TerminalCost>& terminal,
    const SolverOptions& opts) {
    cfg.validate();
    m0.validate();
    check(grid.dim == 1, "solve_variational: 1-D grids only");
    check(m0.grid == grid, "solve_variational: m0 grid mismatch");
    check(m0.total_mass() > 0.0, "solve_variational: m0 must have positive mass");
    const int M = step_count(T, dt);
    VariationalProblem prob(cfg, grid, m0.density, dt, M, terminal);

    Mat w = Mat::Zero(grid.n, M), ms;
    double J = prob.objective(w, &ms);
    check(std::isfinite(J), "solve_variational: infeasible initial flux");

    Mat g = prob.gradient(w, ms);
    double step = 1.0 / (g.cwiseAbs().maxCoeff() + 1.0);
    Mat prev_w, prev_g;
    double gap = std::numeric_limits<double>::infinity();
    int it = 0;
    for (; it < opts.max_iterations; ++it) {
        if (g.cwiseAbs().maxCoeff() <= tol * 1e-3) { gap = 0.0; break; }
        if (it > 0) {
            // Barzilai-Borwein step length, clamped and safeguarded by Armijo.
            const Mat dw = w - prev_w, dg = g - prev_g;
            const double denom = (dw.array() * dg.array()).sum();
            if (denom > 0) step = dw.squaredNorm() / denom;
            step = std::min(std::max(step, 1e-12), 1e6);
        }
        prev_w = w;
        prev_g = g;
        const double gnorm2 = g.squaredNorm();
        bool accepted = false;
        for (int bt = 0; bt < 60; ++bt) {
            Mat w_try = w - step * g;
            Mat ms_try;
            const double J_try = prob.objective(w_try, &ms_try);
            if (J_try <= J - 1e-4 * step * gnorm2) {
                gap = (J - J_try) / std::max(1.0, std::abs(J_try));
                w = std::move(w_try);
                ms = std::move(ms_try);
                J = J_try;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) { gap = 0.0; break; }  // no descent left at this precision
        g = prob.gradient(w, ms);
        if (gap <= tol) break;
    }
    check(gap <= tol, "solve_variational: no convergence after max iterations; last gap " +
                          std::to_string(gap));

    Trajectory traj = make_trajectory(grid, dt, ms, w);
    // Scheme defect of the returned path (bookkeeping identity, machine zero).
    double resid = 0.0;
    for (int j = 0; j < M; ++j) {
        Vec rhs = ms.col(j) + dt * centered_diff(w.col(j), grid.spacing());
        resid = std::max(resid, (ms.col(j + 1) - prob.heat.solve(rhs)).cwiseAbs().maxCoeff());
    }
    traj.fp_residual = resid;

    SolveReport rep;
    rep.value = J;
    rep.iterations = it;
    rep.gap = gap;
    rep.method = "variational";
    return {std::move(traj), rep};
}

namespace {

// One forward Fokker-Planck path with upwinded transport: explicit upwind
// advection with velocity -alpha, then implicit diffusion; conservative and
// positivity-preserving under the CFL condition.
Mat forward_fp_upwind(const Heat1D& heat, const TorusGrid& grid, const Vec& m0,
                      const std::vector<Vec>& alpha, double dt) {
    const int n = grid.n;
    const int M = static_cast<int>(alpha.size());
    const double h = grid.spacing();
    Mat ms(n, M + 1);
    ms.col(0) = m0;
    Vec flux(n);  // flux[i] = upwinded face flux at i+1/2
    for (int j = 0; j < M; ++j) {
        const Vec& a = alpha[j];
        for (int i = 0; i < n; ++i) {
            const int ip = (i + 1) % n;
            const double v = -0.5 * (a[i] + a[ip]);  // advection velocity -alpha
            flux[i] = v > 0 ? v * ms(i, j) : v * ms(ip, j);
        }
        Vec star(n);
        for (int i = 0; i < n; ++i)
            star[i] = ms(i, j) - dt / h * (flux[i] - flux[(i + n - 1) % n]);
        ms.col(j + 1) = heat.solve(star);
    }
    return ms;
}

}  // namespace

std::pair<Trajectory, SolveReport> solve_fbs(
    const ModelConfig& cfg, const TorusGrid& grid, const ProbMeasure& m0, double T,
    double dt, double tol, const SolverOptions& opts) {
    cfg.validate();
    m0.validate();
    check(grid.dim == 1, "solve_fbs: 1-D grids only");
    check(m0.grid == grid, "solve_fbs: m0 grid mismatch");
    const int M = step_count(T, dt);
    const int n = grid.n;
    const double h = grid.spacing();
    const Heat1D heat(grid, dt);
    const Vec V = potential_on_grid(cfg, grid);

    // Initial population guess: drift-free heat flow from m0.
    std::vector<Vec> zero_alpha(M, Vec::Zero(n));
    Mat mbar = forward_fp_upwind(heat, grid, m0.density, zero_alpha, dt);

    std::vector<Vec> u(M + 1), alpha(M + 1, Vec::Zero(n));
    Mat ms;
    double value = 0.0, prev_value = std::numeric_limits<double>::infinity();
    double gap = std::numeric_limits<double>::infinity();
    int k = 1;
    for (; k <= opts.max_iterations; ++k) {
        // Backward HJB against the averaged density path.
        u[M] = Vec::Zero(n);
        for (int j = M - 1; j >= 0; --j) {
            Field F = coupling_derivative(cfg, ProbMeasure::normalized(grid, mbar.col(j + 1).cwiseMax(0.0)));
            Vec du = centered_diff(u[j + 1], h);
            Vec rhs = u[j + 1] + dt * (F.values - (0.5 * du.array().square()).matrix() - V);
            u[j] = heat.solve(rhs);
        }
        double amax = 0.0;
        for (int j = 0; j <= M; ++j) {
            alpha[j] = centered_diff(u[j], h);  // alpha = D_p H(x, Du) = Du
            amax = std::max(amax, alpha[j].cwiseAbs().maxCoeff());
        }
        check(dt * amax <= opts.cfl_safety * h + 1e-15,
              "solve_fbs: CFL violated, need dt <= " +
                  std::to_string(opts.cfl_safety * h / std::max(amax, 1e-300)));

        // Forward best response and running cost.
        std::vector<Vec> a_steps(alpha.begin(), alpha.end() - 1);
        ms = forward_fp_upwind(heat, grid, m0.density, a_steps, dt);
        value = 0.0;
        for (int j = 0; j < M; ++j) {
            const Vec& m = ms.col(j);
            value += dt * (h * ((0.5 * alpha[j].array().square() - V.array()) * m.array()).sum() +
                           coupling_value_density(cfg, grid, m));
        }
        gap = std::abs(value - prev_value) / std::max(1.0, std::abs(value));
        prev_value = value;
        mbar += (ms - mbar) / double(k);  // fictitious-play 1/k averaging
        if (k >= 3 && gap <= tol) break;
    }
    check(gap <= tol, "solve_fbs: no convergence after max iterations; last gap " +
                          std::to_string(gap));

    Trajectory traj;
    traj.dt = dt;
    traj.times = Vec::LinSpaced(M + 1, 0.0, T);
    traj.has_u = true;
    traj.alpha.assign(M + 1, VectorField(grid));
    traj.w.assign(M + 1, VectorField(grid));
    traj.u.assign(M + 1, Field(grid));
    for (int j = 0; j <= M; ++j) {
        traj.m.emplace_back(ProbMeasure::normalized(grid, ms.col(j).cwiseMax(0.0)));
        traj.alpha[j].values.col(0) = alpha[j];
        traj.w[j].values.col(0) = alpha[j].cwiseProduct(ms.col(j));
        traj.u[j].values = u[j];
    }
    // Scheme defect of the returned forward path (machine zero by construction).
    std::vector<Vec> a_steps(alpha.begin(), alpha.end() - 1);
    Mat replay = forward_fp_upwind(heat, grid, m0.density, a_steps, dt);
    traj.fp_residual = (replay - ms).cwiseAbs().maxCoeff();

    SolveReport rep;
    rep.value = value;
    rep.iterations = k;
    rep.gap = gap;
    rep.method = "fbs";
    return {std::move(traj), rep};
}

double evaluate_cost(const ModelConfig& cfg, const Trajectory& traj) {
    check(!traj.alpha.empty(), "evaluate_cost: trajectory has no drift");
    const TorusGrid& grid = traj.grid();
    const Vec V = potential_on_grid(cfg, grid);
    const double h = grid.cell_volume();
    double J = 0.0;
    for (int j = 0; j < traj.steps(); ++j) {
        const Vec& m = traj.m[j].density;
        const Vec a = traj.alpha[j].values.col(0);
        J += traj.dt * (h * ((0.5 * a.array().square() - V.array()) * m.array()).sum() +
                        coupling_value_density(cfg, grid, m));
    }
    return J;
}

double dynamic_programming_gap(const ModelConfig& cfg, const ProbMeasure& m0, double T,
                               double t_mid, double dt, double tol) {
    check(t_mid >= 0.0 && t_mid < T, "dynamic_programming_gap: need 0 <= t_mid < T");
    auto [traj, rep] = solve_variational(cfg, m0.grid, m0, T, dt, tol);
    if (t_mid == 0.0) {
        auto [traj2, rep2] = solve_variational(cfg, m0.grid, m0, T, dt, tol);
        return std::abs(rep.value - rep2.value);
    }
    const int jmid = static_cast<int>(std::lround(t_mid / dt));
    check(std::abs(jmid * dt - t_mid) <= 1e-9, "dynamic_programming_gap: t_mid off the time grid");
    const TorusGrid& grid = m0.grid;
    const Vec V = potential_on_grid(cfg, grid);
    const double h = grid.cell_volume();
    double head = 0.0;
    for (int j = 0; j < jmid; ++j) {
        const Vec& m = traj.m[j].density;
        const Vec a = traj.alpha[j].values.col(0);
        head += dt * (h * ((0.5 * a.array().square() - V.array()) * m.array()).sum() +
                      coupling_value_density(cfg, grid, m));
    }
    auto [tail_traj, tail_rep] = solve_variational(cfg, grid, traj.m[jmid], T - t_mid, dt, tol);
    return std::abs(rep.value - (head + tail_rep.value));
}

void save_trajectory(const std::string& dir, const Trajectory& traj, const SolveReport& report) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    std::ofstream meta(fs::path(dir) / "meta");
    check(meta.good(), "save_trajectory: cannot write meta in " + dir);
    meta << std::setprecision(17);
    meta << "dim = " << traj.grid().dim << "\n"
         << "n = " << traj.grid().n << "\n"
         << "dt = " << traj.dt << "\n"
         << "T = " << traj.times[traj.times.size() - 1] << "\n"
         << "steps = " << traj.steps() << "\n"
         << "has_u = " << (traj.has_u ? 1 : 0) << "\n"
         << "value = " << report.value << "\n"
         << "gap = " << report.gap << "\n"
         << "fp_residual = " << traj.fp_residual << "\n"
         << "method = " << report.method << "\n";
    auto name = [&](const char* what, int j) {
        std::ostringstream os;
        os << what << "_" << std::setw(5) << std::setfill('0') << j << ".txt";
        return (fs::path(dir) / os.str()).string();
    };
    for (int j = 0; j <= traj.steps(); ++j) {
        write_field_file(name("m", j), traj.m[j]);
        write_field_file(name("alpha", j), traj.alpha[j]);
        write_field_file(name("w", j), traj.w[j]);
        if (traj.has_u) write_field_file(name("u", j), traj.u[j]);
    }
}

Trajectory load_trajectory(const std::string& dir) {
    namespace fs = std::filesystem;
    std::ifstream meta(fs::path(dir) / "meta");
    check(meta.good(), "load_trajectory: cannot read meta in " + dir);
    double dt = 0, fp_residual = 0;
    int steps = -1, has_u = 0;
    std::string line;
    while (std::getline(meta, line)) {
        std::istringstream ls(line);
        std::string key, eq;
        ls >> key >> eq;
        if (key == "dt") ls >> dt;
        else if (key == "steps") ls >> steps;
        else if (key == "has_u") ls >> has_u;
        else if (key == "fp_residual") ls >> fp_residual;
    }
    check(dt > 0 && steps >= 1, "load_trajectory: invalid meta");
    auto name = [&](const char* what, int j) {
        std::ostringstream os;
        os << what << "_" << std::setw(5) << std::setfill('0') << j << ".txt";
        return (fs::path(dir) / os.str()).string();
    };
    Trajectory traj;
    traj.dt = dt;
    traj.times = Vec::LinSpaced(steps + 1, 0.0, steps * dt);
    traj.has_u = has_u != 0;
    traj.fp_residual = fp_residual;
    for (int j = 0; j <= steps; ++j) {
        traj.m.push_back(as_measure(read_field_file(name("m", j))));
        traj.alpha.push_back(as_vector_field(read_field_file(name("alpha", j))));
        traj.w.push_back(as_vector_field(read_field_file(name("w", j))));
        if (traj.has_u) traj.u.push_back(as_field(read_field_file(name("u", j))));
    }
    return traj;
}

}  // namespace mfglab
