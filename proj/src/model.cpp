#include "mfglab/model.hpp"

#include <cmath>

namespace mfglab {

namespace {
constexpr double kPi = 3.14159265358979323846;

// Periodic linear interpolation of samples v at torus point x.
double interp_periodic(const Vec& v, int n, double x) {
    double s = (x - std::floor(x)) * n;
    int i = static_cast<int>(std::floor(s));
    double t = s - i;
    if (i >= n) { i = 0; t = 0.0; }
    return (1.0 - t) * v[i] + t * v[(i + 1) % n];
}
}  // namespace

void ModelConfig::validate() const {
    check(grid.dim == 1, "ModelConfig: model samples live on a 1-D grid");
    check(convexity_lower > 0.0 && convexity_lower <= convexity_upper,
          "ModelConfig: need 0 < convexity_lower <= convexity_upper");
    check(growth_theta > 0.0 && growth_theta < 1.0, "ModelConfig: growth_theta in (0,1)");
    check(growth_C > 0.0, "ModelConfig: growth_C > 0");
    if (hamiltonian_kind == HamiltonianKind::quadratic_plus_potential)
        check(potential_samples.size() == grid.num_nodes(), "ModelConfig: potential size mismatch");
    if (coupling_kind == CouplingKind::linear)
        check(linear_samples.size() == grid.num_nodes(), "ModelConfig: linear profile size mismatch");
    if (coupling_kind == CouplingKind::quadratic_kernel) {
        check(kernel_samples.rows() == grid.num_nodes() &&
                  kernel_samples.cols() == grid.num_nodes(),
              "ModelConfig: kernel size mismatch");
        check((kernel_samples - kernel_samples.transpose()).cwiseAbs().maxCoeff() <= 1e-12,
              "ModelConfig: kernel must be symmetric");
    }
}

double ModelConfig::potential(double x) const {
    if (hamiltonian_kind == HamiltonianKind::quadratic || potential_samples.size() == 0)
        return 0.0;
    return interp_periodic(potential_samples, grid.n, x);
}

double ModelConfig::linear_profile(double x) const {
    return interp_periodic(linear_samples, grid.n, x);
}

double ModelConfig::kernel(double x, double y) const {
    const int n = grid.n;
    // Bilinear periodic interpolation on the sample table.
    double sx = (x - std::floor(x)) * n, sy = (y - std::floor(y)) * n;
    int i = static_cast<int>(std::floor(sx)) % n, j = static_cast<int>(std::floor(sy)) % n;
    double tx = sx - std::floor(sx), ty = sy - std::floor(sy);
    const int ip = (i + 1) % n, jp = (j + 1) % n;
    return (1 - tx) * ((1 - ty) * kernel_samples(i, j) + ty * kernel_samples(i, jp)) +
           tx * ((1 - ty) * kernel_samples(ip, j) + ty * kernel_samples(ip, jp));
}

ModelConfig make_trivial_model(int n, double c0) {
    ModelConfig cfg;
    cfg.grid = TorusGrid(1, n);
    cfg.hamiltonian_kind = HamiltonianKind::quadratic;
    cfg.coupling_kind = CouplingKind::constant;
    cfg.c0 = c0;
    cfg.validate();
    return cfg;
}

ModelConfig make_kernel_model(int n, double kernel_amplitude, double potential_amplitude) {
    ModelConfig cfg;
    cfg.grid = TorusGrid(1, n);
    cfg.hamiltonian_kind = HamiltonianKind::quadratic_plus_potential;
    cfg.potential_samples.resize(n);
    for (int i = 0; i < n; ++i)
        cfg.potential_samples[i] = potential_amplitude * std::cos(2 * kPi * i / n);
    cfg.coupling_kind = CouplingKind::quadratic_kernel;
    cfg.kernel_samples.resize(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            cfg.kernel_samples(i, j) = kernel_amplitude * std::cos(2 * kPi * (i - j) / double(n));
    cfg.growth_C = std::max(10.0, 4 * kPi * std::abs(potential_amplitude) + 1.0);
    cfg.validate();
    return cfg;
}

double hamiltonian(const ModelConfig& cfg, double x, const Vec& p) {
    return 0.5 * p.squaredNorm() + cfg.potential(x);
}

double conjugate(const ModelConfig& cfg, double x, const Vec& a) {
    return 0.5 * a.squaredNorm() - cfg.potential(x);
}

Vec dp_hamiltonian(const ModelConfig&, double, const Vec& p) { return p; }
Vec da_conjugate(const ModelConfig&, double, const Vec& a) { return a; }

double coupling_value(const ModelConfig& cfg, const ProbMeasure& m) {
    switch (cfg.coupling_kind) {
        case CouplingKind::constant:
            return cfg.c0;
        case CouplingKind::linear:
            return m.grid.cell_volume() * cfg.linear_samples.dot(m.density);
        case CouplingKind::quadratic_kernel: {
            check(m.grid == cfg.grid, "coupling_value: grid mismatch");
            const double h = m.grid.cell_volume();
            return h * h * m.density.dot(cfg.kernel_samples * m.density);
        }
    }
    return 0.0;
}

double coupling_value_empirical(const ModelConfig& cfg, const Vec& positions) {
    const long N = positions.size();
    check(N >= 1, "coupling_value_empirical: need at least one particle");
    switch (cfg.coupling_kind) {
        case CouplingKind::constant:
            return cfg.c0;
        case CouplingKind::linear: {
            double s = 0;
            for (long i = 0; i < N; ++i) s += cfg.linear_profile(positions[i]);
            return s / N;
        }
        case CouplingKind::quadratic_kernel: {
            double s = 0;
            for (long i = 0; i < N; ++i)
                for (long j = 0; j < N; ++j) s += cfg.kernel(positions[i], positions[j]);
            return s / double(N * N);
        }
    }
    return 0.0;
}

Field coupling_derivative(const ModelConfig& cfg, const ProbMeasure& m) {
    Field out(m.grid);
    switch (cfg.coupling_kind) {
        case CouplingKind::constant:
            return out;  // derivative of a constant is zero (already normalized)
        case CouplingKind::linear:
            out.values = cfg.linear_samples;
            break;
        case CouplingKind::quadratic_kernel: {
            check(m.grid == cfg.grid, "coupling_derivative: grid mismatch");
            out.values = 2.0 * m.grid.cell_volume() * (cfg.kernel_samples * m.density);
            break;
        }
    }
    out.values.array() -= integrate(out, m);  // normalization: zero m-average
    return out;
}

namespace {
// Central finite differences of H in x and p for the audit.
double d_x(const ModelConfig& cfg, double x, const Vec& p, double e) {
    return (hamiltonian(cfg, x + e, p) - hamiltonian(cfg, x - e, p)) / (2 * e);
}
double d_xx(const ModelConfig& cfg, double x, const Vec& p, double e) {
    return (hamiltonian(cfg, x + e, p) - 2 * hamiltonian(cfg, x, p) + hamiltonian(cfg, x - e, p)) /
           (e * e);
}
}  // namespace

AssumptionReport audit_assumptions(const ModelConfig& cfg, int sample_count) {
    cfg.validate();
    AssumptionReport rep;
    rep.convexity.name = "D_pp H within [convexity_lower, convexity_upper]";
    rep.dx_growth.name = "|D_x H| <= C + C |p|";
    rep.second_growth.name = "|D_xx H| <= C (1+|p|)^(1+theta) and |D_xp H| <= C (1+|p|)^theta";
    rep.convexity.margin = rep.dx_growth.margin = rep.second_growth.margin = 1e300;

    // V is a linear interpolant of samples: audit x at grid nodes with a
    // grid-spacing stencil, so the differences measure the sampled profile
    // rather than the interpolation kinks.
    const double e = cfg.grid.spacing();
    const int nx = std::min<int>(cfg.grid.n, std::max(4, static_cast<int>(std::sqrt(double(sample_count)))));
    const int np = std::max(4, sample_count / nx);
    for (int ix = 0; ix < nx; ++ix) {
        const double x = cfg.grid.spacing() * ((ix * cfg.grid.n) / nx);
        for (int ip = 0; ip < np; ++ip) {
            const double p = -10.0 + 20.0 * ip / (np - 1);
            Vec pv(1);
            pv[0] = p;
            ++rep.sample_count;

            // (1) convexity: D_pp H by central differences in p.
            const double ep = 1e-4;
            Vec pp = pv, pm = pv;
            pp[0] += ep;
            pm[0] -= ep;
            const double hpp = (hamiltonian(cfg, x, pp) - 2 * hamiltonian(cfg, x, pv) +
                                hamiltonian(cfg, x, pm)) / (ep * ep);
            const double cmargin =
                std::min(hpp - cfg.convexity_lower + 1e-6, cfg.convexity_upper - hpp + 1e-6);
            if (cmargin < rep.convexity.margin) {
                rep.convexity.margin = cmargin;
                rep.convexity.worst_x = x;
                rep.convexity.worst_p = p;
            }

            // (DxH.bounds) growth of D_x H.
            const double dxh = std::abs(d_x(cfg, x, pv, e));
            const double gmargin = cfg.growth_C * (1.0 + std::abs(p)) - dxh;
            if (gmargin < rep.dx_growth.margin) {
                rep.dx_growth.margin = gmargin;
                rep.dx_growth.worst_x = x;
                rep.dx_growth.worst_p = p;
            }

            // (2) second-derivative growth; D_xp H = 0 for separable H, checked anyway.
            const double dxxh = std::abs(d_xx(cfg, x, pv, e));
            const double dxph = std::abs((d_x(cfg, x, pp, e) - d_x(cfg, x, pm, e)) / (2 * ep));
            const double smargin = std::min(
                cfg.growth_C * std::pow(1.0 + std::abs(p), 1.0 + cfg.growth_theta) - dxxh,
                cfg.growth_C * std::pow(1.0 + std::abs(p), cfg.growth_theta) - dxph);
            if (smargin < rep.second_growth.margin) {
                rep.second_growth.margin = smargin;
                rep.second_growth.worst_x = x;
                rep.second_growth.worst_p = p;
            }
        }
    }
    rep.convexity.pass = rep.convexity.margin >= 0;
    rep.dx_growth.pass = rep.dx_growth.margin >= 0;
    rep.second_growth.pass = rep.second_growth.margin >= 0;
    return rep;
}

}  // namespace mfglab
