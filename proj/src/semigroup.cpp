#include "mfglab/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>

namespace mfglab {

namespace {

// One Lax-Oleinik application that also exposes the minimizing endpoint.
struct TauResult {
    double value = 0.0;
    ProbMeasure end;
    double probe_distance = 0.0;
};

TauResult tau(const ModelConfig& cfg, const MeasureFunctional& phi, double h,
              const ProbMeasure& m0, double lambda_hat, double dt,
              const LaxOleinikOptions& opts) {
    check(h >= dt, "lax_oleinik: h must be at least dt");
    TauResult out;
    if (phi.exact_gradient()) {
        auto [traj, rep] = solve_variational(cfg, m0.grid, m0, h, dt, opts.tol,
                                             phi.terminal(), opts.solver_opts);
        out.value = rep.value + lambda_hat * h;  // rep.value includes Phi(m(h))
        out.end = traj.m.back();
    } else {
        // No usable terminal gradient: minimize the running cost alone and
        // evaluate the table at the endpoint, recording the lookup distance.
        auto [traj, rep] =
            solve_variational(cfg, m0.grid, m0, h, dt, opts.tol, std::nullopt,
                              opts.solver_opts);
        out.end = traj.m.back();
        out.value = rep.value + phi.value(out.end, &out.probe_distance) + lambda_hat * h;
    }
    return out;
}

}  // namespace

MeasureFunctional MeasureFunctional::constant(double c) {
    MeasureFunctional f;
    f.kind = Kind::constant;
    f.constant_value = c;
    return f;
}

MeasureFunctional MeasureFunctional::cylindrical(CylindricalTest t) {
    MeasureFunctional f;
    f.kind = Kind::cylindrical;
    f.cyl.emplace(std::move(t));
    return f;
}

MeasureFunctional MeasureFunctional::table(std::vector<ProbMeasure> probes, Vec values) {
    check(!probes.empty(), "MeasureFunctional::table: probes must be nonempty");
    check(static_cast<std::int64_t>(probes.size()) == values.size(),
          "MeasureFunctional::table: one value per probe");
    MeasureFunctional f;
    f.kind = Kind::table;
    f.probes = std::move(probes);
    f.table_values = std::move(values);
    return f;
}

MeasureFunctional MeasureFunctional::shifted(double c) const {
    MeasureFunctional f = *this;
    f.offset += c;
    return f;
}

double MeasureFunctional::value(const ProbMeasure& m, double* probe_distance) const {
    if (probe_distance) *probe_distance = 0.0;
    switch (kind) {
        case Kind::constant:
            return offset + constant_value;
        case Kind::cylindrical:
            return offset + cyl->value(m);
        case Kind::table: {
            std::size_t best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < probes.size(); ++i) {
                const double d = wasserstein1(m, probes[i]);
                if (d < best_d) {
                    best_d = d;
                    best = i;
                }
            }
            if (probe_distance) *probe_distance = best_d;
            return offset + table_values[static_cast<Eigen::Index>(best)];
        }
    }
    return 0.0;
}

TerminalCost MeasureFunctional::terminal() const {
    TerminalCost t;
    MeasureFunctional self = *this;
    t.value = [self](const ProbMeasure& m) { return self.value(m); };
    switch (kind) {
        case Kind::constant:
            t.gradient = [](const ProbMeasure& m) {
                return Vec::Zero(m.density.size()).eval();
            };
            break;
        case Kind::cylindrical:
            // d Phi / d density_i = phi'(int psi dm) * h * psi_i.
            t.gradient = [self](const ProbMeasure& m) {
                const double s = integrate(self.cyl->psi, m);
                return (self.cyl->phi_prime(s) * m.grid.cell_volume() *
                        self.cyl->psi.values)
                    .eval();
            };
            break;
        case Kind::table:
            t.gradient = nullptr;
            break;
    }
    return t;
}

double lax_oleinik(const ModelConfig& cfg, const MeasureFunctional& phi, double h,
                   const ProbMeasure& m0, double lambda_hat, double dt,
                   double* probe_distance, const LaxOleinikOptions& opts) {
    TauResult r = tau(cfg, phi, h, m0, lambda_hat, dt, opts);
    if (probe_distance) *probe_distance = r.probe_distance;
    return r.value;
}

SemigroupGap check_semigroup(const ModelConfig& cfg, const MeasureFunctional& phi,
                             double h1, double h2, const std::vector<ProbMeasure>& probes,
                             double lambda_hat, double dt, const LaxOleinikOptions& opts) {
    check(!probes.empty(), "check_semigroup: probes must be nonempty");
    // Enrich the panel with the endpoints the outer tau_h1 solves will visit,
    // so the inner table is exact where it is actually read.
    std::vector<ProbMeasure> panel = probes;
    const MeasureFunctional zero = MeasureFunctional::constant(0.0);
    for (const auto& p : probes)
        panel.push_back(tau(cfg, zero, h1, p, lambda_hat, dt, opts).end);

    Vec inner(panel.size());
    for (std::size_t i = 0; i < panel.size(); ++i)
        inner[static_cast<Eigen::Index>(i)] =
            tau(cfg, phi, h2, panel[i], lambda_hat, dt, opts).value;
    const MeasureFunctional inner_table = MeasureFunctional::table(panel, inner);

    SemigroupGap out;
    for (const auto& p : probes) {
        TauResult lhs = tau(cfg, inner_table, h1, p, lambda_hat, dt, opts);
        TauResult rhs = tau(cfg, phi, h1 + h2, p, lambda_hat, dt, opts);
        out.gap = std::max(out.gap, std::abs(lhs.value - rhs.value));
        out.interpolation_error = std::max(out.interpolation_error, lhs.probe_distance);
        out.value_scale = std::max(out.value_scale, std::abs(rhs.value));
    }
    return out;
}

NonexpansiveReport check_nonexpansive(const ModelConfig& cfg, const MeasureFunctional& phi,
                                      const MeasureFunctional& psi, double h,
                                      const std::vector<ProbMeasure>& probes,
                                      double lambda_hat, double dt,
                                      const LaxOleinikOptions& opts) {
    check(!probes.empty(), "check_nonexpansive: probes must be nonempty");
    NonexpansiveReport out;
    std::vector<ProbMeasure> panel = probes;
    Vec diff(probes.size());
    for (std::size_t i = 0; i < probes.size(); ++i) {
        TauResult a = tau(cfg, phi, h, probes[i], lambda_hat, dt, opts);
        TauResult b = tau(cfg, psi, h, probes[i], lambda_hat, dt, opts);
        diff[static_cast<Eigen::Index>(i)] = a.value - b.value;
        out.lhs = std::max(out.lhs, std::abs(a.value - b.value));
        panel.push_back(a.end);
        panel.push_back(b.end);
    }
    bool ordered = true;
    for (const auto& q : panel) {
        const double d = phi.value(q) - psi.value(q);
        out.rhs = std::max(out.rhs, std::abs(d));
        if (d > 1e-12) ordered = false;
    }
    out.order_applicable = ordered;
    if (ordered) out.order_violation = std::max(0.0, diff.maxCoeff());
    return out;
}

CalibrationReport extract_calibrated(const ModelConfig& cfg, const ProbMeasure& m0,
                                     double T, double a, double b, double lambda_hat,
                                     const CorrectorTable& chi, double dt,
                                     const LaxOleinikOptions& opts) {
    check(T > 0.0, "extract_calibrated: T must be positive");
    check(a <= b, "extract_calibrated: window must have a <= b");
    check(a > -T && b < T, "extract_calibrated: window must lie inside (-T, T)");
    check(std::abs(lambda_hat - chi.lambda_used) <= 1e-9 * std::max(1.0, std::abs(lambda_hat)),
          "extract_calibrated: corrector table built at a different lambda");
    const MeasureFunctional chi_fn = MeasureFunctional::table(
        chi.probes, chi.chi_hat);

    auto [traj, rep] =
        solve_variational(cfg, m0.grid, m0, 2.0 * T, dt, opts.tol, std::nullopt,
                          opts.solver_opts);
    const double h = m0.grid.cell_volume();
    Vec V = Vec::Zero(m0.grid.num_nodes());
    for (std::int64_t i = 0; i < V.size(); ++i) V[i] = cfg.potential(m0.grid.point(i, 0));

    CalibrationReport report;
    report.lambda_used = lambda_hat;
    auto snap = [&](double t) {  // recentered time -> stored step index
        return static_cast<int>(std::lround((t + T) / dt));
    };
    const int ja = snap(a), jb = snap(b);

    // Window restriction with recentered times.
    report.window.dt = dt;
    report.window.times = Vec::LinSpaced(jb - ja + 1, ja * dt - T, jb * dt - T);
    for (int j = ja; j <= jb; ++j) {
        report.window.m.push_back(traj.m[j]);
        report.window.alpha.push_back(traj.alpha[j]);
        report.window.w.push_back(traj.w[j]);
    }

    // Subintervals of length about 1 (empty for a single-point window).
    const int K = (ja == jb) ? 0 : std::max(1, static_cast<int>(std::lround(b - a)));
    report.t1.resize(K);
    report.t2.resize(K);
    report.defects.resize(K);
    report.probe_distances.resize(K);
    for (int k = 0; k < K; ++k) {
        const int j1 = snap(a + (b - a) * k / K), j2 = snap(a + (b - a) * (k + 1) / K);
        report.t1[k] = j1 * dt - T;
        report.t2[k] = j2 * dt - T;
        double cost = 0.0;  // same left-rectangle convention as evaluate_cost
        for (int j = j1; j < j2; ++j) {
            const Vec& m = traj.m[j].density;
            const auto al = traj.alpha[j].values.col(0);
            cost += dt * (h * ((0.5 * al.array().square() - V.array()) * m.array()).sum() +
                          coupling_value(cfg, traj.m[j]));
        }
        double d1 = 0.0, d2 = 0.0;
        const double c1 = chi_fn.value(traj.m[j1], &d1);
        const double c2 = chi_fn.value(traj.m[j2], &d2);
        report.defects[k] = c1 - (lambda_hat * (report.t2[k] - report.t1[k]) + cost + c2);
        report.probe_distances[k] = std::max(d1, d2);
    }
    report.max_defect = K ? report.defects.cwiseAbs().maxCoeff() : 0.0;
    report.max_probe_distance = K ? report.probe_distances.maxCoeff() : 0.0;
    return report;
}

void save_calibration_report(const std::string& path, const CalibrationReport& report) {
    std::ofstream os(path);
    check(os.good(), "save_calibration_report: cannot open " + path);
    os << std::setprecision(17);
    os << "t1\tt2\tdefect\tprobe_distance\n";
    for (Eigen::Index k = 0; k < report.defects.size(); ++k)
        os << report.t1[k] << '\t' << report.t2[k] << '\t' << report.defects[k] << '\t'
           << report.probe_distances[k] << "\n";
    check(os.good(), "save_calibration_report: write failed");
}

}  // namespace mfglab
