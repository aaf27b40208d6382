#include "mfglab/mather.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>

namespace mfglab {

namespace {
const double kPi = 3.14159265358979323846;

// Generator of a test against one sample: int div_y D_m Phi dm - int D_m Phi . alpha dm.
double generator_term(const CylindricalTest& t, const ProbMeasure& m,
                      const VectorField& alpha) {
    const Field div = t.div_dm(m);
    const VectorField d = t.dm(m);
    const double h = m.grid.cell_volume();
    double out = 0.0;
    for (std::int64_t i = 0; i < m.density.size(); ++i) {
        double adv = 0.0;
        for (int a = 0; a < m.grid.dim; ++a) adv += d.values(i, a) * alpha.values(i, a);
        out += h * m.density[i] * (div.values[i] - adv);
    }
    return out;
}
}  // namespace

CylindricalTest::CylindricalTest(Outer o, Field p, std::string name)
    : outer(o), psi(std::move(p)), id(std::move(name)) {
    // Spot-check the first variation against a central difference along a
    // mass-neutral direction at the uniform measure.
    const TorusGrid& g = psi.grid;
    ProbMeasure m = ProbMeasure::uniform(g);
    Vec delta(g.num_nodes());
    for (std::int64_t i = 0; i < delta.size(); ++i)
        delta[i] = std::cos(2 * kPi * g.point(i, 0)) + 0.5 * std::sin(4 * kPi * g.point(i, 0));
    delta.array() -= delta.mean();
    const double eps = 1e-5;
    ProbMeasure mp(g, m.density + eps * delta), mm(g, m.density - eps * delta);
    const double fd = (value(mp) - value(mm)) / (2 * eps);
    const double pairing = g.cell_volume() * flat_derivative(m).values.dot(delta);
    check(std::abs(fd - pairing) <= 1e-7 * std::max(1.0, std::abs(fd)),
          "CylindricalTest: derivative spot check failed for " + id);
}

double CylindricalTest::phi(double s) const {
    switch (outer) {
        case Outer::identity: return s;
        case Outer::square: return s * s;
        case Outer::cosine: return std::cos(s);
    }
    return 0.0;
}

double CylindricalTest::phi_prime(double s) const {
    switch (outer) {
        case Outer::identity: return 1.0;
        case Outer::square: return 2.0 * s;
        case Outer::cosine: return -std::sin(s);
    }
    return 0.0;
}

double CylindricalTest::value(const ProbMeasure& m) const {
    return phi(integrate(psi, m));
}

Field CylindricalTest::flat_derivative(const ProbMeasure& m) const {
    return Field(psi.grid, phi_prime(integrate(psi, m)) * psi.values);
}

VectorField CylindricalTest::dm(const ProbMeasure& m) const {
    VectorField g = gradient(psi);
    g.values *= phi_prime(integrate(psi, m));
    return g;
}

Field CylindricalTest::div_dm(const ProbMeasure& m) const {
    // Direct 3-point stencil: adjoint-consistent with the solvers' implicit
    // diffusion step, so the generator telescopes along computed trajectories.
    Field d = laplacian(psi);
    d.values *= phi_prime(integrate(psi, m));
    return d;
}

std::vector<CylindricalTest> cylindrical_dictionary(const TorusGrid& grid) {
    check(grid.dim == 1, "cylindrical_dictionary: 1-D grids only");
    std::vector<CylindricalTest> out;
    const std::pair<CylindricalTest::Outer, std::string> outers[] = {
        {CylindricalTest::Outer::identity, "id"},
        {CylindricalTest::Outer::square, "sq"},
        {CylindricalTest::Outer::cosine, "cos"},
    };
    for (const auto& [o, oname] : outers)
        for (int k : {1, 2}) {
            out.emplace_back(o, Field::from_fn(grid, [k](double x) {
                                 return std::sin(2 * kPi * k * x);
                             }),
                             oname + "_sin" + std::to_string(k));
            out.emplace_back(o, Field::from_fn(grid, [k](double x) {
                                 return std::cos(2 * kPi * k * x);
                             }),
                             oname + "_cos" + std::to_string(k));
        }
    return out;
}

OccupationMeasure occupation_measure(const Trajectory& traj, double burn_in) {
    check(!traj.m.empty(), "occupation_measure: empty trajectory");
    const double T = traj.times[traj.times.size() - 1];
    check(burn_in >= 0.0 && burn_in < T, "occupation_measure: burn_in must be in [0, T)");
    OccupationMeasure occ;
    occ.horizon = T;
    occ.burn_in = burn_in;
    std::vector<double> ts;
    // Interval [t_j, t_{j+1}) sampled at its end: the post-step density paired
    // with the control that produced it, which makes the cylindrical generator
    // telescope exactly through the implicit diffusion step.
    for (int j = 0; j < traj.steps(); ++j) {
        if (traj.times[j] < burn_in - 1e-12) continue;
        occ.m_samples.push_back(traj.m[j + 1]);
        occ.alpha_samples.push_back(traj.alpha[j]);
        ts.push_back(traj.times[j + 1]);
    }
    check(!ts.empty(), "occupation_measure: no samples past burn_in");
    occ.sample_times = Eigen::Map<const Vec>(ts.data(), ts.size());
    return occ;
}

double closedness_residual(const OccupationMeasure& occ,
                           const std::vector<CylindricalTest>& tests) {
    check(occ.count() > 0, "closedness_residual: empty occupation measure");
    double worst = 0.0;
    for (const auto& t : tests) {
        double avg = 0.0;
        for (int k = 0; k < occ.count(); ++k)
            avg += generator_term(t, occ.m_samples[k], occ.alpha_samples[k]);
        worst = std::max(worst, std::abs(avg / occ.count()));
    }
    return worst;
}

double mather_objective(const ModelConfig& cfg, const OccupationMeasure& occ) {
    check(occ.count() > 0, "mather_objective: empty occupation measure");
    double total = 0.0;
    for (int k = 0; k < occ.count(); ++k) {
        const ProbMeasure& m = occ.m_samples[k];
        const double h = m.grid.cell_volume();
        double lag = 0.0;
        for (std::int64_t i = 0; i < m.density.size(); ++i)
            lag += h * m.density[i] *
                   conjugate(cfg, m.grid.point(i, 0),
                             occ.alpha_samples[k].values.row(i).transpose());
        total += lag + coupling_value(cfg, m);
    }
    return total / occ.count();
}

SmoothnessDiagnostics smoothness_diagnostics(const OccupationMeasure& occ) {
    check(occ.count() > 0, "smoothness_diagnostics: empty occupation measure");
    SmoothnessDiagnostics d;
    for (const auto& m : occ.m_samples) {
        const double floor = std::max(m.density.minCoeff(), 1e-300);
        d.sup_inv_density = std::max(d.sup_inv_density, 1.0 / floor);
        const VectorField grad = gradient(Field(m.grid, m.density));
        d.sup_grad_density =
            std::max(d.sup_grad_density, grad.values.cwiseAbs().maxCoeff());
        const double h = m.grid.cell_volume();
        double fisher = 0.0;
        for (std::int64_t i = 0; i < m.density.size(); ++i)
            fisher += h * grad.values.row(i).squaredNorm() / std::max(m.density[i], 1e-300);
        d.sup_fisher = std::max(d.sup_fisher, fisher);
    }
    return d;
}

double weak_kam_identity_residual(const ModelConfig& cfg, const OccupationMeasure& occ,
                                  double lambda_hat) {
    check(occ.count() > 0, "weak_kam_identity_residual: empty occupation measure");
    double worst = 0.0;
    for (int k = 0; k < occ.count(); ++k) {
        const ProbMeasure& m = occ.m_samples[k];
        const double h = m.grid.cell_volume();
        const VectorField dm = gradient(Field(m.grid, m.density));
        double res = -coupling_value(cfg, m) - lambda_hat;
        for (std::int64_t i = 0; i < m.density.size(); ++i) {
            const Vec q1 = da_conjugate(cfg, m.grid.point(i, 0),
                                        occ.alpha_samples[k].values.row(i).transpose());
            res += h * q1.dot(dm.values.row(i).transpose());
            res += h * m.density[i] * hamiltonian(cfg, m.grid.point(i, 0), q1);
        }
        worst = std::max(worst, std::abs(res));
    }
    return worst;
}

void save_mather_table(const std::string& path, const ModelConfig& cfg,
                       const OccupationMeasure& occ,
                       const std::vector<CylindricalTest>& tests, double lambda_hat) {
    std::ofstream os(path);
    check(os.good(), "save_mather_table: cannot open " + path);
    os << std::setprecision(17);
    os << "t\tlagrangian\tidentity_residual\tmin_density\tmax_grad\tfisher";
    for (const auto& t : tests) os << "\tgen_" << t.id;
    os << "\n";
    for (int k = 0; k < occ.count(); ++k) {
        OccupationMeasure one;
        one.m_samples = {occ.m_samples[k]};
        one.alpha_samples = {occ.alpha_samples[k]};
        one.sample_times = Vec::Constant(1, occ.sample_times[k]);
        one.horizon = occ.horizon;
        one.burn_in = occ.burn_in;
        const ProbMeasure& m = occ.m_samples[k];
        const VectorField grad = gradient(Field(m.grid, m.density));
        const double h = m.grid.cell_volume();
        double fisher = 0.0;
        for (std::int64_t i = 0; i < m.density.size(); ++i)
            fisher += h * grad.values.row(i).squaredNorm() / std::max(m.density[i], 1e-300);
        os << occ.sample_times[k] << '\t' << mather_objective(cfg, one) << '\t'
           << weak_kam_identity_residual(cfg, one, lambda_hat) << '\t'
           << m.density.minCoeff() << '\t' << grad.values.cwiseAbs().maxCoeff() << '\t'
           << fisher;
        for (const auto& t : tests)
            os << '\t' << generator_term(t, occ.m_samples[k], occ.alpha_samples[k]);
        os << "\n";
    }
    check(os.good(), "save_mather_table: write failed");
}

}  // namespace mfglab
