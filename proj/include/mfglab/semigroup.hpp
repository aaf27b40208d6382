// Lax-Oleinik operator tau_h on measure functionals, its algebraic laws
// (composition, non-expansiveness, order preservation, additive-constant
// equivariance), and calibrated-curve extraction from two-sided horizons.
#pragma once

#include <optional>
#include <vector>

#include "mfglab/ergodic.hpp"
#include "mfglab/mather.hpp"

namespace mfglab {

// Functional on probability measures: a constant, a cylindrical closed form,
// or a probe table evaluated at the nearest probe in 1-Wasserstein distance
// (exact on its own probes; the lookup distance is always reported).
struct MeasureFunctional {
    enum class Kind { constant, cylindrical, table };
    Kind kind = Kind::constant;
    double constant_value = 0.0;
    double offset = 0.0;  // additive constant, for the tau_h(Phi + c) law
    std::optional<CylindricalTest> cyl;
    std::vector<ProbMeasure> probes;
    Vec table_values;

    static MeasureFunctional constant(double c);
    static MeasureFunctional cylindrical(CylindricalTest t);
    static MeasureFunctional table(std::vector<ProbMeasure> probes, Vec values);
    // The functional plus a constant (gradient unchanged).
    MeasureFunctional shifted(double c) const;

    // Value at m; for table kind *probe_distance (when non-null) receives the
    // W1 distance to the probe used, otherwise 0.
    double value(const ProbMeasure& m, double* probe_distance = nullptr) const;

    // Terminal cost for the variational solver. Constant and cylindrical
    // kinds carry exact density gradients; table kind has none, so tau_h
    // evaluates it post-hoc at the running-cost minimizer.
    TerminalCost terminal() const;
    bool exact_gradient() const { return kind != Kind::table; }
};

struct LaxOleinikOptions {
    double tol = 1e-9;
    SolverOptions solver_opts;
};

// tau_h Phi(m0) = inf over trajectories of [running cost on [0,h] + Phi(m(h))]
// + lambda_hat * h, by a variational solve with Phi as terminal cost.
// *probe_distance (when non-null) receives the table-lookup distance at m(h).
double lax_oleinik(const ModelConfig& cfg, const MeasureFunctional& phi, double h,
                   const ProbMeasure& m0, double lambda_hat, double dt,
                   double* probe_distance = nullptr, const LaxOleinikOptions& opts = {});

struct SemigroupGap {
    double gap = 0.0;                  // max over probes |tau_h1(tau_h2 Phi) - tau_{h1+h2} Phi|
    double interpolation_error = 0.0;  // max table-lookup W1 distance encountered
    double value_scale = 0.0;          // max over probes |tau_{h1+h2} Phi|
};
// Composition law tau_h1 . tau_h2 = tau_{h1+h2}: the inner tau_h2 Phi is
// materialized as a table on the probes enriched with the trajectory
// endpoints the outer solves actually visit.
SemigroupGap check_semigroup(const ModelConfig& cfg, const MeasureFunctional& phi,
                             double h1, double h2, const std::vector<ProbMeasure>& probes,
                             double lambda_hat, double dt,
                             const LaxOleinikOptions& opts = {});

struct NonexpansiveReport {
    double lhs = 0.0;  // max over probes |tau_h Phi - tau_h Psi|
    double rhs = 0.0;  // sup |Phi - Psi| over the enriched panel
    bool order_applicable = false;  // Phi <= Psi held on the enriched panel
    double order_violation = 0.0;   // max positive part of tau_h Phi - tau_h Psi
};
// Non-expansiveness |tau_h Phi - tau_h Psi| <= sup |Phi - Psi| and, when
// Phi <= Psi on the panel, order preservation tau_h Phi <= tau_h Psi.
NonexpansiveReport check_nonexpansive(const ModelConfig& cfg, const MeasureFunctional& phi,
                                      const MeasureFunctional& psi, double h,
                                      const std::vector<ProbMeasure>& probes,
                                      double lambda_hat, double dt,
                                      const LaxOleinikOptions& opts = {});

// Calibration defects chi(m(t1)) - [lambda (t2-t1) + cost(t1,t2) + chi(m(t2))]
// over subintervals of a window of a two-sided minimizer, with chi evaluated
// by nearest probe of a corrector table.
struct CalibrationReport {
    Trajectory window;       // trajectory restricted to [a, b] (recentered times)
    Vec t1, t2;              // subinterval boundaries
    Vec defects;             // one per subinterval
    Vec probe_distances;     // max of the two chi lookups per subinterval
    double lambda_used = 0.0;
    double max_defect = 0.0;
    double max_probe_distance = 0.0;
};
// Solves the horizon-2T problem from m0 (time 0 maps to -T), restricts to the
// window [a, b] of recentered time in (-T, T), and splits it into
// subintervals of length about 1.
CalibrationReport extract_calibrated(const ModelConfig& cfg, const ProbMeasure& m0,
                                     double T, double a, double b, double lambda_hat,
                                     const CorrectorTable& chi, double dt,
                                     const LaxOleinikOptions& opts = {});

// `calibrated.tsv`: t1, t2, defect, probe_distance per subinterval.
void save_calibration_report(const std::string& path, const CalibrationReport& report);

}  // namespace mfglab
