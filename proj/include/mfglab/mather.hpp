// Occupation (Mather) measures from long optimal trajectories: closedness
// against a cylindrical test dictionary, the averaged objective, smoothness
// diagnostics, and the weak-KAM identity.
#pragma once

#include <vector>

#include "mfglab/mfg_solver.hpp"

namespace mfglab {

// Equal-weight samples (m, alpha) over stored times in [burn_in, T).
struct OccupationMeasure {
    std::vector<ProbMeasure> m_samples;
    std::vector<VectorField> alpha_samples;
    Vec sample_times;
    double horizon = 0.0;
    double burn_in = 0.0;
    int count() const { return static_cast<int>(m_samples.size()); }
};

// Cylindrical functional Phi(m) = phi(int psi dm) with
// D_m Phi(m, y) = phi'(int psi dm) psi'(y) (centered gradient) and
// div_y D_m Phi(m, y) = phi'(int psi dm) (psi'')(y) (direct 3-point
// Laplacian, adjoint-consistent with the solvers' diffusion step).
struct CylindricalTest {
    enum class Outer { identity, square, cosine };
    Outer outer = Outer::identity;
    Field psi;
    std::string id;

    CylindricalTest(Outer o, Field p, std::string name);

    double phi(double s) const;
    double phi_prime(double s) const;
    double value(const ProbMeasure& m) const;           // Phi(m)
    Field flat_derivative(const ProbMeasure& m) const;  // (delta Phi / delta m)(y)
    VectorField dm(const ProbMeasure& m) const;         // D_m Phi(m, y)
    Field div_dm(const ProbMeasure& m) const;           // div_y D_m Phi(m, y)
};

// The fixed 12-test dictionary: outer in {identity, square, cos}, inner in
// {sin 2 pi x, cos 2 pi x, sin 4 pi x, cos 4 pi x}.
std::vector<CylindricalTest> cylindrical_dictionary(const TorusGrid& grid);

// Uniform-weight sampling of a trajectory past burn_in (alpha present). Each
// step interval is sampled at its end: (m(t_{j+1}), alpha(t_j)), the pairing
// under which the cylindrical generator telescopes exactly through the
// solvers' implicit diffusion step.
OccupationMeasure occupation_measure(const Trajectory& traj, double burn_in);

// Max over tests of the sample-averaged generator
//   int div_y D_m Phi dm - int D_m Phi . alpha dm,
// which telescopes to [Phi(m(T)) - Phi(m(burn_in))] / (T - burn_in) and must
// decay like 1/T.
double closedness_residual(const OccupationMeasure& occ,
                           const std::vector<CylindricalTest>& tests);

// Sample average of int H*(y, alpha) dm + F(m); compares to -lambda.
double mather_objective(const ModelConfig& cfg, const OccupationMeasure& occ);

struct SmoothnessDiagnostics {
    double sup_inv_density = 0.0;   // max over samples of 1 / min density
    double sup_grad_density = 0.0;  // max over samples of max |Dm|
    double sup_fisher = 0.0;        // max over samples of int |Dm/m|^2 dm
};
SmoothnessDiagnostics smoothness_diagnostics(const OccupationMeasure& occ);

// Max over samples of | int q1 . Dm + int H(y, q1) dm - F(m) - lambda_hat |
// with q1 = da_conjugate(y, alpha); on PDE-solver samples (alpha = Du) this
// equals the energy defect of the sampled pair, |energy(u(t_j), m(t_{j+1}))
// - lambda_hat|, by exact summation by parts.
double weak_kam_identity_residual(const ModelConfig& cfg, const OccupationMeasure& occ,
                                  double lambda_hat);

// Per-sample table (`mather.tsv`): t, objective term, per-test generator
// values, identity residual, smoothness diagnostics.
void save_mather_table(const std::string& path, const ModelConfig& cfg,
                       const OccupationMeasure& occ,
                       const std::vector<CylindricalTest>& tests, double lambda_hat);

}  // namespace mfglab
