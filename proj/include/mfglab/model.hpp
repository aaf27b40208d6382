// Hamiltonian H, its Legendre conjugate H*, the potential coupling F on
// measures with its normalized derivative, and audits of the standing
// convexity/growth assumptions.
#pragma once

#include <string>

#include "mfglab/torus_field.hpp"

namespace mfglab {

enum class HamiltonianKind { quadratic, quadratic_plus_potential };
enum class CouplingKind { constant, linear, quadratic_kernel };

// Model data: H(x,p) = |p|^2/2 + V(x) with V sampled on a 1-D grid, and a
// coupling that is constant, linear (integral of a fixed profile) or a
// symmetric quadratic kernel (possibly sign-indefinite, hence nonmonotone).
struct ModelConfig {
    HamiltonianKind hamiltonian_kind = HamiltonianKind::quadratic;
    TorusGrid grid;            // 1-D grid carrying V, f and the kernel samples
    Vec potential_samples;     // V on grid nodes; zero for plain quadratic
    CouplingKind coupling_kind = CouplingKind::constant;
    double c0 = 0.0;           // constant coupling level
    Vec linear_samples;        // f for the linear coupling
    Mat kernel_samples;        // k(x_i, x_j), symmetric, for quadratic_kernel
    double convexity_lower = 1.0;  // C-bar^-1 of assumption (1)
    double convexity_upper = 1.0;  // C-bar of assumption (1)
    double growth_theta = 0.5;     // theta of assumption (2)
    double growth_C = 10.0;        // C of the growth bounds

    void validate() const;
    // Potential V at a torus point, by periodic linear interpolation of the
    // samples (exact at grid nodes).
    double potential(double x) const;
    double linear_profile(double x) const;
    // Kernel k(x,y) by bilinear periodic interpolation (exact at node pairs).
    double kernel(double x, double y) const;
};

// Convenience constructors for the two benchmark models.
ModelConfig make_trivial_model(int n, double c0);                       // H = |p|^2/2, F = c0
ModelConfig make_kernel_model(int n, double kernel_amplitude = -0.5,
                              double potential_amplitude = 0.2);        // spec benchmark

// H(x,p) = |p|^2/2 + V(x).
double hamiltonian(const ModelConfig& cfg, double x, const Vec& p);
// Legendre conjugate H*(x,a) = |a|^2/2 - V(x).
double conjugate(const ModelConfig& cfg, double x, const Vec& a);
// D_p H(x,p) = p and D_a H*(x,a) = a, mutually inverse in the second slot.
Vec dp_hamiltonian(const ModelConfig& cfg, double x, const Vec& p);
Vec da_conjugate(const ModelConfig& cfg, double x, const Vec& a);

// F(m): c0, integral of f dm, or the double kernel integral.
double coupling_value(const ModelConfig& cfg, const ProbMeasure& m);
// F(m^N_x) for the empirical measure of particle positions (diagonal included).
double coupling_value_empirical(const ModelConfig& cfg, const Vec& positions);
// F(.,m) = dF/dm normalized so that its m-average vanishes exactly.
Field coupling_derivative(const ModelConfig& cfg, const ProbMeasure& m);

// Assumption audit over sampled (x,p); failures are reported, never thrown.
struct AssumptionCheck {
    std::string name;
    bool pass = true;
    double worst_x = 0.0, worst_p = 0.0;
    double margin = 0.0;  // slack of the inequality at the worst sample
};
struct AssumptionReport {
    AssumptionCheck convexity;      // C-bar^-1 <= D_pp H <= C-bar
    AssumptionCheck dx_growth;      // |D_x H| <= C + C|p|
    AssumptionCheck second_growth;  // |D_xx H| <= C (1+|p|)^(1+theta), |D_xp H| <= C (1+|p|)^theta
    long sample_count = 0;
    bool all_pass() const { return convexity.pass && dx_growth.pass && second_growth.pass; }
};
AssumptionReport audit_assumptions(const ModelConfig& cfg, int sample_count);

}  // namespace mfglab
