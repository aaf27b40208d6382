/// Unit tests for the Hamiltonian/conjugate pair, couplings, and the
/// standing-assumption audit.
#include <doctest.h>

#include <cmath>
#include <random>

#include "mfglab/model.hpp"

using namespace mfglab;

namespace {
const double kPi = 3.14159265358979323846;

Vec scalar(double v) {
    Vec p(1);
    p[0] = v;
    return p;
}

ModelConfig potential_model(int n, double amplitude) {
    ModelConfig cfg;
    cfg.grid = TorusGrid(1, n);
    cfg.hamiltonian_kind = HamiltonianKind::quadratic_plus_potential;
    cfg.potential_samples.resize(n);
    for (int i = 0; i < n; ++i)
        cfg.potential_samples[i] = amplitude * std::cos(2 * kPi * i / n);
    // |V'| needs C >= 2 pi |amplitude|; |V''| needs C >= (2 pi)^2 |amplitude|.
    cfg.growth_C = std::max(10.0, 4 * kPi * kPi * std::abs(amplitude) + 1.0);
    cfg.validate();
    return cfg;
}
}  // namespace

TEST_CASE("hamiltonian: quadratic values and potential offset") {
    ModelConfig cfg = make_trivial_model(16, 0.7);
    CHECK(hamiltonian(cfg, 0.3, scalar(0.0)) == 0.0);
    CHECK(hamiltonian(cfg, 0.3, scalar(2.0)) == doctest::Approx(2.0));

    ModelConfig vp = potential_model(16, 1.0);
    CHECK(hamiltonian(vp, 0.0, scalar(0.0)) == doctest::Approx(1.0));  // V(0) = 1
}

TEST_CASE("conjugate: closed form and Fenchel equality") {
    ModelConfig cfg = make_trivial_model(16, 0.0);
    CHECK(conjugate(cfg, 0.1, scalar(0.0)) == 0.0);

    ModelConfig vp = potential_model(16, 1.0);
    CHECK(conjugate(vp, 0.0, scalar(0.0)) == doctest::Approx(-1.0));

    std::mt19937 rng(21);
    std::uniform_real_distribution<double> ux(0, 1), up(-5, 5);
    for (int t = 0; t < 100; ++t) {
        const double x = ux(rng);
        Vec p = scalar(up(rng));
        Vec a = dp_hamiltonian(vp, x, p);
        // Fenchel equality H*(x, D_p H(x,p)) = p . D_p H - H.
        const double lhs = conjugate(vp, x, a);
        const double rhs = p.dot(a) - hamiltonian(vp, x, p);
        CHECK(std::abs(lhs - rhs) <= 1e-12 * (1 + std::abs(rhs)));
        // Fenchel inequality for an unrelated slope.
        Vec b = scalar(up(rng));
        CHECK(p.dot(b) <= hamiltonian(vp, x, p) + conjugate(vp, x, b) + 1e-10);
        // Round trip of the derivative maps.
        CHECK((da_conjugate(vp, x, dp_hamiltonian(vp, x, p)) - p).cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("coupling_value: constant, unit kernel, vanishing cosine integral") {
    TorusGrid g(1, 32);
    ProbMeasure u = ProbMeasure::uniform(g);

    ModelConfig c = make_trivial_model(32, 0.7);
    CHECK(coupling_value(c, u) == doctest::Approx(0.7));

    ModelConfig ones;
    ones.grid = g;
    ones.coupling_kind = CouplingKind::quadratic_kernel;
    ones.kernel_samples = Mat::Ones(32, 32);
    ones.validate();
    CHECK(coupling_value(ones, u) == doctest::Approx(1.0).epsilon(1e-12));

    ModelConfig cosk = make_kernel_model(32, 1.0, 0.0);
    CHECK(std::abs(coupling_value(cosk, u)) <= 1e-10);
}

TEST_CASE("coupling_derivative: zero cases and normalization") {
    TorusGrid g(1, 32);
    std::mt19937 rng(4);
    std::uniform_real_distribution<double> ud(0.2, 1.0);
    Vec d(32);
    for (int i = 0; i < 32; ++i) d[i] = ud(rng);
    ProbMeasure m = ProbMeasure::normalized(g, d);

    ModelConfig c = make_trivial_model(32, 0.7);
    CHECK(coupling_derivative(c, m).values.cwiseAbs().maxCoeff() == 0.0);

    ModelConfig ones;
    ones.grid = g;
    ones.coupling_kind = CouplingKind::quadratic_kernel;
    ones.kernel_samples = Mat::Ones(32, 32);
    ones.validate();
    CHECK(coupling_derivative(ones, m).values.cwiseAbs().maxCoeff() <= 1e-12);

    ModelConfig k = make_kernel_model(32);
    Field F = coupling_derivative(k, m);
    CHECK(std::abs(integrate(F, m)) <= 1e-13);  // zero m-average by construction
}

TEST_CASE("coupling_derivative matches central differences of coupling_value") {
    TorusGrid g(1, 32);
    ModelConfig k = make_kernel_model(32);
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> ud(0.3, 1.0), un(-1.0, 1.0);
    Vec d(32), delta(32);
    for (int i = 0; i < 32; ++i) d[i] = ud(rng);
    for (int i = 0; i < 32; ++i) delta[i] = un(rng);
    delta.array() -= delta.mean();  // mass-zero perturbation
    ProbMeasure m = ProbMeasure::normalized(g, d);

    const double eps = 1e-4;
    ProbMeasure mp(g, m.density + eps * delta), mm(g, m.density - eps * delta);
    const double fd = (coupling_value(k, mp) - coupling_value(k, mm)) / (2 * eps);
    Field F = coupling_derivative(k, m);
    const double pairing = g.cell_volume() * F.values.dot(delta);
    CHECK(std::abs(fd - pairing) <= 1e-6 * std::max(1.0, std::abs(fd)));
}

TEST_CASE("empirical coupling agrees with the kernel sum") {
    ModelConfig k = make_kernel_model(16, -0.5, 0.2);
    Vec xs(2);
    xs << 0.25, 0.75;
    // (1/4) [k(0,0)*2 + 2 k(.25,.75)] with k(x,y) = -0.5 cos(2 pi (x-y)).
    const double expect = 0.25 * (2 * (-0.5) + 2 * (-0.5) * std::cos(kPi));
    CHECK(coupling_value_empirical(k, xs) == doctest::Approx(expect).epsilon(1e-10));
    CHECK(coupling_value_empirical(make_trivial_model(8, 0.7), xs) == doctest::Approx(0.7));
}

TEST_CASE("audit_assumptions: quadratic passes, invalid config rejected") {
    ModelConfig cfg = make_trivial_model(16, 0.0);
    AssumptionReport rep = audit_assumptions(cfg, 400);
    CHECK(rep.all_pass());
    CHECK(rep.convexity.margin >= 0);

    ModelConfig vp = potential_model(64, 1.0);
    AssumptionReport rep2 = audit_assumptions(vp, 400);
    CHECK(rep2.all_pass());  // C = 10 >= 2 pi covers |V'|

    ModelConfig bad = make_trivial_model(16, 0.0);
    bad.convexity_lower = 0.0;
    CHECK_THROWS(bad.validate());
    Mat asym = Mat::Zero(16, 16);
    asym(0, 1) = 1.0;
    ModelConfig badk = make_trivial_model(16, 0.0);
    badk.coupling_kind = CouplingKind::quadratic_kernel;
    badk.kernel_samples = asym;
    CHECK_THROWS(badk.validate());
}
