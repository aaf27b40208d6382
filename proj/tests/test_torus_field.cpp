/// Unit tests for periodic grid calculus, quadrature, serialization, and the
/// 1-D Wasserstein metric (checked against a brute-force transport LP).
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "lp_oracle.hpp"
#include "mfglab/torus_field.hpp"

using namespace mfglab;

namespace {
const double kPi = 3.14159265358979323846;

Vec random_positive(int n, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(0.1, 1.0);
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = u(rng);
    return v;
}
}  // namespace

TEST_CASE("gradient of a constant field is zero") {
    TorusGrid g(1, 16);
    Field f(g, Vec::Constant(16, 3.7));
    CHECK(gradient(f).values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("gradient matches the analytic derivative of sin(2 pi x)") {
    TorusGrid g(1, 64);
    Field f = Field::from_fn(g, [](double x) { return std::sin(2 * kPi * x); });
    VectorField df = gradient(f);
    const double bound = std::pow(2 * kPi, 3) / (6.0 * 64 * 64);
    for (std::int64_t i = 0; i < g.num_nodes(); ++i) {
        const double exact = 2 * kPi * std::cos(2 * kPi * g.point(i, 0));
        CHECK(std::abs(df.values(i, 0) - exact) <= bound);
    }
}

TEST_CASE("gradient of a sawtooth is defined but O(1) wrong at the wrap") {
    // Non-smooth inputs are accepted; accuracy is simply not promised.
    TorusGrid g(1, 16);
    Field f = Field::from_fn(g, [](double x) { return x; });
    VectorField df = gradient(f);
    CHECK(df.values(0, 0) < 0.0);          // wrap jump dominates
    CHECK(df.values(8, 0) == doctest::Approx(1.0));  // interior slope
}

TEST_CASE("divergence matches the analytic derivative of cos(2 pi x)") {
    TorusGrid g(1, 64);
    VectorField v(g);
    for (std::int64_t i = 0; i < g.num_nodes(); ++i)
        v.values(i, 0) = std::cos(2 * kPi * g.point(i, 0));
    Field dv = divergence(v);
    const double bound = std::pow(2 * kPi, 3) / (6.0 * 64 * 64);
    for (std::int64_t i = 0; i < g.num_nodes(); ++i) {
        const double exact = -2 * kPi * std::sin(2 * kPi * g.point(i, 0));
        CHECK(std::abs(dv.values[i] - exact) <= bound);
    }
}

TEST_CASE("divergence of the zero vector field is zero") {
    TorusGrid g(2, 8);
    CHECK(divergence(VectorField(g)).values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("summation by parts: <f, div v> = -<grad f, v> to machine precision") {
    for (int dim : {1, 2}) {
        TorusGrid g(dim, dim == 1 ? 32 : 8);
        std::mt19937 rng(7 + dim);
        std::normal_distribution<double> nd;
        Field f(g);
        VectorField v(g);
        for (std::int64_t i = 0; i < g.num_nodes(); ++i) {
            f.values[i] = nd(rng);
            for (int a = 0; a < dim; ++a) v.values(i, a) = nd(rng);
        }
        double lhs = f.values.dot(divergence(v).values);
        double rhs = 0;
        VectorField gf = gradient(f);
        for (int a = 0; a < dim; ++a) rhs += gf.values.col(a).dot(v.values.col(a));
        CHECK(std::abs(lhs + rhs) <= 1e-12 * (std::abs(lhs) + 1.0));
    }
}

TEST_CASE("laplacian: constant to zero, analytic oracle, zero mean") {
    TorusGrid g(1, 64);
    CHECK(laplacian(Field(g, Vec::Constant(64, 2.0))).values.cwiseAbs().maxCoeff() == 0.0);

    Field f = Field::from_fn(g, [](double x) { return std::sin(2 * kPi * x); });
    Field lf = laplacian(f);
    for (std::int64_t i = 0; i < g.num_nodes(); ++i) {
        const double exact = -4 * kPi * kPi * std::sin(2 * kPi * g.point(i, 0));
        // Truncation bound (2 pi)^4 / (12 n^2) for the 3-point stencil.
        CHECK(std::abs(lf.values[i] - exact) <= std::pow(2 * kPi, 4) / (12.0 * 64 * 64));
    }

    Field r(g, random_positive(64, 11));
    CHECK(std::abs(integrate(laplacian(r))) <= 1e-12 * r.values.cwiseAbs().maxCoeff());
}

TEST_CASE("probability measures enforce nonnegativity and unit mass") {
    TorusGrid g(1, 8);
    CHECK_THROWS(ProbMeasure(g, Vec::Constant(8, 0.9)));   // mass != 1
    CHECK_THROWS(ProbMeasure(g, -Vec::Ones(8)));           // negative
    ProbMeasure m = ProbMeasure::normalized(g, random_positive(8, 3));
    CHECK(m.total_mass() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("wasserstein1 basics: identity, antipodal spikes, dimension guard") {
    TorusGrid g(1, 64);
    ProbMeasure u = ProbMeasure::uniform(g);
    CHECK(wasserstein1(u, u) == 0.0);

    Vec a = Vec::Zero(64), b = Vec::Zero(64);
    a[0] = 64.0;   // unit spike at x = 0
    b[32] = 64.0;  // unit spike at x = 1/2
    const double d = wasserstein1(ProbMeasure(g, a), ProbMeasure(g, b));
    CHECK(std::abs(d - 0.5) <= 1.0 / 64);

    TorusGrid g2(2, 8);
    CHECK_THROWS(wasserstein1(ProbMeasure::uniform(g2), ProbMeasure::uniform(g2)));
}

TEST_CASE("wasserstein1 equals the brute-force transport LP on n=16") {
    TorusGrid g(1, 16);
    std::mt19937 rng(123);
    for (int trial = 0; trial < 5; ++trial) {
        ProbMeasure a = ProbMeasure::normalized(g, random_positive(16, rng()));
        ProbMeasure b = ProbMeasure::normalized(g, random_positive(16, rng()));
        const double fast = wasserstein1(a, b);
        const double h = g.spacing();
        const double lp = lp_oracle::circle_w1_lp(a.density * h, b.density * h);
        CHECK(std::abs(fast - lp) <= 1e-9);
    }
}

TEST_CASE("wasserstein1 is a metric on sampled triples") {
    TorusGrid g(1, 32);
    std::mt19937 rng(77);
    for (int trial = 0; trial < 10; ++trial) {
        ProbMeasure a = ProbMeasure::normalized(g, random_positive(32, rng()));
        ProbMeasure b = ProbMeasure::normalized(g, random_positive(32, rng()));
        ProbMeasure c = ProbMeasure::normalized(g, random_positive(32, rng()));
        CHECK(std::abs(wasserstein1(a, b) - wasserstein1(b, a)) <= 1e-9);
        CHECK(wasserstein1(a, c) <= wasserstein1(a, b) + wasserstein1(b, c) + 1e-9);
        CHECK(wasserstein1(a, a) <= 1e-9);
    }
}

TEST_CASE("serialization round-trips fields, vectors and measures") {
    TorusGrid g(1, 12);
    Field f = Field::from_fn(g, [](double x) { return std::cos(2 * kPi * x) + 0.25; });
    std::stringstream sf;
    write_field(sf, f);
    Field f2 = as_field(read_field(sf));
    CHECK((f2.values - f.values).cwiseAbs().maxCoeff() == 0.0);
    CHECK(f2.grid == g);

    TorusGrid g2(2, 4);
    VectorField v(g2);
    std::mt19937 rng(5);
    std::normal_distribution<double> nd;
    for (std::int64_t i = 0; i < g2.num_nodes(); ++i)
        for (int a = 0; a < 2; ++a) v.values(i, a) = nd(rng);
    std::stringstream sv;
    write_field(sv, v);
    VectorField v2 = as_vector_field(read_field(sv));
    CHECK((v2.values - v.values).cwiseAbs().maxCoeff() == 0.0);

    ProbMeasure m = ProbMeasure::normalized(g, random_positive(12, 9));
    std::stringstream sm;
    write_field(sm, m);
    ProbMeasure m2 = as_measure(read_field(sm));
    CHECK((m2.density - m.density).cwiseAbs().maxCoeff() == 0.0);

    std::stringstream bad("# torus-field v2 dim=1 n=4 kind=field\n");
    CHECK_THROWS(read_field(bad));
}

TEST_CASE("simplex oracle sanity: known tiny transport instance") {
    // Move mass 1 by one cell on a 4-point circle: cost = h = 1/4.
    Eigen::VectorXd a = Eigen::VectorXd::Zero(4), b = Eigen::VectorXd::Zero(4);
    a[0] = 1.0;
    b[1] = 1.0;
    CHECK(lp_oracle::circle_w1_lp(a, b) == doctest::Approx(0.25).epsilon(1e-12));
}
