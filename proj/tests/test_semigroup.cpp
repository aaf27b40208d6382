/// Unit tests for the Lax-Oleinik operator: algebraic laws (additive shift,
/// non-expansiveness, order preservation, composition), the corrector fixed
/// point, and calibrated-curve extraction.
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "mfglab/semigroup.hpp"

using namespace mfglab;

namespace {
const double kPi = 3.14159265358979323846;

ProbMeasure bump(const TorusGrid& g, double center, double kappa) {
    Vec d(g.num_nodes());
    for (std::int64_t i = 0; i < g.num_nodes(); ++i)
        d[i] = std::exp(kappa * std::cos(2 * kPi * (g.point(i, 0) - center)));
    return ProbMeasure::normalized(g, d);
}
}  // namespace

TEST_CASE("functional kinds: values, table exactness, shift") {
    TorusGrid g(1, 16);
    auto probes = probe_panel(g, 3);
    MeasureFunctional c = MeasureFunctional::constant(0.4);
    CHECK(c.value(probes[0]) == 0.4);
    CHECK(c.shifted(0.1).value(probes[0]) == doctest::Approx(0.5).epsilon(1e-15));

    auto dict = cylindrical_dictionary(g);
    MeasureFunctional f = MeasureFunctional::cylindrical(dict[1]);
    CHECK(f.value(probes[1]) == doctest::Approx(dict[1].value(probes[1])));

    Vec vals = Vec::LinSpaced(8, 0.0, 7.0);
    MeasureFunctional t = MeasureFunctional::table(probes, vals);
    for (int i = 0; i < 8; ++i) {
        double d = -1.0;
        CHECK(t.value(probes[i], &d) == doctest::Approx(double(i)).epsilon(1e-14));
        CHECK(d == 0.0);  // exact on its own probes
    }
    CHECK_THROWS(MeasureFunctional::table({}, Vec()));
    CHECK_THROWS(MeasureFunctional::table(probes, Vec::Zero(3)));
}

TEST_CASE("trivial model: tau_h of zero vanishes and shifts are exact") {
    TorusGrid g(1, 16);
    ModelConfig cfg = make_trivial_model(16, 0.7);
    ProbMeasure m0 = bump(g, 0.3, 1.0);
    const double lam = -0.7;
    // tau_h 0 = inf cost + lambda h = c0 h - c0 h = 0.
    const double t0 = lax_oleinik(cfg, MeasureFunctional::constant(0.0), 0.5, m0, lam, 0.05);
    CHECK(std::abs(t0) <= 1e-9);
    // tau_h (Phi + c) = tau_h Phi + c, with exact terminal gradients.
    auto dict = cylindrical_dictionary(g);
    MeasureFunctional phi = MeasureFunctional::cylindrical(dict[1]);
    const double a = lax_oleinik(cfg, phi, 0.5, m0, lam, 0.05);
    const double b = lax_oleinik(cfg, phi.shifted(0.3), 0.5, m0, lam, 0.05);
    CHECK(b - a == doctest::Approx(0.3).epsilon(1e-7));
    CHECK_THROWS(lax_oleinik(cfg, phi, 0.01, m0, lam, 0.05));  // h < dt
}

TEST_CASE("non-expansiveness and order preservation") {
    TorusGrid g(1, 32);
    ModelConfig cfg = make_kernel_model(32);
    auto probes = probe_panel(g, 42);
    auto dict = cylindrical_dictionary(g);
    MeasureFunctional phi = MeasureFunctional::cylindrical(dict[1]);
    const double lam = 2.5e-4;

    // Psi = Phi + 0.3: distance exactly 0.3, order applicable, no violation.
    NonexpansiveReport sh =
        check_nonexpansive(cfg, phi, phi.shifted(0.3), 0.5, probes, lam, 0.05);
    CHECK(sh.lhs == doctest::Approx(0.3).epsilon(1e-7));
    CHECK(sh.rhs == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(sh.order_applicable);
    CHECK(sh.order_violation <= 1e-7);

    // Psi = Phi: both sides vanish.
    NonexpansiveReport eq = check_nonexpansive(cfg, phi, phi, 0.5, probes, lam, 0.05);
    CHECK(eq.lhs <= 1e-12);
    CHECK(eq.rhs <= 1e-12);

    // Unrelated cylindrical pair: the law holds with margin.
    NonexpansiveReport rnd = check_nonexpansive(
        cfg, phi, MeasureFunctional::cylindrical(dict[7]), 0.5, probes, lam, 0.05);
    CHECK(rnd.lhs <= rnd.rhs + 1e-3);
}

TEST_CASE("semigroup composition law") {
    TorusGrid g(1, 16);
    auto probes = probe_panel(g, 7);
    // Trivial model, Phi = 0: every tau value is 0.
    ModelConfig triv = make_trivial_model(16, 0.7);
    SemigroupGap z = check_semigroup(triv, MeasureFunctional::constant(0.0), 0.5, 0.5,
                                     probes, -0.7, 0.05);
    CHECK(z.gap <= 1e-6);

    // Kernel model, cylindrical Phi: gap well under 5% of the value scale.
    TorusGrid g32(1, 32);
    ModelConfig cfg = make_kernel_model(32);
    auto probes32 = probe_panel(g32, 42);
    auto dict = cylindrical_dictionary(g32);
    SemigroupGap sg = check_semigroup(cfg, MeasureFunctional::cylindrical(dict[1]), 0.5,
                                      0.5, probes32, 2.5e-4, 0.05);
    CHECK(sg.value_scale > 0);
    CHECK(sg.gap <= 0.05 * sg.value_scale);
    CHECK(sg.interpolation_error >= 0.0);  // reported alongside the gap
}

TEST_CASE("corrector fixed point: tau_h chi is chi within 2% of its range") {
    TorusGrid g(1, 32);
    ModelConfig cfg = make_kernel_model(32);
    ProbMeasure m0 = bump(g, 0.5, 1.5);
    LambdaEstimate est = estimate_lambda_slope(cfg, m0, {2.0, 4.0, 6.0, 8.0}, 0.05);
    auto probes = probe_panel(g, 42);
    CorrectorTable chi = corrector_table(cfg, probes, probe_panel_ids(), 8.0, est.value, 0.05);
    MeasureFunctional chi_fn = MeasureFunctional::table(chi.probes, chi.chi_hat);
    const double range = chi.chi_hat.maxCoeff() - chi.chi_hat.minCoeff();
    REQUIRE(range > 0);
    double worst = 0.0;
    for (std::size_t i = 0; i < probes.size(); ++i) {
        const double t = lax_oleinik(cfg, chi_fn, 0.5, probes[i], est.value, 0.05);
        worst = std::max(worst, std::abs(t - chi.chi_hat[static_cast<Eigen::Index>(i)]));
    }
    CHECK(worst <= 0.02 * range);
}

TEST_CASE("calibrated extraction: trivial defects vanish, windows validated") {
    TorusGrid g(1, 16);
    ModelConfig cfg = make_trivial_model(16, 0.7);
    ProbMeasure m0 = bump(g, 0.3, 1.0);
    auto probes = probe_panel(g, 7);
    CorrectorTable chi = corrector_table(cfg, probes, probe_panel_ids(), 2.0, -0.7, 0.05);
    CalibrationReport rep = extract_calibrated(cfg, m0, 2.0, -1.0, 1.0, -0.7, chi, 0.05);
    CHECK(rep.defects.size() == 2);
    CHECK(rep.max_defect <= 1e-8);
    CHECK(rep.window.times[0] == doctest::Approx(-1.0));
    CHECK(rep.window.times[rep.window.times.size() - 1] == doctest::Approx(1.0));

    // Single-point window: no subintervals.
    CalibrationReport pt = extract_calibrated(cfg, m0, 2.0, 0.0, 0.0, -0.7, chi, 0.05);
    CHECK(pt.defects.size() == 0);
    CHECK(pt.max_defect == 0.0);

    CHECK_THROWS(extract_calibrated(cfg, m0, 2.0, -2.5, 1.0, -0.7, chi, 0.05));
    CHECK_THROWS(extract_calibrated(cfg, m0, 2.0, -1.0, 2.0, -0.7, chi, 0.05));
    CHECK_THROWS(extract_calibrated(cfg, m0, 2.0, 1.0, -1.0, -0.7, chi, 0.05));
    CHECK_THROWS(extract_calibrated(cfg, m0, 2.0, -1.0, 1.0, -0.65, chi, 0.05));

    save_calibration_report("calib_tmp.tsv", rep);
    std::ifstream is("calib_tmp.tsv");
    int lines = 0;
    for (std::string line; std::getline(is, line);) ++lines;
    CHECK(lines == 3);
    std::remove("calib_tmp.tsv");
}

TEST_CASE("calibrated extraction on the kernel model reports tiny defects") {
    TorusGrid g(1, 32);
    ModelConfig cfg = make_kernel_model(32);
    ProbMeasure m0 = bump(g, 0.5, 1.5);
    const double lam = 2.5488e-4;  // slope estimate at this resolution
    auto probes = probe_panel(g, 42);
    CorrectorTable chi = corrector_table(cfg, probes, probe_panel_ids(), 8.0, lam, 0.05);
    CalibrationReport rep = extract_calibrated(cfg, m0, 8.0, -4.0, 4.0, lam, chi, 0.05);
    CHECK(rep.defects.size() == 8);
    CHECK(rep.max_defect <= 1e-8);  // the plateau is calibrated to solver noise
    CHECK(rep.max_probe_distance > 0.0);  // lookup distance honestly reported
}
