/// Unit tests for the experiment harness: config parsing with named errors,
/// run manifests, determinism, and manifest comparison.
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "mfglab/harness.hpp"

using namespace mfglab;

namespace {

std::string write_config(const std::string& name, const std::string& text) {
    std::ofstream os(name);
    os << text;
    return name;
}

const char* kTrivialConfig =
    "# test config\n"
    "model.kind = trivial\n"
    "model.c0 = 0.7\n"
    "grid.n = 16\n"
    "particles.max_N = 2\n"
    "time.dt = 0.05\n"
    "time.T = 2.0\n"
    "time.horizons = 1.0, 2.0, 3.0\n"
    "time.burn_in = 0.5\n"
    "window.a = -0.5\n"
    "window.b = 0.5\n"
    "solver.tol = 1e-9\n";

}  // namespace

TEST_CASE("experiment kinds round-trip; unknown kind rejected") {
    for (const char* name : {"lambda-slope", "cell-problem", "energy", "corrector",
                             "monotonicity", "mather", "semigroup", "calibrated",
                             "full-report"})
        CHECK(experiment_kind_name(parse_experiment_kind(name)) == name);
    CHECK_THROWS(parse_experiment_kind("spectral-gap"));
}

TEST_CASE("config parsing: schema, defaults, and named errors") {
    const std::string path = write_config("cfg_ok.cfg", kTrivialConfig);
    ExperimentSpec spec =
        ExperimentSpec::from_config(path, ExperimentKind::lambda_slope, "out_h", 7);
    CHECK(spec.model_kind == "trivial");
    CHECK(spec.grid_n == 16);
    CHECK(spec.max_particles == 2);
    CHECK(spec.horizons.size() == 3);
    CHECK(spec.horizon == doctest::Approx(2.0));
    CHECK(spec.seed == 7);
    CHECK(!spec.config_digest.empty());
    // The digest covers the seed.
    ExperimentSpec other =
        ExperimentSpec::from_config(path, ExperimentKind::lambda_slope, "out_h", 8);
    CHECK(other.config_digest != spec.config_digest);
    std::remove(path.c_str());

    auto expect_error = [](const std::string& text, const std::string& needle) {
        const std::string p = write_config("cfg_bad.cfg", text);
        try {
            ExperimentSpec::from_config(p, ExperimentKind::energy, "out_h", 0);
            FAIL("expected a config error for: " << text);
        } catch (const std::runtime_error& e) {
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
        std::remove(p.c_str());
    };
    expect_error("model.kind = trivial\ngrid.m = 16\n", "grid.m");       // unknown key
    expect_error("model.kind = trivial\ngrid.n 16\n", "malformed");      // no '='
    expect_error("grid.n = 16\n", "model.kind");                          // missing
    expect_error("model.kind = trivial\ntime.dt = fast\n", "time.dt");   // not a number
    expect_error("model.kind = trivial\ngrid.n = 16\ngrid.n = 32\n", "duplicate");
    expect_error("model.kind = sparse\n", "model.kind");                  // bad enum
    CHECK_THROWS(ExperimentSpec::from_config("missing_file.cfg",
                                             ExperimentKind::energy, "out_h", 0));
}

TEST_CASE("lambda-slope run on the trivial model: exact, deterministic") {
    const std::string path = write_config("cfg_run.cfg", kTrivialConfig);
    ExperimentSpec spec =
        ExperimentSpec::from_config(path, ExperimentKind::lambda_slope, "out_run_a", 7);
    RunManifest a = run(spec);
    CHECK(a.all_pass());
    CHECK(a.kind == "lambda-slope");
    REQUIRE(!a.results.empty());
    CHECK(a.results[0].first == "lambda_hat");
    CHECK(a.results[0].second == doctest::Approx(-0.7).epsilon(1e-9));
    std::ifstream tsv("out_run_a/lambda.tsv");
    CHECK(tsv.good());

    // Same spec and seed: bit-identical numeric results.
    spec.out_dir = "out_run_b";
    RunManifest b = run(spec);
    CHECK(compare(a, b, 0.0).empty());
    // Round trip through the manifest file keeps the comparison empty.
    RunManifest a2 = load_manifest("out_run_a/manifest");
    RunManifest b2 = load_manifest("out_run_b/manifest");
    CHECK(a2.config_digest == a.config_digest);
    CHECK(compare(a2, b2, 0.0).empty());
    CHECK(a2.all_pass());
    std::remove(path.c_str());
}

TEST_CASE("cell-problem run exposes lambda^N; compare flags real differences") {
    const std::string path = write_config("cfg_cell.cfg", kTrivialConfig);
    ExperimentSpec spec =
        ExperimentSpec::from_config(path, ExperimentKind::cell_problem, "out_cell", 7);
    RunManifest m = run(spec);
    CHECK(m.all_pass());
    bool found = false;
    for (const auto& [k, v] : m.results)
        if (k == "lambda_N2") {
            found = true;
            CHECK(v == doctest::Approx(-0.7).epsilon(1e-9));
        }
    CHECK(found);
    std::ifstream tsv("out_cell/cell.tsv");
    CHECK(tsv.good());

    // A perturbed manifest diffs on exactly the changed key.
    RunManifest changed = m;
    changed.results[0].second += 1e-3;
    auto diffs = compare(m, changed, 1e-6);
    REQUIRE(diffs.size() == 1);
    CHECK(diffs[0].key == m.results[0].first);

    // Schema mismatches are rejected.
    RunManifest other;
    other.kind = m.kind;
    CHECK_THROWS(compare(m, other, 0.0));
    other = m;
    other.kind = "energy";
    CHECK_THROWS(compare(m, other, 0.0));
    std::remove(path.c_str());
}

TEST_CASE("manifest persistence round trip") {
    RunManifest m;
    m.kind = "mather";
    m.config_digest = "deadbeef01234567";
    m.seed = 9;
    m.started = "2026-01-01T00:00:00Z";
    m.finished = "2026-01-01T00:00:01Z";
    m.add("closedness_T", 1.25e-4);
    m.add("objective", -2.5e-4);
    m.check_that("closedness_halves", true);
    m.check_that("objective_matches_lambda", false);
    save_manifest("manifest_tmp", m);
    RunManifest r = load_manifest("manifest_tmp");
    CHECK(r.kind == m.kind);
    CHECK(r.seed == 9);
    CHECK(r.results.size() == 2);
    CHECK(r.results[1].second == m.results[1].second);
    CHECK(r.checks.size() == 2);
    CHECK(r.checks[0].second);
    CHECK(!r.checks[1].second);
    CHECK(!r.all_pass());
    CHECK(compare(m, r, 0.0).empty());
    std::remove("manifest_tmp");
}
