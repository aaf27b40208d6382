// Experiment harness: config parsing, named experiments composing the other
// modules, run manifests, and manifest comparison for determinism checks.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "mfglab/semigroup.hpp"
#include "mfglab/n_particle.hpp"

namespace mfglab {

enum class ExperimentKind {
    lambda_slope,
    cell_problem,
    energy,
    corrector,
    monotonicity,
    mather,
    semigroup,
    calibrated,
    full_report,
};
ExperimentKind parse_experiment_kind(const std::string& name);
std::string experiment_kind_name(ExperimentKind kind);

// One named experiment: model, numeric budgets, and output location. Built
// from a key-value config file; see from_config for the schema.
struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::lambda_slope;
    ModelConfig model;
    std::string model_kind;  // "trivial" or "kernel"
    int grid_n = 32;
    int max_particles = 3;
    double dt = 0.05;
    double horizon = 8.0;
    std::vector<double> horizons = {2.0, 4.0, 6.0, 8.0};
    double burn_in = 2.0;
    double h1 = 0.5, h2 = 0.5;        // semigroup steps
    double window_a = -2.0, window_b = 2.0;
    double tol = 1e-9;
    unsigned seed = 0;
    std::string out_dir;
    std::string config_digest;  // hash of the config text and the seed

    // Parses `key = value` lines ('#' comments, blank lines allowed).
    // Keys: model.kind, model.c0, model.kernel_amplitude,
    // model.potential_amplitude, model.potential_file, model.theta,
    // model.growth_C, grid.n, particles.max_N, time.dt, time.T,
    // time.horizons (comma-separated), time.burn_in, semigroup.h1,
    // semigroup.h2, window.a, window.b, solver.tol.
    // Unknown or malformed keys raise an error naming the offender.
    static ExperimentSpec from_config(const std::string& path, ExperimentKind kind,
                                      const std::string& out_dir, unsigned seed);
};

// Ordered numeric results and named pass/fail checks of one run.
struct RunManifest {
    std::string kind;
    std::string config_digest;
    unsigned seed = 0;
    std::string started;
    std::string finished;
    std::vector<std::pair<std::string, double>> results;
    std::vector<std::pair<std::string, bool>> checks;

    bool all_pass() const;
    void add(const std::string& key, double value) { results.emplace_back(key, value); }
    void check_that(const std::string& key, bool ok) { checks.emplace_back(key, ok); }
};

// Executes the experiment, writes the tsv outputs and `manifest` into
// spec.out_dir, and returns the manifest.
RunManifest run(const ExperimentSpec& spec);

void save_manifest(const std::string& path, const RunManifest& manifest);
RunManifest load_manifest(const std::string& path);

// Numeric differences between two manifests (timestamps ignored); entries
// with |a - b| > tol. Throws on result-key schema mismatch.
struct DiffEntry {
    std::string key;
    double a = 0.0, b = 0.0;
};
std::vector<DiffEntry> compare(const RunManifest& a, const RunManifest& b, double tol);

}  // namespace mfglab
