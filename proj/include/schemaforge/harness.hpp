#pragma once

// Experiment runner wiring engines, formulas, the enumeration oracle and
// Monte Carlo estimation together, with CSV/SVG artifacts and verdicts.

#include "schemaforge/config.hpp"

#include <string>
#include <vector>

namespace schemaforge::harness {

struct ArtifactSet {
    std::vector<std::string> files;
    std::string summary;
    unsigned rows = 0;
    unsigned violations = 0;  // mismatch / bound-violated / outside-4se verdicts
};

/// Runs the configured generations, tracking every configured schema:
/// census + trajectory CSVs, a default trajectory plot, and a summary.
/// Identical config+seed yields byte-identical artifacts.
ArtifactSet run_experiment(const ExperimentConfig& cfg);

/// Writes the exact one-offspring distribution of the initial population
/// and the oracle/formula transmission probabilities per tracked schema.
ArtifactSet run_oracle_dump(const ExperimentConfig& cfg);

/// Census of the initial population (bitstring mode only).
ArtifactSet run_census(const ExperimentConfig& cfg);

struct PredictionRow {
    std::string theorem;
    std::string instance;
    std::string schema;
    std::string predicted;
    std::string oracle;
    std::string mc_mean;
    std::string mc_se;
    std::string tolerance;
    std::string verdict;  // equality | bound-holds | bound-violated | coverage | mismatch
};

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
    std::vector<PredictionRow> rows;
    double elapsed_seconds = 0;
};

/// Named verification suites; every tolerance is pinned in code.
CheckResult check_exact_alpha(std::uint64_t seed, unsigned instances = 200);
CheckResult check_holland_bound(std::uint64_t seed, unsigned instances = 200);
CheckResult check_binomial_law(std::uint64_t seed);
CheckResult check_extinction(std::uint64_t seed);
CheckResult check_chebychev_coverage(std::uint64_t seed);
CheckResult check_alpha_tilde();
CheckResult check_gp_exact(std::uint64_t seed, unsigned instances = 100);
CheckResult check_mask_lemma(std::uint64_t seed);
CheckResult check_size_evolution(std::uint64_t seed, unsigned instances = 60);
CheckResult check_implicit_parallelism();
CheckResult check_conditional_recursive(std::uint64_t seed);
CheckResult check_disruption_trend(std::uint64_t seed, unsigned runs = 31);

/// All suites by name; throws ConfigError for an unknown name.
CheckResult run_named_check(const std::string& name, std::uint64_t seed);

const std::vector<std::string>& known_check_names();

/// Runs cfg.theorems (must be nonempty), writes report.csv and a summary
/// under cfg.out_dir, and returns one result per suite.
std::vector<CheckResult> verify_theorems(const ExperimentConfig& cfg, ArtifactSet& artifacts);

}  // namespace schemaforge::harness
