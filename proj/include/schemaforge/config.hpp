#pragma once

// JSON experiment configuration. Field names are fixed; unknown fields are
// rejected with the offending JSON path so typos fail fast.

#include "schemaforge/bitstring_ga.hpp"
#include "schemaforge/errors.hpp"
#include "schemaforge/gp_core.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace schemaforge::harness {

struct ExperimentConfig {
    enum class Mode { Ga, Gp } mode = Mode::Ga;

    std::uint64_t seed = 0;
    unsigned generations = 1;
    unsigned trials = 1;
    unsigned threads = 0;  // 0 = hardware default
    bool oracle = true;
    std::string out_dir = "results";
    unsigned census_max_order = 2;

    // Bitstring side.
    ga::GaConfig ga_engine;
    ga::FitnessFunction ga_fitness = ga::FitnessFunction::flat();
    std::vector<std::string> ga_population;  // explicit strings; empty = random
    unsigned init_length = 8;
    std::vector<ga::GaSchema> ga_schemata;

    // Tree side.
    gp::GpConfig gp_engine;
    std::optional<gp::PrimitiveSet> primitives;
    gp::GpFitnessFunction gp_fitness = gp::GpFitnessFunction::flat();
    std::vector<std::string> gp_population;  // explicit tree texts; empty = random
    unsigned init_max_depth = 3;
    std::vector<std::string> gp_schemata;    // parsed against the primitive set

    std::vector<std::string> theorems;
};

/// Loads and validates a config file. Throws ConfigError with a
/// path-qualified message for syntax errors, unknown fields, or
/// out-of-range values.
ExperimentConfig load_config(const std::string& path);

}  // namespace schemaforge::harness
