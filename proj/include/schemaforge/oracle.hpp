#pragma once

// Brute-force ground truth. Enumerates the exact one-offspring distribution
// of the generational engines over tiny instances, in exact rational
// arithmetic; every transmission-probability and size formula is checked
// against these enumerations. Floats never enter this module.

#include "schemaforge/bitstring_ga.hpp"
#include "schemaforge/errors.hpp"
#include "schemaforge/gp_core.hpp"
#include "schemaforge/rational.hpp"
#include "schemaforge/schema_ga.hpp"
#include "schemaforge/schema_gp.hpp"

#include <vector>

namespace schemaforge::oracle {

struct OracleCaps {
    unsigned max_n_ga = 6;      // population size for bitstring enumeration
    unsigned max_len_ga = 5;    // string length
    unsigned max_trees = 4;     // population size for tree enumeration
    unsigned max_nodes = 7;     // nodes per tree
};

/// Exact law of one offspring: sorted unique support, probabilities sum to 1.
template <typename Genotype>
struct OffspringDistribution {
    std::vector<std::pair<Genotype, Rat>> support;

    Rat total() const {
        Rat t = 0;
        for (const auto& [g, p] : support) t += p;
        return t;
    }
};

using GaOffspringDistribution = OffspringDistribution<ga::BitString>;
using GpOffspringDistribution = OffspringDistribution<gp::TreeProgram>;

/// Enumerates every (parent choice / parent pair, cut, mutation pattern)
/// route of the bitstring engine under proportional selection. Throws
/// CapError beyond caps and std::invalid_argument for tournament selection.
GaOffspringDistribution enumerate_offspring_ga(const ga::Population& pop,
                                               const ga::FitnessFunction& f,
                                               const ga::GaConfig& cfg,
                                               const OracleCaps& caps = {});

/// Same law enumerated in a different route order (cut-major, mutation
/// expanded inline); must agree with enumerate_offspring_ga term for term.
GaOffspringDistribution enumerate_offspring_ga_alt(const ga::Population& pop,
                                                   const ga::FitnessFunction& f,
                                                   const ga::GaConfig& cfg,
                                                   const OracleCaps& caps = {});

/// Exact transmission probability: mass of offspring matching h.
Rat oracle_alpha(const ga::GaSchema& h, const ga::Population& pop, const ga::FitnessFunction& f,
                 const ga::GaConfig& cfg, const OracleCaps& caps = {});

/// Law of m(H,t+1) composed from the single-offspring law: n-fold
/// convolution of Bernoulli(alpha). Index k holds Pr(m = k).
std::vector<Rat> compose_count_law(const Rat& alpha, unsigned n);

/// One-point tree crossover enumeration (clone fallback when a pair has no
/// common-region links). Requires p_m = 0 and proportional selection.
GpOffspringDistribution enumerate_offspring_gp(const gp::GpPopulation& pop,
                                               const gp::GpFitnessFunction& f,
                                               const gp::GpConfig& cfg,
                                               const gp::PrimitiveSet& ps,
                                               const OracleCaps& caps = {});

Rat oracle_alpha_gp(const gp::GpSchema& h, const gp::GpPopulation& pop,
                    const gp::GpFitnessFunction& f, const gp::GpConfig& cfg,
                    const gp::PrimitiveSet& ps, const OracleCaps& caps = {});

/// E(mu(t+1)): expected node count of one offspring.
Rat oracle_expected_mean_size(const gp::GpPopulation& pop, const gp::GpFitnessFunction& f,
                              const gp::GpConfig& cfg, const gp::PrimitiveSet& ps,
                              const OracleCaps& caps = {});

/// p_d(t): probability that one-point crossover with first parent matching
/// h yields an offspring not matching h, conditioned on crossover occurring.
/// 0 by convention when h has no selection mass.
Rat oracle_disruption_probability(const gp::GpSchema& h, const gp::GpPopulation& pop,
                                  const gp::GpFitnessFunction& f, const gp::GpConfig& cfg,
                                  const gp::PrimitiveSet& ps, const OracleCaps& caps = {});

}  // namespace schemaforge::oracle
