#pragma once

// Tree-side prediction formulas: the schema-theorem lower bound for
// one-point crossover, microscopic and macroscopic exact transmission,
// the creation-correction lower bound, schema effective fitness, the size
// evolution equation, and per-program effective fitness.

#include "schemaforge/gp_core.hpp"
#include "schemaforge/oracle.hpp"
#include "schemaforge/rational.hpp"
#include "schemaforge/schema_gp.hpp"

#include <optional>
#include <vector>

namespace schemaforge::gp {

/// p(H,t): proportional-selection mass of the members matching h.
Rat selection_probability_gp(const GpSchema& h, const GpPopulation& pop,
                             const GpFitnessFunction& f);
Rat selection_probability_gp(const GpHyperschema& h, const GpPopulation& pop,
                             const GpFitnessFunction& f);

/// Shapes present in the population with their selection mass and size.
struct ShapeIndexEntry {
    GpSchema shape;     // G_k
    Rat mass = 0;       // p(G_k, t)
    std::size_t size = 0;  // S(G_k)
};
std::vector<ShapeIndexEntry> shape_index(const GpPopulation& pop, const GpFitnessFunction& f);

/// Lower bound on E(m(H,t+1)) under one-point crossover, point mutation and
/// proportional selection:
///   n p(H,t) (1-p_m)^o(H) (1 - p_c [ p_d (1 - p(G(H),t))
///                                   + d(H)/(N(H)-1) (p(G(H),t) - p(H,t)) ]),
/// with the defining-length term read as zero for single-node schemata.
/// p_d is the conditional crossover disruption probability of H (see
/// oracle_disruption_probability).
Rat gp_schema_theorem_bound(const GpSchema& h, const GpPopulation& pop,
                            const GpFitnessFunction& f, const GpConfig& cfg,
                            const PrimitiveSet& ps, const Rat& p_d);

/// Convenience form that obtains p_d exactly from the enumeration oracle
/// (subject to its caps).
Rat gp_schema_theorem_bound_auto(const GpSchema& h, const GpPopulation& pop,
                                 const GpFitnessFunction& f, const GpConfig& cfg,
                                 const PrimitiveSet& ps);

/// Exact transmission probability as a sum over ordered parent pairs and
/// common-region links of building-block membership tests:
///   alpha = (1-p_c) p(H,t) + p_c sum_{h1,h2} p(h1)p(h2)/|links(h1,h2)|
///             sum_{i in links} [h1 in U(H,i)] [h2 in L(H,i)],
/// pairs without links contributing their clone mass. The lower-block form
/// defaults to the Path reading, the one that matches the enumeration
/// oracle exactly; the other readings are kept for comparison runs.
Rat microscopic_alpha_gp(const GpSchema& h, const GpPopulation& pop, const GpFitnessFunction& f,
                         const GpConfig& cfg, const PrimitiveSet& ps,
                         LowerBlockForm form = LowerBlockForm::Path);

/// Same value aggregated over shape pairs:
///   alpha = (1-p_c) p(H,t) + p_c sum_{j,k} 1/|links(G_j,G_k)|
///             sum_{i} p(U(H,i) ^ G_j, t) p(L(H,i) ^ G_k, t).
Rat macroscopic_alpha_gp(const GpSchema& h, const GpPopulation& pop, const GpFitnessFunction& f,
                         const GpConfig& cfg, const PrimitiveSet& ps,
                         LowerBlockForm form = LowerBlockForm::Path);

struct CreationCorrection {
    Rat lower_bound = 0;  // same-shape-pairs-only transmission bound
    Rat delta_alpha = 0;  // microscopic alpha minus the bound, >= 0
};

/// Restricts the pair sum to parents inside G(H); exact when the whole
/// population lies in G(H).
CreationCorrection creation_correction(const GpSchema& h, const GpPopulation& pop,
                                       const GpFitnessFunction& f, const GpConfig& cfg,
                                       const PrimitiveSet& ps);

/// f_e(H,t) = alpha(H,t)/p(H,t) f(H,t) with the macroscopic alpha; absent
/// when p(H,t) = 0.
std::optional<Rat> effective_fitness_gp(const GpSchema& h, const GpPopulation& pop,
                                        const GpFitnessFunction& f, const GpConfig& cfg,
                                        const PrimitiveSet& ps);

struct SizeEvolution {
    Rat by_programs = 0;  // sum_h S(h) p(h,t)
    Rat by_shapes = 0;    // sum_k S(G_k) p(G_k,t); identical by aggregation
};

/// Expected mean program size after one generation of a symmetric
/// subtree-swapping crossover with no mutation; the crossover probability
/// does not appear.
SizeEvolution size_evolution(const GpPopulation& pop, const GpFitnessFunction& f,
                             const GpConfig& cfg, const PrimitiveSet& ps);

struct ProgramEffectiveFitness {
    Rat fitness = 0;                  // f_j
    std::size_t total_nodes = 0;      // C_j^a
    std::size_t active_nodes = 0;     // C_j^e under the substitution test
    Rat disruption_decrease = 0;      // p_j^d, estimated over the sampled crossovers
    Rat effective = 0;                // f_j (1 - p_c (C_e/C_a) p_d)
    Rat proportion = 0;               // P_j^t
    Rat predicted_proportion = 0;     // P_j^t f_j^e / fbar(t)
};

/// A node counts as active when some same-arity single-symbol substitution
/// changes the program's fitness. p_j^d is estimated from `trials` sampled
/// crossovers whose point lies in the active part (0 when no such
/// crossover exists).
ProgramEffectiveFitness program_effective_fitness(const TreeProgram& j, const GpPopulation& pop,
                                                  const GpFitnessFunction& f, const GpConfig& cfg,
                                                  const PrimitiveSet& ps, unsigned trials);

}  // namespace schemaforge::gp
