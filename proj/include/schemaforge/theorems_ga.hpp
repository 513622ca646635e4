#pragma once

// Bitstring prediction formulas: the classic lower bound on expected schema
// instances, the exact transmission probability, operator-adjusted and
// effective fitness, deception reports, and the binomial / Chebyshev /
// conditional family around m(H, t+1).

#include "schemaforge/bitstring_ga.hpp"
#include "schemaforge/rational.hpp"
#include "schemaforge/schema_ga.hpp"

#include <optional>
#include <string>
#include <vector>

namespace schemaforge::ga {

/// p(H,t) = m(H,t) f(H,t) / (n fbar(t)) under proportional selection; the
/// probability one selection draw lands in H. 0 when H has no instances.
Rat selection_probability(const GaSchema& h, const Population& pop, const FitnessFunction& f);

/// Lower bound on E(m(H,t+1)):
///   (f(H,t)/fbar) m(H,t) (1 - p_c d(H)/(l-1)) (1-p_m)^o(H),
/// clamped at 0. Requires per-bit mutation mode and l >= 2.
Rat holland_bound(const GaSchema& h, const Population& pop, const FitnessFunction& f,
                  const GaConfig& cfg);

enum class Provenance { Formula, Oracle, MonteCarlo };

struct TransmissionEstimate {
    Rat alpha = 0;           // total transmission probability
    Rat expected_count = 0;  // n * alpha
    Rat variance = 0;        // n * alpha * (1 - alpha)
    Provenance provenance = Provenance::Formula;
    /// Value under the alternative normalization that sums l cut terms with
    /// weight p_c/l (the engine has l-1 distinct cuts; enumeration singles
    /// out the l-1 form, and reports print both when they differ).
    Rat alpha_alt_convention = 0;

    static TransmissionEstimate from_alpha(Rat alpha, unsigned n, Provenance source);
};

/// Exact transmission probability under proportional selection and p_m = 0:
///   alpha = (1-p_c) p(H,t) + p_c/(l-1) * sum_{cuts i} p(L(H,i),t) p(R(H,i),t),
/// cuts after index i for i in {0..l-2}. Throws when p_m != 0.
TransmissionEstimate exact_alpha(const GaSchema& h, const Population& pop,
                                 const FitnessFunction& f, const GaConfig& cfg);

struct AdjustedEffectiveFitness {
    Rat adjusted = 0;             // f_a = f(H,t)(1 - p_c d/(l-1) - p_m o(H))
    std::optional<Rat> effective; // f_e = (alpha/p) f(H,t); absent when p(H,t) = 0
    std::optional<Rat> effective_sum_form;  // same value via the defining-length cut sum
};

/// f_e uses the crossover-only transmission probability (the closed form
/// holds at p_m = 0); f_a carries both operator penalties.
AdjustedEffectiveFitness adjusted_and_effective_fitness(const GaSchema& h, const Population& pop,
                                                        const FitnessFunction& f,
                                                        const GaConfig& cfg);

enum class DeceptionScope { Strings, Schemata };

struct DeceptiveChannel {
    GaSchema schema;
    std::size_t cut = 0;
    Rat split_mass = 0;   // p(L(H,i),t) p(R(H,i),t)
    Rat direct_mass = 0;  // p(H,t)
};

struct DeceptionReport {
    DeceptionScope scope = DeceptionScope::Strings;
    std::string argmax_f;       // lexicographically first among ties
    std::string argmax_f_a;
    bool deceptive = false;     // argmax_f != argmax_f_a
    std::vector<DeceptiveChannel> channels;  // split mass strictly below direct mass
};

/// Evaluated over the uniform population holding every length-l string
/// once. Scope Strings ranks strings (as order-l schemata for f_a); scope
/// Schemata ranks all schemata of order <= max_order. Refuses oversized
/// scopes with CapError.
DeceptionReport deception_report(const FitnessFunction& f, const GaConfig& cfg, std::size_t l,
                                 DeceptionScope scope, unsigned max_order = 2);

struct CountDistribution {
    std::vector<Rat> pmf;        // Pr(m(H,t+1) = k), k = 0..n, exact
    Rat extinction = 0;          // (1 - alpha)^n
    double signal_to_noise = 0;  // sqrt(n) sqrt(alpha/(1-alpha)); inf at alpha = 1
    bool survival_likely = false;  // alpha > 4/n

    /// Pr(m >= x), exact partial sum.
    Rat tail(unsigned x) const;
};

/// m(H,t+1) is Binomial(n, alpha) under the i.i.d.-offspring model.
CountDistribution next_count_distribution(const Rat& alpha, unsigned n);

struct ChebyshevBounds {
    double lower = 0;            // n alpha - k sigma
    double upper = 0;            // n alpha + k sigma
    double one_sided_lower = 0;  // same center, stated as a one-sided guarantee
    double confidence = 0;       // 1 - 1/k^2
};

ChebyshevBounds chebychev_bounds(double alpha, unsigned n, double k);

/// Inverse of the binomial tail bound: the transmission probability that
/// makes m(H,t+1) > x hold with confidence 1 - 1/k^2,
///   alpha~(k,x,n) = [n(k^2+2x) + k sqrt(n^2 k^2 + 4 n x (n-x))] / [2n(k^2+n)].
/// Continuous and increasing in x; equals x/n at k = 0.
double alpha_tilde(double k, double x, double n);

/// (1 - 1/k^2) (prob_l + prob_r - 1), clamped to [0,1].
double recursive_conditional_bound(double prob_l, double prob_r, double k);

/// The threshold event of the recursive conditional theorem for fixed
/// constants: M_L M_R > alpha~(k, M_H, n) (l-1) n^2 fbar^2 / (f_L f_R).
bool mu_event_holds(double m_l, double m_r, double m_h, double k, unsigned n, unsigned l,
                    double f_l, double f_r, double fbar);

}  // namespace schemaforge::ga
