#pragma once

// Generational genetic algorithm over fixed-length bitstrings:
// fitness-proportional and tournament selection, one-point crossover,
// per-bit and single-bit mutation. Everything is a pure function of
// (population, config, seed); the per-offspring substream derivation
// lives in rng.hpp.

#include "schemaforge/rational.hpp"
#include "schemaforge/rng.hpp"
#include "schemaforge/selection.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace schemaforge::ga {

/// Fixed-length binary individual. Alleles are 0/1; length never changes
/// after construction.
class BitString {
public:
    BitString() = default;
    explicit BitString(std::vector<std::uint8_t> bits);
    /// From text such as "0110".
    static BitString from_string(const std::string& text);

    std::size_t length() const { return bits_.size(); }
    std::uint8_t bit(std::size_t i) const { return bits_[i]; }
    void set_bit(std::size_t i, std::uint8_t v);
    std::size_t count_ones() const;
    std::string to_string() const;

    auto operator<=>(const BitString&) const = default;

private:
    std::vector<std::uint8_t> bits_;
};

/// Built-in fitness catalog. All entries are pure and strictly positive,
/// which proportional selection requires.
///
///   one-max          ones(s) + 1
///   flat             1
///   binary-trap(k)   sum over k-bit blocks of (k+1 if block all zero, else ones(block));
///                    peak at all-zeros, gradient pointing at all-ones
///   royal-road(b)    1 + b * (number of complete all-ones blocks of width b)
///   user-table       explicit string -> positive rational map
class FitnessFunction {
public:
    static FitnessFunction one_max();
    static FitnessFunction flat();
    static FitnessFunction binary_trap(unsigned k);
    static FitnessFunction royal_road(unsigned block);
    static FitnessFunction user_table(std::map<std::string, Rat> table);

    const std::string& name() const { return name_; }
    const std::map<std::string, Rat>& params() const { return params_; }
    const std::map<std::string, Rat>& table() const { return table_; }

    /// Evaluates f(s); throws std::domain_error if the result would not be
    /// strictly positive, or if a user table has no entry for s.
    Rat operator()(const BitString& s) const;

private:
    std::string name_;
    std::map<std::string, Rat> params_;
    std::map<std::string, Rat> table_;
};

Rat evaluate_fitness(const BitString& s, const FitnessFunction& f);

enum class MutationMode { PerBit, SingleBit };

using schemaforge::SelectionSpec;
using schemaforge::TournamentSpec;

struct GaConfig {
    unsigned n = 2;                 // population size, >= 2
    Rat p_c = 0;                    // crossover probability
    Rat p_m = 0;                    // mutation probability (per allele, or per individual in single-bit mode)
    MutationMode mutation_mode = MutationMode::PerBit;
    SelectionSpec selection;
    std::uint64_t seed = 0;

    void validate() const;          // throws std::invalid_argument on out-of-range fields
};

struct Population {
    std::vector<BitString> members;
    unsigned generation = 0;

    std::size_t size() const { return members.size(); }
    std::size_t string_length() const { return members.empty() ? 0 : members.front().length(); }
};

/// One selection draw. Proportional mode lands on A with probability
/// f(A)/sum f; tournament mode samples cfg contenders with replacement and
/// resolves pairings toward the fitter with probability q (ties go to the
/// earlier-drawn contender, odd contender gets a bye).
BitString select_parent(const Population& pop, const FitnessFunction& f, const GaConfig& cfg,
                        RandomStream& rng);

/// Splits after index `cut` (cut in {0, ..., l-2}) and swaps tails:
/// returns (A[0..cut] B[cut+1..], B[0..cut] A[cut+1..]).
std::pair<BitString, BitString> one_point_crossover(const BitString& a, const BitString& b,
                                                    std::size_t cut);

BitString mutate(const BitString& s, const GaConfig& cfg, RandomStream& rng);

/// Produces n offspring, each independently: with probability 1-p_c clone
/// one selected parent, otherwise select two parents, cross at a uniform
/// cut and keep the first child; then mutate. Offspring j draws from
/// substream (cfg.seed, pop.generation, j), so the result is a pure
/// function of (pop, f, cfg).
Population next_generation(const Population& pop, const FitnessFunction& f, const GaConfig& cfg);

/// Proportional-selection mass of each population member (exact).
/// Throws std::domain_error when total fitness is zero.
std::vector<Rat> selection_masses(const Population& pop, const FitnessFunction& f);

}  // namespace schemaforge::ga
