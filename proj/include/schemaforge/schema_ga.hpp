#pragma once

// Fixed-length schemata over {0,1,*}: metrics, matching, truncations,
// population census, and the implicit-parallelism count.

#include "schemaforge/bitstring_ga.hpp"
#include "schemaforge/rational.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace schemaforge::ga {

constexpr char kWildcard = '*';

/// Pattern of length l over {0,1,*}. The all-* schema matches everything.
class GaSchema {
public:
    GaSchema() = default;
    explicit GaSchema(std::string pattern);
    static GaSchema all_wildcards(std::size_t length);
    /// Order-l schema fixing every position of s.
    static GaSchema from_string(const BitString& s);

    std::size_t length() const { return pattern_.size(); }
    char symbol(std::size_t i) const { return pattern_[i]; }
    bool fixed(std::size_t i) const { return pattern_[i] != kWildcard; }
    const std::string& pattern() const { return pattern_; }

    auto operator<=>(const GaSchema&) const = default;

private:
    std::string pattern_;
};

struct SchemaMetrics {
    unsigned order = 0;            // fixed positions
    unsigned defining_length = 0;  // last fixed index - first fixed index; 0 when order <= 1
    Rat fragility = 0;             // d(H)/(l-1), the share of cuts inside the defining length
};

/// Throws std::domain_error for l = 1, where fragility is undefined.
SchemaMetrics schema_metrics(const GaSchema& h);

/// True iff s agrees with h at every fixed position. Lengths must match.
bool matches(const GaSchema& h, const BitString& s);

struct SchemaCount {
    unsigned count = 0;    // m(H,t), multiset-counted
    Rat mean_fitness = 0;  // f(H,t); 0 by convention when count == 0
};

SchemaCount count_and_fitness(const GaSchema& h, const Population& pop, const FitnessFunction& f);

/// Population mean fitness over all members.
Rat population_mean_fitness(const Population& pop, const FitnessFunction& f);

enum class TruncateSide { Left, Right };

/// Left keeps the fixed positions in 0..i; right keeps i+1..l-1; the rest
/// become *. For every s, matches(h,s) iff matches(left) and matches(right).
GaSchema truncate(const GaSchema& h, std::size_t i, TruncateSide side);

struct CensusEntry {
    GaSchema schema;
    unsigned count = 0;
    Rat mean_fitness = 0;
};

/// Every schema of order <= max_order with at least one instance, with
/// counts and mean fitness. Refuses (std::length_error) when the worst-case
/// table size sum_{o<=max_order} C(l,o)*2^o exceeds 2^22 entries.
std::vector<CensusEntry> schema_census(const Population& pop, const FitnessFunction& f,
                                       unsigned max_order);

struct ImplicitParallelism {
    unsigned theta = 0;   // floor(log2(n/phi))
    BigInt schema_count;  // 2^theta * C(l, theta)
    bool holds = false;   // schema_count >= n^3
    bool in_guarantee_regime = false;  // 64 <= n <= 2^20 and l >= 64
};

/// Counts the order-theta schemata a population of size n can process per
/// generation, phi being the instances required to call a schema sampled.
ImplicitParallelism implicit_parallelism(std::uint64_t n, std::uint64_t l, std::uint64_t phi);

}  // namespace schemaforge::ga
