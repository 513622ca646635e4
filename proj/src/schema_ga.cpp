#include "schemaforge/schema_ga.hpp"

#include <stdexcept>

namespace schemaforge::ga {

GaSchema::GaSchema(std::string pattern) : pattern_(std::move(pattern)) {
    if (pattern_.empty()) throw std::invalid_argument("GaSchema: length must be >= 1");
    for (char c : pattern_)
        if (c != '0' && c != '1' && c != kWildcard)
            throw std::invalid_argument("GaSchema: bad character in '" + pattern_ + "'");
}

GaSchema GaSchema::all_wildcards(std::size_t length) {
    return GaSchema(std::string(length, kWildcard));
}

GaSchema GaSchema::from_string(const BitString& s) { return GaSchema(s.to_string()); }

SchemaMetrics schema_metrics(const GaSchema& h) {
    if (h.length() < 2) throw std::domain_error("schema_metrics: fragility undefined for l = 1");
    SchemaMetrics m;
    std::size_t first = h.length();
    std::size_t last = 0;
    for (std::size_t i = 0; i < h.length(); ++i) {
        if (!h.fixed(i)) continue;
        ++m.order;
        if (first == h.length()) first = i;
        last = i;
    }
    m.defining_length = (m.order <= 1) ? 0 : static_cast<unsigned>(last - first);
    m.fragility = Rat(m.defining_length, h.length() - 1);
    return m;
}

bool matches(const GaSchema& h, const BitString& s) {
    if (h.length() != s.length()) throw std::invalid_argument("matches: length mismatch");
    for (std::size_t i = 0; i < h.length(); ++i)
        if (h.fixed(i) && h.symbol(i) != static_cast<char>('0' + s.bit(i))) return false;
    return true;
}

SchemaCount count_and_fitness(const GaSchema& h, const Population& pop, const FitnessFunction& f) {
    SchemaCount out;
    Rat total = 0;
    for (const auto& member : pop.members) {
        if (!matches(h, member)) continue;
        ++out.count;
        total += f(member);
    }
    out.mean_fitness = (out.count == 0) ? Rat(0) : total / out.count;
    return out;
}

Rat population_mean_fitness(const Population& pop, const FitnessFunction& f) {
    if (pop.members.empty()) throw std::invalid_argument("mean fitness of empty population");
    Rat total = 0;
    for (const auto& member : pop.members) total += f(member);
    return total / pop.members.size();
}

GaSchema truncate(const GaSchema& h, std::size_t i, TruncateSide side) {
    if (i >= h.length()) throw std::invalid_argument("truncate: index out of range");
    std::string pattern = h.pattern();
    if (side == TruncateSide::Left) {
        for (std::size_t j = i + 1; j < pattern.size(); ++j) pattern[j] = kWildcard;
    } else {
        for (std::size_t j = 0; j <= i; ++j) pattern[j] = kWildcard;
    }
    return GaSchema(std::move(pattern));
}

std::vector<CensusEntry> schema_census(const Population& pop, const FitnessFunction& f,
                                       unsigned max_order) {
    const std::size_t l = pop.string_length();
    if (l == 0) throw std::invalid_argument("schema_census: empty population");
    const unsigned top = std::min<unsigned>(max_order, static_cast<unsigned>(l));

    BigInt worst_case = 0;
    for (unsigned o = 0; o <= top; ++o)
        worst_case += binomial_coefficient(static_cast<unsigned>(l), o) * (BigInt(1) << o);
    if (worst_case > (BigInt(1) << 22))
        throw std::length_error("schema_census: table could exceed 2^22 entries; lower max_order");

    // For each member, walk every fixed-position subset of size <= max_order.
    std::map<GaSchema, std::pair<unsigned, Rat>> table;
    for (const auto& member : pop.members) {
        const Rat fit = f(member);
        std::vector<std::size_t> chosen;
        auto visit = [&](auto&& self, std::size_t start, unsigned depth) -> void {
            std::string pattern(l, kWildcard);
            for (auto idx : chosen) pattern[idx] = static_cast<char>('0' + member.bit(idx));
            auto& slot = table[GaSchema(std::move(pattern))];
            slot.first += 1;
            slot.second += fit;
            if (depth == top) return;
            for (std::size_t i = start; i < l; ++i) {
                chosen.push_back(i);
                self(self, i + 1, depth + 1);
                chosen.pop_back();
            }
        };
        visit(visit, 0, 0);
    }

    std::vector<CensusEntry> out;
    out.reserve(table.size());
    for (const auto& [schema, slot] : table)
        out.push_back({schema, slot.first, slot.second / slot.first});
    return out;
}

ImplicitParallelism implicit_parallelism(std::uint64_t n, std::uint64_t l, std::uint64_t phi) {
    if (phi >= n) throw std::invalid_argument("implicit_parallelism: phi must be < n");
    if (phi == 0) throw std::invalid_argument("implicit_parallelism: phi must be >= 1");
    ImplicitParallelism out;
    // Largest theta with 2^theta * phi <= n.
    while ((BigInt(phi) << (out.theta + 1)) <= n) ++out.theta;
    out.schema_count = (BigInt(1) << out.theta) * binomial_coefficient(l, out.theta);
    out.holds = out.schema_count >= BigInt(n) * n * n;
    out.in_guarantee_regime = (n >= 64 && n <= (1ULL << 20) && l >= 64);
    return out;
}

}  // namespace schemaforge::ga
