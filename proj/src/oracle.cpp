#include "schemaforge/oracle.hpp"

#include <algorithm>
#include <map>

namespace schemaforge::oracle {

namespace {

void check_ga_caps(const ga::Population& pop, const ga::GaConfig& cfg, const OracleCaps& caps) {
    if (pop.size() > caps.max_n_ga)
        throw CapError("oracle: population size " + std::to_string(pop.size()) +
                       " exceeds cap " + std::to_string(caps.max_n_ga));
    if (pop.string_length() > caps.max_len_ga)
        throw CapError("oracle: string length " + std::to_string(pop.string_length()) +
                       " exceeds cap " + std::to_string(caps.max_len_ga));
    if (cfg.selection.kind != SelectionSpec::Kind::Proportional)
        throw std::invalid_argument("oracle: proportional selection only");
}

// Exact per-bit or single-bit mutation kernel: distribution of mutate(s).
void add_mutants(const ga::BitString& s, const Rat& weight, const Rat& p_m,
                 ga::MutationMode mode, std::map<ga::BitString, Rat>& out) {
    const std::size_t l = s.length();
    if (p_m == 0) {
        out[s] += weight;
        return;
    }
    if (mode == ga::MutationMode::SingleBit) {
        out[s] += weight * (1 - p_m);
        for (std::size_t i = 0; i < l; ++i) {
            ga::BitString flipped = s;
            flipped.set_bit(i, static_cast<std::uint8_t>(1 - s.bit(i)));
            out[flipped] += weight * p_m / Rat(l);
        }
        return;
    }
    // Per-bit: sum over all 2^l flip patterns.
    for (std::uint64_t pattern = 0; pattern < (std::uint64_t{1} << l); ++pattern) {
        ga::BitString mutant = s;
        unsigned flips = 0;
        for (std::size_t i = 0; i < l; ++i) {
            if (pattern & (std::uint64_t{1} << i)) {
                mutant.set_bit(i, static_cast<std::uint8_t>(1 - s.bit(i)));
                ++flips;
            }
        }
        out[mutant] += weight * rat_pow(p_m, flips) * rat_pow(1 - p_m, static_cast<unsigned>(l - flips));
    }
}

ga::BitString spliced_child(const ga::BitString& a, const ga::BitString& b, std::size_t cut) {
    ga::BitString child = a;
    for (std::size_t i = cut + 1; i < a.length(); ++i) child.set_bit(i, b.bit(i));
    return child;
}

template <typename Genotype>
OffspringDistribution<Genotype> to_distribution(std::map<Genotype, Rat> mass) {
    OffspringDistribution<Genotype> dist;
    dist.support.reserve(mass.size());
    for (auto& [g, p] : mass)
        if (p != 0) dist.support.emplace_back(g, p);
    return dist;
}

}  // namespace

GaOffspringDistribution enumerate_offspring_ga(const ga::Population& pop,
                                               const ga::FitnessFunction& f,
                                               const ga::GaConfig& cfg, const OracleCaps& caps) {
    check_ga_caps(pop, cfg, caps);
    const auto mass = ga::selection_masses(pop, f);
    const std::size_t l = pop.string_length();
    const Rat pc = (l >= 2) ? cfg.p_c : Rat(0);  // no cut points below length 2

    std::map<ga::BitString, Rat> pre_mutation;
    for (std::size_t i = 0; i < pop.size(); ++i)
        pre_mutation[pop.members[i]] += (1 - pc) * mass[i];
    if (pc != 0) {
        const Rat cut_weight = pc / Rat(l - 1);
        for (std::size_t i = 0; i < pop.size(); ++i)
            for (std::size_t j = 0; j < pop.size(); ++j)
                for (std::size_t cut = 0; cut + 1 < l; ++cut)
                    pre_mutation[spliced_child(pop.members[i], pop.members[j], cut)] +=
                        mass[i] * mass[j] * cut_weight;
    }

    std::map<ga::BitString, Rat> post;
    for (const auto& [child, p] : pre_mutation)
        add_mutants(child, p, cfg.p_m, cfg.mutation_mode, post);
    return to_distribution(std::move(post));
}

GaOffspringDistribution enumerate_offspring_ga_alt(const ga::Population& pop,
                                                   const ga::FitnessFunction& f,
                                                   const ga::GaConfig& cfg,
                                                   const OracleCaps& caps) {
    check_ga_caps(pop, cfg, caps);
    const auto mass = ga::selection_masses(pop, f);
    const std::size_t l = pop.string_length();
    const Rat pc = (l >= 2) ? cfg.p_c : Rat(0);

    // Cut-major ordering, second parent in the outer loop, mutation expanded
    // inline per route; same generative model, different summation order.
    std::map<ga::BitString, Rat> post;
    if (pc != 0) {
        const Rat cut_weight = pc / Rat(l - 1);
        for (std::size_t cut = 0; cut + 1 < l; ++cut)
            for (std::size_t j = pop.size(); j-- > 0;)
                for (std::size_t i = pop.size(); i-- > 0;)
                    add_mutants(spliced_child(pop.members[i], pop.members[j], cut),
                                mass[i] * mass[j] * cut_weight, cfg.p_m, cfg.mutation_mode, post);
    }
    for (std::size_t i = pop.size(); i-- > 0;)
        add_mutants(pop.members[i], (1 - pc) * mass[i], cfg.p_m, cfg.mutation_mode, post);
    return to_distribution(std::move(post));
}

Rat oracle_alpha(const ga::GaSchema& h, const ga::Population& pop, const ga::FitnessFunction& f,
                 const ga::GaConfig& cfg, const OracleCaps& caps) {
    const auto dist = enumerate_offspring_ga(pop, f, cfg, caps);
    Rat alpha = 0;
    for (const auto& [child, p] : dist.support)
        if (ga::matches(h, child)) alpha += p;
    return alpha;
}

std::vector<Rat> compose_count_law(const Rat& alpha, unsigned n) {
    std::vector<Rat> law{Rat(1)};
    for (unsigned step = 0; step < n; ++step) {
        std::vector<Rat> next(law.size() + 1, Rat(0));
        for (std::size_t k = 0; k < law.size(); ++k) {
            next[k] += law[k] * (1 - alpha);
            next[k + 1] += law[k] * alpha;
        }
        law = std::move(next);
    }
    return law;
}

namespace {

void check_gp_caps(const gp::GpPopulation& pop, const gp::GpConfig& cfg, const OracleCaps& caps) {
    if (pop.size() > caps.max_trees)
        throw CapError("oracle: tree population size " + std::to_string(pop.size()) +
                       " exceeds cap " + std::to_string(caps.max_trees));
    for (const auto& member : pop.members)
        if (member.size() > caps.max_nodes)
            throw CapError("oracle: tree with " + std::to_string(member.size()) +
                           " nodes exceeds cap " + std::to_string(caps.max_nodes));
    if (cfg.selection.kind != SelectionSpec::Kind::Proportional)
        throw std::invalid_argument("oracle: proportional selection only");
    if (cfg.p_m != 0) throw std::invalid_argument("oracle: tree enumeration requires p_m = 0");
    if (cfg.crossover != gp::GpConfig::Crossover::OnePoint)
        throw std::invalid_argument("oracle: tree enumeration covers one-point crossover only");
}

}  // namespace

GpOffspringDistribution enumerate_offspring_gp(const gp::GpPopulation& pop,
                                               const gp::GpFitnessFunction& f,
                                               const gp::GpConfig& cfg,
                                               const gp::PrimitiveSet& ps, const OracleCaps& caps) {
    check_gp_caps(pop, cfg, caps);
    const auto mass = gp::selection_masses_gp(pop, f);

    std::map<gp::TreeProgram, Rat> out;
    for (std::size_t i = 0; i < pop.size(); ++i)
        out[pop.members[i]] += (1 - cfg.p_c) * mass[i];
    if (cfg.p_c != 0) {
        for (std::size_t i = 0; i < pop.size(); ++i) {
            for (std::size_t j = 0; j < pop.size(); ++j) {
                const Rat pair_mass = cfg.p_c * mass[i] * mass[j];
                const auto region = gp::common_region(pop.members[i], pop.members[j], ps);
                if (region.links.empty()) {
                    out[pop.members[i]] += pair_mass;  // clone fallback
                    continue;
                }
                const Rat link_weight = pair_mass / Rat(region.links.size());
                for (const auto link : region.links)
                    out[gp::one_point_crossover_gp(pop.members[i], pop.members[j], link, ps)] +=
                        link_weight;
            }
        }
    }
    return to_distribution(std::move(out));
}

Rat oracle_alpha_gp(const gp::GpSchema& h, const gp::GpPopulation& pop,
                    const gp::GpFitnessFunction& f, const gp::GpConfig& cfg,
                    const gp::PrimitiveSet& ps, const OracleCaps& caps) {
    const auto dist = enumerate_offspring_gp(pop, f, cfg, ps, caps);
    Rat alpha = 0;
    for (const auto& [child, p] : dist.support)
        if (gp::gp_matches(h, child)) alpha += p;
    return alpha;
}

Rat oracle_expected_mean_size(const gp::GpPopulation& pop, const gp::GpFitnessFunction& f,
                              const gp::GpConfig& cfg, const gp::PrimitiveSet& ps,
                              const OracleCaps& caps) {
    const auto dist = enumerate_offspring_gp(pop, f, cfg, ps, caps);
    Rat expected = 0;
    for (const auto& [child, p] : dist.support) expected += p * Rat(child.size());
    return expected;
}

Rat oracle_disruption_probability(const gp::GpSchema& h, const gp::GpPopulation& pop,
                                  const gp::GpFitnessFunction& f, const gp::GpConfig& cfg,
                                  const gp::PrimitiveSet& ps, const OracleCaps& caps) {
    check_gp_caps(pop, cfg, caps);
    const auto mass = gp::selection_masses_gp(pop, f);
    Rat in_h = 0;
    Rat disrupted = 0;
    for (std::size_t i = 0; i < pop.size(); ++i) {
        if (!gp::gp_matches(h, pop.members[i])) continue;
        in_h += mass[i];
        for (std::size_t j = 0; j < pop.size(); ++j) {
            const auto region = gp::common_region(pop.members[i], pop.members[j], ps);
            if (region.links.empty()) continue;  // clone fallback keeps the member inside h
            Rat miss = 0;
            for (const auto link : region.links) {
                const auto child = gp::one_point_crossover_gp(pop.members[i], pop.members[j], link, ps);
                if (!gp::gp_matches(h, child)) miss += 1;
            }
            disrupted += mass[i] * mass[j] * miss / Rat(region.links.size());
        }
    }
    if (in_h == 0) return 0;
    return disrupted / in_h;
}

}  // namespace schemaforge::oracle
