#include "schemaforge/theorems_gp.hpp"

#include <algorithm>
#include <map>

namespace schemaforge::gp {

namespace {

struct PopulationView {
    std::vector<Rat> mass;
    std::vector<bool> in_h;
    Rat p_h = 0;
};

PopulationView view_for(const GpSchema& h, const GpPopulation& pop, const GpFitnessFunction& f) {
    PopulationView v;
    v.mass = selection_masses_gp(pop, f);
    v.in_h.resize(pop.size());
    for (std::size_t i = 0; i < pop.size(); ++i) {
        v.in_h[i] = gp_matches(h, pop.members[i]);
        if (v.in_h[i]) v.p_h += v.mass[i];
    }
    return v;
}

// Building blocks of H at every non-root coordinate of its shape.
struct BlockTable {
    std::vector<Coord> points;
    std::map<Coord, GpHyperschema> upper;
    std::map<Coord, GpHyperschema> lower;
};

BlockTable block_table(const GpSchema& h, const PrimitiveSet& ps, LowerBlockForm form) {
    BlockTable table;
    visit_coords(h.pattern(), ps.grid_base(), [&](Coord c, const TreeNode&) {
        if (c == Coord{0, 0}) return;
        table.points.push_back(c);
    });
    for (const auto c : table.points) {
        table.upper.emplace(c, upper_block(h, c, ps));
        table.lower.emplace(c, lower_block(h, c, ps, form));
    }
    return table;
}

}  // namespace

Rat selection_probability_gp(const GpSchema& h, const GpPopulation& pop,
                             const GpFitnessFunction& f) {
    return view_for(h, pop, f).p_h;
}

Rat selection_probability_gp(const GpHyperschema& h, const GpPopulation& pop,
                             const GpFitnessFunction& f) {
    const auto mass = selection_masses_gp(pop, f);
    Rat total = 0;
    for (std::size_t i = 0; i < pop.size(); ++i)
        if (gp_matches(h, pop.members[i])) total += mass[i];
    return total;
}

std::vector<ShapeIndexEntry> shape_index(const GpPopulation& pop, const GpFitnessFunction& f) {
    const auto mass = selection_masses_gp(pop, f);
    std::map<std::string, ShapeIndexEntry> by_key;
    for (std::size_t i = 0; i < pop.size(); ++i) {
        const auto key = pop.members[i].shape_key();
        auto it = by_key.find(key);
        if (it == by_key.end()) {
            ShapeIndexEntry entry;
            entry.shape = shape_of(pop.members[i].root());
            entry.size = pop.members[i].size();
            entry.mass = mass[i];
            by_key.emplace(key, std::move(entry));
        } else {
            it->second.mass += mass[i];
        }
    }
    std::vector<ShapeIndexEntry> out;
    out.reserve(by_key.size());
    for (auto& [key, entry] : by_key) out.push_back(std::move(entry));
    return out;
}

Rat gp_schema_theorem_bound(const GpSchema& h, const GpPopulation& pop, const GpFitnessFunction& f,
                            const GpConfig& cfg, const PrimitiveSet& ps, const Rat& p_d) {
    (void)ps;
    const auto metrics = gp_schema_metrics(h);
    const auto view = view_for(h, pop, f);
    if (view.p_h == 0) return 0;
    const Rat p_shape = selection_probability_gp(metrics.shape, pop, f);

    Rat defining_term = 0;
    if (metrics.length >= 2)
        defining_term = Rat(metrics.defining_length, metrics.length - 1) * (p_shape - view.p_h);
    const Rat disruption = p_d * (1 - p_shape) + defining_term;
    Rat bound = Rat(pop.size()) * view.p_h * rat_pow(1 - cfg.p_m, metrics.order) *
                (1 - cfg.p_c * disruption);
    return bound < 0 ? Rat(0) : bound;
}

Rat gp_schema_theorem_bound_auto(const GpSchema& h, const GpPopulation& pop,
                                 const GpFitnessFunction& f, const GpConfig& cfg,
                                 const PrimitiveSet& ps) {
    GpConfig no_mutation = cfg;
    no_mutation.p_m = 0;
    const Rat p_d = oracle::oracle_disruption_probability(h, pop, f, no_mutation, ps);
    return gp_schema_theorem_bound(h, pop, f, cfg, ps, p_d);
}

Rat microscopic_alpha_gp(const GpSchema& h, const GpPopulation& pop, const GpFitnessFunction& f,
                         const GpConfig& cfg, const PrimitiveSet& ps, LowerBlockForm form) {
    const auto view = view_for(h, pop, f);
    if (cfg.p_c == 0) return view.p_h;
    const auto blocks = block_table(h, ps, form);

    Rat pair_sum = 0;
    for (std::size_t i = 0; i < pop.size(); ++i) {
        for (std::size_t j = 0; j < pop.size(); ++j) {
            const auto region = common_region(pop.members[i], pop.members[j], ps);
            if (region.links.empty()) {
                if (view.in_h[i]) pair_sum += view.mass[i] * view.mass[j];
                continue;
            }
            unsigned transmitting = 0;
            for (const auto link : region.links) {
                auto upper_it = blocks.upper.find(link);
                if (upper_it == blocks.upper.end()) continue;  // link outside H's shape
                if (gp_matches(upper_it->second, pop.members[i]) &&
                    gp_matches(blocks.lower.at(link), pop.members[j]))
                    ++transmitting;
            }
            if (transmitting > 0)
                pair_sum += view.mass[i] * view.mass[j] * Rat(transmitting, region.links.size());
        }
    }
    return (1 - cfg.p_c) * view.p_h + cfg.p_c * pair_sum;
}

Rat macroscopic_alpha_gp(const GpSchema& h, const GpPopulation& pop, const GpFitnessFunction& f,
                         const GpConfig& cfg, const PrimitiveSet& ps, LowerBlockForm form) {
    const auto view = view_for(h, pop, f);
    if (cfg.p_c == 0) return view.p_h;
    const auto blocks = block_table(h, ps, form);

    // Group members by shape; common regions depend on shapes alone.
    std::map<std::string, std::vector<std::size_t>> shapes;
    for (std::size_t i = 0; i < pop.size(); ++i)
        shapes[pop.members[i].shape_key()].push_back(i);

    Rat pair_sum = 0;
    for (const auto& [key_j, members_j] : shapes) {
        for (const auto& [key_k, members_k] : shapes) {
            const auto region =
                common_region(pop.members[members_j.front()], pop.members[members_k.front()], ps);
            Rat mass_k_total = 0;
            for (auto idx : members_k) mass_k_total += view.mass[idx];
            if (region.links.empty()) {
                Rat mass_j_in_h = 0;
                for (auto idx : members_j)
                    if (view.in_h[idx]) mass_j_in_h += view.mass[idx];
                pair_sum += mass_j_in_h * mass_k_total;
                continue;
            }
            Rat link_sum = 0;
            for (const auto link : region.links) {
                auto upper_it = blocks.upper.find(link);
                if (upper_it == blocks.upper.end()) continue;
                Rat upper_mass = 0;
                for (auto idx : members_j)
                    if (gp_matches(upper_it->second, pop.members[idx])) upper_mass += view.mass[idx];
                if (upper_mass == 0) continue;
                Rat lower_mass = 0;
                for (auto idx : members_k)
                    if (gp_matches(blocks.lower.at(link), pop.members[idx]))
                        lower_mass += view.mass[idx];
                link_sum += upper_mass * lower_mass;
            }
            pair_sum += link_sum / Rat(region.links.size());
        }
    }
    return (1 - cfg.p_c) * view.p_h + cfg.p_c * pair_sum;
}

CreationCorrection creation_correction(const GpSchema& h, const GpPopulation& pop,
                                       const GpFitnessFunction& f, const GpConfig& cfg,
                                       const PrimitiveSet& ps) {
    const auto view = view_for(h, pop, f);
    const auto metrics = gp_schema_metrics(h);
    const Rat p_shape = selection_probability_gp(metrics.shape, pop, f);

    CreationCorrection out;
    if (metrics.length == 1) {
        // Single-node shapes have no cut points; same-shape crossover
        // degenerates to cloning the first parent.
        out.lower_bound = (1 - cfg.p_c) * view.p_h + cfg.p_c * view.p_h * p_shape;
    } else {
        const auto blocks = block_table(h, ps, LowerBlockForm::Path);
        const auto mass = view.mass;
        Rat link_sum = 0;
        for (const auto point : blocks.points) {
            // Restricting both factors to G(H) turns the building blocks into
            // their shape-preserving forms.
            Rat upper_mass = 0;
            Rat lower_mass = 0;
            for (std::size_t i = 0; i < pop.size(); ++i) {
                if (!gp_matches(metrics.shape, pop.members[i])) continue;
                if (gp_matches(blocks.upper.at(point), pop.members[i])) upper_mass += mass[i];
                if (gp_matches(blocks.lower.at(point), pop.members[i])) lower_mass += mass[i];
            }
            link_sum += upper_mass * lower_mass;
        }
        out.lower_bound =
            (1 - cfg.p_c) * view.p_h + cfg.p_c * link_sum / Rat(metrics.length - 1);
    }
    out.delta_alpha = microscopic_alpha_gp(h, pop, f, cfg, ps) - out.lower_bound;
    return out;
}

std::optional<Rat> effective_fitness_gp(const GpSchema& h, const GpPopulation& pop,
                                        const GpFitnessFunction& f, const GpConfig& cfg,
                                        const PrimitiveSet& ps) {
    const auto view = view_for(h, pop, f);
    if (view.p_h == 0) return std::nullopt;
    Rat fitness_h = 0;
    {
        Rat total = 0;
        unsigned count = 0;
        for (std::size_t i = 0; i < pop.size(); ++i) {
            if (!view.in_h[i]) continue;
            total += f(pop.members[i]);
            ++count;
        }
        fitness_h = total / count;
    }
    const Rat alpha = macroscopic_alpha_gp(h, pop, f, cfg, ps);
    return alpha / view.p_h * fitness_h;
}

SizeEvolution size_evolution(const GpPopulation& pop, const GpFitnessFunction& f,
                             const GpConfig& cfg, const PrimitiveSet& ps) {
    if (cfg.p_m != 0)
        throw std::invalid_argument("size_evolution: stated for p_m = 0");
    (void)ps;
    const auto mass = selection_masses_gp(pop, f);
    SizeEvolution out;
    for (std::size_t i = 0; i < pop.size(); ++i)
        out.by_programs += Rat(pop.members[i].size()) * mass[i];
    for (const auto& entry : shape_index(pop, f)) out.by_shapes += Rat(entry.size) * entry.mass;
    return out;
}

ProgramEffectiveFitness program_effective_fitness(const TreeProgram& j, const GpPopulation& pop,
                                                  const GpFitnessFunction& f, const GpConfig& cfg,
                                                  const PrimitiveSet& ps, unsigned trials) {
    if (trials == 0) throw std::invalid_argument("program_effective_fitness: trials must be >= 1");
    ProgramEffectiveFitness out;
    out.fitness = f(j);
    out.total_nodes = j.size();

    // Active part: nodes where some same-arity substitution moves fitness.
    std::vector<Coord> active;
    visit_coords(j.root(), ps.grid_base(), [&](Coord c, const TreeNode& node) {
        for (const auto& alt : ps.symbols_with_arity(node.arity())) {
            if (alt == node.symbol) continue;
            TreeNode replacement = node;
            replacement.symbol = alt;
            TreeProgram candidate(with_subtree_replaced(j.root(), c, replacement, ps.grid_base()));
            if (f(candidate) != out.fitness) {
                active.push_back(c);
                return;
            }
        }
    });
    out.active_nodes = active.size();
    std::sort(active.begin(), active.end());

    const auto mass = selection_masses_gp(pop, f);
    std::vector<double> cumulative;
    double acc = 0.0;
    for (const auto& m : mass) { acc += to_double(m); cumulative.push_back(acc); }

    // Is any crossover point inside the active part reachable at all?
    bool reachable = false;
    for (const auto& mate : pop.members) {
        const auto region = common_region(j, mate, ps);
        for (const auto link : region.links)
            if (std::binary_search(active.begin(), active.end(), link)) { reachable = true; break; }
        if (reachable) break;
    }

    unsigned decreases = 0;
    unsigned samples = 0;
    if (reachable && !active.empty()) {
        RandomStream rng(substream_seed(cfg.seed, 0x9e0f, 0));
        unsigned attempts = 0;
        const unsigned max_attempts = trials * 64;
        while (samples < trials && attempts < max_attempts) {
            ++attempts;
            const double u = rng.uniform01() * cumulative.back();
            std::size_t mate = static_cast<std::size_t>(
                std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
            if (mate >= pop.size()) mate = pop.size() - 1;
            const auto region = common_region(j, pop.members[mate], ps);
            if (region.links.empty()) continue;
            const auto link =
                region.links[static_cast<std::size_t>(rng.uniform_index(region.links.size()))];
            if (!std::binary_search(active.begin(), active.end(), link)) continue;
            const auto child = one_point_crossover_gp(j, pop.members[mate], link, ps);
            ++samples;
            if (f(child) < out.fitness) ++decreases;
        }
    }
    out.disruption_decrease = samples == 0 ? Rat(0) : Rat(decreases, samples);
    out.effective = out.fitness *
                    (1 - cfg.p_c * Rat(out.active_nodes, out.total_nodes) * out.disruption_decrease);

    unsigned copies = 0;
    Rat total_fitness = 0;
    for (const auto& member : pop.members) {
        if (member == j) ++copies;
        total_fitness += f(member);
    }
    const Rat fbar = total_fitness / pop.size();
    out.proportion = Rat(copies, pop.size());
    out.predicted_proportion = out.proportion * out.effective / fbar;
    return out;
}

}  // namespace schemaforge::gp
