#include "schemaforge/harness.hpp"

#include "schemaforge/csv.hpp"
#include "schemaforge/oracle.hpp"
#include "schemaforge/plot.hpp"
#include "schemaforge/theorems_ga.hpp"
#include "schemaforge/theorems_gp.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

namespace schemaforge::harness {

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kInitStreamSalt = 0x5eed0002ULL;
constexpr std::uint64_t kTrialStreamSalt = 0x5eed0001ULL;

unsigned thread_count(const ExperimentConfig& cfg) {
    if (cfg.threads > 0) return cfg.threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : std::min(hw, 8u);
}

ga::Population initial_ga_population(const ExperimentConfig& cfg) {
    ga::Population pop;
    if (!cfg.ga_population.empty()) {
        for (const auto& text : cfg.ga_population)
            pop.members.push_back(ga::BitString::from_string(text));
        for (const auto& member : pop.members)
            if (member.length() != pop.members.front().length())
                throw ConfigError("config: population strings differ in length");
    } else {
        for (unsigned i = 0; i < cfg.ga_engine.n; ++i) {
            RandomStream rng(substream_seed(cfg.seed ^ kInitStreamSalt, i));
            std::vector<std::uint8_t> bits(cfg.init_length);
            for (auto& b : bits) b = static_cast<std::uint8_t>(rng.next_u64() & 1u);
            pop.members.push_back(ga::BitString(std::move(bits)));
        }
    }
    return pop;
}

gp::GpPopulation initial_gp_population(const ExperimentConfig& cfg) {
    gp::GpPopulation pop;
    const auto& ps = *cfg.primitives;
    if (!cfg.gp_population.empty()) {
        for (const auto& text : cfg.gp_population)
            pop.members.push_back(gp::TreeProgram::parse(text, ps));
    } else {
        for (unsigned i = 0; i < cfg.gp_engine.n; ++i) {
            RandomStream rng(substream_seed(cfg.seed ^ kInitStreamSalt, i));
            pop.members.push_back(gp::random_tree(ps, cfg.init_max_depth, rng));
        }
    }
    return pop;
}

struct McStats {
    double mean = 0;
    double se = 0;
};

// Monte Carlo next-generation counts for every tracked schema. Trial k runs
// the engine under substream (seed ^ salt, generation, k); per-trial slots
// are reduced in index order, so thread scheduling cannot change results.
template <typename CountFn>
std::vector<McStats> mc_counts(unsigned trials, unsigned threads, std::size_t schemata,
                               const CountFn& count_trial) {
    std::vector<std::vector<unsigned>> counts(trials);
    auto work = [&](unsigned from, unsigned to) {
        for (unsigned k = from; k < to; ++k) counts[k] = count_trial(k);
    };
    if (threads <= 1 || trials < 32) {
        work(0, trials);
    } else {
        std::vector<std::thread> pool;
        const unsigned chunk = (trials + threads - 1) / threads;
        for (unsigned t = 0; t < threads; ++t) {
            const unsigned from = t * chunk;
            const unsigned to = std::min(trials, from + chunk);
            if (from < to) pool.emplace_back(work, from, to);
        }
        for (auto& th : pool) th.join();
    }
    std::vector<McStats> out(schemata);
    for (std::size_t s = 0; s < schemata; ++s) {
        unsigned long long sum = 0, sum_sq = 0;
        for (unsigned k = 0; k < trials; ++k) {
            sum += counts[k][s];
            sum_sq += static_cast<unsigned long long>(counts[k][s]) * counts[k][s];
        }
        const double mean = static_cast<double>(sum) / trials;
        double variance = 0;
        if (trials > 1)
            variance = (static_cast<double>(sum_sq) - trials * mean * mean) /
                       (static_cast<double>(trials) - 1.0);
        if (variance < 0) variance = 0;
        out[s] = {mean, std::sqrt(variance / trials)};
    }
    return out;
}

std::string verdict_or(const std::string& current, const std::string& worse) {
    return current == "ok" || current == "equality" ? worse : current;
}

void write_summary(const fs::path& dir, const std::string& text, ArtifactSet& artifacts) {
    const auto path = dir / "summary.txt";
    std::ofstream out(path, std::ios::binary);
    out << text;
    artifacts.files.push_back(path.string());
    artifacts.summary = text;
}

ArtifactSet run_experiment_ga(const ExperimentConfig& cfg) {
    ArtifactSet artifacts;
    fs::create_directories(cfg.out_dir);
    const fs::path dir(cfg.out_dir);

    ga::Population pop = initial_ga_population(cfg);
    ga::GaConfig engine = cfg.ga_engine;
    engine.n = static_cast<unsigned>(pop.size());
    engine.seed = cfg.seed;
    engine.validate();
    const auto& f = cfg.ga_fitness;
    for (const auto& h : cfg.ga_schemata)
        if (h.length() != pop.string_length())
            throw ConfigError("config: schema '" + h.pattern() + "' length differs from genome");

    const bool formulas_apply = engine.selection.kind == SelectionSpec::Kind::Proportional;
    const bool exact_applies = formulas_apply && engine.p_m == 0;
    const unsigned threads = thread_count(cfg);

    const auto traj_path = dir / "trajectory.csv";
    CsvWriter traj(traj_path.string(),
                   {"t", "schema", "m", "f_H", "fbar", "p_H", "exact_alpha", "exact_alpha_alt",
                    "expected_count", "holland_bound", "oracle_alpha", "oracle_expected",
                    "mc_mean", "mc_se", "verdict"});
    artifacts.files.push_back(traj_path.string());

    unsigned violations = 0;
    for (unsigned t = 0; t < cfg.generations; ++t) {
        const Rat fbar = ga::population_mean_fitness(pop, f);
        auto count_trial = [&](unsigned k) {
            ga::GaConfig trial_cfg = engine;
            trial_cfg.seed = substream_seed(cfg.seed ^ kTrialStreamSalt, t, k);
            const auto next = ga::next_generation(pop, f, trial_cfg);
            std::vector<unsigned> row(cfg.ga_schemata.size(), 0);
            for (std::size_t s = 0; s < cfg.ga_schemata.size(); ++s)
                for (const auto& member : next.members)
                    if (ga::matches(cfg.ga_schemata[s], member)) ++row[s];
            return row;
        };
        const auto mc = mc_counts(cfg.trials, threads, cfg.ga_schemata.size(), count_trial);

        for (std::size_t s = 0; s < cfg.ga_schemata.size(); ++s) {
            const auto& h = cfg.ga_schemata[s];
            const auto counted = ga::count_and_fitness(h, pop, f);
            std::string verdict = "ok";
            std::string alpha_text = "-", alpha_alt_text = "-", expected_text = "-";
            std::string holland_text = "-", oracle_text = "-", oracle_expected_text = "-";

            std::optional<Rat> exact;
            if (exact_applies) {
                const auto est = ga::exact_alpha(h, pop, f, engine);
                exact = est.alpha;
                alpha_text = rat_to_string(est.alpha);
                alpha_alt_text = rat_to_string(est.alpha_alt_convention);
                expected_text = rat_to_string(est.expected_count);
            }
            std::optional<Rat> holland;
            if (formulas_apply && engine.mutation_mode == ga::MutationMode::PerBit &&
                pop.string_length() >= 2) {
                holland = ga::holland_bound(h, pop, f, engine);
                holland_text = rat_to_string(*holland);
            }
            std::optional<Rat> oracle_value;
            if (cfg.oracle && formulas_apply) {
                try {
                    oracle_value = oracle::oracle_alpha(h, pop, f, engine);
                    oracle_text = rat_to_string(*oracle_value);
                    oracle_expected_text = rat_to_string(*oracle_value * Rat(pop.size()));
                } catch (const CapError&) {
                    // instance too large; Monte Carlo path still applies
                }
            }
            if (exact && oracle_value && *exact != *oracle_value) verdict = "mismatch";
            if (holland && oracle_value && *holland > *oracle_value * Rat(pop.size()))
                verdict = verdict_or(verdict, "bound-violated");
            const Rat reference = oracle_value ? *oracle_value : (exact ? *exact : Rat(-1));
            if (reference >= 0 && cfg.trials >= 16) {
                const double expected = to_double(reference) * static_cast<double>(pop.size());
                const double slack = 4.0 * mc[s].se + 1e-9;
                if (std::abs(mc[s].mean - expected) > slack)
                    verdict = verdict_or(verdict, "outside-4se");
            }
            if (verdict != "ok") ++violations;
            traj.row({std::to_string(t), h.pattern(), std::to_string(counted.count),
                      rat_to_string(counted.mean_fitness), rat_to_string(fbar),
                      rat_to_string(ga::selection_probability(h, pop, f)), alpha_text,
                      alpha_alt_text, expected_text, holland_text, oracle_text,
                      oracle_expected_text, format_double(mc[s].mean), format_double(mc[s].se),
                      verdict});
            ++artifacts.rows;
        }
        ga::GaConfig base = engine;
        base.seed = cfg.seed;
        pop = ga::next_generation(pop, f, base);
    }

    // Census of the final population.
    const auto census_path = dir / "census.csv";
    CsvWriter census(census_path.string(),
                     {"schema", "order", "defining_length", "m", "f_H"});
    for (const auto& entry : ga::schema_census(pop, f, cfg.census_max_order)) {
        const auto metrics = pop.string_length() >= 2
                                 ? ga::schema_metrics(entry.schema)
                                 : ga::SchemaMetrics{};
        census.row({entry.schema.pattern(), std::to_string(metrics.order),
                    std::to_string(metrics.defining_length), std::to_string(entry.count),
                    rat_to_string(entry.mean_fitness)});
    }
    artifacts.files.push_back(census_path.string());

    if (!cfg.ga_schemata.empty()) {
        // Default plot: tracked-schema counts against the Monte Carlo means.
        const auto plot_data = dir / "plotdata.csv";
        {
            const CsvTable table = read_csv(traj_path.string());
            const auto ti = table.column_index("t");
            const auto si = table.column_index("schema");
            const auto mi = table.column_index("m");
            const auto mc_i = table.column_index("mc_mean");
            CsvWriter pd(plot_data.string(), {"t", "m", "mc_mean"});
            for (const auto& row : table.rows)
                if (row[si] == cfg.ga_schemata.front().pattern())
                    pd.row({row[ti], row[mi], row[mc_i]});
        }
        const auto plot_path = dir / "trajectory.svg";
        PlotSpec spec;
        spec.x_column = "t";
        spec.y_columns = {"m", "mc_mean"};
        spec.title = "schema " + cfg.ga_schemata.front().pattern();
        emit_plot(plot_data.string(), spec, plot_path.string());
        artifacts.files.push_back(plot_data.string());
        artifacts.files.push_back(plot_path.string());
    }

    std::ostringstream summary;
    summary << "schema-forge run (bitstring mode)\n"
            << "seed " << cfg.seed << ", generations " << cfg.generations << ", trials "
            << cfg.trials << ", n " << engine.n << ", length " << pop.string_length() << "\n"
            << "rows " << artifacts.rows << ", verdict failures " << violations << "\n";
    artifacts.violations = violations;
    write_summary(dir, summary.str(), artifacts);
    return artifacts;
}

ArtifactSet run_experiment_gp(const ExperimentConfig& cfg) {
    ArtifactSet artifacts;
    fs::create_directories(cfg.out_dir);
    const fs::path dir(cfg.out_dir);
    const auto& ps = *cfg.primitives;

    gp::GpPopulation pop = initial_gp_population(cfg);
    gp::GpConfig engine = cfg.gp_engine;
    engine.n = static_cast<unsigned>(pop.size());
    engine.seed = cfg.seed;
    engine.validate();
    const auto& f = cfg.gp_fitness;
    std::vector<gp::GpSchema> schemata;
    for (const auto& text : cfg.gp_schemata) schemata.push_back(gp::GpSchema::parse(text, ps));

    const bool formulas_apply = engine.selection.kind == SelectionSpec::Kind::Proportional &&
                                engine.p_m == 0 &&
                                engine.crossover == gp::GpConfig::Crossover::OnePoint;
    const unsigned threads = thread_count(cfg);

    const auto traj_path = dir / "trajectory.csv";
    CsvWriter traj(traj_path.string(),
                   {"t", "schema", "m", "f_H", "fbar", "p_H", "micro_alpha", "macro_alpha",
                    "creation_lower", "delta_alpha", "bound", "oracle_alpha", "mc_mean", "mc_se",
                    "verdict"});
    artifacts.files.push_back(traj_path.string());
    const auto stats_path = dir / "runstats.csv";
    CsvWriter stats(stats_path.string(),
                    {"t", "shapes", "mean_size", "size_pred", "oracle_mean_size", "xo_events",
                     "disruptions", "disruption_freq"});
    artifacts.files.push_back(stats_path.string());

    unsigned violations = 0;
    for (unsigned t = 0; t < cfg.generations; ++t) {
        const auto masses = gp::selection_masses_gp(pop, f);
        Rat fbar = 0;
        for (const auto& member : pop.members) fbar += f(member);
        fbar /= pop.size();

        auto count_trial = [&](unsigned k) {
            gp::GpConfig trial_cfg = engine;
            trial_cfg.seed = substream_seed(cfg.seed ^ kTrialStreamSalt, t, k);
            const auto next = gp::next_generation_gp(pop, f, trial_cfg, ps);
            std::vector<unsigned> row(schemata.size(), 0);
            for (std::size_t s = 0; s < schemata.size(); ++s)
                for (const auto& member : next.members)
                    if (gp::gp_matches(schemata[s], member)) ++row[s];
            return row;
        };
        const auto mc = mc_counts(cfg.trials, threads, schemata.size(), count_trial);

        std::optional<Rat> oracle_mean_size;
        std::optional<gp::SizeEvolution> size_pred;
        if (formulas_apply) {
            size_pred = gp::size_evolution(pop, f, engine, ps);
            if (cfg.oracle) {
                try {
                    oracle_mean_size = oracle::oracle_expected_mean_size(pop, f, engine, ps);
                } catch (const CapError&) {
                }
            }
        }

        for (std::size_t s = 0; s < schemata.size(); ++s) {
            const auto& h = schemata[s];
            unsigned m = 0;
            Rat fit_total = 0;
            for (const auto& member : pop.members)
                if (gp::gp_matches(h, member)) { ++m; fit_total += f(member); }
            const Rat f_h = m ? fit_total / m : Rat(0);
            std::string verdict = "ok";
            std::string micro_text = "-", macro_text = "-", lower_text = "-", delta_text = "-";
            std::string bound_text = "-", oracle_text = "-";

            std::optional<Rat> micro, oracle_value;
            if (formulas_apply) {
                micro = gp::microscopic_alpha_gp(h, pop, f, engine, ps);
                const Rat macro = gp::macroscopic_alpha_gp(h, pop, f, engine, ps);
                const auto correction = gp::creation_correction(h, pop, f, engine, ps);
                micro_text = rat_to_string(*micro);
                macro_text = rat_to_string(macro);
                lower_text = rat_to_string(correction.lower_bound);
                delta_text = rat_to_string(correction.delta_alpha);
                if (macro != *micro) verdict = "mismatch";
                if (correction.delta_alpha < 0) verdict = verdict_or(verdict, "bound-violated");
                if (cfg.oracle) {
                    try {
                        oracle_value = oracle::oracle_alpha_gp(h, pop, f, engine, ps);
                        oracle_text = rat_to_string(*oracle_value);
                        if (*oracle_value != *micro) verdict = "mismatch";
                        const Rat bound = gp::gp_schema_theorem_bound_auto(h, pop, f, engine, ps);
                        bound_text = rat_to_string(bound);
                        if (bound > *oracle_value * Rat(pop.size()))
                            verdict = verdict_or(verdict, "bound-violated");
                    } catch (const CapError&) {
                    }
                }
            }
            const Rat reference = oracle_value ? *oracle_value : (micro ? *micro : Rat(-1));
            if (reference >= 0 && cfg.trials >= 16) {
                const double expected = to_double(reference) * static_cast<double>(pop.size());
                const double slack = 4.0 * mc[s].se + 1e-9;
                if (std::abs(mc[s].mean - expected) > slack)
                    verdict = verdict_or(verdict, "outside-4se");
            }
            if (verdict != "ok") ++violations;
            traj.row({std::to_string(t), h.to_string(), std::to_string(m), rat_to_string(f_h),
                      rat_to_string(fbar),
                      rat_to_string(gp::selection_probability_gp(h, pop, f)), micro_text,
                      macro_text, lower_text, delta_text, bound_text, oracle_text,
                      format_double(mc[s].mean), format_double(mc[s].se), verdict});
            ++artifacts.rows;
        }

        // Base run step with disruption accounting against tracked schemata.
        unsigned xo_events = 0, disruptions = 0;
        gp::CrossoverObserver observer;
        observer.on_crossover = [&](const gp::TreeProgram& parent, const gp::TreeProgram& child) {
            for (const auto& h : schemata) {
                if (!gp::gp_matches(h, parent)) continue;
                ++xo_events;
                if (!gp::gp_matches(h, child)) ++disruptions;
            }
        };
        std::map<std::string, unsigned> shapes;
        Rat mean_size = 0;
        for (const auto& member : pop.members) {
            shapes[member.shape_key()]++;
            mean_size += Rat(member.size());
        }
        mean_size /= pop.size();

        gp::GpConfig base = engine;
        base.seed = cfg.seed;
        pop = gp::next_generation_gp(pop, f, base, ps, &observer);

        stats.row({std::to_string(t), std::to_string(shapes.size()), rat_to_string(mean_size),
                   size_pred ? rat_to_string(size_pred->by_programs) : "-",
                   oracle_mean_size ? rat_to_string(*oracle_mean_size) : "-",
                   std::to_string(xo_events), std::to_string(disruptions),
                   xo_events ? format_double(static_cast<double>(disruptions) / xo_events) : "-"});
    }

    if (!schemata.empty()) {
        const auto plot_data = dir / "plotdata.csv";
        {
            const CsvTable table = read_csv(traj_path.string());
            const auto ti = table.column_index("t");
            const auto si = table.column_index("schema");
            const auto mi = table.column_index("m");
            const auto mc_i = table.column_index("mc_mean");
            CsvWriter pd(plot_data.string(), {"t", "m", "mc_mean"});
            for (const auto& row : table.rows)
                if (row[si] == schemata.front().to_string()) pd.row({row[ti], row[mi], row[mc_i]});
        }
        const auto plot_path = dir / "trajectory.svg";
        PlotSpec spec;
        spec.x_column = "t";
        spec.y_columns = {"m", "mc_mean"};
        spec.title = "schema " + schemata.front().to_string();
        emit_plot(plot_data.string(), spec, plot_path.string());
        artifacts.files.push_back(plot_data.string());
        artifacts.files.push_back(plot_path.string());
    }

    std::ostringstream summary;
    summary << "schema-forge run (tree mode)\n"
            << "seed " << cfg.seed << ", generations " << cfg.generations << ", trials "
            << cfg.trials << ", n " << engine.n << "\n"
            << "rows " << artifacts.rows << ", verdict failures " << violations << "\n";
    artifacts.violations = violations;
    write_summary(dir, summary.str(), artifacts);
    return artifacts;
}

}  // namespace

ArtifactSet run_experiment(const ExperimentConfig& cfg) {
    return cfg.mode == ExperimentConfig::Mode::Ga ? run_experiment_ga(cfg)
                                                  : run_experiment_gp(cfg);
}

ArtifactSet run_oracle_dump(const ExperimentConfig& cfg) {
    ArtifactSet artifacts;
    fs::create_directories(cfg.out_dir);
    const fs::path dir(cfg.out_dir);

    if (cfg.mode == ExperimentConfig::Mode::Ga) {
        ga::Population pop = initial_ga_population(cfg);
        ga::GaConfig engine = cfg.ga_engine;
        engine.n = static_cast<unsigned>(pop.size());
        const auto dist = oracle::enumerate_offspring_ga(pop, cfg.ga_fitness, engine);
        const auto dist_path = dir / "offspring.csv";
        CsvWriter dist_csv(dist_path.string(), {"genotype", "probability"});
        for (const auto& [child, p] : dist.support)
            dist_csv.row({child.to_string(), rat_to_string(p)});
        artifacts.files.push_back(dist_path.string());

        const auto alpha_path = dir / "alphas.csv";
        CsvWriter alpha_csv(alpha_path.string(),
                            {"schema", "oracle_alpha", "exact_alpha", "exact_alpha_alt", "verdict"});
        for (const auto& h : cfg.ga_schemata) {
            const Rat o = oracle::oracle_alpha(h, pop, cfg.ga_fitness, engine);
            std::string exact_text = "-", alt_text = "-", verdict = "-";
            if (engine.p_m == 0) {
                const auto est = ga::exact_alpha(h, pop, cfg.ga_fitness, engine);
                exact_text = rat_to_string(est.alpha);
                alt_text = rat_to_string(est.alpha_alt_convention);
                verdict = est.alpha == o ? "equality" : "mismatch";
                if (verdict == "mismatch") ++artifacts.violations;
            }
            alpha_csv.row({h.pattern(), rat_to_string(o), exact_text, alt_text, verdict});
            ++artifacts.rows;
        }
        artifacts.files.push_back(alpha_path.string());
    } else {
        const auto& ps = *cfg.primitives;
        gp::GpPopulation pop = initial_gp_population(cfg);
        gp::GpConfig engine = cfg.gp_engine;
        engine.n = static_cast<unsigned>(pop.size());
        const auto dist = oracle::enumerate_offspring_gp(pop, cfg.gp_fitness, engine, ps);
        const auto dist_path = dir / "offspring.csv";
        CsvWriter dist_csv(dist_path.string(), {"genotype", "probability"});
        for (const auto& [child, p] : dist.support)
            dist_csv.row({child.to_string(), rat_to_string(p)});
        artifacts.files.push_back(dist_path.string());

        const auto alpha_path = dir / "alphas.csv";
        CsvWriter alpha_csv(alpha_path.string(),
                            {"schema", "oracle_alpha", "micro_alpha", "macro_alpha", "verdict"});
        for (const auto& text : cfg.gp_schemata) {
            const auto h = gp::GpSchema::parse(text, ps);
            const Rat o = oracle::oracle_alpha_gp(h, pop, cfg.gp_fitness, engine, ps);
            const Rat micro = gp::microscopic_alpha_gp(h, pop, cfg.gp_fitness, engine, ps);
            const Rat macro = gp::macroscopic_alpha_gp(h, pop, cfg.gp_fitness, engine, ps);
            const std::string verdict = (micro == o && macro == o) ? "equality" : "mismatch";
            if (verdict == "mismatch") ++artifacts.violations;
            alpha_csv.row({h.to_string(), rat_to_string(o), rat_to_string(micro),
                           rat_to_string(macro), verdict});
            ++artifacts.rows;
        }
        artifacts.files.push_back(alpha_path.string());
    }
    std::ostringstream summary;
    summary << "schema-forge oracle dump\nrows " << artifacts.rows << ", mismatches "
            << artifacts.violations << "\n";
    write_summary(dir, summary.str(), artifacts);
    return artifacts;
}

ArtifactSet run_census(const ExperimentConfig& cfg) {
    if (cfg.mode != ExperimentConfig::Mode::Ga)
        throw ConfigError("census: bitstring mode only");
    ArtifactSet artifacts;
    fs::create_directories(cfg.out_dir);
    const fs::path dir(cfg.out_dir);
    ga::Population pop = initial_ga_population(cfg);
    const auto census_path = dir / "census.csv";
    CsvWriter census(census_path.string(), {"schema", "order", "defining_length", "m", "f_H"});
    for (const auto& entry : ga::schema_census(pop, cfg.ga_fitness, cfg.census_max_order)) {
        const auto metrics =
            pop.string_length() >= 2 ? ga::schema_metrics(entry.schema) : ga::SchemaMetrics{};
        census.row({entry.schema.pattern(), std::to_string(metrics.order),
                    std::to_string(metrics.defining_length), std::to_string(entry.count),
                    rat_to_string(entry.mean_fitness)});
        ++artifacts.rows;
    }
    artifacts.files.push_back(census_path.string());
    std::ostringstream summary;
    summary << "schema-forge census\nrows " << artifacts.rows << "\n";
    write_summary(dir, summary.str(), artifacts);
    return artifacts;
}

}  // namespace schemaforge::harness
