#include "schemaforge/config.hpp"

#include <json.hpp>

#include <fstream>
#include <set>

namespace schemaforge::harness {

namespace {

using nlohmann::json;

void require_known_fields(const json& obj, const std::set<std::string>& known,
                          const std::string& path) {
    for (const auto& [key, value] : obj.items())
        if (!known.count(key))
            throw ConfigError("config: unknown field '" + path + key + "'");
}

Rat rational_field(const json& value, const std::string& path) {
    if (value.is_string()) return parse_rational(value.get<std::string>());
    if (value.is_number_integer()) return Rat(value.get<long long>());
    if (value.is_number_float()) {
        // Doubles convert exactly (dyadic); non-dyadic rationals such as
        // 0.1 should be written as strings to stay exact.
        const double d = value.get<double>();
        Rat r(d);
        return r;
    }
    throw ConfigError("config: '" + path + "' must be a number or a rational string");
}

SelectionSpec selection_field(const json& obj, const std::string& path) {
    require_known_fields(obj, {"kind", "size", "bias"}, path);
    SelectionSpec spec;
    const std::string kind = obj.at("kind").get<std::string>();
    if (kind == "proportional") {
        spec.kind = SelectionSpec::Kind::Proportional;
    } else if (kind == "tournament") {
        spec.kind = SelectionSpec::Kind::Tournament;
        spec.tournament.size = obj.value("size", 2u);
        spec.tournament.bias = obj.value("bias", 1.0);
    } else {
        throw ConfigError("config: '" + path + "kind' must be proportional or tournament");
    }
    return spec;
}

ga::FitnessFunction ga_fitness_field(const json& obj, const std::string& path) {
    require_known_fields(obj, {"name", "k", "block", "table"}, path);
    const std::string name = obj.at("name").get<std::string>();
    if (name == "one-max") return ga::FitnessFunction::one_max();
    if (name == "flat") return ga::FitnessFunction::flat();
    if (name == "binary-trap") return ga::FitnessFunction::binary_trap(obj.at("k").get<unsigned>());
    if (name == "royal-road") return ga::FitnessFunction::royal_road(obj.at("block").get<unsigned>());
    if (name == "user-table") {
        std::map<std::string, Rat> table;
        for (const auto& [key, value] : obj.at("table").items())
            table[key] = rational_field(value, path + "table." + key);
        return ga::FitnessFunction::user_table(std::move(table));
    }
    throw ConfigError("config: unknown fitness '" + name + "' at '" + path + "name'");
}

gp::GpFitnessFunction gp_fitness_field(const json& obj, const std::string& path) {
    require_known_fields(obj, {"name", "symbol", "table"}, path);
    const std::string name = obj.at("name").get<std::string>();
    if (name == "flat") return gp::GpFitnessFunction::flat();
    if (name == "node-count") return gp::GpFitnessFunction::node_count();
    if (name == "depth") return gp::GpFitnessFunction::depth();
    if (name == "symbol-count")
        return gp::GpFitnessFunction::symbol_count(obj.at("symbol").get<std::string>());
    if (name == "user-table") {
        std::map<std::string, Rat> table;
        for (const auto& [key, value] : obj.at("table").items())
            table[key] = rational_field(value, path + "table." + key);
        return gp::GpFitnessFunction::user_table(std::move(table));
    }
    throw ConfigError("config: unknown tree fitness '" + name + "' at '" + path + "name'");
}

gp::PrimitiveSet primitives_field(const json& obj, const std::string& path) {
    require_known_fields(obj, {"functions", "terminals"}, path);
    std::vector<gp::Primitive> functions;
    for (const auto& f : obj.value("functions", json::array())) {
        require_known_fields(f, {"name", "arity"}, path + "functions.");
        functions.push_back({f.at("name").get<std::string>(), f.at("arity").get<unsigned>()});
    }
    std::vector<std::string> terminals;
    for (const auto& t : obj.at("terminals")) terminals.push_back(t.get<std::string>());
    return gp::PrimitiveSet(std::move(functions), std::move(terminals));
}

}  // namespace

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    json root;
    try {
        root = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config: " + std::string(e.what()));
    }
    try {
        require_known_fields(root,
                             {"mode", "seed", "generations", "trials", "threads", "oracle",
                              "out_dir", "census_max_order", "engine", "fitness", "population",
                              "init_length", "init_max_depth", "primitives", "schemata",
                              "theorems"},
                             "");
        ExperimentConfig cfg;
        const std::string mode = root.at("mode").get<std::string>();
        if (mode == "ga") cfg.mode = ExperimentConfig::Mode::Ga;
        else if (mode == "gp") cfg.mode = ExperimentConfig::Mode::Gp;
        else throw ConfigError("config: 'mode' must be ga or gp");

        cfg.seed = root.value("seed", 0ull);
        cfg.generations = root.value("generations", 1u);
        cfg.trials = root.value("trials", 1u);
        if (cfg.trials < 1) throw ConfigError("config: 'trials' must be >= 1");
        cfg.threads = root.value("threads", 0u);
        cfg.oracle = root.value("oracle", true);
        cfg.out_dir = root.value("out_dir", std::string("results"));
        cfg.census_max_order = root.value("census_max_order", 2u);

        const json engine = root.value("engine", json::object());
        if (cfg.mode == ExperimentConfig::Mode::Ga) {
            require_known_fields(engine, {"n", "p_c", "p_m", "mutation_mode", "selection"},
                                 "engine.");
            cfg.ga_engine.n = engine.value("n", 2u);
            if (engine.contains("p_c")) cfg.ga_engine.p_c = rational_field(engine["p_c"], "engine.p_c");
            if (engine.contains("p_m")) cfg.ga_engine.p_m = rational_field(engine["p_m"], "engine.p_m");
            const std::string mm = engine.value("mutation_mode", std::string("per-bit"));
            if (mm == "per-bit") cfg.ga_engine.mutation_mode = ga::MutationMode::PerBit;
            else if (mm == "single-bit") cfg.ga_engine.mutation_mode = ga::MutationMode::SingleBit;
            else throw ConfigError("config: 'engine.mutation_mode' must be per-bit or single-bit");
            if (engine.contains("selection"))
                cfg.ga_engine.selection = selection_field(engine["selection"], "engine.selection.");
            cfg.ga_engine.seed = cfg.seed;
            cfg.ga_engine.validate();

            if (root.contains("fitness")) cfg.ga_fitness = ga_fitness_field(root["fitness"], "fitness.");
            for (const auto& s : root.value("population", json::array()))
                cfg.ga_population.push_back(s.get<std::string>());
            cfg.init_length = root.value("init_length", 8u);
            if (cfg.init_length < 1) throw ConfigError("config: 'init_length' must be >= 1");
            for (const auto& s : root.value("schemata", json::array()))
                cfg.ga_schemata.push_back(ga::GaSchema(s.get<std::string>()));
        } else {
            require_known_fields(engine, {"n", "p_c", "p_m", "crossover", "selection"}, "engine.");
            cfg.gp_engine.n = engine.value("n", 2u);
            if (engine.contains("p_c")) cfg.gp_engine.p_c = rational_field(engine["p_c"], "engine.p_c");
            if (engine.contains("p_m")) cfg.gp_engine.p_m = rational_field(engine["p_m"], "engine.p_m");
            const std::string xo = engine.value("crossover", std::string("one-point"));
            if (xo == "one-point") cfg.gp_engine.crossover = gp::GpConfig::Crossover::OnePoint;
            else if (xo == "uniform") cfg.gp_engine.crossover = gp::GpConfig::Crossover::Uniform;
            else throw ConfigError("config: 'engine.crossover' must be one-point or uniform");
            if (engine.contains("selection"))
                cfg.gp_engine.selection = selection_field(engine["selection"], "engine.selection.");
            cfg.gp_engine.seed = cfg.seed;
            cfg.gp_engine.validate();

            if (!root.contains("primitives"))
                throw ConfigError("config: gp mode requires 'primitives'");
            cfg.primitives = primitives_field(root["primitives"], "primitives.");
            if (root.contains("fitness")) cfg.gp_fitness = gp_fitness_field(root["fitness"], "fitness.");
            for (const auto& s : root.value("population", json::array()))
                cfg.gp_population.push_back(s.get<std::string>());
            cfg.init_max_depth = root.value("init_max_depth", 3u);
            for (const auto& s : root.value("schemata", json::array()))
                cfg.gp_schemata.push_back(s.get<std::string>());
        }
        for (const auto& t : root.value("theorems", json::array()))
            cfg.theorems.push_back(t.get<std::string>());
        return cfg;
    } catch (const ConfigError&) {
        throw;
    } catch (const json::exception& e) {
        throw ConfigError("config: " + std::string(e.what()));
    } catch (const std::exception& e) {
        throw ConfigError("config: " + std::string(e.what()));
    }
}

}  // namespace schemaforge::harness
