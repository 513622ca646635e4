#include "schemaforge/bitstring_ga.hpp"

#include <algorithm>
#include <stdexcept>

namespace schemaforge::ga {

BitString::BitString(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    if (bits_.empty()) throw std::invalid_argument("BitString: length must be >= 1");
    for (auto b : bits_)
        if (b > 1) throw std::invalid_argument("BitString: alleles must be 0 or 1");
}

BitString BitString::from_string(const std::string& text) {
    std::vector<std::uint8_t> bits;
    bits.reserve(text.size());
    for (char c : text) {
        if (c != '0' && c != '1') throw std::invalid_argument("BitString: bad character in '" + text + "'");
        bits.push_back(static_cast<std::uint8_t>(c - '0'));
    }
    return BitString(std::move(bits));
}

void BitString::set_bit(std::size_t i, std::uint8_t v) {
    if (v > 1) throw std::invalid_argument("BitString: alleles must be 0 or 1");
    bits_.at(i) = v;
}

std::size_t BitString::count_ones() const {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::string BitString::to_string() const {
    std::string s(bits_.size(), '0');
    for (std::size_t i = 0; i < bits_.size(); ++i) s[i] = static_cast<char>('0' + bits_[i]);
    return s;
}

FitnessFunction FitnessFunction::one_max() {
    FitnessFunction f;
    f.name_ = "one-max";
    f.params_["offset"] = 1;
    return f;
}

FitnessFunction FitnessFunction::flat() {
    FitnessFunction f;
    f.name_ = "flat";
    return f;
}

FitnessFunction FitnessFunction::binary_trap(unsigned k) {
    if (k == 0) throw std::invalid_argument("binary-trap: k must be >= 1");
    FitnessFunction f;
    f.name_ = "binary-trap";
    f.params_["k"] = k;
    return f;
}

FitnessFunction FitnessFunction::royal_road(unsigned block) {
    if (block == 0) throw std::invalid_argument("royal-road: block must be >= 1");
    FitnessFunction f;
    f.name_ = "royal-road";
    f.params_["block"] = block;
    return f;
}

FitnessFunction FitnessFunction::user_table(std::map<std::string, Rat> table) {
    FitnessFunction f;
    f.name_ = "user-table";
    f.table_ = std::move(table);
    for (const auto& [key, value] : f.table_)
        if (value <= 0)
            throw std::domain_error("user-table: fitness for '" + key + "' must be positive");
    return f;
}

Rat FitnessFunction::operator()(const BitString& s) const {
    Rat result;
    if (name_ == "one-max") {
        result = Rat(s.count_ones()) + params_.at("offset");
    } else if (name_ == "flat") {
        result = 1;
    } else if (name_ == "binary-trap") {
        const auto k = static_cast<std::size_t>(params_.at("k").convert_to<unsigned>());
        if (s.length() % k != 0)
            throw std::domain_error("binary-trap: string length must be a multiple of k");
        result = 0;
        for (std::size_t start = 0; start < s.length(); start += k) {
            std::size_t ones = 0;
            for (std::size_t i = 0; i < k; ++i) ones += s.bit(start + i);
            result += (ones == 0) ? Rat(k + 1) : Rat(ones);
        }
    } else if (name_ == "royal-road") {
        const auto b = static_cast<std::size_t>(params_.at("block").convert_to<unsigned>());
        result = 1;
        for (std::size_t start = 0; start + b <= s.length(); start += b) {
            bool all_ones = true;
            for (std::size_t i = 0; i < b; ++i)
                if (s.bit(start + i) == 0) { all_ones = false; break; }
            if (all_ones) result += Rat(b);
        }
    } else if (name_ == "user-table") {
        auto it = table_.find(s.to_string());
        if (it == table_.end())
            throw std::domain_error("user-table: no entry for '" + s.to_string() + "'");
        result = it->second;
    } else {
        throw std::domain_error("unknown fitness function '" + name_ + "'");
    }
    if (result <= 0)
        throw std::domain_error("fitness must be strictly positive (got " + rat_to_string(result) +
                                " for '" + s.to_string() + "')");
    return result;
}

Rat evaluate_fitness(const BitString& s, const FitnessFunction& f) { return f(s); }

void GaConfig::validate() const {
    if (n < 2) throw std::invalid_argument("GaConfig: n must be >= 2");
    if (p_c < 0 || p_c > 1) throw std::invalid_argument("GaConfig: p_c must lie in [0,1]");
    if (p_m < 0 || p_m > 1) throw std::invalid_argument("GaConfig: p_m must lie in [0,1]");
    if (selection.kind == SelectionSpec::Kind::Tournament) {
        const auto& t = selection.tournament;
        if (t.size < 2) throw std::invalid_argument("GaConfig: tournament size must be >= 2");
        if (t.size > n) throw std::invalid_argument("GaConfig: tournament size must be <= n");
        if (t.bias < 0.5 || t.bias > 1.0)
            throw std::invalid_argument("GaConfig: tournament bias must lie in [0.5,1]");
    }
}

std::vector<Rat> selection_masses(const Population& pop, const FitnessFunction& f) {
    std::vector<Rat> values;
    values.reserve(pop.members.size());
    Rat total = 0;
    for (const auto& member : pop.members) {
        values.push_back(f(member));
        total += values.back();
    }
    if (total <= 0) throw std::domain_error("selection: total fitness is zero");
    for (auto& v : values) v /= total;
    return values;
}

namespace {

std::size_t proportional_pick(const std::vector<double>& cumulative, RandomStream& rng) {
    const double u = rng.uniform01() * cumulative.back();
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    if (it == cumulative.end()) --it;
    return static_cast<std::size_t>(it - cumulative.begin());
}

std::vector<double> cumulative_fitness(const Population& pop, const FitnessFunction& f) {
    std::vector<double> cumulative;
    cumulative.reserve(pop.members.size());
    double acc = 0.0;
    for (const auto& member : pop.members) {
        acc += to_double(f(member));
        cumulative.push_back(acc);
    }
    return cumulative;
}

std::size_t tournament_pick(const Population& pop, const std::vector<Rat>& fitness,
                            const TournamentSpec& spec, RandomStream& rng) {
    // Single-elimination over contenders drawn with replacement; each pairing
    // goes to the fitter with probability q, ties to the earlier-drawn.
    std::vector<std::size_t> round;
    round.reserve(spec.size);
    for (unsigned i = 0; i < spec.size; ++i)
        round.push_back(static_cast<std::size_t>(rng.uniform_index(pop.members.size())));
    while (round.size() > 1) {
        std::vector<std::size_t> next;
        next.reserve(round.size() / 2 + 1);
        for (std::size_t i = 0; i + 1 < round.size(); i += 2) {
            const std::size_t a = round[i];
            const std::size_t b = round[i + 1];
            std::size_t fitter = a;
            std::size_t weaker = b;
            if (fitness[b] > fitness[a]) { fitter = b; weaker = a; }
            next.push_back(rng.bernoulli(spec.bias) ? fitter : weaker);
        }
        if (round.size() % 2 == 1) next.push_back(round.back());  // bye
        round.swap(next);
    }
    return round.front();
}

}  // namespace

BitString select_parent(const Population& pop, const FitnessFunction& f, const GaConfig& cfg,
                        RandomStream& rng) {
    if (pop.members.empty()) throw std::invalid_argument("select_parent: empty population");
    if (cfg.selection.kind == SelectionSpec::Kind::Proportional) {
        auto cumulative = cumulative_fitness(pop, f);
        if (cumulative.back() <= 0.0) throw std::domain_error("selection: total fitness is zero");
        return pop.members[proportional_pick(cumulative, rng)];
    }
    if (cfg.selection.tournament.size > pop.members.size())
        throw std::invalid_argument("select_parent: tournament size exceeds population size");
    std::vector<Rat> fitness;
    fitness.reserve(pop.members.size());
    for (const auto& member : pop.members) fitness.push_back(f(member));
    return pop.members[tournament_pick(pop, fitness, cfg.selection.tournament, rng)];
}

std::pair<BitString, BitString> one_point_crossover(const BitString& a, const BitString& b,
                                                    std::size_t cut) {
    const std::size_t l = a.length();
    if (b.length() != l) throw std::invalid_argument("crossover: parents differ in length");
    if (l < 2) throw std::invalid_argument("crossover: length must be >= 2");
    if (cut > l - 2) throw std::invalid_argument("crossover: cut out of range");
    BitString first = a;
    BitString second = b;
    for (std::size_t i = cut + 1; i < l; ++i) {
        first.set_bit(i, b.bit(i));
        second.set_bit(i, a.bit(i));
    }
    return {first, second};
}

BitString mutate(const BitString& s, const GaConfig& cfg, RandomStream& rng) {
    const double p = to_double(cfg.p_m);
    BitString out = s;
    if (cfg.mutation_mode == MutationMode::PerBit) {
        for (std::size_t i = 0; i < out.length(); ++i)
            if (rng.bernoulli(p)) out.set_bit(i, static_cast<std::uint8_t>(1 - out.bit(i)));
    } else {
        if (rng.bernoulli(p)) {
            const std::size_t i = static_cast<std::size_t>(rng.uniform_index(out.length()));
            out.set_bit(i, static_cast<std::uint8_t>(1 - out.bit(i)));
        }
    }
    return out;
}

Population next_generation(const Population& pop, const FitnessFunction& f, const GaConfig& cfg) {
    cfg.validate();
    if (pop.size() != cfg.n) throw std::invalid_argument("next_generation: population size != cfg.n");
    const std::size_t l = pop.string_length();
    const double pc = to_double(cfg.p_c);

    // Fitness is evaluated once per member, not once per draw.
    const bool proportional = cfg.selection.kind == SelectionSpec::Kind::Proportional;
    std::vector<double> cumulative;
    std::vector<Rat> fitness;
    if (proportional) {
        cumulative = cumulative_fitness(pop, f);
        if (cumulative.back() <= 0.0) throw std::domain_error("selection: total fitness is zero");
    } else {
        if (cfg.selection.tournament.size > pop.members.size())
            throw std::invalid_argument("next_generation: tournament size exceeds population size");
        fitness.reserve(pop.members.size());
        for (const auto& member : pop.members) fitness.push_back(f(member));
    }
    auto pick = [&](RandomStream& rng) -> const BitString& {
        return proportional ? pop.members[proportional_pick(cumulative, rng)]
                            : pop.members[tournament_pick(pop, fitness, cfg.selection.tournament, rng)];
    };

    Population next;
    next.generation = pop.generation + 1;
    next.members.reserve(cfg.n);
    for (unsigned j = 0; j < cfg.n; ++j) {
        RandomStream rng(substream_seed(cfg.seed, pop.generation, j));
        BitString child;
        if (l >= 2 && rng.bernoulli(pc)) {
            const BitString& a = pick(rng);
            const BitString& b = pick(rng);
            const std::size_t cut = static_cast<std::size_t>(rng.uniform_index(l - 1));
            child = one_point_crossover(a, b, cut).first;
        } else {
            child = pick(rng);
        }
        next.members.push_back(mutate(child, cfg, rng));
    }
    return next;
}

}  // namespace schemaforge::ga
