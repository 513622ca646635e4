#include "schemaforge/theorems_ga.hpp"

#include "schemaforge/errors.hpp"

#include <atomic>
#include <cmath>
#include <iostream>
#include <limits>

namespace schemaforge::ga {

namespace {

std::atomic<unsigned> clamp_events{0};

double clamp01_logged(double value, const char* where) {
    if (value >= 0.0 && value <= 1.0) return value;
    if (clamp_events.fetch_add(1) < 8)
        std::cerr << "[schema-forge] clamped " << where << " value " << value << " into [0,1]\n";
    return value < 0.0 ? 0.0 : 1.0;
}

}  // namespace

Rat selection_probability(const GaSchema& h, const Population& pop, const FitnessFunction& f) {
    const auto counted = count_and_fitness(h, pop, f);
    if (counted.count == 0) return 0;
    const Rat fbar = population_mean_fitness(pop, f);
    return Rat(counted.count) * counted.mean_fitness / (Rat(pop.size()) * fbar);
}

Rat holland_bound(const GaSchema& h, const Population& pop, const FitnessFunction& f,
                  const GaConfig& cfg) {
    if (cfg.mutation_mode != MutationMode::PerBit)
        throw std::invalid_argument("holland_bound: per-bit mutation mode required");
    const auto metrics = schema_metrics(h);  // throws for l < 2
    const auto counted = count_and_fitness(h, pop, f);
    if (counted.count == 0) return 0;
    const Rat fbar = population_mean_fitness(pop, f);
    Rat bound = counted.mean_fitness / fbar * Rat(counted.count) *
                (1 - cfg.p_c * metrics.fragility) * rat_pow(1 - cfg.p_m, metrics.order);
    return bound < 0 ? Rat(0) : bound;
}

TransmissionEstimate TransmissionEstimate::from_alpha(Rat alpha, unsigned n, Provenance source) {
    TransmissionEstimate est;
    est.alpha = alpha;
    est.expected_count = Rat(n) * alpha;
    est.variance = Rat(n) * alpha * (1 - alpha);
    est.provenance = source;
    est.alpha_alt_convention = alpha;
    return est;
}

TransmissionEstimate exact_alpha(const GaSchema& h, const Population& pop,
                                 const FitnessFunction& f, const GaConfig& cfg) {
    if (cfg.p_m != 0)
        throw std::invalid_argument("exact_alpha: closed form is stated for p_m = 0");
    if (cfg.selection.kind != SelectionSpec::Kind::Proportional)
        throw std::invalid_argument("exact_alpha: proportional selection required");
    const std::size_t l = h.length();
    const Rat p_h = selection_probability(h, pop, f);

    if (l < 2 || cfg.p_c == 0) {
        auto est = TransmissionEstimate::from_alpha(p_h, static_cast<unsigned>(pop.size()),
                                                    Provenance::Formula);
        return est;
    }
    Rat cut_sum = 0;  // cuts after index 0..l-2
    for (std::size_t i = 0; i + 1 < l; ++i)
        cut_sum += selection_probability(truncate(h, i, TruncateSide::Left), pop, f) *
                   selection_probability(truncate(h, i, TruncateSide::Right), pop, f);

    const Rat alpha = (1 - cfg.p_c) * p_h + cfg.p_c / Rat(l - 1) * cut_sum;
    auto est = TransmissionEstimate::from_alpha(alpha, static_cast<unsigned>(pop.size()),
                                                Provenance::Formula);
    // The l-term normalization adds the i = l-1 term, whose left truncation
    // is H itself and whose right truncation is the all-* schema.
    est.alpha_alt_convention = (1 - cfg.p_c) * p_h + cfg.p_c / Rat(l) * (cut_sum + p_h);
    return est;
}

AdjustedEffectiveFitness adjusted_and_effective_fitness(const GaSchema& h, const Population& pop,
                                                        const FitnessFunction& f,
                                                        const GaConfig& cfg) {
    const auto metrics = schema_metrics(h);
    const auto counted = count_and_fitness(h, pop, f);
    AdjustedEffectiveFitness out;
    out.adjusted = counted.mean_fitness *
                   (1 - cfg.p_c * metrics.fragility - cfg.p_m * Rat(metrics.order));
    const Rat p_h = selection_probability(h, pop, f);
    if (p_h == 0) return out;  // f_e undefined without selection mass

    GaConfig crossover_only = cfg;
    crossover_only.p_m = 0;
    const Rat alpha = exact_alpha(h, pop, f, crossover_only).alpha;
    out.effective = alpha / p_h * counted.mean_fitness;

    // Cut-sum form over B(H), the cuts strictly between the first and last
    // fixed positions; cuts outside B(H) transmit H unconditionally.
    std::size_t first = h.length();
    std::size_t last = 0;
    for (std::size_t i = 0; i < h.length(); ++i) {
        if (!h.fixed(i)) continue;
        if (first == h.length()) first = i;
        last = i;
    }
    Rat defect = 0;
    if (metrics.order >= 2) {
        for (std::size_t i = first; i < last; ++i) {
            const Rat split =
                selection_probability(truncate(h, i, TruncateSide::Left), pop, f) *
                selection_probability(truncate(h, i, TruncateSide::Right), pop, f);
            defect += 1 - split / p_h;
        }
    }
    out.effective_sum_form =
        counted.mean_fitness * (1 - cfg.p_c / Rat(h.length() - 1) * defect);
    return out;
}

namespace {

void enumerate_strings(std::size_t l, std::vector<BitString>& out) {
    out.reserve(std::size_t{1} << l);
    for (std::uint64_t v = 0; v < (std::uint64_t{1} << l); ++v) {
        std::vector<std::uint8_t> bits(l);
        for (std::size_t i = 0; i < l; ++i) bits[i] = static_cast<std::uint8_t>((v >> (l - 1 - i)) & 1);
        out.push_back(BitString(std::move(bits)));
    }
}

void enumerate_schemata(std::size_t l, unsigned max_order, std::string& prefix,
                        unsigned used, std::vector<GaSchema>& out) {
    if (prefix.size() == l) {
        out.push_back(GaSchema(prefix));
        return;
    }
    prefix.push_back(kWildcard);
    enumerate_schemata(l, max_order, prefix, used, out);
    prefix.pop_back();
    if (used < max_order) {
        for (char c : {'0', '1'}) {
            prefix.push_back(c);
            enumerate_schemata(l, max_order, prefix, used + 1, out);
            prefix.pop_back();
        }
    }
}

}  // namespace

DeceptionReport deception_report(const FitnessFunction& f, const GaConfig& cfg, std::size_t l,
                                 DeceptionScope scope, unsigned max_order) {
    if (l < 2) throw std::invalid_argument("deception_report: l must be >= 2");
    if (l > 16) throw CapError("deception_report: 2^l strings exceed the enumeration cap");
    BigInt scope_size = 0;
    if (scope == DeceptionScope::Schemata) {
        for (unsigned o = 0; o <= std::min<unsigned>(max_order, static_cast<unsigned>(l)); ++o)
            scope_size += binomial_coefficient(l, o) * (BigInt(1) << o);
        if (scope_size > (BigInt(1) << 20))
            throw CapError("deception_report: schema scope too large; lower max_order");
    }

    Population uniform;
    enumerate_strings(l, uniform.members);
    const unsigned n = static_cast<unsigned>(uniform.size());

    std::vector<GaSchema> scope_schemata;
    if (scope == DeceptionScope::Strings) {
        for (const auto& s : uniform.members) scope_schemata.push_back(GaSchema::from_string(s));
    } else {
        std::string prefix;
        enumerate_schemata(l, max_order, prefix, 0, scope_schemata);
    }

    DeceptionReport report;
    report.scope = scope;
    std::optional<Rat> best_f, best_fa;
    for (const auto& h : scope_schemata) {
        const auto counted = count_and_fitness(h, uniform, f);
        const auto adjusted = adjusted_and_effective_fitness(h, uniform, f, cfg).adjusted;
        if (!best_f || counted.mean_fitness > *best_f) {
            best_f = counted.mean_fitness;
            report.argmax_f = h.pattern();
        }
        if (!best_fa || adjusted > *best_fa) {
            best_fa = adjusted;
            report.argmax_f_a = h.pattern();
        }
        const Rat p_h = selection_probability(h, uniform, f);
        for (std::size_t i = 0; i + 1 < l; ++i) {
            const Rat split = selection_probability(truncate(h, i, TruncateSide::Left), uniform, f) *
                              selection_probability(truncate(h, i, TruncateSide::Right), uniform, f);
            if (split < p_h) report.channels.push_back({h, i, split, p_h});
        }
    }
    (void)n;
    report.deceptive = report.argmax_f != report.argmax_f_a;
    return report;
}

Rat CountDistribution::tail(unsigned x) const {
    Rat sum = 0;
    for (std::size_t k = x; k < pmf.size(); ++k) sum += pmf[k];
    return sum;
}

CountDistribution next_count_distribution(const Rat& alpha, unsigned n) {
    if (alpha < 0 || alpha > 1)
        throw std::invalid_argument("next_count_distribution: alpha must lie in [0,1]");
    CountDistribution out;
    out.pmf.resize(n + 1);
    for (unsigned k = 0; k <= n; ++k)
        out.pmf[k] = Rat(binomial_coefficient(n, k)) * rat_pow(alpha, k) * rat_pow(1 - alpha, n - k);
    out.extinction = rat_pow(1 - alpha, n);
    if (alpha == 1)
        out.signal_to_noise = std::numeric_limits<double>::infinity();
    else
        out.signal_to_noise = std::sqrt(static_cast<double>(n)) *
                              std::sqrt(to_double(alpha) / (1.0 - to_double(alpha)));
    out.survival_likely = alpha * Rat(n) > 4;
    return out;
}

ChebyshevBounds chebychev_bounds(double alpha, unsigned n, double k) {
    if (k <= 0) throw std::invalid_argument("chebychev_bounds: k must be > 0");
    alpha = clamp01_logged(alpha, "chebychev alpha");
    ChebyshevBounds out;
    const double mean = n * alpha;
    const double half = k * std::sqrt(n * alpha * (1.0 - alpha));
    out.lower = mean - half;
    out.upper = mean + half;
    out.one_sided_lower = mean - half;
    out.confidence = 1.0 - 1.0 / (k * k);
    return out;
}

double alpha_tilde(double k, double x, double n) {
    if (x < 0 || x > n) throw std::invalid_argument("alpha_tilde: x must lie in [0,n]");
    if (k < 0) throw std::invalid_argument("alpha_tilde: k must be >= 0");
    if (k == 0) return x / n;  // the formula reduces to x/n identically
    const double value =
        (n * (k * k + 2.0 * x) + k * std::sqrt(n * n * k * k + 4.0 * n * x * (n - x))) /
        (2.0 * n * (k * k + n));
    return clamp01_logged(value, "alpha_tilde");
}

double recursive_conditional_bound(double prob_l, double prob_r, double k) {
    if (k <= 0) throw std::invalid_argument("recursive_conditional_bound: k must be > 0");
    const double bound = (1.0 - 1.0 / (k * k)) * (prob_l + prob_r - 1.0);
    return bound < 0.0 ? 0.0 : (bound > 1.0 ? 1.0 : bound);
}

bool mu_event_holds(double m_l, double m_r, double m_h, double k, unsigned n, unsigned l,
                    double f_l, double f_r, double fbar) {
    if (f_l <= 0 || f_r <= 0 || fbar <= 0)
        throw std::invalid_argument("mu_event_holds: fitness values must be positive");
    const double threshold = alpha_tilde(k, m_h, static_cast<double>(n)) * (l - 1.0) *
                             static_cast<double>(n) * static_cast<double>(n) * fbar * fbar /
                             (f_l * f_r);
    return m_l * m_r > threshold;
}

}  // namespace schemaforge::ga
