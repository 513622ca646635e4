#pragma once

// Exact arithmetic used by the oracle and every formula that claims
// equality rather than approximation. Floats never enter these types.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace schemaforge {

using BigInt = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline double to_double(const Rat& r) { return r.convert_to<double>(); }

inline Rat rat_pow(const Rat& base, unsigned exp) {
    Rat acc = 1;
    Rat b = base;
    while (exp > 0) {
        if (exp & 1u) acc *= b;
        b *= b;
        exp >>= 1u;
    }
    return acc;
}

inline BigInt binomial_coefficient(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    if (k > n - k) k = n - k;
    BigInt result = 1;
    for (std::uint64_t i = 0; i < k; ++i) {
        result *= n - i;
        result /= i + 1;  // exact: product of j consecutive integers is divisible by j!
    }
    return result;
}

/// Parses "3", "-3", "3/4" or a plain decimal like "0.125" into an exact rational.
/// Decimal strings convert exactly (base-10 digits over a power of ten), so a
/// config value of 0.1 becomes 1/10, not the nearest double.
inline Rat parse_rational(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("empty rational literal");
    auto slash = text.find('/');
    if (slash != std::string::npos) {
        BigInt num(text.substr(0, slash));
        BigInt den(text.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator in '" + text + "'");
        return Rat(num, den);
    }
    auto dot = text.find('.');
    if (dot == std::string::npos) return Rat(BigInt(text));
    std::string digits = text.substr(0, dot) + text.substr(dot + 1);
    bool negative = !digits.empty() && digits[0] == '-';
    if (digits == "-" || digits.empty()) throw std::invalid_argument("bad rational '" + text + "'");
    BigInt num(digits);
    BigInt den = 1;
    for (std::size_t i = dot + 1; i < text.size(); ++i) den *= 10;
    (void)negative;
    return Rat(num, den);
}

/// Exact text form, "num/den" with den omitted when 1. Round-trips through
/// parse_rational, which keeps CSV rows recomputable.
inline std::string rat_to_string(const Rat& r) {
    BigInt num = boost::multiprecision::numerator(r);
    BigInt den = boost::multiprecision::denominator(r);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

}  // namespace schemaforge
