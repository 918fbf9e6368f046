#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>

namespace rsld {

/// Exact rational priorities. Equality and the ⊣ comparison must never go
/// through floating point, so priorities are big-integer fractions.
using Rational = boost::multiprecision::cpp_rational;

inline std::string to_string(const Rational& r) {
    if (denominator(r) == 1) return numerator(r).str();
    return numerator(r).str() + "/" + denominator(r).str();
}

/// Parses "n", "-n", "n/d" or an exact decimal like "12.5" (= 25/2).
std::optional<Rational> parse_rational(const std::string& text);

/// A rational strictly between the given bounds: the midpoint when both are
/// finite, bound-1 / bound+1 when one side is open, 1 when both are open.
Rational fresh_between(const std::optional<Rational>& low,
                       const std::optional<Rational>& high);

} // namespace rsld
