#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace bifree {

using Rational = mpq_class;

/// Parses "p/q", an integer, or a terminating decimal such as "-0.75".
Rational parse_rational(std::string_view text);

/// Canonical "p/q" form ("p" when the denominator is 1).
std::string to_string(const Rational& value);

inline double to_double(const Rational& value) { return value.get_d(); }

}  // namespace bifree
