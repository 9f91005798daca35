#pragma once

#include <boost/rational.hpp>

#include <cstdint>
#include <string>
#include <string_view>

namespace tmas {

using Rational = boost::rational<std::int64_t>;

/// Parses "3", "-2", "0.125" or "1/8" exactly.
Rational parse_rational(std::string_view text);

/// Renders as "num/den"; integers render as "k/1".
std::string to_fraction_string(const Rational& r);

/// Exact decimal if the denominator has only factors 2 and 5, otherwise "num/den".
std::string to_decimal_string(const Rational& r);

double to_double(const Rational& r);

}  // namespace tmas
