#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

namespace ozawa {

/// Exact rational used for kernel values and tolerances.
using Rational = mpq_class;

/// Builds num/den in canonical (reduced, positive denominator) form.
Rational make_rational(std::uint64_t num, std::uint64_t den);

/// Always "p/q", integers included ("1/1", "0/1").
std::string to_string(const Rational& q);

/// Accepts "p/q", "p", or a terminating decimal like "0.1". Throws std::invalid_argument.
Rational parse_rational(std::string_view text);

}  // namespace ozawa
