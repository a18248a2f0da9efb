#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace miblp {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;
using RationalVector = std::vector<Rational>;
using RationalMatrix = std::vector<RationalVector>;

/// Parses "p/q", integers and decimals with an optional exponent ("-1.25e2").
/// Returns false on any malformed token; `out` is untouched in that case.
bool parse_rational(std::string_view token, Rational& out);

/// Canonical text form: "p" for integers, "p/q" otherwise.
std::string to_string(const Rational& value);

double to_double(const Rational& value);
std::vector<double> to_double(const RationalVector& values);

bool is_integer(const Rational& value);
Rational floor(const Rational& value);
Rational ceil(const Rational& value);

/// Exact conversion of a double that is known to be an integer (or close to
/// one within 1e-6) to std::int64_t.
std::int64_t round_to_int(double value);

}  // namespace miblp
