#include "miblp/rational.hpp"

#include <cctype>
#include <cmath>

namespace miblp {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char ch : s) {
    if (!std::isdigit(static_cast<unsigned char>(ch))) return false;
  }
  return true;
}

bool parse_integer(std::string_view s, BigInt& out) {
  bool negative = false;
  if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  if (!all_digits(s)) return false;
  out = BigInt(std::string(s));
  if (negative) out = -out;
  return true;
}

BigInt pow10(long e) {
  BigInt r = 1;
  for (long i = 0; i < e; ++i) r *= 10;
  return r;
}

}  // namespace

bool parse_rational(std::string_view token, Rational& out) {
  if (token.empty()) return false;

  if (auto slash = token.find('/'); slash != std::string_view::npos) {
    BigInt num, den;
    if (!parse_integer(token.substr(0, slash), num)) return false;
    std::string_view den_text = token.substr(slash + 1);
    if (den_text.empty() || den_text.front() == '+' || den_text.front() == '-') return false;
    if (!parse_integer(den_text, den) || den == 0) return false;
    out = Rational(num, den);
    return true;
  }

  std::string_view mantissa = token;
  long exponent = 0;
  if (auto e = token.find_first_of("eE"); e != std::string_view::npos) {
    mantissa = token.substr(0, e);
    BigInt exp_value;
    std::string_view exp_text = token.substr(e + 1);
    if (!parse_integer(exp_text, exp_value)) return false;
    if (abs(exp_value) > 4000) return false;
    exponent = exp_value.convert_to<long>();
  }

  bool negative = false;
  if (!mantissa.empty() && (mantissa.front() == '+' || mantissa.front() == '-')) {
    negative = mantissa.front() == '-';
    mantissa.remove_prefix(1);
  }
  std::string_view int_part = mantissa;
  std::string_view frac_part;
  if (auto dot = mantissa.find('.'); dot != std::string_view::npos) {
    int_part = mantissa.substr(0, dot);
    frac_part = mantissa.substr(dot + 1);
  }
  if (int_part.empty() && frac_part.empty()) return false;
  if (!int_part.empty() && !all_digits(int_part)) return false;
  if (!frac_part.empty() && !all_digits(frac_part)) return false;

  std::string digits(int_part);
  digits.append(frac_part);
  BigInt num(digits.empty() ? std::string("0") : digits);
  long scale = static_cast<long>(frac_part.size()) - exponent;
  Rational value = scale >= 0 ? Rational(num, pow10(scale)) : Rational(num * pow10(-scale));
  out = negative ? Rational(-value) : value;
  return true;
}

std::string to_string(const Rational& value) {
  if (denominator(value) == 1) return numerator(value).str();
  return numerator(value).str() + "/" + denominator(value).str();
}

double to_double(const Rational& value) { return value.convert_to<double>(); }

std::vector<double> to_double(const RationalVector& values) {
  std::vector<double> out;
  out.reserve(values.size());
  for (const auto& v : values) out.push_back(to_double(v));
  return out;
}

bool is_integer(const Rational& value) { return denominator(value) == 1; }

Rational floor(const Rational& value) {
  BigInt q = numerator(value) / denominator(value);  // truncates toward zero
  if (value < 0 && Rational(q) != value) q -= 1;
  return Rational(q);
}

Rational ceil(const Rational& value) {
  BigInt q = numerator(value) / denominator(value);
  if (value > 0 && Rational(q) != value) q += 1;
  return Rational(q);
}

std::int64_t round_to_int(double value) { return static_cast<std::int64_t>(std::llround(value)); }

}  // namespace miblp
