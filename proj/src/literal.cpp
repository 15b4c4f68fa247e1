#include "wfp/literal.hpp"

#include <cctype>
#include <numeric>

#include "wfp/error.hpp"

namespace wfp {

namespace {

using i128 = __int128;

std::int64_t checked(i128 v) {
  if (v > INT64_MAX || v < INT64_MIN) throw Error("literal out of range");
  return static_cast<std::int64_t>(v);
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw Error("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
  num_ = g ? num / g : 0;
  den_ = g ? den / g : 1;
}

Rational Rational::parse(std::string_view text) {
  std::size_t i = 0;
  bool negative = false;
  if (i < text.size() && (text[i] == '-' || text[i] == '+')) negative = text[i++] == '-';
  i128 mantissa = 0;
  int scale = 0;
  bool digits = false;
  auto push = [&](char c) {
    mantissa = mantissa * 10 + (c - '0');
    if (mantissa > i128(INT64_MAX)) throw Error("literal out of range: " + std::string(text));
    digits = true;
  };
  while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) push(text[i++]);
  if (i < text.size() && text[i] == '.') {
    ++i;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      push(text[i++]);
      --scale;
    }
  }
  if (!digits) throw Error("malformed number: " + std::string(text));
  if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
    ++i;
    bool eneg = false;
    if (i < text.size() && (text[i] == '-' || text[i] == '+')) eneg = text[i++] == '-';
    int exp = 0;
    bool edigits = false;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      exp = exp * 10 + (text[i++] - '0');
      edigits = true;
      if (exp > 40) throw Error("exponent out of range: " + std::string(text));
    }
    if (!edigits) throw Error("malformed exponent: " + std::string(text));
    scale += eneg ? -exp : exp;
  }
  if (i != text.size()) throw Error("malformed number: " + std::string(text));
  i128 num = negative ? -mantissa : mantissa;
  i128 den = 1;
  for (; scale > 0; --scale) num *= 10;
  for (; scale < 0; ++scale) den *= 10;
  return Rational(checked(num), checked(den));
}

std::string Rational::str() const {
  if (den_ == 1) return std::to_string(num_) + ".0";
  // Denominators from decimal literals are of the form 2^a 5^b.
  std::int64_t d = den_;
  int twos = 0, fives = 0;
  while (d % 2 == 0) { d /= 2; ++twos; }
  while (d % 5 == 0) { d /= 5; ++fives; }
  if (d != 1) return std::to_string(num_) + "/" + std::to_string(den_);
  const int k = std::max(twos, fives);
  i128 m = num_;
  for (int j = twos; j < k; ++j) m *= 2;
  for (int j = fives; j < k; ++j) m *= 5;
  const bool neg = m < 0;
  if (neg) m = -m;
  std::string digits;
  for (i128 t = m; t > 0; t /= 10) digits.insert(digits.begin(), char('0' + int(t % 10)));
  if (k <= 4) {
    if (static_cast<int>(digits.size()) <= k) digits.insert(0, std::size_t(k - digits.size() + 1), '0');
    digits.insert(digits.size() - k, ".");
    return (neg ? "-" : "") + digits;
  }
  return (neg ? "-" : "") + digits + "e-" + std::to_string(k);
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  const i128 l = i128(a.num_) * b.den_;
  const i128 r = i128(b.num_) * a.den_;
  if (l < r) return std::strong_ordering::less;
  if (l > r) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::string to_text(const Literal& v) {
  struct {
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(const Rational& r) const { return r.str(); }
    std::string operator()(const std::string& s) const {
      std::string out = "\"";
      for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
      }
      return out + "\"";
    }
  } visitor;
  return std::visit(visitor, v);
}

std::string_view type_name(const Literal& v) {
  switch (v.index()) {
    case 0: return "Bool";
    case 1: return "Int";
    case 2: return "Real";
    default: return "String";
  }
}

void ValidationReport::add(std::string code, std::string message, std::vector<std::string> witnesses) {
  violations.push_back({std::move(code), std::move(message), std::move(witnesses)});
}

void ValidationReport::append(const ValidationReport& other) {
  violations.insert(violations.end(), other.violations.begin(), other.violations.end());
}

bool ValidationReport::mentions(const std::string& witness) const {
  for (const auto& v : violations)
    for (const auto& w : v.witnesses)
      if (w == witness) return true;
  return false;
}

}  // namespace wfp
