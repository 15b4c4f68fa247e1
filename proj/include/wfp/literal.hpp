#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

namespace wfp {

/// Exact rational number. Real-valued literals such as 1e-6 are parsed into
/// this type so that threshold comparisons never go through binary floats.
class Rational {
 public:
  Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  /// Parses `[-]digits[.digits][(e|E)[+-]digits]`. Throws wfp::Error on
  /// malformed text or when the value does not fit in 64-bit terms.
  static Rational parse(std::string_view text);

  std::string str() const;

  friend bool operator==(const Rational&, const Rational&) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

/// Attribute value bound to a value node: bool | int | real | string.
using Literal = std::variant<bool, std::int64_t, Rational, std::string>;

/// Canonical text of a literal, as the DSL writes it.
std::string to_text(const Literal& v);

/// Name of the value type a literal naturally belongs to (Bool/Int/Real/String).
std::string_view type_name(const Literal& v);

}  // namespace wfp
