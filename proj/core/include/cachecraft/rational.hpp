#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace cachecraft {

__extension__ using WideInt = __int128;

/// Exact rational number, always in lowest terms with a positive denominator.
///
/// Values whose numerator and denominator fit in a signed 64-bit word are kept
/// inline and use 128-bit intermediates; anything larger spills to a GMP
/// rational. Instances are immutable values: the spilled representation is
/// shared and never mutated after construction, so copies are cheap and safe to
/// hand across threads.
class Rational {
 public:
  Rational() = default;
  Rational(std::int64_t value);  // NOLINT(google-explicit-constructor)
  Rational(int value) : Rational(static_cast<std::int64_t>(value)) {}  // NOLINT
  Rational(std::int64_t numerator, std::int64_t denominator);
  explicit Rational(const mpq_class& value);

  /// Accepts "p", "-p", "p/q" and finite decimals such as "0.95" or "-1.5".
  static Rational parse(std::string_view text);

  bool is_zero() const { return !big_ && num_ == 0; }
  bool is_integer() const;
  int sign() const;

  /// True when both parts fit in int64 (always the inline representation).
  bool is_small() const { return !big_; }
  std::int64_t small_numerator() const;
  std::int64_t small_denominator() const;

  mpq_class to_mpq() const;
  mpz_class numerator() const;
  mpz_class denominator() const;
  double to_double() const;

  /// Canonical "p/q", or "p" when q = 1.
  std::string str() const;
  /// Fixed-point rendering rounded half away from zero, e.g. decimal(4) of 25/6 is "4.1667".
  std::string decimal(int digits) const;

  Rational abs() const { return sign() < 0 ? -*this : *this; }
  Rational reciprocal() const;

  Rational operator-() const;
  Rational& operator+=(const Rational& rhs);
  Rational& operator-=(const Rational& rhs);
  Rational& operator*=(const Rational& rhs);
  Rational& operator/=(const Rational& rhs);

  friend Rational operator+(const Rational& lhs, const Rational& rhs);
  friend Rational operator-(const Rational& lhs, const Rational& rhs);
  friend Rational operator*(const Rational& lhs, const Rational& rhs);
  friend Rational operator/(const Rational& lhs, const Rational& rhs);

  friend bool operator==(const Rational& lhs, const Rational& rhs);
  friend std::strong_ordering operator<=>(const Rational& lhs, const Rational& rhs);

 private:
  static Rational from_wide(WideInt numerator, WideInt denominator);
  static Rational from_mpq(mpq_class value);
  static Rational add_small(std::int64_t an, std::int64_t ad, std::int64_t bn, std::int64_t bd);

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
  std::shared_ptr<const mpq_class> big_;
};

std::ostream& operator<<(std::ostream& os, const Rational& value);

inline const Rational& min(const Rational& a, const Rational& b) { return b < a ? b : a; }
inline const Rational& max(const Rational& a, const Rational& b) { return a < b ? b : a; }

/// Positive part (x)^+.
inline Rational positive_part(const Rational& x) { return x.sign() > 0 ? x : Rational(0); }

}  // namespace cachecraft
