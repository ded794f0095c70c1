#include "cachecraft/rational.hpp"

#include <cctype>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <ostream>

#include "cachecraft/errors.hpp"

namespace cachecraft {
namespace {

using i128 = WideInt;
__extension__ using u128 = unsigned __int128;

constexpr std::int64_t kMax = std::numeric_limits<std::int64_t>::max();

bool fits(i128 x) { return x >= -static_cast<i128>(kMax) && x <= static_cast<i128>(kMax); }

std::uint64_t abs64(std::int64_t x) {
  return x < 0 ? static_cast<std::uint64_t>(-(x + 1)) + 1 : static_cast<std::uint64_t>(x);
}

u128 gcd128(u128 a, u128 b) {
  while (b != 0) {
    u128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

mpz_class to_mpz(i128 x) {
  bool negative = x < 0;
  u128 magnitude = negative ? static_cast<u128>(-(x + 1)) + 1 : static_cast<u128>(x);
  mpz_class hi(static_cast<unsigned long>(static_cast<std::uint64_t>(magnitude >> 64)));
  mpz_class lo(static_cast<unsigned long>(static_cast<std::uint64_t>(magnitude)));
  mpz_class result = (hi << 64) + lo;
  if (negative) result = -result;
  return result;
}

bool half_width(std::int64_t x) { return x < (std::int64_t{1} << 31) && x > -(std::int64_t{1} << 31); }

bool is_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

Rational::Rational(std::int64_t value) {
  if (value == std::numeric_limits<std::int64_t>::min()) {
    big_ = std::make_shared<const mpq_class>(to_mpz(value));
  } else {
    num_ = value;
  }
}

Rational::Rational(std::int64_t numerator, std::int64_t denominator) {
  if (denominator == 0) throw ArgumentError("rational with zero denominator");
  *this = from_wide(numerator, denominator);
}

Rational::Rational(const mpq_class& value) { *this = from_mpq(value); }

Rational Rational::from_wide(i128 numerator, i128 denominator) {
  if (denominator < 0) {
    numerator = -numerator;
    denominator = -denominator;
  }
  u128 g = gcd128(numerator < 0 ? static_cast<u128>(-numerator) : static_cast<u128>(numerator),
                  static_cast<u128>(denominator));
  if (g > 1) {
    numerator /= static_cast<i128>(g);
    denominator /= static_cast<i128>(g);
  }
  Rational r;
  if (fits(numerator) && fits(denominator)) {
    r.num_ = static_cast<std::int64_t>(numerator);
    r.den_ = static_cast<std::int64_t>(denominator);
    return r;
  }
  mpq_class q(to_mpz(numerator), to_mpz(denominator));
  q.canonicalize();
  r.big_ = std::make_shared<const mpq_class>(std::move(q));
  return r;
}

Rational Rational::from_mpq(mpq_class value) {
  value.canonicalize();
  const mpz_class& n = value.get_num();
  const mpz_class& d = value.get_den();
  Rational r;
  if (n.fits_slong_p() && d.fits_slong_p() && n != std::numeric_limits<long>::min()) {
    r.num_ = n.get_si();
    r.den_ = d.get_si();
    return r;
  }
  r.big_ = std::make_shared<const mpq_class>(std::move(value));
  return r;
}

Rational Rational::parse(std::string_view text) {
  std::string_view s = trim(text);
  if (s.empty()) throw ArgumentError("empty rational literal");
  auto fail = [&]() -> Rational {
    throw ArgumentError("malformed rational literal '" + std::string(text) + "'");
  };
  bool negative = false;
  std::string_view body = s;
  if (body.front() == '-' || body.front() == '+') {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }
  mpq_class value;
  if (auto slash = body.find('/'); slash != std::string_view::npos) {
    std::string_view p = trim(body.substr(0, slash));
    std::string_view q = trim(body.substr(slash + 1));
    if (!is_digits(p) || !is_digits(q)) return fail();
    mpz_class den(std::string(q), 10);
    if (den == 0) throw ArgumentError("rational literal '" + std::string(text) + "' has zero denominator");
    value = mpq_class(mpz_class(std::string(p), 10), den);
  } else if (auto dot = body.find('.'); dot != std::string_view::npos) {
    std::string_view whole = body.substr(0, dot);
    std::string_view frac = body.substr(dot + 1);
    if (whole.empty() && frac.empty()) return fail();
    if ((!whole.empty() && !is_digits(whole)) || (!frac.empty() && !is_digits(frac))) return fail();
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac.size());
    mpz_class w = whole.empty() ? mpz_class(0) : mpz_class(std::string(whole), 10);
    mpz_class f = frac.empty() ? mpz_class(0) : mpz_class(std::string(frac), 10);
    value = mpq_class(w * scale + f, scale);
  } else {
    if (!is_digits(body)) return fail();
    value = mpq_class(mpz_class(std::string(body), 10));
  }
  if (negative) value = -value;
  return from_mpq(std::move(value));
}

bool Rational::is_integer() const { return big_ ? big_->get_den() == 1 : den_ == 1; }

int Rational::sign() const {
  if (big_) return sgn(*big_);
  return (num_ > 0) - (num_ < 0);
}

std::int64_t Rational::small_numerator() const {
  if (big_) throw ResourceLimitError("rational " + str() + " does not fit in 64 bits");
  return num_;
}

std::int64_t Rational::small_denominator() const {
  if (big_) throw ResourceLimitError("rational " + str() + " does not fit in 64 bits");
  return den_;
}

mpq_class Rational::to_mpq() const {
  if (big_) return *big_;
  return mpq_class(mpz_class(static_cast<long>(num_)), mpz_class(static_cast<long>(den_)));
}

mpz_class Rational::numerator() const { return big_ ? big_->get_num() : mpz_class(static_cast<long>(num_)); }

mpz_class Rational::denominator() const {
  return big_ ? big_->get_den() : mpz_class(static_cast<long>(den_));
}

double Rational::to_double() const {
  if (big_) return big_->get_d();
  return static_cast<double>(num_) / static_cast<double>(den_);
}

std::string Rational::str() const {
  if (big_) return big_->get_str();
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

std::string Rational::decimal(int digits) const {
  if (digits < 0) digits = 0;
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(digits));
  mpz_class n = numerator();
  mpz_class d = denominator();
  bool negative = n < 0;
  if (negative) n = -n;
  // round(n * scale / d) half away from zero
  mpz_class scaled = (2 * n * scale + d) / (2 * d);
  std::string s = scaled.get_str();
  if (digits > 0) {
    if (s.size() <= static_cast<std::size_t>(digits)) s.insert(0, static_cast<std::size_t>(digits) - s.size() + 1, '0');
    s.insert(s.size() - static_cast<std::size_t>(digits), ".");
  }
  if (negative && scaled != 0) s.insert(0, "-");
  return s;
}

Rational Rational::reciprocal() const {
  if (is_zero()) throw ArgumentError("reciprocal of zero");
  if (big_) return from_mpq(1 / *big_);
  return num_ < 0 ? from_wide(-static_cast<i128>(den_), -static_cast<i128>(num_))
                  : from_wide(den_, num_);
}

Rational Rational::operator-() const {
  if (big_) return from_mpq(-*big_);
  Rational r;
  r.num_ = -num_;
  r.den_ = den_;
  return r;
}

Rational Rational::add_small(std::int64_t an, std::int64_t ad, std::int64_t bn, std::int64_t bd) {
  Rational r;
  if (half_width(an) && half_width(ad) && half_width(bn) && half_width(bd)) {
    // every intermediate below fits in 64 bits
    if (ad == bd) {
      std::int64_t t = an + bn;
      if (t == 0) return r;
      std::int64_t g = static_cast<std::int64_t>(std::gcd(abs64(t), static_cast<std::uint64_t>(ad)));
      r.num_ = t / g;
      r.den_ = ad / g;
      return r;
    }
    std::int64_t g = static_cast<std::int64_t>(std::gcd(static_cast<std::uint64_t>(ad), static_cast<std::uint64_t>(bd)));
    std::int64_t ad_g = ad / g;
    std::int64_t t = an * (bd / g) + bn * ad_g;
    if (t == 0) return r;
    std::int64_t g2 = g == 1 ? 1 : static_cast<std::int64_t>(std::gcd(abs64(t), static_cast<std::uint64_t>(g)));
    r.num_ = t / g2;
    r.den_ = ad_g * (bd / g2);
    return r;
  }
  if (ad == 1 && bd == 1) {
    i128 sum = static_cast<i128>(an) + bn;
    if (fits(sum)) {
      r.num_ = static_cast<std::int64_t>(sum);
      return r;
    }
    return from_wide(sum, 1);
  }
  std::uint64_t g = std::gcd(static_cast<std::uint64_t>(ad), static_cast<std::uint64_t>(bd));
  i128 n;
  i128 d;
  if (g == 1) {
    n = static_cast<i128>(an) * bd + static_cast<i128>(bn) * ad;
    d = static_cast<i128>(ad) * bd;
  } else {
    std::int64_t ad_g = ad / static_cast<std::int64_t>(g);
    std::int64_t bd_g = bd / static_cast<std::int64_t>(g);
    i128 t = static_cast<i128>(an) * bd_g + static_cast<i128>(bn) * ad_g;
    if (t == 0) return r;
    i128 tm = t % static_cast<i128>(g);
    if (tm < 0) tm = -tm;
    std::uint64_t g2 = std::gcd(static_cast<std::uint64_t>(tm), g);
    n = t / static_cast<i128>(g2);
    d = static_cast<i128>(ad_g) * (bd / static_cast<std::int64_t>(g2));
  }
  if (fits(n) && fits(d)) {
    r.num_ = static_cast<std::int64_t>(n);
    r.den_ = static_cast<std::int64_t>(d);
    return r;
  }
  return from_wide(n, d);
}

Rational operator+(const Rational& a, const Rational& b) {
  if (a.big_ || b.big_) return Rational::from_mpq(a.to_mpq() + b.to_mpq());
  if (b.num_ == 0) return a;
  if (a.num_ == 0) return b;
  return Rational::add_small(a.num_, a.den_, b.num_, b.den_);
}

Rational operator-(const Rational& a, const Rational& b) {
  if (a.big_ || b.big_) return Rational::from_mpq(a.to_mpq() - b.to_mpq());
  if (b.num_ == 0) return a;
  return Rational::add_small(a.num_, a.den_, -b.num_, b.den_);
}

Rational operator*(const Rational& a, const Rational& b) {
  if (a.big_ || b.big_) return Rational::from_mpq(a.to_mpq() * b.to_mpq());
  if (a.num_ == 0 || b.num_ == 0) return Rational();
  if (b.den_ == 1 && (b.num_ == 1 || b.num_ == -1)) return b.num_ == 1 ? a : -a;
  if (a.den_ == 1 && (a.num_ == 1 || a.num_ == -1)) return a.num_ == 1 ? b : -b;
  if (a.den_ == 1 && b.den_ == 1) {
    i128 p = static_cast<i128>(a.num_) * b.num_;
    if (fits(p)) {
      Rational r;
      r.num_ = static_cast<std::int64_t>(p);
      return r;
    }
    return Rational::from_wide(p, 1);
  }
  auto g1 = static_cast<std::int64_t>(std::gcd(abs64(a.num_), static_cast<std::uint64_t>(b.den_)));
  auto g2 = static_cast<std::int64_t>(std::gcd(abs64(b.num_), static_cast<std::uint64_t>(a.den_)));
  if (half_width(a.num_) && half_width(a.den_) && half_width(b.num_) && half_width(b.den_)) {
    Rational r;
    r.num_ = (a.num_ / g1) * (b.num_ / g2);
    r.den_ = (a.den_ / g2) * (b.den_ / g1);
    return r;
  }
  i128 n = static_cast<i128>(a.num_ / g1) * (b.num_ / g2);
  i128 d = static_cast<i128>(a.den_ / g2) * (b.den_ / g1);
  if (fits(n) && fits(d)) {
    Rational r;
    r.num_ = static_cast<std::int64_t>(n);
    r.den_ = static_cast<std::int64_t>(d);
    return r;
  }
  return Rational::from_wide(n, d);
}

Rational operator/(const Rational& a, const Rational& b) { return a * b.reciprocal(); }

Rational& Rational::operator+=(const Rational& rhs) { return *this = *this + rhs; }
Rational& Rational::operator-=(const Rational& rhs) { return *this = *this - rhs; }
Rational& Rational::operator*=(const Rational& rhs) { return *this = *this * rhs; }
Rational& Rational::operator/=(const Rational& rhs) { return *this = *this / rhs; }

bool operator==(const Rational& a, const Rational& b) {
  if (!a.big_ && !b.big_) return a.num_ == b.num_ && a.den_ == b.den_;
  if (a.big_ && b.big_) return *a.big_ == *b.big_;
  return false;  // spilled values are never representable inline
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  if (!a.big_ && !b.big_) {
    i128 l = static_cast<i128>(a.num_) * b.den_;
    i128 r = static_cast<i128>(b.num_) * a.den_;
    return l <=> r;
  }
  int c = cmp(a.to_mpq(), b.to_mpq());
  return c < 0 ? std::strong_ordering::less
               : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
}

std::ostream& operator<<(std::ostream& os, const Rational& value) { return os << value.str(); }

}  // namespace cachecraft
