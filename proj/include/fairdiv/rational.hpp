#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>

#include "fairdiv/error.hpp"

namespace fairdiv {

// Exact rational scalar. Always kept in canonical form (gcd(num, den) = 1,
// den > 0). Utilities are non-negative, but intermediate differences are
// not, so the type itself admits negative values.
class Rational {
 public:
  Rational() = default;
  Rational(long value) : value_(value) {}  // NOLINT(google-explicit-constructor)
  Rational(int value) : value_(value) {}   // NOLINT(google-explicit-constructor)
  explicit Rational(const mpz_class& integer) : value_(integer) {}
  explicit Rational(mpq_class value) : value_(std::move(value)) { value_.canonicalize(); }

  Rational(const mpz_class& num, const mpz_class& den) {
    if (den == 0) throw Error(ErrorCode::MalformedRational, "zero denominator");
    value_ = mpq_class(num, den);
    value_.canonicalize();
  }

  Rational(long num, long den) : Rational(mpz_class(num), mpz_class(den)) {}

  // Accepts "p", "p/q", "-p/q" and finite decimals such as "0.25" or "-3.5".
  static Rational parse(std::string_view text) {
    const auto fail = [&] {
      return Error(ErrorCode::MalformedRational, "cannot parse '" + std::string(text) + "'");
    };
    while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
    while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
    if (text.empty()) throw fail();

    bool negative = false;
    std::string_view body = text;
    if (body.front() == '+' || body.front() == '-') {
      negative = body.front() == '-';
      body.remove_prefix(1);
    }
    const auto digits_only = [](std::string_view s) {
      if (s.empty()) return false;
      for (char c : s) {
        if (c < '0' || c > '9') return false;
      }
      return true;
    };

    mpz_class num;
    mpz_class den;
    if (auto slash = body.find('/'); slash != std::string_view::npos) {
      auto p = body.substr(0, slash);
      auto q = body.substr(slash + 1);
      if (!digits_only(p) || !digits_only(q)) throw fail();
      num.set_str(std::string(p), 10);
      den.set_str(std::string(q), 10);
      if (den == 0) {
        throw Error(ErrorCode::MalformedRational, "zero denominator in '" + std::string(text) + "'");
      }
    } else if (auto dot = body.find('.'); dot != std::string_view::npos) {
      auto whole = body.substr(0, dot);
      auto frac = body.substr(dot + 1);
      if (whole.empty() && frac.empty()) throw fail();
      if ((!whole.empty() && !digits_only(whole)) || (!frac.empty() && !digits_only(frac))) {
        throw fail();
      }
      num.set_str(std::string(whole.empty() ? "0" : whole) + std::string(frac), 10);
      den = 1;
      for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    } else {
      if (!digits_only(body)) throw fail();
      num.set_str(std::string(body), 10);
      den = 1;
    }
    if (negative) num = -num;
    return Rational(num, den);
  }

  mpz_class numerator() const { return value_.get_num(); }
  mpz_class denominator() const { return value_.get_den(); }
  const mpq_class& gmp() const noexcept { return value_; }

  int sign() const { return sgn(value_); }
  bool is_zero() const { return sign() == 0; }
  bool is_integer() const { return value_.get_den() == 1; }

  double to_double() const { return value_.get_d(); }

  // "p" for integers, "p/q" otherwise.
  std::string str() const {
    if (is_integer()) return value_.get_num().get_str();
    return value_.get_num().get_str() + "/" + value_.get_den().get_str();
  }

  // Always "p/q", including integers ("3/1").
  std::string fraction_str() const {
    return value_.get_num().get_str() + "/" + value_.get_den().get_str();
  }

  // Fixed-point rendering, rounded half away from zero.
  std::string decimal(int digits = 6) const {
    mpz_class scale = 1;
    for (int i = 0; i < digits; ++i) scale *= 10;
    mpz_class num = abs(value_.get_num()) * scale * 2 + value_.get_den();
    mpz_class den = value_.get_den() * 2;
    mpz_class q = num / den;
    std::string s = q.get_str();
    if (digits > 0) {
      if (s.size() <= static_cast<std::size_t>(digits)) {
        s.insert(0, static_cast<std::size_t>(digits) + 1 - s.size(), '0');
      }
      s.insert(s.size() - static_cast<std::size_t>(digits), ".");
    }
    if (sign() < 0 && q != 0) s.insert(0, "-");
    return s;
  }

  Rational& operator+=(const Rational& o) { value_ += o.value_; return *this; }
  Rational& operator-=(const Rational& o) { value_ -= o.value_; return *this; }
  Rational& operator*=(const Rational& o) { value_ *= o.value_; return *this; }
  Rational& operator/=(const Rational& o) {
    if (o.is_zero()) throw Error(ErrorCode::InvalidArgument, "division by zero");
    value_ /= o.value_;
    return *this;
  }

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  friend Rational operator-(const Rational& a) { return Rational(mpq_class(-a.value_)); }

  friend bool operator==(const Rational& a, const Rational& b) { return cmp(a.value_, b.value_) == 0; }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    int c = cmp(a.value_, b.value_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

 private:
  mpq_class value_{0};
};

inline Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }

}  // namespace fairdiv
