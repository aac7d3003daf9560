#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace novikov {

/// Exact rational number.
///
/// Values whose reduced numerator and denominator fit in 64 bits are kept
/// inline; everything else lives in a heap-allocated mpq_class. Arithmetic
/// promotes on overflow and demotes whenever a result fits again, so the
/// representation of a given value is always canonical.
class Rational {
public:
  Rational() = default;
  Rational(std::int64_t n) : num_(n) {} // NOLINT(google-explicit-constructor)
  Rational(std::int64_t n, std::int64_t d);
  explicit Rational(const mpq_class &q) { assign_big(mpq_class(q)); }

  Rational(const Rational &o);
  Rational(Rational &&o) noexcept = default;
  Rational &operator=(const Rational &o);
  Rational &operator=(Rational &&o) noexcept = default;
  ~Rational() = default;

  /// Parses "p", "-p" or "p/q" in decimal.
  static Rational parse(std::string_view text);
  std::string str() const;

  bool is_zero() const { return !big_ && num_ == 0; }
  bool is_one() const { return !big_ && num_ == 1 && den_ == 1; }
  bool is_integer() const;
  int sign() const;

  mpq_class to_mpq() const;
  mpz_class numerator() const;
  mpz_class denominator() const;
  bool small() const { return !big_; }

  Rational &operator+=(const Rational &o);
  Rational &operator-=(const Rational &o);
  Rational &operator*=(const Rational &o);
  Rational &operator/=(const Rational &o);
  Rational operator-() const;

  /// this -= a * b
  void sub_mul(const Rational &a, const Rational &b);

  friend Rational operator+(Rational a, const Rational &b) { return a += b; }
  friend Rational operator-(Rational a, const Rational &b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational &b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational &b) { return a /= b; }

  friend bool operator==(const Rational &a, const Rational &b);
  friend std::strong_ordering operator<=>(const Rational &a,
                                          const Rational &b);

  std::size_t hash() const;

private:
  void assign_big(mpq_class &&q);
  void assign_wide(__int128 n, __int128 d);

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
  std::unique_ptr<mpq_class> big_;
};

std::ostream &operator<<(std::ostream &os, const Rational &q);

Rational abs(const Rational &q);

} // namespace novikov
