#include <doctest.h>

#include <random>

#include "error.hpp"
#include "rational.hpp"

using novikov::Rational;

namespace {

// Draws values near the 64-bit boundary often enough to exercise promotion.
std::int64_t draw(std::mt19937_64 &rng) {
  switch (rng() % 4) {
  case 0:
    return static_cast<std::int64_t>(rng() % 21) - 10;
  case 1:
    return static_cast<std::int64_t>(rng() % 2001) - 1000;
  case 2:
    return static_cast<std::int64_t>(rng() >> 1) * (rng() % 2 ? 1 : -1);
  default:
    return INT64_MAX - static_cast<std::int64_t>(rng() % 5);
  }
}

mpq_class as_mpq(std::int64_t n, std::int64_t d) {
  mpq_class q(mpz_class(std::to_string(n)), mpz_class(std::to_string(d)));
  q.canonicalize();
  return q;
}

} // namespace

TEST_CASE("arithmetic agrees with GMP rationals") {
  std::mt19937_64 rng(7);
  for (int it = 0; it < 3000; ++it) {
    std::int64_t an = draw(rng), ad = draw(rng), bn = draw(rng), bd = draw(rng);
    if (ad == 0)
      ad = 1;
    if (bd == 0)
      bd = 3;
    const Rational a(an, ad), b(bn, bd);
    const mpq_class qa = as_mpq(an, ad), qb = as_mpq(bn, bd);
    CHECK((a + b).to_mpq() == qa + qb);
    CHECK((a - b).to_mpq() == qa - qb);
    CHECK((a * b).to_mpq() == qa * qb);
    if (!b.is_zero())
      CHECK((a / b).to_mpq() == qa / qb);
    Rational c = a;
    c.sub_mul(a, b);
    CHECK(c.to_mpq() == qa - qa * qb);
    CHECK(((a < b) == (qa < qb)));
    CHECK(((a == b) == (qa == qb)));
  }
}

TEST_CASE("representation is canonical after demotion") {
  const Rational big = Rational(INT64_MAX) * Rational(INT64_MAX);
  CHECK_FALSE(big.small());
  const Rational back = big / Rational(INT64_MAX);
  CHECK(back.small());
  CHECK(back == Rational(INT64_MAX));
  CHECK(back.hash() == Rational(INT64_MAX).hash());
  CHECK(Rational(6, -4) == Rational(-3, 2));
  CHECK(Rational(6, -4).str() == "-3/2");
}

TEST_CASE("parse and print round trip") {
  for (const char *s : {"0", "-7", "3/4", "-12/5", "123456789012345678901234567891/2"}) {
    CHECK(Rational::parse(s).str() == s);
  }
  CHECK(Rational::parse("4/8").str() == "1/2");
  CHECK_THROWS_AS(Rational::parse("1/0"), novikov::Error);
  CHECK_THROWS_AS(Rational::parse("x"), novikov::Error);
  CHECK_THROWS_AS(Rational(1) / Rational(0), novikov::Error);
}
