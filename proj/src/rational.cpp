#include "rational.hpp"

#include <limits>
#include <ostream>
#include <stdexcept>

#include "error.hpp"

namespace novikov {

namespace {

using u128 = unsigned __int128;

constexpr std::int64_t kMin = std::numeric_limits<std::int64_t>::min();
constexpr std::int64_t kMax = std::numeric_limits<std::int64_t>::max();

u128 uabs(__int128 x) { return x < 0 ? u128(0) - u128(x) : u128(x); }

u128 gcd128(u128 a, u128 b) {
  while (b != 0) {
    u128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

bool fits(__int128 x) { return x >= kMin && x <= kMax; }

void mpz_from_i128(mpz_class &out, __int128 x) {
  u128 m = uabs(x);
  auto hi = static_cast<std::uint64_t>(m >> 64);
  auto lo = static_cast<std::uint64_t>(m);
  out = hi;
  out <<= 64;
  out += mpz_class(static_cast<unsigned long>(lo));
  if (x < 0)
    out = -out;
}

} // namespace

Rational::Rational(std::int64_t n, std::int64_t d) {
  if (d == 0)
    throw Error(ErrorKind::InvalidInput, "rational with zero denominator");
  assign_wide(n, d);
}

Rational::Rational(const Rational &o) : num_(o.num_), den_(o.den_) {
  if (o.big_)
    big_ = std::make_unique<mpq_class>(*o.big_);
}

Rational &Rational::operator=(const Rational &o) {
  if (this == &o)
    return *this;
  num_ = o.num_;
  den_ = o.den_;
  if (o.big_) {
    if (big_)
      *big_ = *o.big_;
    else
      big_ = std::make_unique<mpq_class>(*o.big_);
  } else {
    big_.reset();
  }
  return *this;
}

void Rational::assign_big(mpq_class &&q) {
  q.canonicalize();
  const mpz_class &n = q.get_num();
  const mpz_class &d = q.get_den();
  if (n.fits_slong_p() && d.fits_slong_p()) {
    num_ = n.get_si();
    den_ = d.get_si();
    big_.reset();
    return;
  }
  num_ = 0;
  den_ = 1;
  if (big_)
    *big_ = std::move(q);
  else
    big_ = std::make_unique<mpq_class>(std::move(q));
}

void Rational::assign_wide(__int128 n, __int128 d) {
  if (d < 0) {
    n = -n;
    d = -d;
  }
  if (n == 0) {
    num_ = 0;
    den_ = 1;
    big_.reset();
    return;
  }
  if (d != 1) {
    u128 g = gcd128(uabs(n), u128(d));
    if (g != 1) {
      n /= static_cast<__int128>(g);
      d /= static_cast<__int128>(g);
    }
  }
  if (fits(n) && fits(d)) {
    num_ = static_cast<std::int64_t>(n);
    den_ = static_cast<std::int64_t>(d);
    big_.reset();
    return;
  }
  mpq_class q;
  mpz_from_i128(q.get_num(), n);
  mpz_from_i128(q.get_den(), d);
  assign_big(std::move(q));
}

Rational Rational::parse(std::string_view text) {
  std::string s(text);
  if (s.empty())
    throw Error(ErrorKind::InvalidInput, "empty rational literal");
  for (char c : s) {
    if (!(c == '-' || c == '+' || c == '/' || (c >= '0' && c <= '9')))
      throw Error(ErrorKind::InvalidInput,
                  "malformed rational literal '" + s + "'");
  }
  mpq_class q;
  if (q.set_str(s, 10) != 0)
    throw Error(ErrorKind::InvalidInput,
                "malformed rational literal '" + s + "'");
  if (q.get_den() == 0)
    throw Error(ErrorKind::InvalidInput, "rational with zero denominator");
  Rational r;
  r.assign_big(std::move(q));
  return r;
}

std::string Rational::str() const {
  if (big_)
    return big_->get_str(10);
  if (den_ == 1)
    return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

bool Rational::is_integer() const {
  return big_ ? big_->get_den() == 1 : den_ == 1;
}

int Rational::sign() const {
  if (big_)
    return sgn(*big_);
  return (num_ > 0) - (num_ < 0);
}

mpq_class Rational::to_mpq() const {
  if (big_)
    return *big_;
  mpq_class q(mpz_class(static_cast<long>(num_)),
              mpz_class(static_cast<long>(den_)));
  return q;
}

mpz_class Rational::numerator() const {
  return big_ ? big_->get_num() : mpz_class(static_cast<long>(num_));
}

mpz_class Rational::denominator() const {
  return big_ ? big_->get_den() : mpz_class(static_cast<long>(den_));
}

Rational &Rational::operator+=(const Rational &o) {
  if (!big_ && !o.big_) {
    if (den_ == 1 && o.den_ == 1) {
      std::int64_t r;
      if (!__builtin_add_overflow(num_, o.num_, &r)) {
        num_ = r;
        return *this;
      }
    }
    assign_wide(__int128(num_) * o.den_ + __int128(o.num_) * den_,
                __int128(den_) * o.den_);
    return *this;
  }
  assign_big(to_mpq() + o.to_mpq());
  return *this;
}

Rational &Rational::operator-=(const Rational &o) {
  if (!big_ && !o.big_) {
    if (den_ == 1 && o.den_ == 1) {
      std::int64_t r;
      if (!__builtin_sub_overflow(num_, o.num_, &r)) {
        num_ = r;
        return *this;
      }
    }
    assign_wide(__int128(num_) * o.den_ - __int128(o.num_) * den_,
                __int128(den_) * o.den_);
    return *this;
  }
  assign_big(to_mpq() - o.to_mpq());
  return *this;
}

Rational &Rational::operator*=(const Rational &o) {
  if (!big_ && !o.big_) {
    if (den_ == 1 && o.den_ == 1) {
      std::int64_t r;
      if (!__builtin_mul_overflow(num_, o.num_, &r)) {
        num_ = r;
        return *this;
      }
    }
    assign_wide(__int128(num_) * o.num_, __int128(den_) * o.den_);
    return *this;
  }
  assign_big(to_mpq() * o.to_mpq());
  return *this;
}

Rational &Rational::operator/=(const Rational &o) {
  if (o.is_zero())
    throw Error(ErrorKind::Internal, "division by zero rational");
  if (!big_ && !o.big_) {
    assign_wide(__int128(num_) * o.den_, __int128(den_) * o.num_);
    return *this;
  }
  assign_big(to_mpq() / o.to_mpq());
  return *this;
}

Rational Rational::operator-() const {
  Rational r(*this);
  if (r.big_) {
    *r.big_ = -*r.big_;
  } else if (r.num_ == kMin) {
    r.assign_wide(-__int128(r.num_), r.den_);
  } else {
    r.num_ = -r.num_;
  }
  return r;
}

void Rational::sub_mul(const Rational &a, const Rational &b) {
  if (!big_ && !a.big_ && !b.big_ && den_ == 1 && a.den_ == 1 &&
      b.den_ == 1) {
    std::int64_t p, r;
    if (!__builtin_mul_overflow(a.num_, b.num_, &p) &&
        !__builtin_sub_overflow(num_, p, &r)) {
      num_ = r;
      return;
    }
  }
  *this -= a * b;
}

bool operator==(const Rational &a, const Rational &b) {
  if (!a.big_ && !b.big_)
    return a.num_ == b.num_ && a.den_ == b.den_;
  if (a.big_ && b.big_)
    return *a.big_ == *b.big_;
  return false; // canonical representation: small and big never coincide
}

std::strong_ordering operator<=>(const Rational &a, const Rational &b) {
  if (!a.big_ && !b.big_) {
    __int128 l = __int128(a.num_) * b.den_;
    __int128 r = __int128(b.num_) * a.den_;
    return l <=> r;
  }
  int c = cmp(a.to_mpq(), b.to_mpq());
  return c <=> 0;
}

std::size_t Rational::hash() const {
  if (!big_)
    return std::hash<std::int64_t>{}(num_) * 1000003u ^
           std::hash<std::int64_t>{}(den_);
  return std::hash<std::string>{}(big_->get_str(16));
}

std::ostream &operator<<(std::ostream &os, const Rational &q) {
  return os << q.str();
}

Rational abs(const Rational &q) { return q.sign() < 0 ? -q : q; }

} // namespace novikov
