#pragma once

#include <random>

#include "ore.hpp"

namespace novikov::testing {

inline AlgebraElement random_element(const FiniteTracedAlgebra &a, std::mt19937_64 &rng) {
  AlgebraElement x = algebra_zero(a);
  // Sparse small coefficients make singular pure parts common.
  for (auto &c : x.c)
    if (rng() % 2)
      c = Rational(static_cast<std::int64_t>(rng() % 5) - 2);
  return x;
}

/// Random nonzero twisted polynomial spanning at most max_degree + 1 powers,
/// starting at a power in {-1, 0, 1}.
inline TwistedPoly random_poly(const AlgebraPtr &a, std::mt19937_64 &rng, int max_degree) {
  while (true) {
    const std::int64_t shift = static_cast<std::int64_t>(rng() % 3) - 1;
    const int deg = static_cast<int>(rng() % static_cast<unsigned>(max_degree + 1));
    std::map<std::int64_t, AlgebraElement> terms;
    for (int i = 0; i <= deg; ++i)
      terms.emplace(shift + i, random_element(*a, rng));
    TwistedPoly p(a, std::move(terms));
    if (!p.is_zero())
      return p;
  }
}

inline std::vector<AlgebraPtr> ore_algebras() {
  return {FiniteTracedAlgebra::trivial(), FiniteTracedAlgebra::cyclic(2),
          FiniteTracedAlgebra::cyclic(3, 2), FiniteTracedAlgebra::symmetric3(3)};
}

} // namespace novikov::testing
