#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "error.hpp"
#include "group.hpp"

using namespace novikov;

namespace {

std::vector<GroupSpec> sample_specs() {
  return {GroupSpec::free_group(2), GroupSpec::free_group(3), GroupSpec::free_abelian(2),
          GroupSpec::free_abelian(3),
          GroupSpec::direct_product({GroupSpec::free_group(2), GroupSpec::free_group(2)}),
          GroupSpec::free_by_z(2, {Word{2}, Word{1, 2}})};
}

Word random_word(std::mt19937_64 &rng, int gens, int len) {
  Word w;
  for (int i = 0; i < len; ++i) {
    const int g = static_cast<int>(rng() % static_cast<unsigned>(gens)) + 1;
    w.push_back(rng() % 2 ? g : -g);
  }
  return w;
}

// Naive free reduction used as an oracle for the free group normal form.
Word reduce_naive(Word w) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i + 1 < w.size(); ++i)
      if (w[i] == -w[i + 1]) {
        w.erase(w.begin() + static_cast<long>(i), w.begin() + static_cast<long>(i) + 2);
        changed = true;
        break;
      }
  }
  return w;
}

} // namespace

TEST_CASE("group axioms hold on random words") {
  std::mt19937_64 rng(11);
  for (const auto &spec : sample_specs()) {
    const GroupPtr g = Group::make(spec);
    const int n = g->generator_count();
    for (int it = 0; it < 200; ++it) {
      const Element x = g->from_word(random_word(rng, n, 6));
      const Element y = g->from_word(random_word(rng, n, 5));
      const Element z = g->from_word(random_word(rng, n, 4));
      CHECK(g->multiply(g->multiply(x, y), z) == g->multiply(x, g->multiply(y, z)));
      CHECK(g->is_identity(g->multiply(x, g->invert(x))));
      CHECK(g->is_identity(g->multiply(g->invert(x), x)));
      CHECK(g->multiply(x, g->identity()) == x);
      CHECK(g->from_word(g->canonical_word(x)) == x);
      CHECK(g->element_from_json(g->element_to_json(x)) == x);
    }
  }
}

TEST_CASE("free group normal form matches naive reduction") {
  std::mt19937_64 rng(5);
  const GroupPtr g = Group::make(GroupSpec::free_group(2));
  for (int it = 0; it < 500; ++it) {
    const Word w = random_word(rng, 2, 12);
    CHECK(g->canonical_word(g->from_word(w)) == reduce_naive(w));
  }
}

TEST_CASE("free abelian elements commute and are exponent vectors") {
  std::mt19937_64 rng(3);
  const GroupPtr g = Group::make(GroupSpec::free_abelian(3));
  for (int it = 0; it < 200; ++it) {
    const Word w = random_word(rng, 3, 10);
    const Element x = g->from_word(w);
    const Element y = g->from_word(random_word(rng, 3, 7));
    CHECK(g->multiply(x, y) == g->multiply(y, x));
    std::vector<int> exps(3, 0);
    for (int l : w)
      exps[static_cast<std::size_t>(std::abs(l) - 1)] += l > 0 ? 1 : -1;
    Word expected;
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < std::abs(exps[static_cast<std::size_t>(i)]); ++k)
        expected.push_back(exps[static_cast<std::size_t>(i)] > 0 ? i + 1 : -(i + 1));
    CHECK(g->from_word(expected) == x);
  }
}

TEST_CASE("direct product factors commute") {
  const GroupPtr g =
      Group::make(GroupSpec::direct_product({GroupSpec::free_group(2), GroupSpec::free_group(2)}));
  for (int i = 0; i < 2; ++i)
    for (int j = 2; j < 4; ++j)
      CHECK(g->multiply(g->generator(i), g->generator(j)) ==
            g->multiply(g->generator(j), g->generator(i)));
  CHECK_FALSE(g->multiply(g->generator(0), g->generator(1)) ==
              g->multiply(g->generator(1), g->generator(0)));
}

TEST_CASE("mapping torus relation t a t^-1 = alpha(a)") {
  const GroupPtr g = Group::make(GroupSpec::free_by_z(2, {Word{2}, Word{1, 2}}));
  REQUIRE(g->generator_count() == 3);
  const Element t = g->generator(2);
  const Element tinv = g->generator(2, true);
  CHECK(g->multiply(g->multiply(t, g->generator(0)), tinv) == g->from_word(Word{2}));
  CHECK(g->multiply(g->multiply(t, g->generator(1)), tinv) == g->from_word(Word{1, 2}));
  CHECK_THROWS_AS(Group::make(GroupSpec::free_by_z(2, {Word{1}, Word{1}})), Error);
}

TEST_CASE("characters are homomorphisms") {
  std::mt19937_64 rng(13);
  for (const auto &spec : sample_specs()) {
    const GroupPtr g = Group::make(spec);
    const int n = g->generator_count();
    std::vector<std::int64_t> vals(static_cast<std::size_t>(n));
    for (auto &v : vals)
      v = static_cast<std::int64_t>(rng() % 5) - 2;
    if (spec.kind == GroupSpec::Kind::FreeByZ)
      vals = {0, 0, 1};
    if (std::all_of(vals.begin(), vals.end(), [](auto v) { return v == 0; }))
      vals[0] = 1;
    const Character chi(*g, vals);
    for (int it = 0; it < 100; ++it) {
      const Word w = random_word(rng, n, 8);
      const Element x = g->from_word(w);
      const Element y = g->from_word(random_word(rng, n, 8));
      CHECK(g->phi(chi, g->multiply(x, y)) == g->phi(chi, x) + g->phi(chi, y));
      std::int64_t direct = 0;
      for (int l : w)
        direct += (l > 0 ? 1 : -1) * chi[static_cast<std::size_t>(std::abs(l) - 1)];
      CHECK(g->phi(chi, x) == direct);
    }
  }
}

TEST_CASE("character validation") {
  const GroupPtr mt = Group::make(GroupSpec::free_by_z(2, {Word{2}, Word{1, 2}}));
  CHECK_NOTHROW(Character(*mt, std::vector<std::int64_t>{0, 0, 1}));
  CHECK_THROWS_AS(Character(*mt, std::vector<std::int64_t>{1, 0, 0}), Error);
  const GroupPtr f2 = Group::make(GroupSpec::free_group(2));
  CHECK_THROWS_AS(Character(*f2, std::vector<std::int64_t>{0, 0}), Error);
  CHECK_THROWS_AS(Character(*f2, std::vector<std::int64_t>{1}), Error);
  const Character half(*f2, std::vector<Rational>{Rational(1, 2), Rational(1, 3)});
  CHECK(half.values() == std::vector<std::int64_t>{3, 2});
  CHECK(Character::from_json(*f2, half.to_json()) == half);
}

TEST_CASE("ball sizes match closed forms") {
  const GroupPtr f2 = Group::make(GroupSpec::free_group(2));
  const GroupPtr z2 = Group::make(GroupSpec::free_abelian(2));
  const GroupPtr f2f2 =
      Group::make(GroupSpec::direct_product({GroupSpec::free_group(2), GroupSpec::free_group(2)}));
  auto f2_sphere = [](int k) -> long { return k == 0 ? 1 : 4 * static_cast<long>(std::pow(3, k - 1)); };
  for (int L = 0; L <= 6; ++L) {
    CHECK(static_cast<long>(enumerate_ball(*f2, L).size()) == 2 * static_cast<long>(std::pow(3, L)) - 1);
    CHECK(static_cast<long>(enumerate_ball(*z2, L).size()) == 2L * L * L + 2L * L + 1);
    long prod = 0;
    for (int i = 0; i <= L; ++i)
      for (int j = 0; i + j <= L; ++j)
        prod += f2_sphere(i) * f2_sphere(j);
    CHECK(static_cast<long>(enumerate_ball(*f2f2, L).size()) == prod);
  }
}

TEST_CASE("support enumeration filters by phi and is sorted and unique") {
  const GroupPtr f2 = Group::make(GroupSpec::free_group(2));
  const Character chi(*f2, std::vector<std::int64_t>{1, -1});
  const auto v = enumerate_support(*f2, chi, 5, -1, 2);
  std::set<Word> seen;
  std::size_t prev_len = 0;
  for (const auto &x : v) {
    const auto p = f2->phi(chi, x);
    CHECK(p >= -1);
    CHECK(p <= 2);
    const Word w = f2->canonical_word(x);
    CHECK(w.size() >= prev_len);
    prev_len = w.size();
    CHECK(seen.insert(w).second);
  }
  std::size_t brute = 0;
  for (const auto &[x, len] : enumerate_ball(*f2, 5)) {
    const auto p = f2->phi(chi, x);
    brute += (p >= -1 && p <= 2);
  }
  CHECK(v.size() == brute);
  EnumerationLimits lim;
  lim.max_length = 3;
  CHECK_THROWS_AS(enumerate_support(*f2, chi, 5, 0, 1, lim), Error);
}

TEST_CASE("spec JSON round trip") {
  for (const auto &spec : sample_specs())
    CHECK(spec_from_json(spec_to_json(spec)) == spec);
  CHECK_THROWS_AS(spec_from_json(json{{"kind", "Nope"}}), Error);
}
