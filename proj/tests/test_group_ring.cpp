#include <doctest.h>

#include <map>
#include <random>

#include "error.hpp"
#include "group_ring.hpp"

using namespace novikov;

namespace {

GroupRingElement random_element(const GroupPtr &g, std::mt19937_64 &rng, int terms, int len) {
  std::vector<GroupRingElement::Term> t;
  for (int i = 0; i < terms; ++i) {
    Word w;
    const int l = static_cast<int>(rng() % static_cast<unsigned>(len + 1));
    for (int k = 0; k < l; ++k) {
      const int gen = static_cast<int>(rng() % static_cast<unsigned>(g->generator_count())) + 1;
      w.push_back(rng() % 2 ? gen : -gen);
    }
    t.emplace_back(g->from_word(w), Rational(static_cast<std::int64_t>(rng() % 7) - 3,
                                             static_cast<std::int64_t>(rng() % 3) + 1));
  }
  return GroupRingElement::from_terms(g, std::move(t));
}

// Oracle product: schoolbook convolution through a std::map keyed by words.
std::map<Word, Rational> naive_product(const GroupPtr &g, const GroupRingElement &a,
                                       const GroupRingElement &b) {
  std::map<Word, Rational> out;
  for (const auto &[x, cx] : a.terms())
    for (const auto &[y, cy] : b.terms())
      out[g->canonical_word(g->multiply(x, y))] += cx * cy;
  for (auto it = out.begin(); it != out.end();)
    it = it->second.is_zero() ? out.erase(it) : std::next(it);
  return out;
}

std::map<Word, Rational> as_map(const GroupPtr &g, const GroupRingElement &a) {
  std::map<Word, Rational> out;
  for (const auto &[x, c] : a.terms())
    out[g->canonical_word(x)] = c;
  return out;
}

} // namespace

TEST_CASE("ring laws and product oracle") {
  std::mt19937_64 rng(17);
  for (const auto &spec :
       {GroupSpec::free_group(2), GroupSpec::free_abelian(2),
        GroupSpec::direct_product({GroupSpec::free_group(2), GroupSpec::free_group(2)}),
        GroupSpec::free_by_z(2, {Word{2}, Word{1, 2}})}) {
    const GroupPtr g = Group::make(spec);
    for (int it = 0; it < 60; ++it) {
      const auto a = random_element(g, rng, 4, 4);
      const auto b = random_element(g, rng, 4, 4);
      const auto c = random_element(g, rng, 3, 3);
      CHECK(as_map(g, a * b) == naive_product(g, a, b));
      CHECK((a * b) * c == a * (b * c));
      CHECK(a * (b + c) == a * b + a * c);
      CHECK((a + b) * c == a * c + b * c);
      CHECK((a * b).augmentation() == a.augmentation() * b.augmentation());
      CHECK((a - a).is_zero());
      CHECK(GroupRingElement::from_json(g, a.to_json()) == a);
    }
  }
}

TEST_CASE("truncation splits elements and commutes with truncated products") {
  std::mt19937_64 rng(23);
  const GroupPtr g = Group::make(GroupSpec::free_group(2));
  const Character chi(*g, std::vector<std::int64_t>{1, -2});
  for (int it = 0; it < 100; ++it) {
    const auto a = random_element(g, rng, 5, 5);
    const auto b = random_element(g, rng, 5, 5);
    for (std::int64_t r = -3; r <= 3; ++r) {
      CHECK(a.truncated(chi, r) + a.tail(chi, r) == a);
      CHECK(multiply_truncated(a, b, chi, r) == (a * b).truncated(chi, r));
      if (auto m = a.truncated(chi, r).max_degree(chi))
        CHECK(*m <= r);
      if (auto m = a.tail(chi, r).min_degree(chi))
        CHECK(*m > r);
    }
  }
}

TEST_CASE("matrices multiply associatively") {
  std::mt19937_64 rng(29);
  const GroupPtr g = Group::make(GroupSpec::free_group(2));
  auto rand_matrix = [&](int r, int c) {
    GRMatrix m(g, r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j)
        m.at(i, j) = random_element(g, rng, 2, 3);
    return m;
  };
  for (int it = 0; it < 20; ++it) {
    const auto a = rand_matrix(2, 3), b = rand_matrix(3, 2), c = rand_matrix(2, 2);
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * GRMatrix::identity(g, 3) == a);
    CHECK(GRMatrix::from_json(g, a.to_json(), 2, 3) == a);
  }
}

TEST_CASE("elements of different groups do not mix") {
  const GroupPtr f2 = Group::make(GroupSpec::free_group(2));
  const GroupPtr z2 = Group::make(GroupSpec::free_abelian(2));
  const auto a = GroupRingElement::monomial(f2, f2->generator(0));
  const auto b = GroupRingElement::monomial(z2, z2->generator(0));
  CHECK_THROWS_AS(a * b, Error);
  CHECK_THROWS_AS(a + b, Error);
  CHECK(GroupRingElement() == GroupRingElement(f2));
}
