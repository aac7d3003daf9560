#include <doctest.h>

#include <map>
#include <random>

#include "complex.hpp"
#include "error.hpp"

using namespace novikov;

TEST_CASE("fixtures are chain complexes with the expected Euler characteristics") {
  const std::map<std::string, int> chi = {{"circle", 0}, {"torus", 0}, {"f1", 0},
                                          {"f2", -1},    {"f3", -2},   {"f2xf2", 1},
                                          {"mapping-torus", 0}};
  CHECK(fixture_names().size() == chi.size());
  for (const auto &name : fixture_names()) {
    const auto c = fixture(name);
    CAPTURE(name);
    CHECK(c.euler_characteristic() == chi.at(name));
    for (int i = 1; i < c.top(); ++i)
      CHECK((c.boundary(i) * c.boundary(i + 1)).is_zero());
    // Augmentation of d_1 vanishes: every entry is of the form x - 1.
    for (int j = 0; j < c.rank(1); ++j)
      CHECK(c.boundary(1).at(0, j).augmentation().is_zero());
  }
  CHECK(fixture("f2xf2").ranks() == std::vector<int>{1, 4, 4});
  CHECK(fixture("mapping-torus").ranks() == std::vector<int>{1, 3, 2});
  CHECK_THROWS_AS(fixture("nope"), Error);
}

TEST_CASE("Fox derivatives satisfy the fundamental formula") {
  std::mt19937_64 rng(43);
  for (const auto &spec : {GroupSpec::free_group(3), GroupSpec::free_abelian(2)}) {
    const GroupPtr g = Group::make(spec);
    const int n = g->generator_count();
    for (int it = 0; it < 100; ++it) {
      Word w;
      for (int k = 0; k < 8; ++k) {
        const int gen = static_cast<int>(rng() % static_cast<unsigned>(n)) + 1;
        w.push_back(rng() % 2 ? gen : -gen);
      }
      const auto D = fox_derivatives(g, w);
      GroupRingElement rhs(g);
      for (int j = 0; j < n; ++j) {
        const auto xm1 = GroupRingElement::monomial(g, g->generator(j)) -
                         GroupRingElement::scalar(g, Rational(1));
        rhs = rhs + xm1 * D[static_cast<std::size_t>(j)];
      }
      const auto lhs =
          GroupRingElement::monomial(g, g->from_word(w)) - GroupRingElement::scalar(g, Rational(1));
      CHECK(lhs == rhs);
    }
  }
}

TEST_CASE("JSON round trip preserves the hash") {
  for (const auto &name : fixture_names()) {
    const auto c = fixture(name);
    const auto back = ChainComplex::from_json(c.to_json());
    CHECK(back.hash() == c.hash());
    CHECK(back.ranks() == c.ranks());
    for (int i = 1; i <= c.top(); ++i)
      CHECK(back.boundary(i) == c.boundary(i));
  }
  CHECK(fixture("torus").hash() != fixture("f2").hash());
}

TEST_CASE("malformed complexes are rejected") {
  const GroupPtr g = Group::make(GroupSpec::free_group(1));
  GRMatrix d1(g, 1, 1), d2(g, 1, 1);
  d1.at(0, 0) = GroupRingElement::monomial(g, g->generator(0)) - GroupRingElement::scalar(g, 1);
  d2.at(0, 0) = GroupRingElement::scalar(g, 1);
  CHECK_THROWS_AS(ChainComplex(g, {1, 1, 1}, {d1, d2}), Error);
  CHECK_THROWS_AS(ChainComplex(g, {1, 2}, {d1}), Error);
  json j = fixture("f2").to_json();
  j["ranks"] = {1, 3};
  CHECK_THROWS_AS(ChainComplex::from_json(j), Error);
  const auto spec = GroupSpec::free_group(3);
  CHECK_THROWS_AS(ChainComplex::from_json(fixture("f2").to_json(), &spec), Error);
}

TEST_CASE("product complex has the Kunneth ranks") {
  const auto f2 = presentation_complex(GroupSpec::free_group(2));
  const auto circle = presentation_complex(GroupSpec::free_group(1));
  const auto p = product_complex(f2, circle);
  CHECK(p.ranks() == std::vector<int>{1, 3, 2});
  CHECK(p.euler_characteristic() == f2.euler_characteristic() * circle.euler_characteristic());
  for (int i = 1; i < p.top(); ++i)
    CHECK((p.boundary(i) * p.boundary(i + 1)).is_zero());
}
