#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "error.hpp"
#include "l2.hpp"

using namespace novikov;

namespace {

Permutation cycle(int n, std::vector<int> points) {
  Permutation p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  for (std::size_t i = 0; i < points.size(); ++i)
    p[static_cast<std::size_t>(points[i])] = points[(i + 1) % points.size()];
  return p;
}

Permutation identity(int n) { return cycle(n, {}); }

// Regular quotients of F2 of orders 2, 3, 4 and 6.
std::vector<FiniteQuotient> f2_quotients(const GroupPtr &g) {
  return {FiniteQuotient(g, {cycle(2, {0, 1}), identity(2)}),
          FiniteQuotient(g, {cycle(3, {0, 1, 2}), cycle(3, {0, 2, 1})}),
          FiniteQuotient(g, {cycle(4, {0, 1}), cycle(4, {2, 3})}),
          FiniteQuotient(g, {cycle(3, {0, 1}), cycle(3, {0, 1, 2})})};
}

} // namespace

TEST_CASE("euler rule on the recognized classes") {
  {
    const auto c = fixture("f2");
    const auto r = betti_by_euler_rule(c.group()->spec(), c);
    CHECK(r.betti == std::vector<Rational>{0, 1});
    CHECK(r.empty_sigma_degrees == std::vector<int>{1});
  }
  {
    const auto c = fixture("f3");
    CHECK(betti_by_euler_rule(c.group()->spec(), c).betti == std::vector<Rational>{0, 2});
  }
  {
    const auto c = fixture("f2xf2");
    const auto r = betti_by_euler_rule(c.group()->spec(), c);
    CHECK(r.euler_characteristic == 1);
    CHECK(r.betti == std::vector<Rational>{0, 0, 1});
    CHECK(r.empty_sigma_degrees == std::vector<int>{2});
    CHECK(predicted_empty_from(c) == 2);
  }
  {
    const auto c = fixture("mapping-torus");
    const auto r = betti_by_euler_rule(c.group()->spec(), c);
    CHECK(std::all_of(r.betti.begin(), r.betti.end(), [](const Rational &b) { return b.is_zero(); }));
    CHECK(r.empty_sigma_degrees.empty());
    CHECK_FALSE(predicted_empty_from(c).has_value());
  }
  for (const std::string name : {"torus", "circle", "f1"}) {
    const auto c = fixture(name);
    CAPTURE(name);
    try {
      betti_by_euler_rule(c.group()->spec(), c);
      FAIL("expected unsupported");
    } catch (const Error &e) {
      CHECK(e.kind() == ErrorKind::Unsupported);
    }
  }
  // Alternating sum of the rule equals the Euler characteristic.
  for (const std::string name : {"f2", "f3", "f2xf2", "mapping-torus"}) {
    const auto c = fixture(name);
    const auto r = betti_by_euler_rule(c.group()->spec(), c);
    Rational alt(0);
    for (std::size_t p = 0; p < r.betti.size(); ++p)
      alt += (p % 2 ? Rational(-1) : Rational(1)) * r.betti[p];
    CHECK(alt == Rational(c.euler_characteristic()));
  }
}

TEST_CASE("free group covers follow Nielsen-Schreier") {
  const auto c = fixture("f2");
  const auto qs = f2_quotients(c.group());
  const auto rep = betti_by_quotients(c, qs);
  REQUIRE(rep.quotients.size() == 4);
  const std::vector<int> orders{2, 3, 4, 6};
  for (std::size_t i = 0; i < 4; ++i) {
    const auto &q = rep.quotients[i];
    const int m = orders[i];
    CHECK(q.order == m);
    // A connected m-sheeted cover of a wedge of two circles has rank m + 1.
    CHECK(q.betti == std::vector<int>{1, m + 1});
    CHECK(q.normalized[1] == Rational(1) + Rational(1, m));
    CHECK(q.alternating_sum == Rational(-1));
  }
  CHECK(rep.to_json().dump() == betti_by_quotients(c, qs).to_json().dump());
}

TEST_CASE("random quotients conserve the Euler characteristic") {
  std::mt19937_64 rng(83);
  for (const std::string name : {"f2", "f3", "f2xf2"}) {
    const auto c = fixture(name);
    const int gens = c.group()->generator_count();
    for (int it = 0; it < 6; ++it) {
      const int n = 2 + static_cast<int>(rng() % 3);
      std::vector<Permutation> images;
      for (int gi = 0; gi < gens; ++gi) {
        Permutation p(static_cast<std::size_t>(n));
        std::iota(p.begin(), p.end(), 0);
        std::shuffle(p.begin(), p.end(), rng);
        images.push_back(p);
      }
      if (name == "f2xf2") {
        // Factors must commute: the second factor acts trivially.
        images[2] = identity(n);
        images[3] = identity(n);
      }
      const FiniteQuotient q(c.group(), images);
      const auto rep = betti_by_quotients(c, {q});
      const auto &e = rep.quotients.front();
      CHECK(e.alternating_sum == Rational(c.euler_characteristic()));
      for (int p = 0; p <= c.top(); ++p) {
        CHECK(e.normalized[static_cast<std::size_t>(p)] >= Rational(0));
        CHECK(e.normalized[static_cast<std::size_t>(p)] <= Rational(c.rank(p)));
      }
      CHECK(e.betti[0] == 1);
      if (name != "f2xf2")
        CHECK(e.betti[1] == 1 + e.order * (gens - 1));
    }
  }
}

TEST_CASE("torus covers are tori") {
  const auto c = fixture("torus");
  for (int n = 2; n <= 5; ++n) {
    std::vector<int> pts(static_cast<std::size_t>(n));
    std::iota(pts.begin(), pts.end(), 0);
    const FiniteQuotient cyclic(c.group(), {cycle(n, pts), identity(n)});
    const auto e = betti_by_quotients(c, {cyclic}).quotients.front();
    CHECK(e.betti == std::vector<int>{1, 2, 1});
    CHECK(e.normalized[1] == Rational(2, n));
    // Z/n x Z/n acting on n^2 points.
    Permutation a(static_cast<std::size_t>(n * n)), b(a.size());
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y) {
        a[static_cast<std::size_t>(x * n + y)] = ((x + 1) % n) * n + y;
        b[static_cast<std::size_t>(x * n + y)] = x * n + (y + 1) % n;
      }
    const auto sq = betti_by_quotients(c, {FiniteQuotient(c.group(), {a, b})}).quotients.front();
    CHECK(sq.order == n * n);
    CHECK(sq.normalized[1] == Rational(2, n * n));
    CHECK(sq.normalized[1] <= Rational(1, n));
    CHECK(sq.alternating_sum == Rational(0));
  }
}

TEST_CASE("quotients must respect the relations") {
  const auto torus = fixture("torus");
  try {
    FiniteQuotient(torus.group(), {cycle(3, {0, 1}), cycle(3, {1, 2})});
    FAIL("expected an invalid quotient");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::InvalidQuotient);
  }
  const auto mt = fixture("mapping-torus");
  // Trivial fiber, t acting as a 4-cycle: a homomorphism onto Z/4.
  const FiniteQuotient ok(mt.group(), {identity(4), identity(4), cycle(4, {0, 1, 2, 3})});
  CHECK(betti_by_quotients(mt, {ok}).quotients.front().alternating_sum == Rational(0));
  // a -> (01), b -> id breaks t a t^-1 = b.
  CHECK_THROWS_AS(FiniteQuotient(mt.group(), {cycle(2, {0, 1}), identity(2), identity(2)}), Error);
  CHECK_THROWS_AS(FiniteQuotient(torus.group(), {cycle(2, {0, 1})}), Error);
  CHECK_THROWS_AS(betti_by_quotients(torus, {FiniteQuotient(fixture("f2").group(),
                                                            {cycle(2, {0, 1}), identity(2)})}),
                  Error);
}
