#include <doctest.h>

#include "bnsr.hpp"
#include "error.hpp"

using namespace novikov;

namespace {

ContractionCertificate find(const ChainComplex &c, std::vector<std::int64_t> v, int k, int L) {
  SearchParams p;
  p.degree = k;
  p.word_length = L;
  auto out = search_contraction(c, Character(*c.group(), v), p);
  REQUIRE(out.certificate.has_value());
  return *out.certificate;
}

CampaignParams small_params(int degree) {
  CampaignParams p;
  p.degree = degree;
  p.word_length = 4;
  p.witness_depth = 3;
  p.threads = 2;
  return p;
}

} // namespace

TEST_CASE("default character samples") {
  // 3^n - 1 sign patterns, restricted to valid characters.
  CHECK(default_characters(*fixture("torus").group()).size() == 8);
  CHECK(default_characters(*fixture("f2").group()).size() == 8);
  CHECK(default_characters(*fixture("f2xf2").group()).size() == 80);
  const auto mt = default_characters(*fixture("mapping-torus").group());
  REQUIRE(mt.size() == 2);
  CHECK(mt[0].values() == std::vector<std::int64_t>{0, 0, -1});
  CHECK(mt[1].values() == std::vector<std::int64_t>{0, 0, 1});
}

TEST_CASE("torus campaign certifies every character") {
  const auto c = fixture("torus");
  const auto rep = run_campaign(c, default_characters(*c.group()), small_params(2));
  CHECK(rep.exit_code() == 0);
  CHECK_FALSE(rep.empty_from.has_value());
  for (const auto &o : rep.outcomes) {
    CHECK(o.outcome == "certified-in-Sigma");
    CHECK(o.certificate_reverified);
    REQUIRE(o.certificate.has_value());
    CHECK(verify_certificate(*o.certificate, c).accepted);
  }
  // Identical reports regardless of thread count.
  CampaignParams one = small_params(2);
  one.threads = 1;
  CHECK(run_campaign(c, default_characters(*c.group()), one).to_json().dump() ==
        rep.to_json().dump());
}

TEST_CASE("free group campaign is consistent with the prediction") {
  const auto c = fixture("f2");
  const auto rep = run_campaign(c, default_characters(*c.group()), small_params(1));
  CHECK(rep.exit_code() == 0);
  CHECK(rep.empty_from == 1);
  for (const auto &o : rep.outcomes) {
    CHECK_FALSE(o.certificate.has_value());
    CHECK(o.certified_through == 0);
    CHECK(o.witness_degree == 1);
    CHECK(o.outcome == "witness-persistent");
  }
  const json j = rep.to_json();
  CHECK(j.at("counts").at("certified") == 0);
  CHECK(j.contains("prediction"));
  CHECK_FALSE(rep.summary().empty());
}

TEST_CASE("outcomes are invariant along rays") {
  for (const auto &[name, chars] :
       std::vector<std::pair<std::string, std::vector<std::vector<std::int64_t>>>>{
           {"torus", {{1, 0}, {1, -1}}},
           {"f2", {{1, 0}, {1, 1}}},
           {"mapping-torus", {{0, 0, 1}, {0, 0, -1}}}}) {
    const auto c = fixture(name);
    for (const auto &v : chars) {
      const Character base(*c.group(), v);
      std::optional<bool> first;
      for (std::int64_t k = 1; k <= 3; ++k) {
        SearchParams p;
        p.degree = 1;
        p.word_length = 4;
        const bool found = search_contraction(c, base.scaled(k), p).certificate.has_value();
        CAPTURE(name);
        CAPTURE(k);
        if (!first)
          first = found;
        CHECK(found == *first);
      }
    }
  }
}

TEST_CASE("antipodal characters are run independently") {
  const auto c = fixture("mapping-torus");
  const auto chars = default_characters(*c.group());
  CampaignParams p = small_params(1);
  const auto both = run_campaign(c, chars, p);
  REQUIRE(both.outcomes.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    const auto &o = both.outcomes[i];
    CHECK(o.outcome == "certified-in-Sigma");
    REQUIRE(o.certificate.has_value());
    CHECK(o.certificate->chi == chars[i]);
    // A campaign over one character alone reaches the same outcome.
    const auto alone = run_campaign(c, {chars[i]}, p);
    const auto &a = alone.outcomes.front();
    CHECK(a.outcome == o.outcome);
    REQUIRE(a.certificate.has_value());
    CHECK(a.certificate->to_json().dump() == o.certificate->to_json().dump());
  }
}

TEST_CASE("exit codes") {
  CampaignReport r;
  CHECK(r.exit_code() == 0);
  r.budget_limited = true;
  CHECK(r.exit_code() == 2);
  r.fatal.push_back("certificate contradicts prediction");
  CHECK(r.exit_code() == 3);
}

TEST_CASE("certificates transfer to finite-index subgroups") {
  {
    const auto c = fixture("torus");
    const auto cert = find(c, {1, -1}, 2, 3);
    const auto table = CosetTable::from_json(json{{"actions", {{1, 0}, {0, 1}}}});
    CHECK(finite_index_transfer_check(cert, c, table).accepted);
    const auto data = restrict_to_subgroup(cert, c, table);
    CHECK(data.index == 2);
    CHECK(data.ranks == std::vector<int>{2, 4, 2});

    // Corrupt one restricted coefficient.
    RestrictedData bad = data;
    for (auto &m : bad.maps)
      if (m.rows() > 0 && m.cols() > 0) {
        m.at(0, 0) = m.at(0, 0) + GroupRingElement::scalar(c.group(), Rational(1));
        break;
      }
    const Character chi = cert.chi;
    const auto v = verify_restricted(bad, c, table, chi);
    CHECK_FALSE(v.accepted);
    CHECK(v.degree >= 0);
  }
  {
    const auto c = fixture("circle");
    const auto cert = find(c, {1}, 1, 3);
    const auto table = CosetTable::from_json(json{{"actions", {{1, 2, 0}}}});
    CHECK(finite_index_transfer_check(cert, c, table).accepted);
    // Oracle: the restricted P = I - d H has a power that is entrywise
    // positive in the ungraded sense, so I - P inverts over the subgroup.
    const auto data = restrict_to_subgroup(cert, c, table);
    const GroupPtr &g = c.group();
    const GRMatrix P = GRMatrix::identity(g, 3) - data.boundaries[1] * data.maps[0];
    GRMatrix power = P;
    for (int k = 1; k < 3; ++k)
      power = power * P;
    for (int r = 0; r < 3; ++r)
      for (int s = 0; s < 3; ++s)
        for (const auto &t : power.at(r, s).terms())
          CHECK(g->phi(cert.chi, t.first) > 0);
  }
  {
    const auto c = fixture("f1");
    const auto cert = find(c, {-1}, 1, 3);
    const auto table = CosetTable::from_json(json{{"actions", {{1, 2, 0}}}});
    CHECK(finite_index_transfer_check(cert, c, table).accepted);
  }
  const auto c = fixture("torus");
  const auto cert = find(c, {1, 0}, 2, 3);
  // Not transitive, and an action that breaks commutativity.
  CHECK_THROWS_AS(finite_index_transfer_check(
                      cert, c, CosetTable::from_json(json{{"actions", {{0, 1}, {0, 1}}}})),
                  Error);
  CHECK_THROWS_AS(finite_index_transfer_check(
                      cert, c, CosetTable::from_json(json{{"actions", {{1, 0, 2}, {0, 2, 1}}}})),
                  Error);
  CHECK_THROWS_AS(finite_index_transfer_check(
                      cert, c, CosetTable::from_json(json{{"actions", {{0, 0}, {0, 1}}}})),
                  Error);
  CHECK_THROWS_AS(CosetTable::from_json(json{{"actions", "none"}}), Error);
}
