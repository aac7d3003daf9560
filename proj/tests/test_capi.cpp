#include <doctest.h>

#include <memory>
#include <string>

#include <json.hpp>

#include "novikov/novikov.h"

using json = nlohmann::json;

namespace {

struct Ctx {
  nv_context *p = nv_context_new();
  ~Ctx() { nv_context_free(p); }
};

std::string take(char *s) {
  std::string out = s ? s : "";
  nv_string_free(s);
  return out;
}

json run(nv_context *ctx, const char *cmd, const json &req, int &status) {
  char *out = nullptr;
  status = nv_run(ctx, cmd, req.dump().c_str(), &out);
  const std::string s = take(out);
  return s.empty() ? json() : json::parse(s);
}

} // namespace

TEST_CASE("status names and version") {
  CHECK(std::string(nv_status_name(NV_OK)) == "ok");
  CHECK(std::string(nv_status_name(NV_USAGE)) == "usage");
  CHECK(std::string(nv_status_name(NV_INVALID_INPUT)) == "invalid-input");
  CHECK(std::string(nv_version()).size() > 0);
}

TEST_CASE("sha256 digest") {
  Ctx ctx;
  char *hex = nullptr;
  REQUIRE(nv_sha256(ctx.p, "abc", 3, &hex) == NV_OK);
  CHECK(take(hex) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("null arguments and bad input are reported") {
  Ctx ctx;
  nv_complex *c = nullptr;
  CHECK(nv_complex_from_fixture(ctx.p, nullptr, &c) == NV_USAGE);
  CHECK(nv_complex_from_fixture(ctx.p, "torus", nullptr) == NV_USAGE);
  CHECK(nv_complex_from_fixture(ctx.p, "nope", &c) == NV_INVALID_INPUT);
  CHECK(c == nullptr);
  CHECK(std::string(nv_last_error(ctx.p)).find("nope") != std::string::npos);
  CHECK(nv_complex_from_json(ctx.p, "{not json", &c) == NV_INVALID_INPUT);
  int status = 0;
  run(ctx.p, "frobnicate", json::object(), status);
  CHECK(status == NV_USAGE);
  char *out = nullptr;
  CHECK(nv_run(ctx.p, "euler", "[", &out) == NV_INVALID_INPUT);
  CHECK(out == nullptr);
}

TEST_CASE("complex handles") {
  Ctx ctx;
  nv_complex *c = nullptr;
  REQUIRE(nv_complex_from_fixture(ctx.p, "f2xf2", &c) == NV_OK);
  int64_t chi = 0;
  CHECK(nv_complex_euler(ctx.p, c, &chi) == NV_OK);
  CHECK(chi == 1);
  char *js = nullptr, *hash = nullptr;
  REQUIRE(nv_complex_to_json(ctx.p, c, &js) == NV_OK);
  REQUIRE(nv_complex_hash(ctx.p, c, &hash) == NV_OK);
  const std::string text = take(js), h = take(hash);
  nv_complex *back = nullptr;
  REQUIRE(nv_complex_from_json(ctx.p, text.c_str(), &back) == NV_OK);
  char *hash2 = nullptr;
  REQUIRE(nv_complex_hash(ctx.p, back, &hash2) == NV_OK);
  CHECK(take(hash2) == h);
  nv_complex_free(back);
  nv_complex_free(c);

  char *names = nullptr;
  REQUIRE(nv_fixture_names(ctx.p, &names) == NV_OK);
  CHECK(json::parse(take(names)).size() == 7);
}

TEST_CASE("search, verify and reject through handles") {
  Ctx ctx;
  nv_complex *torus = nullptr, *f2 = nullptr;
  REQUIRE(nv_complex_from_fixture(ctx.p, "torus", &torus) == NV_OK);
  REQUIRE(nv_complex_from_fixture(ctx.p, "f2", &f2) == NV_OK);

  nv_certificate *cert = nullptr;
  char *report = nullptr;
  const json params = {{"character", {1, -1}}, {"degree", 2}, {"word_length", 3}};
  REQUIRE(nv_search_contraction(ctx.p, torus, params.dump().c_str(), &cert, &report) == NV_OK);
  REQUIRE(cert != nullptr);
  CHECK(json::parse(take(report)).contains("unknowns"));

  char *verdict = nullptr;
  CHECK(nv_verify_certificate(ctx.p, cert, torus, &verdict) == NV_OK);
  CHECK(json::parse(take(verdict)).at("accepted") == true);
  // Bound to its complex.
  CHECK(nv_verify_certificate(ctx.p, cert, f2, nullptr) == NV_INVALID_INPUT);
  CHECK(std::string(nv_last_error_kind(ctx.p)) == "wrong-complex");

  // Flip one coefficient and reload.
  char *cj = nullptr;
  REQUIRE(nv_certificate_to_json(ctx.p, cert, &cj) == NV_OK);
  json j = json::parse(take(cj));
  bool flipped = false;
  for (auto &m : j.at("maps"))
    for (auto &row : m.at("entries"))
      for (auto &entry : row)
        for (auto &term : entry)
          if (!flipped) {
            term["coeff"] = term.at("coeff").get<std::string>() == "7" ? "8" : "7";
            flipped = true;
          }
  REQUIRE(flipped);
  nv_certificate *bad = nullptr;
  REQUIRE(nv_certificate_from_json(ctx.p, j.dump().c_str(), &bad) == NV_OK);
  char *bad_verdict = nullptr;
  CHECK(nv_verify_certificate(ctx.p, bad, torus, &bad_verdict) == NV_REJECTED);
  const json bv = json::parse(take(bad_verdict));
  CHECK(bv.at("accepted") == false);
  CHECK(bv.at("failure").contains("degree"));

  nv_certificate *none = cert;
  const json f2params = {{"character", {1, 0}}, {"degree", 1}, {"word_length", 3}};
  CHECK(nv_search_contraction(ctx.p, f2, f2params.dump().c_str(), &none, nullptr) ==
        NV_NOT_FOUND);
  CHECK(none == nullptr);

  nv_certificate_free(bad);
  nv_certificate_free(cert);
  nv_complex_free(f2);
  nv_complex_free(torus);
}

TEST_CASE("json commands") {
  Ctx ctx;
  int status = 0;
  const json e = run(ctx.p, "euler", {{"fixture", "f2xf2"}}, status);
  CHECK(status == NV_OK);
  CHECK(e.at("euler_characteristic") == 1);

  const json ore = run(ctx.p, "ore-approx",
                       {{"algebra", "Z2"},
                        {"q", {{{"power", 0}, {"coeff", {{"0", "1"}, {"1", "1"}}}}}},
                        {"qp", {{{"power", 1}, {"coeff", {{"0", "1"}}}}}},
                        {"eps", "1/4"}},
                       status);
  CHECK(status == NV_OK);
  CHECK(ore.at("exact") == true);

  const json l2 = run(ctx.p, "l2-quotients",
                      {{"fixture", "f2"}, {"quotients", {{{"images", {{1, 0}, {0, 1}}}}}}},
                      status);
  CHECK(status == NV_OK);
  CHECK(l2.at("estimates").at(0).at("normalized").at(1) == "3/2");

  const json w = run(ctx.p, "witness",
                     {{"fixture", "f2"}, {"character", {1, 0}}, {"degree", 1}, {"depth", 2}},
                     status);
  CHECK(status == NV_OK);
  CHECK(w.at("verdict") == "persistent");

  // Budget caps map to their own status.
  run(ctx.p, "search",
      {{"fixture", "f2"}, {"character", {1, 0}}, {"degree", 1}, {"word_length", 6},
       {"limits", {{"support_cap", 20}}}},
      status);
  CHECK(status == NV_BUDGET);
}
