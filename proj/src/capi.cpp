#include "novikov/novikov.h"

#include <cstdlib>
#include <cstring>
#include <optional>
#include <string>

#include "bnsr.hpp"
#include "contraction.hpp"
#include "error.hpp"
#include "l2.hpp"
#include "ore.hpp"

using novikov::json;

struct nv_context {
  std::string error;
  std::string kind;
};

struct nv_complex {
  novikov::ChainComplex c;
};

struct nv_certificate {
  novikov::ContractionCertificate cert;
};

namespace {

constexpr const char *kVersion = "1.0.0";

int status_for(novikov::ErrorKind k) {
  using novikov::ErrorKind;
  switch (k) {
  case ErrorKind::BudgetExceeded:
  case ErrorKind::Inconclusive:
    return NV_BUDGET;
  case ErrorKind::Internal:
    return NV_INTERNAL;
  default:
    return NV_INVALID_INPUT;
  }
}

char *dup_string(const std::string &s) {
  char *out = static_cast<char *>(std::malloc(s.size() + 1));
  if (out)
    std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void put(char **out, const std::string &s) {
  if (out)
    *out = dup_string(s);
}

// Runs f, translating exceptions into status codes recorded on ctx.
template <class F> int guarded(nv_context *ctx, F &&f) {
  if (!ctx)
    return NV_USAGE;
  ctx->error.clear();
  ctx->kind.clear();
  try {
    return f();
  } catch (const novikov::Error &e) {
    ctx->error = e.what();
    ctx->kind = novikov::to_string(e.kind());
    return status_for(e.kind());
  } catch (const json::exception &e) {
    ctx->error = std::string("malformed JSON: ") + e.what();
    ctx->kind = "invalid-input";
    return NV_INVALID_INPUT;
  } catch (const std::bad_alloc &) {
    ctx->error = "out of memory";
    ctx->kind = "budget-exceeded";
    return NV_BUDGET;
  } catch (const std::exception &e) {
    ctx->error = e.what();
    ctx->kind = "internal";
    return NV_INTERNAL;
  }
}

int usage(nv_context *ctx, const std::string &msg) {
  ctx->error = msg;
  ctx->kind = "usage";
  return NV_USAGE;
}

json parse(const char *text) {
  if (!text || !*text)
    return json::object();
  return json::parse(text);
}

novikov::EnumerationLimits limits_from(const json &req) {
  novikov::EnumerationLimits lim;
  if (auto it = req.find("limits"); it != req.end()) {
    lim.max_length = it->value("max_length", lim.max_length);
    lim.support_cap = it->value("support_cap", lim.support_cap);
  }
  return lim;
}

novikov::ChainComplex complex_from(const json &req) {
  if (auto it = req.find("fixture"); it != req.end())
    return novikov::fixture(it->get<std::string>());
  if (auto it = req.find("complex"); it != req.end()) {
    if (it->is_string())
      return novikov::fixture(it->get<std::string>());
    if (auto g = req.find("group"); g != req.end()) {
      const novikov::GroupSpec spec = novikov::spec_from_json(*g);
      return novikov::ChainComplex::from_json(*it, &spec);
    }
    return novikov::ChainComplex::from_json(*it);
  }
  throw novikov::Error(novikov::ErrorKind::InvalidInput, "request needs a fixture or a complex");
}

novikov::Character character_from(const novikov::ChainComplex &c, const json &req) {
  if (!req.contains("character"))
    throw novikov::Error(novikov::ErrorKind::InvalidInput, "request needs a character");
  return novikov::Character::from_json(*c.group(), req.at("character"));
}

novikov::ContractionCertificate certificate_from(const json &req) {
  if (!req.contains("certificate"))
    throw novikov::Error(novikov::ErrorKind::InvalidInput, "request needs a certificate");
  return novikov::ContractionCertificate::from_json(req.at("certificate"));
}

novikov::SearchParams search_params(const json &req) {
  novikov::SearchParams p;
  p.degree = req.value("degree", p.degree);
  p.word_length = req.value("word_length", p.word_length);
  if (req.contains("window") && !req.at("window").is_null())
    p.window = req.at("window").get<int>();
  p.retries = req.value("retries", p.retries);
  p.limits = limits_from(req);
  return p;
}

int cmd_search(const json &req, json &resp) {
  const auto c = complex_from(req);
  const auto chi = character_from(c, req);
  const auto out = novikov::search_contraction(c, chi, search_params(req));
  resp = out.to_json();
  return out.certificate ? NV_OK : NV_NOT_FOUND;
}

int cmd_verify(const json &req, json &resp) {
  const auto c = complex_from(req);
  const auto cert = certificate_from(req);
  const auto v = novikov::verify_certificate(cert, c);
  resp = v.to_json();
  return v.accepted ? NV_OK : NV_REJECTED;
}

int cmd_rebuild(const json &req, json &resp) {
  const auto c = complex_from(req);
  const auto cert = certificate_from(req);
  const auto v = novikov::verify_certificate(cert, c);
  if (!v.accepted) {
    resp = {{"verdict", v.to_json()}};
    return NV_REJECTED;
  }
  novikov::NovikovOptions opts;
  opts.support_cap = limits_from(req).support_cap;
  const auto ctx = novikov::make_context(c.group(), cert.chi, opts);
  const auto H = novikov::novikov_homotopy(c, cert, ctx);
  const std::int64_t r = req.value("radius", cert.positivity_radius);
  const int doublings = req.value("max_doublings", 10);
  const auto res = novikov::rebuild_all(c, H, r, doublings);
  json degrees = json::array();
  for (std::size_t i = 0; i < res.size(); ++i)
    degrees.push_back({{"degree", i},
                       {"radius", res[i].radius},
                       {"verify_radius", res[i].verify_radius},
                       {"division_closure", res[i].H.in_division_closure()},
                       {"max_leaf_degree", res[i].H.max_leaf_degree()},
                       {"expression", res[i].H.to_json()},
                       {"truncation", res[i].H.truncate(res[i].verify_radius).to_json()}});
  resp = {{"complex", {{"name", c.name()}, {"hash", c.hash()}}},
          {"character", cert.chi.to_json()},
          {"input_radius", r},
          {"degrees", degrees}};
  return NV_OK;
}

int cmd_witness(const json &req, json &resp) {
  const auto c = complex_from(req);
  const auto chi = character_from(c, req);
  novikov::WitnessParams p;
  p.degree = req.value("degree", p.degree);
  p.depth = req.value("depth", p.depth);
  p.word_length = req.value("word_length", p.depth + p.degree);
  if (req.contains("boundary_length"))
    p.boundary_length = req.at("boundary_length").get<int>();
  p.limits = limits_from(req);
  const auto rep = novikov::kernel_witness(c, chi, p);
  resp = rep.to_json();
  return rep.verdict == "budget-exhausted" ? NV_BUDGET : NV_OK;
}

int cmd_campaign(const json &req, json &resp) {
  const auto c = complex_from(req);
  std::vector<novikov::Character> chars;
  const json sel = req.value("characters", json("auto"));
  if (sel.is_string()) {
    if (sel.get<std::string>() != "auto")
      throw novikov::Error(novikov::ErrorKind::InvalidInput, "characters must be \"auto\" or a list");
    chars = novikov::default_characters(*c.group());
  } else {
    for (const auto &v : sel)
      chars.push_back(novikov::Character::from_json(*c.group(), v));
  }
  novikov::CampaignParams p;
  p.degree = req.value("degree", p.degree);
  p.word_length = req.value("word_length", p.word_length);
  if (req.contains("window") && !req.at("window").is_null())
    p.window = req.at("window").get<int>();
  p.retries = req.value("retries", p.retries);
  p.witness_depth = req.value("witness_depth", p.witness_depth);
  if (req.contains("witness_length") && !req.at("witness_length").is_null())
    p.witness_length = req.at("witness_length").get<int>();
  if (req.contains("witness_boundary_length"))
    p.witness_boundary_length = req.at("witness_boundary_length").get<int>();
  p.threads = req.value("threads", p.threads);
  p.limits = limits_from(req);
  const auto rep = novikov::run_campaign(c, chars, p);
  resp = rep.to_json();
  resp["summary"] = rep.summary();
  return rep.exit_code();
}

int cmd_transfer(const json &req, json &resp) {
  const auto c = complex_from(req);
  const auto cert = certificate_from(req);
  if (!req.contains("cosets"))
    throw novikov::Error(novikov::ErrorKind::InvalidInput, "request needs a coset table");
  const auto table = novikov::CosetTable::from_json(req.at("cosets"));
  const auto v = novikov::finite_index_transfer_check(cert, c, table);
  resp = v.to_json();
  return v.accepted ? NV_OK : NV_REJECTED;
}

novikov::AlgebraPtr algebra_from(const json &req) {
  if (!req.contains("algebra"))
    throw novikov::Error(novikov::ErrorKind::InvalidInput, "instance needs an algebra");
  return novikov::FiniteTracedAlgebra::from_json(req.at("algebra"));
}

novikov::Rational rational_from(const json &j) {
  if (j.is_number_integer())
    return novikov::Rational(j.get<std::int64_t>());
  return novikov::Rational::parse(j.get<std::string>());
}

int cmd_ore(const json &req, json &resp) {
  const auto alg = algebra_from(req);
  const auto q = novikov::TwistedPoly::from_json(alg, req.at("q"));
  const auto qp = novikov::TwistedPoly::from_json(alg, req.at("qp"));
  const auto eps = rational_from(req.value("eps", json("1/2")));
  const auto seed = req.value("seed", std::uint64_t{0});
  const auto res = novikov::approx_ore(q, qp, eps, seed);
  resp = res.to_json();
  resp["algebra"] = alg->name();
  resp["eps"] = eps.str();
  resp["seed"] = seed;
  return NV_OK;
}

int cmd_common_multiple(const json &req, json &resp) {
  const auto alg = algebra_from(req);
  std::vector<novikov::TwistedPoly> q, qp;
  for (const auto &p : req.at("q"))
    q.push_back(novikov::TwistedPoly::from_json(alg, p));
  for (const auto &p : req.at("qp"))
    qp.push_back(novikov::TwistedPoly::from_json(alg, p));
  const auto seed = req.value("seed", std::uint64_t{0});
  resp = novikov::common_multiple(q, qp, seed).to_json();
  resp["seed"] = seed;
  return NV_OK;
}

int cmd_l2(const json &req, json &resp) {
  const auto c = complex_from(req);
  std::vector<novikov::FiniteQuotient> qs;
  for (const auto &q : req.at("quotients"))
    qs.push_back(novikov::FiniteQuotient::from_json(c.group(), q));
  resp = novikov::betti_by_quotients(c, qs).to_json();
  return NV_OK;
}

int cmd_euler(const json &req, json &resp) {
  const auto c = complex_from(req);
  resp = {{"complex", {{"name", c.name()}, {"hash", c.hash()}}},
          {"ranks", c.ranks()},
          {"euler_characteristic", c.euler_characteristic()}};
  try {
    resp["l2"] = novikov::betti_by_euler_rule(c.group()->spec(), c).to_json();
  } catch (const novikov::Error &e) {
    if (e.kind() != novikov::ErrorKind::Unsupported)
      throw;
    resp["l2"] = {{"method", "euler-rule"}, {"unsupported", e.what()}};
  }
  return NV_OK;
}

int cmd_fixtures(const json &req, json &resp) {
  const bool full = req.value("materialize", false);
  json list = json::array();
  for (const auto &name : novikov::fixture_names()) {
    const auto c = novikov::fixture(name);
    json f = {{"name", name},
              {"description", novikov::fixture_description(name)},
              {"hash", c.hash()},
              {"ranks", c.ranks()},
              {"euler_characteristic", c.euler_characteristic()}};
    if (full)
      f["complex"] = c.to_json();
    list.push_back(std::move(f));
  }
  resp = {{"fixtures", list}};
  return NV_OK;
}

} // namespace

extern "C" {

const char *nv_version(void) { return kVersion; }

const char *nv_status_name(int status) {
  switch (status) {
  case NV_OK:
    return "ok";
  case NV_NOT_FOUND:
    return "not-found";
  case NV_BUDGET:
    return "budget";
  case NV_INCONSISTENT:
    return "inconsistent";
  case NV_REJECTED:
    return "rejected";
  case NV_USAGE:
    return "usage";
  case NV_INVALID_INPUT:
    return "invalid-input";
  case NV_INTERNAL:
    return "internal";
  default:
    return "unknown";
  }
}

nv_context *nv_context_new(void) { return new (std::nothrow) nv_context(); }
void nv_context_free(nv_context *ctx) { delete ctx; }
const char *nv_last_error(const nv_context *ctx) { return ctx ? ctx->error.c_str() : ""; }
const char *nv_last_error_kind(const nv_context *ctx) { return ctx ? ctx->kind.c_str() : ""; }
void nv_string_free(char *s) { std::free(s); }

int nv_fixture_names(nv_context *ctx, char **json_out) {
  return guarded(ctx, [&]() -> int {
    put(json_out, json(novikov::fixture_names()).dump());
    return NV_OK;
  });
}

int nv_complex_from_fixture(nv_context *ctx, const char *name, nv_complex **out) {
  return guarded(ctx, [&]() -> int {
    if (!name || !out)
      return usage(ctx, "fixture name and output handle are required");
    *out = new nv_complex{novikov::fixture(name)};
    return NV_OK;
  });
}

int nv_complex_from_json(nv_context *ctx, const char *text, nv_complex **out) {
  return guarded(ctx, [&]() -> int {
    if (!text || !out)
      return usage(ctx, "JSON text and output handle are required");
    *out = new nv_complex{complex_from(json{{"complex", json::parse(text)}})};
    return NV_OK;
  });
}

void nv_complex_free(nv_complex *c) { delete c; }

int nv_sha256(nv_context *ctx, const void *data, size_t len, char **hex_out) {
  return guarded(ctx, [&]() -> int {
    if (!data && len > 0)
      return usage(ctx, "data pointer is null");
    put(hex_out, novikov::sha256_hex(std::string(static_cast<const char *>(data), len)));
    return NV_OK;
  });
}

int nv_complex_to_json(nv_context *ctx, const nv_complex *c, char **json_out) {
  return guarded(ctx, [&]() -> int {
    if (!c)
      return usage(ctx, "complex handle is null");
    put(json_out, c->c.to_json().dump());
    return NV_OK;
  });
}

int nv_complex_hash(nv_context *ctx, const nv_complex *c, char **hash_out) {
  return guarded(ctx, [&]() -> int {
    if (!c)
      return usage(ctx, "complex handle is null");
    put(hash_out, c->c.hash());
    return NV_OK;
  });
}

int nv_complex_euler(nv_context *ctx, const nv_complex *c, int64_t *out) {
  return guarded(ctx, [&]() -> int {
    if (!c || !out)
      return usage(ctx, "complex handle and output are required");
    *out = c->c.euler_characteristic();
    return NV_OK;
  });
}

int nv_search_contraction(nv_context *ctx, const nv_complex *c, const char *params_json,
                          nv_certificate **out, char **report_out) {
  return guarded(ctx, [&]() -> int {
    if (!c || !out)
      return usage(ctx, "complex handle and output handle are required");
    *out = nullptr;
    const json req = parse(params_json);
    const auto chi = character_from(c->c, req);
    const auto res = novikov::search_contraction(c->c, chi, search_params(req));
    put(report_out, res.to_json().dump());
    if (!res.certificate)
      return NV_NOT_FOUND;
    *out = new nv_certificate{*res.certificate};
    return NV_OK;
  });
}

int nv_certificate_from_json(nv_context *ctx, const char *text, nv_certificate **out) {
  return guarded(ctx, [&]() -> int {
    if (!text || !out)
      return usage(ctx, "JSON text and output handle are required");
    *out = new nv_certificate{novikov::ContractionCertificate::from_json(json::parse(text))};
    return NV_OK;
  });
}

int nv_certificate_to_json(nv_context *ctx, const nv_certificate *cert, char **json_out) {
  return guarded(ctx, [&]() -> int {
    if (!cert)
      return usage(ctx, "certificate handle is null");
    put(json_out, cert->cert.to_json().dump());
    return NV_OK;
  });
}

void nv_certificate_free(nv_certificate *cert) { delete cert; }

int nv_verify_certificate(nv_context *ctx, const nv_certificate *cert, const nv_complex *c,
                          char **verdict_out) {
  return guarded(ctx, [&]() -> int {
    if (!cert || !c)
      return usage(ctx, "certificate and complex handles are required");
    const auto v = novikov::verify_certificate(cert->cert, c->c);
    put(verdict_out, v.to_json().dump());
    if (!v.accepted) {
      ctx->error = v.message;
      ctx->kind = "rejected";
    }
    return v.accepted ? NV_OK : NV_REJECTED;
  });
}

int nv_run(nv_context *ctx, const char *command, const char *request_json, char **response_out) {
  return guarded(ctx, [&]() -> int {
    if (!command)
      return usage(ctx, "command is required");
    const std::string cmd = command;
    const json req = parse(request_json);
    json resp;
    int status;
    if (cmd == "search")
      status = cmd_search(req, resp);
    else if (cmd == "verify")
      status = cmd_verify(req, resp);
    else if (cmd == "rebuild")
      status = cmd_rebuild(req, resp);
    else if (cmd == "witness")
      status = cmd_witness(req, resp);
    else if (cmd == "campaign")
      status = cmd_campaign(req, resp);
    else if (cmd == "transfer")
      status = cmd_transfer(req, resp);
    else if (cmd == "ore-approx")
      status = cmd_ore(req, resp);
    else if (cmd == "common-multiple")
      status = cmd_common_multiple(req, resp);
    else if (cmd == "l2-quotients")
      status = cmd_l2(req, resp);
    else if (cmd == "euler")
      status = cmd_euler(req, resp);
    else if (cmd == "fixtures")
      status = cmd_fixtures(req, resp);
    else
      return usage(ctx, "unknown command '" + cmd + "'");
    put(response_out, resp.dump());
    return status;
  });
}

} // extern "C"
