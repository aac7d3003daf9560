#include "bnsr.hpp"

#include <algorithm>
#include <atomic>
#include <sstream>
#include <thread>

#include "error.hpp"

namespace novikov {

std::vector<Character> default_characters(const Group &group) {
  const int n = group.generator_count();
  std::vector<Character> out;
  std::vector<std::int64_t> v(static_cast<std::size_t>(n), -1);
  while (true) {
    const bool nonzero = std::any_of(v.begin(), v.end(), [](std::int64_t x) { return x != 0; });
    if (nonzero) {
      try {
        Character chi(group, v);
        // Entries in {-1,0,1} are already primitive, so rays are distinct.
        out.push_back(std::move(chi));
      } catch (const Error &e) {
        if (e.kind() != ErrorKind::InvalidInput)
          throw;
      }
    }
    int i = n - 1;
    while (i >= 0 && v[static_cast<std::size_t>(i)] == 1)
      v[static_cast<std::size_t>(i--)] = -1;
    if (i < 0)
      break;
    ++v[static_cast<std::size_t>(i)];
  }
  return out;
}

namespace {

CharacterOutcome run_one(const ChainComplex &c, const Character &chi, const CampaignParams &p,
                         std::optional<int> empty_from, std::vector<std::string> &fatal) {
  CharacterOutcome out{chi, "no-certificate", {}, false, -1, -1, {}, {}, {}, false};
  auto search = [&](int degree) -> bool {
    SearchParams sp;
    sp.degree = degree;
    sp.word_length = p.word_length;
    sp.window = p.window;
    sp.retries = p.retries;
    sp.limits = p.limits;
    SearchOutcome o = search_contraction(c, chi, sp);
    const bool found = o.certificate.has_value();
    if (found && degree == p.degree)
      out.certificate = o.certificate;
    out.searches.push_back(std::move(o));
    return found;
  };
  try {
    int failing = p.degree;
    if (search(p.degree)) {
      out.certified_through = p.degree;
      failing = -1;
    } else {
      for (int j = 0; j < p.degree; ++j) {
        if (!search(j)) {
          failing = j;
          break;
        }
        out.certified_through = j;
      }
    }
    if (out.certificate) {
      Verdict v = verify_certificate(*out.certificate, c);
      out.certificate_reverified = v.accepted;
      out.outcome = "certified-in-Sigma";
      if (!v.accepted)
        fatal.push_back(chi.str() + ": certificate fails re-verification: " + v.message);
      if (empty_from && *empty_from <= p.degree)
        fatal.push_back(chi.str() + ": certificate at degree " + std::to_string(p.degree) +
                        " contradicts the predicted empty Sigma^" + std::to_string(*empty_from));
      return out;
    }
    if (failing >= 0 && failing <= c.top()) {
      WitnessParams wp;
      wp.degree = failing;
      wp.depth = p.witness_depth;
      wp.word_length = p.witness_length.value_or(p.witness_depth + failing);
      wp.boundary_length = p.witness_boundary_length.value_or(wp.word_length);
      wp.limits = p.limits;
      out.witness_degree = failing;
      out.witness = kernel_witness(c, chi, wp);
      if (out.witness->verdict == "persistent")
        out.outcome = "witness-persistent";
      if (out.witness->verdict == "budget-exhausted")
        out.budget_limited = true;
    }
  } catch (const Error &e) {
    if (e.kind() != ErrorKind::BudgetExceeded && e.kind() != ErrorKind::Inconclusive)
      throw;
    out.error = e.what();
    out.budget_limited = true;
  }
  return out;
}

json search_summary(const SearchOutcome &o) {
  json j = o.to_json();
  j.erase("certificate");
  return j;
}

} // namespace

CampaignReport run_campaign(const ChainComplex &c, const std::vector<Character> &characters,
                            const CampaignParams &params) {
  if (params.degree < 0)
    throw Error(ErrorKind::InvalidInput, "campaign degree must be non-negative");
  for (const auto &chi : characters)
    if (chi.size() != static_cast<std::size_t>(c.group()->generator_count()))
      throw Error(ErrorKind::SpecMismatch, "character " + chi.str() + " does not fit the group");
  CampaignReport rep;
  rep.complex_name = c.name();
  rep.complex_hash = c.hash();
  rep.degree = params.degree;
  rep.params = params;
  try {
    rep.prediction = betti_by_euler_rule(c.group()->spec(), c);
    if (!rep.prediction->empty_sigma_degrees.empty())
      rep.empty_from = rep.prediction->empty_sigma_degrees.front();
  } catch (const Error &e) {
    if (e.kind() != ErrorKind::Unsupported)
      throw;
  }

  std::vector<std::optional<CharacterOutcome>> slots(characters.size());
  std::vector<std::vector<std::string>> fatal(characters.size());
  std::vector<std::exception_ptr> errors(characters.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < characters.size();) {
      try {
        slots[i] = run_one(c, characters[i], params, rep.empty_from, fatal[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int threads = std::max(1, std::min<int>(params.threads, static_cast<int>(characters.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t)
    pool.emplace_back(worker);
  worker();
  for (auto &t : pool)
    t.join();
  for (std::size_t i = 0; i < characters.size(); ++i) {
    if (errors[i])
      std::rethrow_exception(errors[i]);
    rep.budget_limited = rep.budget_limited || slots[i]->budget_limited;
    rep.outcomes.push_back(std::move(*slots[i]));
    for (auto &f : fatal[i])
      rep.fatal.push_back(std::move(f));
  }
  return rep;
}

int CampaignReport::exit_code() const {
  if (!fatal.empty())
    return 3;
  return budget_limited ? 2 : 0;
}

json CampaignReport::to_json() const {
  json outs = json::array();
  for (const auto &o : outcomes) {
    json j = {{"character", o.chi.values()},
              {"outcome", o.outcome},
              {"certified_through", o.certified_through}};
    json ss = json::array();
    for (const auto &s : o.searches)
      ss.push_back(search_summary(s));
    j["searches"] = ss;
    if (o.certificate) {
      j["certificate"] = o.certificate->to_json();
      j["certificate_reverified"] = o.certificate_reverified;
    }
    if (o.witness)
      j["witness"] = o.witness->to_json();
    if (!o.error.empty())
      j["error"] = o.error;
    if (o.budget_limited)
      j["budget_limited"] = true;
    outs.push_back(std::move(j));
  }
  json pred = nullptr;
  if (prediction)
    pred = prediction->to_json();
  std::size_t certified = 0, persistent = 0;
  for (const auto &o : outcomes) {
    certified += o.outcome == "certified-in-Sigma";
    persistent += o.outcome == "witness-persistent";
  }
  return json{{"complex", {{"name", complex_name}, {"hash", complex_hash}}},
              {"degree", degree},
              {"parameters",
               {{"word_length", params.word_length},
                {"window", params.window ? json(*params.window) : json(params.word_length)},
                {"retries", params.retries},
                {"witness_depth", params.witness_depth},
                {"witness_length", params.witness_length ? json(*params.witness_length)
                                                            : json("depth+degree")},
                {"witness_boundary_length", params.witness_boundary_length
                                                ? json(*params.witness_boundary_length)
                                                : json("witness_length")}}},
              {"prediction", pred},
              {"outcomes", outs},
              {"counts",
               {{"characters", outcomes.size()},
                {"certified", certified},
                {"witness_persistent", persistent},
                {"other", outcomes.size() - certified - persistent}}},
              {"fatal", fatal},
              {"status", exit_code() == 3 ? "fatal-inconsistency"
                         : exit_code() == 2 ? "budget-limited"
                                            : "consistent"}};
}

std::string CampaignReport::summary() const {
  std::ostringstream os;
  os << "complex " << complex_name << " degree " << degree << ", " << outcomes.size()
     << " characters\n";
  if (empty_from)
    os << "euler rule: Sigma^" << *empty_from << " predicted empty\n";
  else
    os << "euler rule: no prediction\n";
  for (const auto &o : outcomes) {
    os << "  " << o.chi.str() << "  " << o.outcome;
    if (o.certified_through >= 0 && o.outcome != "certified-in-Sigma")
      os << " (certified through degree " << o.certified_through << ")";
    if (o.witness)
      os << "  witness[deg " << o.witness_degree << "] " << o.witness->verdict;
    if (!o.error.empty())
      os << "  budget: " << o.error;
    os << "\n";
  }
  for (const auto &f : fatal)
    os << "FATAL " << f << "\n";
  return os.str();
}

CosetTable CosetTable::from_json(const json &j) {
  try {
    const json &a = j.is_object() ? j.at("actions") : j;
    return {a.get<std::vector<Permutation>>()};
  } catch (const json::exception &e) {
    throw Error(ErrorKind::InvalidInput, std::string("malformed coset table: ") + e.what());
  }
}

json CosetTable::to_json() const { return json{{"actions", actions}}; }

namespace {

struct CosetData {
  int index = 0;
  std::vector<Element> transversal;
};

CosetData coset_data(const Group &g, const CosetTable &table) {
  try {
    check_permutation_action(g, table.actions);
  } catch (const Error &e) {
    throw Error(ErrorKind::InvalidInput, std::string("invalid coset table: ") + e.what());
  }
  CosetData d;
  d.index = static_cast<int>(table.actions.front().size());
  if (d.index > 64)
    throw Error(ErrorKind::InvalidInput, "coset tables are limited to index 64");
  std::vector<std::optional<Element>> s(static_cast<std::size_t>(d.index));
  s[0] = g.identity();
  std::vector<int> queue{0};
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    const int c = queue[qi];
    for (int x = 0; x < g.generator_count(); ++x)
      for (bool inv : {false, true}) {
        const auto &perm = table.actions[static_cast<std::size_t>(x)];
        int target = -1;
        if (!inv) {
          target = perm[static_cast<std::size_t>(c)];
        } else {
          for (int k = 0; k < d.index; ++k)
            if (perm[static_cast<std::size_t>(k)] == c)
              target = k;
        }
        if (!s[static_cast<std::size_t>(target)]) {
          s[static_cast<std::size_t>(target)] =
              g.multiply(g.generator(x, inv), *s[static_cast<std::size_t>(c)]);
          queue.push_back(target);
        }
      }
  }
  for (const auto &e : s)
    if (!e)
      throw Error(ErrorKind::InvalidInput, "coset table is not transitive");
  for (auto &e : s)
    d.transversal.push_back(*e);
  return d;
}

int coset_of(const Group &g, const CosetTable &table, const Element &x, int c) {
  return act(g, table.actions, x)[static_cast<std::size_t>(c)];
}

GRMatrix restrict_matrix(const GroupPtr &gp, const CosetTable &table, const CosetData &cd,
                         const GRMatrix &m) {
  const Group &g = *gp;
  const int k = cd.index;
  std::vector<std::vector<std::vector<GroupRingElement::Term>>> acc(
      static_cast<std::size_t>(m.rows() * k),
      std::vector<std::vector<GroupRingElement::Term>>(static_cast<std::size_t>(m.cols() * k)));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      for (const auto &[x, coef] : m.at(i, j).terms())
        for (int c = 0; c < k; ++c) {
          const int cp = coset_of(g, table, x, c);
          // x s_c = s_c' h with h in H
          const Element h =
              g.multiply(g.invert(cd.transversal[static_cast<std::size_t>(cp)]),
                         g.multiply(x, cd.transversal[static_cast<std::size_t>(c)]));
          acc[static_cast<std::size_t>(i * k + cp)][static_cast<std::size_t>(j * k + c)]
              .emplace_back(h, coef);
        }
  GRMatrix out(gp, m.rows() * k, m.cols() * k);
  for (int r = 0; r < out.rows(); ++r)
    for (int s = 0; s < out.cols(); ++s)
      out.at(r, s) = GroupRingElement::from_terms(
          gp, std::move(acc[static_cast<std::size_t>(r)][static_cast<std::size_t>(s)]));
  return out;
}

} // namespace

RestrictedData restrict_to_subgroup(const ContractionCertificate &cert, const ChainComplex &c,
                                    const CosetTable &table) {
  const Verdict v = verify_certificate(cert, c);
  if (!v.accepted)
    throw Error(ErrorKind::InvalidInput, "certificate rejected before restriction: " + v.message);
  const CosetData cd = coset_data(*c.group(), table);
  RestrictedData d;
  d.index = cd.index;
  d.transversal = cd.transversal;
  for (int p = 0; p <= c.top(); ++p)
    d.ranks.push_back(c.rank(p) * cd.index);
  d.boundaries.emplace_back();
  for (int p = 1; p <= c.top() + 1; ++p)
    d.boundaries.push_back(restrict_matrix(c.group(), table, cd, c.boundary(p)));
  for (const auto &h : cert.maps)
    d.maps.push_back(restrict_matrix(c.group(), table, cd, h));
  return d;
}

Verdict verify_restricted(const RestrictedData &data, const ChainComplex &c,
                          const CosetTable &table, const Character &chi) {
  const GroupPtr &gp = c.group();
  const Group &g = *gp;
  Verdict v;
  auto in_subgroup = [&](const Element &x) { return coset_of(g, table, x, 0) == 0; };
  auto rank = [&](int p) {
    return p >= 0 && p < static_cast<int>(data.ranks.size()) ? data.ranks[static_cast<std::size_t>(p)] : 0;
  };
  for (std::size_t i = 0; i < data.maps.size(); ++i) {
    const auto &h = data.maps[i];
    const int ii = static_cast<int>(i);
    if (h.rows() != rank(ii + 1) || h.cols() != rank(ii)) {
      v.message = "restricted map H_" + std::to_string(i) + " has the wrong shape";
      return v;
    }
    for (int r = 0; r < h.rows(); ++r)
      for (int s = 0; s < h.cols(); ++s)
        for (const auto &t : h.at(r, s).terms())
          if (!in_subgroup(t.first)) {
            v.degree = ii;
            v.row = r;
            v.col = s;
            v.element = g.element_to_json(t.first);
            v.message = "restricted map H_" + std::to_string(i) + " uses an element outside H";
            return v;
          }
  }
  if (data.index < 1 || static_cast<int>(data.transversal.size()) != data.index) {
    v.message = "restricted data has no transversal of the stated index";
    return v;
  }
  auto weight = [&](int basis) {
    return g.phi(chi, data.transversal[static_cast<std::size_t>(basis % data.index)]);
  };
  auto boundary = [&](int p) {
    if (p >= 1 && p < static_cast<int>(data.boundaries.size()))
      return data.boundaries[static_cast<std::size_t>(p)];
    return GRMatrix(gp, rank(p - 1), rank(p));
  };
  for (std::size_t jj = 0; jj < data.maps.size(); ++jj) {
    const int j = static_cast<int>(jj);
    GRMatrix lhs = boundary(j + 1) * data.maps[jj];
    if (j >= 1)
      lhs = lhs + data.maps[jj - 1] * boundary(j);
    for (int x = 0; x < lhs.rows(); ++x)
      for (int y = 0; y < lhs.cols(); ++y) {
        GroupRingElement e = lhs.at(x, y);
        if (x == y)
          e = e - GroupRingElement::scalar(gp, 1);
        // Positivity is graded by the transversal: the (x, y) entry h stands
        // for s_x h s_y^-1 in G.
        const std::int64_t shift = weight(x) - weight(y);
        for (const auto &t : e.terms()) {
          if (g.phi(chi, t.first) + shift > 0)
            continue;
          v.degree = j;
          v.row = x;
          v.col = y;
          v.element = g.element_to_json(t.first);
          v.expected = x == y && g.is_identity(t.first) ? Rational(1) : Rational(0);
          v.found = v.expected + t.second;
          v.message = "restricted identity fails in degree " + std::to_string(j) + " at entry (" +
                      std::to_string(x) + "," + std::to_string(y) + "), element " +
                      g.element_to_string(t.first);
          return v;
        }
      }
  }
  v.accepted = true;
  v.message = "restricted certificate verified over an index-" + std::to_string(data.index) +
              " subgroup";
  return v;
}

Verdict finite_index_transfer_check(const ContractionCertificate &cert, const ChainComplex &c,
                                    const CosetTable &table) {
  const RestrictedData d = restrict_to_subgroup(cert, c, table);
  return verify_restricted(d, c, table, cert.chi);
}

} // namespace novikov
