#include "contraction.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <unordered_map>

#include "error.hpp"
#include "sparse_solver.hpp"

namespace novikov {

namespace {

constexpr const char *kCertificateFormat = "novikov-certificate/1";

json matrix_json(const GRMatrix &m) {
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"entries", m.to_json()}};
}

GRMatrix matrix_from_json(const GroupPtr &g, const json &j) {
  if (!j.is_object() || !j.contains("rows") || !j.contains("cols"))
    throw Error(ErrorKind::InvalidInput, "map needs rows, cols and entries");
  const int rows = j.at("rows").get<int>();
  const int cols = j.at("cols").get<int>();
  if (rows < 0 || cols < 0)
    throw Error(ErrorKind::InvalidInput, "negative map shape");
  return GRMatrix::from_json(g, j.value("entries", json::array()), rows, cols);
}

struct EqKey {
  int degree;
  int row;
  int col;
  Element h;
  friend bool operator==(const EqKey &, const EqKey &) = default;
};

struct EqKeyHash {
  std::size_t operator()(const EqKey &k) const noexcept {
    std::size_t h = ElementHash{}(k.h);
    h ^= static_cast<std::size_t>(k.degree) * 0x9e3779b97f4a7c15ull;
    h ^= (static_cast<std::size_t>(k.row) << 20) ^ static_cast<std::size_t>(k.col);
    return h * 0xff51afd7ed558ccdull;
  }
};

// Linear system keyed by (degree, row, col, group element); rows are created
// in first-touch order so the system is deterministic.
class EquationTable {
public:
  int row(const EqKey &key) {
    auto [it, inserted] = index_.try_emplace(key, static_cast<int>(rows_.size()));
    if (inserted) {
      keys_.push_back(key);
      rows_.emplace_back();
      rhs_.emplace_back();
    }
    return it->second;
  }
  void add(const EqKey &key, int col, const Rational &c) {
    rows_[static_cast<std::size_t>(row(key))].emplace_back(col, c);
  }
  void set_rhs(const EqKey &key, Rational v) {
    rhs_[static_cast<std::size_t>(row(key))] = std::move(v);
  }
  std::size_t size() const { return rows_.size(); }
  std::vector<SparseVec> &rows() { return rows_; }
  std::vector<Rational> &rhs() { return rhs_; }
  const std::vector<EqKey> &keys() const { return keys_; }

private:
  std::unordered_map<EqKey, int, EqKeyHash> index_;
  std::vector<EqKey> keys_;
  std::vector<SparseVec> rows_;
  std::vector<Rational> rhs_;
};

std::vector<std::int64_t> phi_table(const Group &g, const Character &chi,
                                    const std::vector<Element> &els) {
  std::vector<std::int64_t> out;
  out.reserve(els.size());
  for (const auto &e : els)
    out.push_back(g.phi(chi, e));
  return out;
}

std::optional<ContractionCertificate>
try_window(const ChainComplex &c, const Character &chi, int k, int L,
           std::int64_t lo, std::int64_t hi, const EnumerationLimits &limits,
           SearchOutcome &out) {
  const Group &g = *c.group();
  const auto support = enumerate_support(g, chi, L, lo, hi, limits);
  const auto sphi = phi_table(g, chi, support);
  const std::size_t S = support.size();

  std::vector<std::size_t> offset(static_cast<std::size_t>(k) + 2, 0);
  for (int i = 0; i <= k; ++i)
    offset[static_cast<std::size_t>(i) + 1] =
        offset[static_cast<std::size_t>(i)] +
        static_cast<std::size_t>(c.rank(i + 1)) * static_cast<std::size_t>(c.rank(i)) * S;
  const std::size_t unknowns = offset.back();
  if (unknowns > static_cast<std::size_t>(INT32_MAX) || unknowns > limits.support_cap)
    throw Error(ErrorKind::BudgetExceeded,
                "contraction search needs " + std::to_string(unknowns) + " unknowns");

  EquationTable eqs;
  const Element one = g.identity();
  for (int j = 0; j <= k; ++j)
    for (int x = 0; x < c.rank(j); ++x)
      eqs.set_rhs({j, x, x, one}, 1);

  for (int i = 0; i <= k; ++i) {
    const GRMatrix &d = c.boundary(i + 1); // rank(i) x rank(i+1)
    const int ra = c.rank(i + 1);
    const int rb = c.rank(i);
    for (int a = 0; a < ra; ++a)
      for (int b = 0; b < rb; ++b)
        for (std::size_t s = 0; s < S; ++s) {
          const int col = static_cast<int>(
              offset[static_cast<std::size_t>(i)] +
              (static_cast<std::size_t>(a) * static_cast<std::size_t>(rb) +
               static_cast<std::size_t>(b)) * S + s);
          const Element &u = support[s];
          // (d_{i+1} H_i)[x][b] picks up d[x][a] * u.
          for (int x = 0; x < rb; ++x)
            for (const auto &[e, coef] : d.at(x, a).terms())
              if (g.phi(chi, e) + sphi[s] <= 0)
                eqs.add({i, x, b, g.multiply(e, u)}, col, coef);
          // (H_i d_{i+1})[a][y] at degree i + 1 picks up u * d[b][y].
          if (i + 1 <= k)
            for (int y = 0; y < ra; ++y)
              for (const auto &[e, coef] : d.at(b, y).terms())
                if (sphi[s] + g.phi(chi, e) <= 0)
                  eqs.add({i + 1, a, y, g.multiply(u, e)}, col, coef);
        }
  }

  out.unknowns = unknowns;
  out.equations = eqs.size();
  SparseEliminator elim(static_cast<int>(unknowns));
  for (std::size_t r = 0; r < eqs.size(); ++r)
    elim.add_row(std::move(eqs.rows()[r]), std::move(eqs.rhs()[r]));
  if (!elim.consistent())
    return std::nullopt;
  const auto x = elim.solve();

  ContractionCertificate cert{c.name(), c.hash(), g.spec(), chi, k, {}, 0, L, lo, hi};
  for (int i = 0; i <= k; ++i) {
    const int ra = c.rank(i + 1);
    const int rb = c.rank(i);
    GRMatrix h(c.group(), ra, rb);
    for (int a = 0; a < ra; ++a)
      for (int b = 0; b < rb; ++b) {
        std::vector<GroupRingElement::Term> terms;
        for (std::size_t s = 0; s < S; ++s) {
          const auto &v = x[offset[static_cast<std::size_t>(i)] +
                            (static_cast<std::size_t>(a) * static_cast<std::size_t>(rb) +
                             static_cast<std::size_t>(b)) * S + s];
          if (!v.is_zero())
            terms.emplace_back(support[s], v);
        }
        h.at(a, b) = GroupRingElement::from_terms(c.group(), std::move(terms));
      }
    cert.maps.push_back(std::move(h));
  }
  return cert;
}

} // namespace

json ContractionCertificate::to_json() const {
  json maps_json = json::array();
  for (const auto &m : maps)
    maps_json.push_back(matrix_json(m));
  json cx = {{"hash", complex_hash}};
  if (!complex_name.empty())
    cx["name"] = complex_name;
  return json{{"format", kCertificateFormat},
              {"complex", cx},
              {"group", spec_to_json(group)},
              {"character", chi.to_json()},
              {"degree", degree},
              {"positivity_radius", positivity_radius},
              {"maps", maps_json},
              {"search",
               {{"word_length", word_length},
                {"window", {window_lo, window_hi}}}}};
}

ContractionCertificate ContractionCertificate::from_json(const json &j) {
  try {
    if (j.value("format", std::string()) != kCertificateFormat)
      throw Error(ErrorKind::InvalidInput, "not a contraction certificate");
    GroupSpec spec = spec_from_json(j.at("group"));
    auto g = Group::make(spec);
    Character chi = Character::from_json(*g, j.at("character"));
    ContractionCertificate cert{j.at("complex").value("name", std::string()),
                                j.at("complex").at("hash").get<std::string>(),
                                spec,
                                chi,
                                j.at("degree").get<int>(),
                                {},
                                j.value("positivity_radius", std::int64_t{0}),
                                0,
                                0,
                                0};
    if (cert.degree < 0)
      throw Error(ErrorKind::InvalidInput, "negative certificate degree");
    for (const auto &m : j.at("maps"))
      cert.maps.push_back(matrix_from_json(g, m));
    if (j.contains("search")) {
      const auto &s = j.at("search");
      cert.word_length = s.value("word_length", 0);
      if (s.contains("window")) {
        cert.window_lo = s.at("window").at(0).get<std::int64_t>();
        cert.window_hi = s.at("window").at(1).get<std::int64_t>();
      }
    }
    return cert;
  } catch (const json::exception &e) {
    throw Error(ErrorKind::InvalidInput, std::string("malformed certificate: ") + e.what());
  }
}

json SearchOutcome::to_json() const {
  json j = {{"status", certificate ? "found" : "not-found"},
            {"degree", degree},
            {"word_length", word_length},
            {"window", {-static_cast<std::int64_t>(window), window_hi}},
            {"attempts", attempts},
            {"unknowns", unknowns},
            {"equations", equations}};
  if (certificate)
    j["certificate"] = certificate->to_json();
  return j;
}

SearchOutcome search_contraction(const ChainComplex &c, const Character &chi,
                                 const SearchParams &params) {
  if (params.degree < 0 || params.word_length < 0 || params.retries < 0)
    throw Error(ErrorKind::InvalidInput, "search bounds must be non-negative");
  if (chi.size() != static_cast<std::size_t>(c.group()->generator_count()))
    throw Error(ErrorKind::SpecMismatch, "character does not match the complex group");

  SearchOutcome out;
  out.degree = params.degree;
  out.word_length = params.word_length;
  int W = params.window.value_or(params.word_length);
  if (W < 0)
    throw Error(ErrorKind::InvalidInput, "window depth must be non-negative");
  // Above 0 the window must reach far enough that negative boundary terms can
  // pull H-terms back into the checked range phi <= 0.
  const std::int64_t hi =
      std::max<std::int64_t>(0, -c.min_boundary_degree(chi, 0, params.degree + 1));
  out.window_hi = hi;

  for (int attempt = 0; attempt <= params.retries; ++attempt) {
    out.attempts = attempt + 1;
    out.window = W;
    auto cert = try_window(c, chi, params.degree, params.word_length, -W, hi,
                           params.limits, out);
    if (cert) {
      Verdict v = verify_certificate(*cert, c);
      if (!v.accepted)
        throw Error(ErrorKind::Internal,
                    "search produced a certificate that fails verification: " + v.message);
      out.certificate = std::move(cert);
      return out;
    }
    W = W == 0 ? 1 : 2 * W;
  }
  out.window = W == 1 ? 0 : W / 2;
  return out;
}

json Verdict::to_json() const {
  json j = {{"accepted", accepted}, {"message", message}};
  if (!accepted && degree >= 0) {
    j["failure"] = {{"degree", degree},
                    {"row", row},
                    {"col", col},
                    {"element", element},
                    {"expected", expected.str()},
                    {"found", found.str()}};
  }
  return j;
}

Verdict verify_certificate(const ContractionCertificate &cert, const ChainComplex &c) {
  if (cert.complex_hash != c.hash())
    throw Error(ErrorKind::WrongComplex,
                "certificate hash " + cert.complex_hash + " does not match complex " + c.hash());
  const GroupPtr &gp = c.group();
  const Group &g = *gp;
  if (!(cert.group == g.spec()))
    throw Error(ErrorKind::WrongComplex, "certificate group differs from the complex group");
  Verdict v;
  if (cert.chi.size() != static_cast<std::size_t>(g.generator_count())) {
    v.message = "character has the wrong number of values";
    return v;
  }
  if (cert.maps.size() != static_cast<std::size_t>(cert.degree) + 1) {
    v.message = "expected " + std::to_string(cert.degree + 1) + " maps, found " +
                std::to_string(cert.maps.size());
    return v;
  }
  for (int i = 0; i <= cert.degree; ++i) {
    const auto &h = cert.maps[static_cast<std::size_t>(i)];
    if (h.rows() != c.rank(i + 1) || h.cols() != c.rank(i)) {
      v.degree = i;
      v.message = "map H_" + std::to_string(i) + " has shape " + std::to_string(h.rows()) +
                  "x" + std::to_string(h.cols()) + ", expected " +
                  std::to_string(c.rank(i + 1)) + "x" + std::to_string(c.rank(i));
      v.degree = -1;
      return v;
    }
  }

  for (int j = 0; j <= cert.degree; ++j) {
    const auto &hj = cert.maps[static_cast<std::size_t>(j)];
    GRMatrix lhs = c.boundary(j + 1) * hj;
    if (j >= 1)
      lhs = lhs + cert.maps[static_cast<std::size_t>(j) - 1] * c.boundary(j);
    for (int x = 0; x < lhs.rows(); ++x)
      for (int y = 0; y < lhs.cols(); ++y) {
        GroupRingElement e = lhs.at(x, y);
        if (x == y)
          e = e - GroupRingElement::scalar(gp, 1);
        // Earliest offending term in (phi, element) order.
        const GroupRingElement::Term *bad = nullptr;
        std::int64_t bad_phi = 0;
        for (const auto &t : e.terms()) {
          const std::int64_t p = g.phi(cert.chi, t.first);
          if (p > 0)
            continue;
          if (!bad || p < bad_phi || (p == bad_phi && t.first < bad->first)) {
            bad = &t;
            bad_phi = p;
          }
        }
        if (bad) {
          v.degree = j;
          v.row = x;
          v.col = y;
          v.element = g.element_to_json(bad->first);
          const bool unit = x == y && g.is_identity(bad->first);
          v.expected = unit ? Rational(1) : Rational(0);
          v.found = v.expected + bad->second;
          v.message = "identity fails in degree " + std::to_string(j) + " at entry (" +
                      std::to_string(x) + "," + std::to_string(y) + "), element " +
                      g.element_to_string(bad->first) + " with phi " +
                      std::to_string(bad_phi) + ": coefficient " + v.found.str() +
                      ", expected " + v.expected.str();
          return v;
        }
      }
  }
  v.accepted = true;
  v.message = "certificate verified through degree " + std::to_string(cert.degree);
  return v;
}

namespace {

// Truncations of sum_m P^m for a strictly positive square P, cached per radius.
class PowerSeries {
public:
  PowerSeries(GRMatrix p, Character chi) : p_(std::move(p)), chi_(std::move(chi)) {}

  GRMatrix truncated(std::int64_t r) {
    std::lock_guard<std::mutex> lock(mutex_);
    if (auto it = cache_.find(r); it != cache_.end())
      return it->second;
    const int n = p_.rows();
    GRMatrix id = GRMatrix::identity(p_.group(), n);
    GRMatrix s(p_.group(), n, n);
    if (r >= 0) {
      s = id;
      // Each factor of P raises phi by at least one, so r + 1 rounds suffice.
      for (std::int64_t round = 0; round <= r; ++round) {
        GRMatrix next = id + (p_ * s).truncated(chi_, r);
        if (next == s)
          break;
        s = std::move(next);
      }
    }
    cache_.emplace(r, s);
    return s;
  }

private:
  GRMatrix p_;
  Character chi_;
  std::mutex mutex_;
  std::map<std::int64_t, GRMatrix> cache_;
};

} // namespace

std::vector<NovikovMatrix> novikov_homotopy(const ChainComplex &c,
                                            const ContractionCertificate &cert,
                                            const ContextPtr &ctx) {
  Verdict v = verify_certificate(cert, c);
  if (!v.accepted)
    throw Error(ErrorKind::InvalidInput, "certificate rejected: " + v.message);
  if (!(ctx->chi == cert.chi))
    throw Error(ErrorKind::SpecMismatch, "context character differs from the certificate");
  const GroupPtr &gp = c.group();
  std::vector<NovikovMatrix> out;
  for (int i = 0; i <= cert.degree; ++i) {
    const GRMatrix &h = cert.maps[static_cast<std::size_t>(i)];
    GRMatrix f = c.boundary(i + 1) * h;
    if (i >= 1)
      f = f + cert.maps[static_cast<std::size_t>(i) - 1] * c.boundary(i);
    GRMatrix p = GRMatrix::identity(gp, c.rank(i)) - f;
    NovikovMatrix m(ctx, h.rows(), h.cols());
    if (p.is_zero()) {
      out.push_back(NovikovMatrix::from_group_ring(ctx, h));
      continue;
    }
    auto series = std::make_shared<PowerSeries>(p, cert.chi);
    for (int a = 0; a < h.rows(); ++a) {
      std::int64_t lowest = NovikovExpr::kInfinity;
      for (int b = 0; b < h.cols(); ++b)
        if (auto d = h.at(a, b).min_degree(cert.chi))
          lowest = std::min(lowest, *d);
      if (lowest == NovikovExpr::kInfinity)
        continue; // zero row stays zero
      for (int b = 0; b < h.cols(); ++b) {
        GRMatrix row(gp, 1, h.cols());
        for (int k = 0; k < h.cols(); ++k)
          row.at(0, k) = h.at(a, k);
        const int col = b;
        const Character chi = cert.chi;
        auto oracle = [row, col, series, lowest, chi](std::int64_t r) {
          GRMatrix n = series->truncated(r - lowest);
          GroupRingElement acc;
          for (int k = 0; k < row.cols(); ++k)
            acc += multiply_truncated(row.at(0, k), n.at(k, col), chi, r);
          return acc;
        };
        m.at(a, b) = NovikovExpr::series(
            ctx, oracle, lowest,
            "H" + std::to_string(i) + "[" + std::to_string(a) + "," + std::to_string(b) + "]");
      }
    }
    out.push_back(std::move(m));
  }
  return out;
}

RebuildResult rebuild_contraction(const GRMatrix &d_next, const GRMatrix &d_n,
                                  const NovikovMatrix &H_prev, const NovikovMatrix &H_n,
                                  std::int64_t r, int max_doublings) {
  const ContextPtr &ctx = H_n.context();
  if (!ctx)
    throw Error(ErrorKind::InvalidInput, "homotopy has no Novikov context");
  const int n = d_n.cols();
  if (d_next.rows() != n || H_n.rows() != d_next.cols() || H_n.cols() != n ||
      H_prev.rows() != n || H_prev.cols() != d_n.rows())
    throw Error(ErrorKind::InvalidInput, "rebuild inputs have inconsistent shapes");
  if (r < 0)
    throw Error(ErrorKind::InvalidInput, "radius must be non-negative");

  const NovikovMatrix Dn = NovikovMatrix::from_group_ring(ctx, d_n);
  const NovikovMatrix Dnext = NovikovMatrix::from_group_ring(ctx, d_next);
  const NovikovMatrix I = NovikovMatrix::identity(ctx, n);
  const GRMatrix I_gr = GRMatrix::identity(ctx->group, n);
  const NovikovMatrix base = H_prev * Dn;

  if (!((base + Dnext * H_n).truncate(r) == I_gr))
    throw Error(ErrorKind::InvalidInput,
                "homotopy identity fails at radius " + std::to_string(r));

  std::int64_t radius = r;
  for (int attempt = 0; attempt <= max_doublings; ++attempt) {
    const NovikovMatrix Hbar = NovikovMatrix::from_group_ring(ctx, H_n.truncate(radius));
    // Equals d_{n+1} (H_n - trunc H_n) but is built from the division closure only.
    const NovikovMatrix P = I - Dnext * Hbar - base;
    bool positive = true;
    for (int i = 0; i < n && positive; ++i)
      for (int j = 0; j < n && positive; ++j)
        if (!P.at(i, j).is_literal_zero() && !P.at(i, j).certify_positive())
          positive = false;
    if (positive) {
      const std::int64_t rv = std::max<std::int64_t>(2 * radius, 1);
      const NovikovMatrix result = Hbar * invert_I_minus_P(P, rv);
      if (!((base + Dnext * result).truncate(rv) == I_gr))
        throw Error(ErrorKind::Internal,
                    "rebuilt homotopy fails verification at radius " + std::to_string(rv));
      return {result, radius, rv};
    }
    radius = radius == 0 ? 1 : 2 * radius;
  }
  throw Error(ErrorKind::Inconclusive,
              "no positive remainder up to radius " + std::to_string(radius / 2) +
                  " (started at " + std::to_string(r) + ")");
}

std::vector<RebuildResult> rebuild_all(const ChainComplex &c, const std::vector<NovikovMatrix> &H,
                                       std::int64_t r, int max_doublings) {
  std::vector<RebuildResult> out;
  if (H.empty())
    return out;
  const ContextPtr &ctx = H.front().context();
  NovikovMatrix prev_orig(ctx, c.rank(0), 0);
  NovikovMatrix prev(ctx, c.rank(0), 0);
  for (std::size_t idx = 0; idx < H.size(); ++idx) {
    const int i = static_cast<int>(idx);
    try {
      const NovikovMatrix Di = NovikovMatrix::from_group_ring(ctx, c.boundary(i));
      const NovikovMatrix Dnext = NovikovMatrix::from_group_ring(ctx, c.boundary(i + 1));
      const GRMatrix I_gr = GRMatrix::identity(ctx->group, c.rank(i));
      if (H[idx].rows() != c.rank(i + 1) || H[idx].cols() != c.rank(i))
        throw Error(ErrorKind::InvalidInput, "homotopy has the wrong shape");
      if (!((prev_orig * Di + Dnext * H[idx]).truncate(r) == I_gr))
        throw Error(ErrorKind::InvalidInput,
                    "homotopy identity fails at radius " + std::to_string(r));
      // Correct H_i against the rebuilt H_{i-1} so the identity keeps holding.
      NovikovMatrix adjusted = H[idx];
      if (i >= 1)
        adjusted = H[idx] * (NovikovMatrix::identity(ctx, c.rank(i)) - prev * Di);
      RebuildResult res = rebuild_contraction(c.boundary(i + 1), c.boundary(i), prev, adjusted, r,
                                              max_doublings);
      prev_orig = H[idx];
      prev = res.H;
      out.push_back(std::move(res));
    } catch (const Error &e) {
      throw Error(e.kind(), "degree " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

json KernelWitnessReport::to_json() const {
  json j = {{"complex", {{"name", complex_name}, {"hash", complex_hash}}},
            {"character", character},
            {"degree", degree},
            {"depth", depth},
            {"word_length", word_length},
            {"boundary_length", boundary_length},
            {"dimensions", dimensions},
            {"verdict", verdict}};
  if (extinguished_at >= 0)
    j["extinguished_at"] = extinguished_at;
  if (!note.empty())
    j["note"] = note;
  return j;
}

int witness_dimension(const ChainComplex &c, const Character &chi, int n, int d, int L,
                      int Ly, const EnumerationLimits &limits) {
  const Group &g = *c.group();
  const GRMatrix &dn = c.boundary(n);        // rank(n-1) x rank(n)
  const GRMatrix &dnext = c.boundary(n + 1); // rank(n) x rank(n+1)
  const int rn = c.rank(n);
  const auto V = enumerate_support(g, chi, L, 0, d, limits);
  const std::size_t nv = V.size();
  std::unordered_map<Element, std::size_t, ElementHash> vindex;
  for (std::size_t i = 0; i < nv; ++i)
    vindex.emplace(V[i], i);
  const int nx = static_cast<int>(static_cast<std::size_t>(rn) * nv);

  // Cycle condition on x: (d_n x) vanishes in phi <= d - descent. Truncating
  // a Novikov cycle at d leaves boundary terms down to d - descent.
  const std::int64_t descent = std::max<std::int64_t>(0, -c.min_boundary_degree(chi, n, n));
  const std::int64_t cut = d - descent;
  EquationTable cyc;
  for (int b = 0; b < rn; ++b)
    for (std::size_t s = 0; s < nv; ++s) {
      const int col = static_cast<int>(static_cast<std::size_t>(b) * nv + s);
      const std::int64_t ps = g.phi(chi, V[s]);
      for (int row = 0; row < dn.rows(); ++row)
        for (const auto &[e, coef] : dn.at(row, b).terms())
          if (g.phi(chi, e) + ps <= cut)
            cyc.add({0, row, 0, g.multiply(e, V[s])}, col, coef);
    }

  auto rank_of = [](std::vector<SparseVec> rows, int cols) {
    SparseEliminator e(cols);
    for (auto &r : rows)
      e.add_row(std::move(r));
    return e.rank();
  };

  const int rank_m1 = rank_of(cyc.rows(), nx);
  const int rnext = c.rank(n + 1);
  if (rnext == 0 || dnext.is_zero())
    return nx - rank_m1;

  const std::int64_t spread = c.max_abs_boundary_degree(chi, n + 1, n + 1);
  const auto Y = enumerate_support(g, chi, Ly, -spread, d + spread, limits);
  const std::size_t ny = Y.size();
  const int cols = nx + static_cast<int>(static_cast<std::size_t>(rnext) * ny);
  if (static_cast<std::size_t>(cols) > limits.support_cap)
    throw Error(ErrorKind::BudgetExceeded,
                "kernel witness needs " + std::to_string(cols) + " unknowns");

  // Boundary terms (d_{n+1} y) in phi <= d, keyed by (b, h).
  EquationTable bd;
  for (int a = 0; a < rnext; ++a)
    for (std::size_t s = 0; s < ny; ++s) {
      const int col = static_cast<int>(static_cast<std::size_t>(a) * ny + s);
      const std::int64_t ps = g.phi(chi, Y[s]);
      for (int b = 0; b < rn; ++b)
        for (const auto &[e, coef] : dnext.at(b, a).terms())
          if (g.phi(chi, e) + ps <= d)
            bd.add({0, b, 0, g.multiply(e, Y[s])}, col, coef);
    }
  const auto &Trows = bd.rows();
  const int rank_t = rank_of(Trows, static_cast<int>(static_cast<std::size_t>(rnext) * ny));

  // Joint system in (x, y): d_n x = 0, x = T y on V, T y = 0 off V.
  std::vector<SparseVec> joint = cyc.rows();
  std::vector<char> covered(static_cast<std::size_t>(nx), 0);
  for (std::size_t r = 0; r < Trows.size(); ++r) {
    SparseVec row;
    const int b = bd.keys()[r].row;
    if (auto it = vindex.find(bd.keys()[r].h); it != vindex.end()) {
      const int xc = static_cast<int>(static_cast<std::size_t>(b) * nv + it->second);
      row.emplace_back(xc, Rational(1));
      covered[static_cast<std::size_t>(xc)] = 1;
    }
    for (const auto &[col, coef] : Trows[r])
      row.emplace_back(nx + col, -coef);
    joint.push_back(std::move(row));
  }
  for (int xc = 0; xc < nx; ++xc)
    if (!covered[static_cast<std::size_t>(xc)])
      joint.push_back(SparseVec{{xc, Rational(1)}});
  const int rank_j = rank_of(std::move(joint), cols);
  return rank_j - rank_m1 - rank_t;
}

KernelWitnessReport kernel_witness(const ChainComplex &c, const Character &chi,
                                   const WitnessParams &params) {
  if (params.degree < 0 || params.degree > c.top())
    throw Error(ErrorKind::InvalidInput, "witness degree must lie in 0..top");
  if (params.depth < 0 || params.word_length < 0)
    throw Error(ErrorKind::InvalidInput, "witness bounds must be non-negative");
  KernelWitnessReport rep;
  rep.complex_name = c.name();
  rep.complex_hash = c.hash();
  rep.character = chi.values();
  rep.degree = params.degree;
  rep.depth = params.depth;
  rep.word_length = params.word_length;
  // A cycle near the edge of the ball is killed by a telescoping preimage that
  // runs up to depth + 1 boundary steps past it.
  int step = 1;
  if (params.degree < c.top()) {
    const GRMatrix &d = c.boundary(params.degree + 1);
    for (int r = 0; r < d.rows(); ++r)
      for (int k = 0; k < d.cols(); ++k)
        for (const auto &t : d.at(r, k).terms())
          step = std::max(step, static_cast<int>(c.group()->canonical_word(t.first).size()));
  }
  const int Ly = params.boundary_length.value_or(
      params.degree < c.top() ? params.word_length + (params.depth + 1) * step
                              : params.word_length);
  rep.boundary_length = Ly;
  try {
    for (int d = 0; d <= params.depth; ++d)
      rep.dimensions.push_back(witness_dimension(c, chi, params.degree, d, params.word_length,
                                                 Ly, params.limits));
  } catch (const Error &e) {
    if (e.kind() != ErrorKind::BudgetExceeded)
      throw;
    rep.verdict = "budget-exhausted";
    rep.note = e.what();
    return rep;
  }
  if (rep.dimensions.back() >= 1) {
    rep.verdict = "persistent";
    return rep;
  }
  int first = params.depth;
  while (first > 0 && rep.dimensions[static_cast<std::size_t>(first) - 1] == 0)
    --first;
  rep.verdict = "extinguished-at";
  rep.extinguished_at = first;
  return rep;
}

} // namespace novikov
