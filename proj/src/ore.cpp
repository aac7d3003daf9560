#include "ore.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "error.hpp"

namespace novikov {

namespace {

using Perm = std::vector<int>;

Perm compose(const Perm &p, const Perm &q) { // (p o q)(i) = p[q[i]]
  Perm r(q.size());
  for (std::size_t i = 0; i < q.size(); ++i)
    r[i] = p[static_cast<std::size_t>(q[i])];
  return r;
}

int perm_order(const Perm &p) {
  std::vector<char> seen(p.size(), 0);
  long long order = 1;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (seen[i])
      continue;
    long long len = 0;
    for (std::size_t j = i; !seen[j]; j = static_cast<std::size_t>(p[j])) {
      seen[j] = 1;
      ++len;
    }
    order = std::lcm(order, len);
  }
  return static_cast<int>(order);
}

void check_index(const FiniteTracedAlgebra &a, int g) {
  if (g < 0 || g >= a.order())
    throw Error(ErrorKind::InvalidInput, "group index " + std::to_string(g) + " out of range");
}

} // namespace

FiniteTracedAlgebra::FiniteTracedAlgebra(std::string name, std::vector<std::vector<int>> table,
                                         std::vector<int> tau)
    : name_(std::move(name)), table_(std::move(table)), tau_(std::move(tau)) {
  m_ = static_cast<int>(table_.size());
  if (m_ < 1 || m_ > 256)
    throw Error(ErrorKind::InvalidInput, "finite group order must be 1..256");
  for (const auto &row : table_) {
    if (static_cast<int>(row.size()) != m_)
      throw Error(ErrorKind::InvalidInput, "multiplication table is not square");
    std::vector<char> seen(static_cast<std::size_t>(m_), 0);
    for (int v : row) {
      if (v < 0 || v >= m_ || seen[static_cast<std::size_t>(v)])
        throw Error(ErrorKind::InvalidInput, "multiplication table row is not a permutation");
      seen[static_cast<std::size_t>(v)] = 1;
    }
  }
  identity_ = -1;
  for (int e = 0; e < m_ && identity_ < 0; ++e) {
    bool ok = true;
    for (int x = 0; x < m_ && ok; ++x)
      ok = mul(e, x) == x && mul(x, e) == x;
    if (ok)
      identity_ = e;
  }
  if (identity_ < 0)
    throw Error(ErrorKind::InvalidInput, "multiplication table has no identity");
  for (int x = 0; x < m_; ++x)
    for (int y = 0; y < m_; ++y)
      for (int z = 0; z < m_; ++z)
        if (mul(mul(x, y), z) != mul(x, mul(y, z)))
          throw Error(ErrorKind::InvalidInput, "multiplication table is not associative");
  inverse_.assign(static_cast<std::size_t>(m_), -1);
  for (int x = 0; x < m_; ++x)
    for (int y = 0; y < m_; ++y)
      if (mul(x, y) == identity_)
        inverse_[static_cast<std::size_t>(x)] = y;

  if (tau_.empty()) {
    tau_.resize(static_cast<std::size_t>(m_));
    std::iota(tau_.begin(), tau_.end(), 0);
  }
  if (static_cast<int>(tau_.size()) != m_)
    throw Error(ErrorKind::InvalidInput, "automorphism must list an image for every element");
  tau_inv_.assign(static_cast<std::size_t>(m_), -1);
  for (int x = 0; x < m_; ++x) {
    const int y = tau_[static_cast<std::size_t>(x)];
    if (y < 0 || y >= m_ || tau_inv_[static_cast<std::size_t>(y)] >= 0)
      throw Error(ErrorKind::InvalidInput, "automorphism is not a bijection");
    tau_inv_[static_cast<std::size_t>(y)] = x;
  }
  for (int x = 0; x < m_; ++x)
    for (int y = 0; y < m_; ++y)
      if (tau_[static_cast<std::size_t>(mul(x, y))] !=
          mul(tau_[static_cast<std::size_t>(x)], tau_[static_cast<std::size_t>(y)]))
        throw Error(ErrorKind::InvalidInput, "automorphism does not respect multiplication");
  tau_order_ = perm_order(tau_);
}

int FiniteTracedAlgebra::tau(int a, std::int64_t power) const {
  std::int64_t p = power % tau_order_;
  if (p < 0)
    p += tau_order_;
  for (std::int64_t i = 0; i < p; ++i)
    a = tau_[static_cast<std::size_t>(a)];
  return a;
}

AlgebraPtr FiniteTracedAlgebra::trivial() {
  return std::make_shared<const FiniteTracedAlgebra>("trivial", std::vector<std::vector<int>>{{0}},
                                                     std::vector<int>{0});
}

AlgebraPtr FiniteTracedAlgebra::cyclic(int n, int tau_multiplier) {
  if (n < 1 || n > 256)
    throw Error(ErrorKind::InvalidInput, "cyclic order must be 1..256");
  std::vector<std::vector<int>> table(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n)));
  std::vector<int> tau(static_cast<std::size_t>(n));
  const int k = ((tau_multiplier % n) + n) % n;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b)
      table[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = (a + b) % n;
    tau[static_cast<std::size_t>(a)] = (a * k) % n;
  }
  return std::make_shared<const FiniteTracedAlgebra>("Z" + std::to_string(n), std::move(table),
                                                     std::move(tau));
}

AlgebraPtr FiniteTracedAlgebra::symmetric3(int tau_conjugator) {
  std::vector<Perm> perms;
  Perm p{0, 1, 2};
  do
    perms.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  auto index = [&](const Perm &q) {
    return static_cast<int>(std::find(perms.begin(), perms.end(), q) - perms.begin());
  };
  std::vector<std::vector<int>> table(6, std::vector<int>(6));
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b)
      table[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
          index(compose(perms[static_cast<std::size_t>(a)], perms[static_cast<std::size_t>(b)]));
  if (tau_conjugator < 0 || tau_conjugator >= 6)
    throw Error(ErrorKind::InvalidInput, "S3 conjugator index must be 0..5");
  const Perm &c = perms[static_cast<std::size_t>(tau_conjugator)];
  Perm cinv(3);
  for (int i = 0; i < 3; ++i)
    cinv[static_cast<std::size_t>(c[static_cast<std::size_t>(i)])] = i;
  std::vector<int> tau(6);
  for (int a = 0; a < 6; ++a)
    tau[static_cast<std::size_t>(a)] = index(compose(compose(c, perms[static_cast<std::size_t>(a)]), cinv));
  return std::make_shared<const FiniteTracedAlgebra>("S3", std::move(table), std::move(tau));
}

AlgebraPtr FiniteTracedAlgebra::from_json(const json &j) {
  try {
    if (j.is_string())
      return from_json(json{{"name", j}});
    if (j.contains("table")) {
      auto table = j.at("table").get<std::vector<std::vector<int>>>();
      std::vector<int> tau;
      const int m = static_cast<int>(table.size());
      if (j.contains("tau") && j.at("tau").is_array()) {
        tau = j.at("tau").get<std::vector<int>>();
      } else if (j.contains("tau")) {
        // Generator images, extended multiplicatively.
        auto gens = j.at("tau").at("generators").get<std::vector<int>>();
        auto imgs = j.at("tau").at("images").get<std::vector<int>>();
        if (gens.size() != imgs.size())
          throw Error(ErrorKind::InvalidInput, "automorphism needs one image per generator");
        FiniteTracedAlgebra probe("probe", table, {});
        tau.assign(static_cast<std::size_t>(m), -1);
        tau[static_cast<std::size_t>(probe.identity())] = probe.identity();
        std::vector<int> queue{probe.identity()};
        for (std::size_t qi = 0; qi < queue.size(); ++qi) {
          const int x = queue[qi];
          for (std::size_t g = 0; g < gens.size(); ++g) {
            check_index(probe, gens[g]);
            check_index(probe, imgs[g]);
            const int y = probe.mul(x, gens[g]);
            const int ty = probe.mul(tau[static_cast<std::size_t>(x)], imgs[g]);
            if (tau[static_cast<std::size_t>(y)] < 0) {
              tau[static_cast<std::size_t>(y)] = ty;
              queue.push_back(y);
            } else if (tau[static_cast<std::size_t>(y)] != ty) {
              throw Error(ErrorKind::InvalidInput, "generator images do not define a homomorphism");
            }
          }
        }
        if (std::find(tau.begin(), tau.end(), -1) != tau.end())
          throw Error(ErrorKind::InvalidInput, "automorphism generators do not generate the group");
      }
      return std::make_shared<const FiniteTracedAlgebra>(j.value("name", std::string("table")),
                                                         std::move(table), std::move(tau));
    }
    const std::string name = j.at("name").get<std::string>();
    if (name == "trivial")
      return trivial();
    if (name == "S3")
      return symmetric3(j.value("tau_conjugator", 0));
    if (name.size() > 1 && name[0] == 'Z')
      return cyclic(std::stoi(name.substr(1)), j.value("tau_multiplier", 1));
    throw Error(ErrorKind::InvalidInput, "unknown finite group '" + name + "'");
  } catch (const json::exception &e) {
    throw Error(ErrorKind::InvalidInput, std::string("malformed algebra: ") + e.what());
  } catch (const std::invalid_argument &) {
    throw Error(ErrorKind::InvalidInput, "malformed cyclic group name");
  }
}

json FiniteTracedAlgebra::to_json() const {
  return json{{"name", name_}, {"table", table_}, {"tau", tau_}};
}

bool AlgebraElement::is_zero() const {
  return std::all_of(c.begin(), c.end(), [](const Rational &v) { return v.is_zero(); });
}

AlgebraElement algebra_zero(const FiniteTracedAlgebra &a) {
  return {std::vector<Rational>(static_cast<std::size_t>(a.order()))};
}

AlgebraElement algebra_one(const FiniteTracedAlgebra &a) { return algebra_basis(a, a.identity()); }

AlgebraElement algebra_basis(const FiniteTracedAlgebra &a, int g, Rational coef) {
  check_index(a, g);
  AlgebraElement x = algebra_zero(a);
  x.c[static_cast<std::size_t>(g)] = std::move(coef);
  return x;
}

AlgebraElement algebra_add(const AlgebraElement &x, const AlgebraElement &y) {
  AlgebraElement r = x;
  for (std::size_t i = 0; i < r.c.size(); ++i)
    r.c[i] += y.c[i];
  return r;
}

AlgebraElement algebra_sub(const AlgebraElement &x, const AlgebraElement &y) {
  AlgebraElement r = x;
  for (std::size_t i = 0; i < r.c.size(); ++i)
    r.c[i] -= y.c[i];
  return r;
}

AlgebraElement algebra_mul(const FiniteTracedAlgebra &a, const AlgebraElement &x,
                           const AlgebraElement &y) {
  AlgebraElement r = algebra_zero(a);
  for (int g = 0; g < a.order(); ++g) {
    const Rational &xg = x.c[static_cast<std::size_t>(g)];
    if (xg.is_zero())
      continue;
    for (int h = 0; h < a.order(); ++h) {
      const Rational &yh = y.c[static_cast<std::size_t>(h)];
      if (!yh.is_zero())
        r.c[static_cast<std::size_t>(a.mul(g, h))] += xg * yh;
    }
  }
  return r;
}

AlgebraElement algebra_tau(const FiniteTracedAlgebra &a, const AlgebraElement &x,
                           std::int64_t power) {
  AlgebraElement r = algebra_zero(a);
  for (int g = 0; g < a.order(); ++g)
    r.c[static_cast<std::size_t>(a.tau(g, power))] = x.c[static_cast<std::size_t>(g)];
  return r;
}

DenseMatrix left_matrix(const FiniteTracedAlgebra &a, const AlgebraElement &x) {
  const auto m = static_cast<std::size_t>(a.order());
  DenseMatrix L(m, std::vector<Rational>(m));
  for (int h = 0; h < a.order(); ++h) {
    const Rational &xh = x.c[static_cast<std::size_t>(h)];
    if (xh.is_zero())
      continue;
    for (int g = 0; g < a.order(); ++g)
      L[static_cast<std::size_t>(a.mul(h, g))][static_cast<std::size_t>(g)] += xh;
  }
  return L;
}

Rational trace(const FiniteTracedAlgebra &a, const AlgebraElement &x) {
  return x.c[static_cast<std::size_t>(a.identity())];
}

Rational kernel_dimension(const FiniteTracedAlgebra &a, const AlgebraElement &x) {
  const int rank = dense_rank(left_matrix(a, x));
  return Rational(a.order() - rank, a.order());
}

json algebra_element_to_json(const AlgebraElement &x) {
  json j = json::object();
  for (std::size_t g = 0; g < x.c.size(); ++g)
    if (!x.c[g].is_zero())
      j[std::to_string(g)] = x.c[g].str();
  return j;
}

AlgebraElement algebra_element_from_json(const FiniteTracedAlgebra &a, const json &j) {
  AlgebraElement x = algebra_zero(a);
  if (j.is_array()) {
    if (static_cast<int>(j.size()) != a.order())
      throw Error(ErrorKind::InvalidInput, "dense algebra element needs one coefficient per element");
    for (std::size_t g = 0; g < j.size(); ++g)
      x.c[g] = j[g].is_string() ? Rational::parse(j[g].get<std::string>())
                                : Rational(j[g].get<std::int64_t>());
    return x;
  }
  if (!j.is_object())
    throw Error(ErrorKind::InvalidInput, "algebra element must be an object or array");
  for (const auto &[key, value] : j.items()) {
    int g = 0;
    try {
      g = std::stoi(key);
    } catch (const std::exception &) {
      throw Error(ErrorKind::InvalidInput, "algebra element key '" + key + "' is not an index");
    }
    check_index(a, g);
    x.c[static_cast<std::size_t>(g)] += value.is_string()
                                            ? Rational::parse(value.get<std::string>())
                                            : Rational(value.get<std::int64_t>());
  }
  return x;
}

TwistedPoly::TwistedPoly(AlgebraPtr algebra, std::map<std::int64_t, AlgebraElement> terms)
    : algebra_(std::move(algebra)), terms_(std::move(terms)) {
  for (const auto &[p, c] : terms_)
    if (static_cast<int>(c.c.size()) != algebra_->order())
      throw Error(ErrorKind::InvalidInput, "coefficient size does not match the algebra");
  prune();
}

TwistedPoly TwistedPoly::constant(AlgebraPtr algebra, AlgebraElement c) {
  return monomial(std::move(algebra), 0, std::move(c));
}

TwistedPoly TwistedPoly::monomial(AlgebraPtr algebra, std::int64_t power, AlgebraElement c) {
  std::map<std::int64_t, AlgebraElement> t;
  t.emplace(power, std::move(c));
  return TwistedPoly(std::move(algebra), std::move(t));
}

void TwistedPoly::prune() {
  for (auto it = terms_.begin(); it != terms_.end();)
    it = it->second.is_zero() ? terms_.erase(it) : std::next(it);
}

AlgebraElement TwistedPoly::coefficient(std::int64_t power) const {
  if (auto it = terms_.find(power); it != terms_.end())
    return it->second;
  return algebra_zero(*algebra_);
}

std::int64_t TwistedPoly::init_power() const {
  return terms_.empty() ? 0 : terms_.begin()->first;
}

AlgebraElement TwistedPoly::pure_part() const {
  return terms_.empty() ? algebra_zero(*algebra_) : terms_.begin()->second;
}

std::int64_t TwistedPoly::degree() const {
  return terms_.empty() ? 0 : terms_.rbegin()->first;
}

Rational TwistedPoly::nullity() const {
  if (terms_.empty())
    return 1;
  return kernel_dimension(*algebra_, pure_part());
}

namespace {

const AlgebraPtr &same_algebra(const TwistedPoly &x, const TwistedPoly &y) {
  if (!x.algebra())
    return y.algebra();
  if (y.algebra() && x.algebra() != y.algebra() &&
      !(x.algebra()->to_json() == y.algebra()->to_json()))
    throw Error(ErrorKind::SpecMismatch, "twisted polynomials over different algebras");
  return x.algebra();
}

} // namespace

TwistedPoly operator+(const TwistedPoly &x, const TwistedPoly &y) {
  const AlgebraPtr &a = same_algebra(x, y);
  auto terms = x.terms();
  for (const auto &[p, c] : y.terms()) {
    auto it = terms.find(p);
    if (it == terms.end())
      terms.emplace(p, c);
    else
      it->second = algebra_add(it->second, c);
  }
  return a ? TwistedPoly(a, std::move(terms)) : TwistedPoly();
}

TwistedPoly operator-(const TwistedPoly &x, const TwistedPoly &y) {
  const AlgebraPtr &a = same_algebra(x, y);
  if (!a)
    return {};
  auto terms = x.terms();
  for (const auto &[p, c] : y.terms()) {
    auto it = terms.find(p);
    if (it == terms.end())
      terms.emplace(p, algebra_sub(algebra_zero(*a), c));
    else
      it->second = algebra_sub(it->second, c);
  }
  return TwistedPoly(a, std::move(terms));
}

TwistedPoly operator*(const TwistedPoly &x, const TwistedPoly &y) { return twisted_multiply(x, y); }

TwistedPoly twisted_multiply(const TwistedPoly &x, const TwistedPoly &y) {
  const AlgebraPtr &a = same_algebra(x, y);
  if (!a || x.is_zero() || y.is_zero())
    return a ? TwistedPoly(a) : TwistedPoly();
  std::map<std::int64_t, AlgebraElement> terms;
  // (t^i u)(t^j v) = t^(i+j) tau^-j(u) v
  for (const auto &[i, u] : x.terms())
    for (const auto &[j, v] : y.terms()) {
      AlgebraElement prod = algebra_mul(*a, algebra_tau(*a, u, -j), v);
      auto it = terms.find(i + j);
      if (it == terms.end())
        terms.emplace(i + j, std::move(prod));
      else
        it->second = algebra_add(it->second, prod);
    }
  return TwistedPoly(a, std::move(terms));
}

json TwistedPoly::to_json() const {
  json terms = json::array();
  for (const auto &[p, c] : terms_)
    terms.push_back({{"power", p}, {"coeff", algebra_element_to_json(c)}});
  return terms;
}

TwistedPoly TwistedPoly::from_json(AlgebraPtr algebra, const json &j) {
  try {
    if (!j.is_array())
      throw Error(ErrorKind::InvalidInput, "twisted polynomial must be an array of terms");
    std::map<std::int64_t, AlgebraElement> terms;
    for (const auto &t : j) {
      const auto p = t.at("power").get<std::int64_t>();
      AlgebraElement c = algebra_element_from_json(*algebra, t.at("coeff"));
      auto it = terms.find(p);
      if (it == terms.end())
        terms.emplace(p, std::move(c));
      else
        it->second = algebra_add(it->second, c);
    }
    return TwistedPoly(std::move(algebra), std::move(terms));
  } catch (const json::exception &e) {
    throw Error(ErrorKind::InvalidInput, std::string("malformed twisted polynomial: ") + e.what());
  }
}

DenseMatrix build_lambda_k(const TwistedPoly &q, const TwistedPoly &qp, int k) {
  const AlgebraPtr &a = same_algebra(q, qp);
  if (!a)
    throw Error(ErrorKind::InvalidInput, "lambda_k needs an algebra");
  if (k < 1)
    throw Error(ErrorKind::InvalidInput, "lambda_k needs k >= 1");
  if ((!q.is_zero() && q.init_power() != 0) || (!qp.is_zero() && qp.init_power() != 0))
    throw Error(ErrorKind::InvalidInput, "lambda_k needs initial powers normalized to 0");
  const auto m = static_cast<std::size_t>(a->order());
  const int N = static_cast<int>(std::max(q.degree(), qp.degree()));
  const auto rows = static_cast<std::size_t>(k + N) * m;
  const auto cols = static_cast<std::size_t>(2 * k) * m;
  DenseMatrix lam(rows, std::vector<Rational>(cols));
  auto place = [&](std::size_t rb, std::size_t cb, const DenseMatrix &blk, bool negate) {
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        if (!blk[i][j].is_zero())
          lam[rb * m + i][cb * m + j] = negate ? -blk[i][j] : blk[i][j];
  };
  for (int j = 0; j < k; ++j)
    for (int i = 0; i <= N; ++i) {
      const auto l = static_cast<std::size_t>(i + j);
      const AlgebraElement qi = q.coefficient(i);
      const AlgebraElement qpi = qp.coefficient(i);
      if (!qi.is_zero())
        place(l, static_cast<std::size_t>(2 * j), left_matrix(*a, algebra_tau(*a, qi, -j)), false);
      if (!qpi.is_zero())
        place(l, static_cast<std::size_t>(2 * j + 1), left_matrix(*a, algebra_tau(*a, qpi, -j)), true);
    }
  return lam;
}

json OreResult::to_json() const {
  json ds = json::array();
  for (const auto &v : d)
    ds.push_back(v.str());
  return json{{"r", r.to_json()},
              {"r_prime", rp.to_json()},
              {"k", k},
              {"k_bound", k_bound},
              {"N", N},
              {"d", ds},
              {"nul_r", nul_r.str()},
              {"nul_r_prime", nul_rp.str()},
              {"draws", draws},
              {"exact", exact}};
}

OreResult approx_ore(const TwistedPoly &q, const TwistedPoly &qp, const Rational &eps,
                     std::uint64_t seed) {
  const AlgebraPtr a = same_algebra(q, qp);
  if (!a || q.is_zero() || qp.is_zero())
    throw Error(ErrorKind::InvalidInput, "approx_ore needs nonzero q and q'");
  if (eps <= Rational(0) || eps > Rational(1))
    throw Error(ErrorKind::InvalidInput, "epsilon must lie in (0, 1]");
  const FiniteTracedAlgebra &alg = *a;
  const int m = alg.order();
  const auto mu = static_cast<std::size_t>(m);

  // Shift on the right so both initial powers become 0.
  const std::int64_t s = q.init_power();
  const std::int64_t sp = qp.init_power();
  const TwistedPoly qn = q * TwistedPoly::monomial(a, -s, algebra_one(alg));
  const TwistedPoly qpn = qp * TwistedPoly::monomial(a, -sp, algebra_one(alg));
  const int N = static_cast<int>(std::max(qn.degree(), qpn.degree()));
  const Rational nul_q = q.nullity();
  const Rational nul_qp = qp.nullity();

  OreResult res;
  res.N = N;
  {
    Rational b = Rational(N + 1) / eps;
    mpz_class ceil_b;
    mpz_cdiv_q(ceil_b.get_mpz_t(), b.numerator().get_mpz_t(), b.denominator().get_mpz_t());
    res.k_bound = static_cast<int>(ceil_b.get_si()) + N + 1;
  }

  std::mt19937_64 rng(seed);
  for (int k = 1; k <= res.k_bound; ++k) {
    const DenseMatrix lam = build_lambda_k(qn, qpn, k);
    const auto basis = dense_nullspace(lam, 2 * k * m);
    const Rational dk(static_cast<std::int64_t>(basis.size()), m);
    if (dk < Rational(k - N))
      throw Error(ErrorKind::Internal, "d_k fell below k - N at k = " + std::to_string(k));
    res.d.push_back(dk);
    if (basis.empty())
      continue;

    DenseMatrix x0s;
    for (const auto &v : basis)
      x0s.emplace_back(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mu));
    const int target = dense_rank(x0s);
    if (!(Rational(m - target, m) < nul_qp + eps))
      continue;

    // Generic integer combination reaching the maximal x_0 rank.
    std::vector<Rational> x;
    std::int64_t width = 3;
    for (int attempt = 0;; ++attempt) {
      if (attempt > 0 && attempt % 32 == 0)
        width *= 4;
      if (attempt >= 32 * 6)
        throw Error(ErrorKind::Internal, "no generic kernel element of maximal rank found");
      std::uniform_int_distribution<std::int64_t> dist(-width, width);
      x.assign(basis.front().size(), Rational(0));
      for (const auto &v : basis) {
        const Rational c(dist(rng));
        if (c.is_zero())
          continue;
        for (std::size_t i = 0; i < v.size(); ++i)
          if (!v[i].is_zero())
            x[i] += c * v[i];
      }
      ++res.draws;
      AlgebraElement x0{std::vector<Rational>(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(mu))};
      if (dense_rank(left_matrix(alg, x0)) == target)
        break;
    }

    std::map<std::int64_t, AlgebraElement> rt, rpt;
    for (int j = 0; j < k; ++j) {
      const auto base = static_cast<std::ptrdiff_t>(static_cast<std::size_t>(2 * j) * mu);
      rt.emplace(j, AlgebraElement{std::vector<Rational>(x.begin() + base,
                                                         x.begin() + base + static_cast<std::ptrdiff_t>(mu))});
      rpt.emplace(j, AlgebraElement{std::vector<Rational>(
                         x.begin() + base + static_cast<std::ptrdiff_t>(mu),
                         x.begin() + base + 2 * static_cast<std::ptrdiff_t>(mu))});
    }
    res.r = TwistedPoly::monomial(a, -s, algebra_one(alg)) * TwistedPoly(a, std::move(rt));
    res.rp = TwistedPoly::monomial(a, -sp, algebra_one(alg)) * TwistedPoly(a, std::move(rpt));
    res.k = k;
    res.exact = q * res.r == qp * res.rp;
    res.nul_r = res.r.nullity();
    res.nul_rp = res.rp.nullity();
    if (!res.exact)
      throw Error(ErrorKind::Internal, "kernel element does not satisfy q r = q' r'");
    if (!(res.nul_r < nul_qp + eps) || !(res.nul_rp < nul_q + nul_qp + eps))
      throw Error(ErrorKind::Internal, "nullity bound violated at k = " + std::to_string(k));
    return res;
  }
  throw Error(ErrorKind::Internal,
              "k exceeded the bound " + std::to_string(res.k_bound) + " without success");
}

json CommonMultipleResult::to_json() const {
  json es = json::array();
  for (std::size_t n = 0; n < entries.size(); ++n) {
    const auto &e = entries[n];
    es.push_back({{"index", n + 1},
                  {"eps", e.eps.str()},
                  {"x", e.x.to_json()},
                  {"y", e.y.to_json()},
                  {"z", e.z.to_json()},
                  {"nul_y", e.nul_y.str()},
                  {"nul_z", e.nul_z.str()},
                  {"k", e.k},
                  {"partial_sum", partial_sums[n].str()}});
  }
  return json{{"entries", es}};
}

CommonMultipleResult common_multiple(const std::vector<TwistedPoly> &q,
                                     const std::vector<TwistedPoly> &qp, std::uint64_t seed) {
  if (q.size() != qp.size())
    throw Error(ErrorKind::InvalidInput, "sequences must have equal length");
  CommonMultipleResult out;
  Rational eps(1);
  Rational sum(0);
  for (std::size_t n = 0; n < q.size(); ++n) {
    eps /= Rational(2);
    OreResult r = approx_ore(q[n], qp[n], eps, seed + n);
    CommonMultipleEntry e{q[n] * r.r, r.r, r.rp, eps, r.nul_r, r.nul_rp, r.k};
    if (!(e.x == qp[n] * r.rp))
      throw Error(ErrorKind::Internal, "common multiple mismatch");
    sum += e.nul_y + e.nul_z;
    out.partial_sums.push_back(sum);
    out.entries.push_back(std::move(e));
  }
  return out;
}

} // namespace novikov
