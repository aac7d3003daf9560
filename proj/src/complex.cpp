#include "complex.hpp"

#include <array>
#include <cstdio>

#include <openssl/evp.h>

#include "error.hpp"

namespace novikov {

std::string sha256_hex(const std::string &data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(),
                 nullptr) != 1)
    throw Error(ErrorKind::Internal, "SHA-256 failed");
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

ChainComplex::ChainComplex(GroupPtr group, std::vector<int> ranks,
                           std::vector<GRMatrix> boundaries, std::string name)
    : group_(std::move(group)), ranks_(std::move(ranks)), name_(std::move(name)),
      empty_(group_, 0, 0) {
  if (ranks_.empty())
    throw Error(ErrorKind::InvalidInput, "complex needs at least C_0");
  for (int r : ranks_)
    if (r < 0)
      throw Error(ErrorKind::InvalidInput, "negative rank");
  if (static_cast<int>(boundaries.size()) != top())
    throw Error(ErrorKind::InvalidInput,
                "complex needs one boundary matrix per positive degree");
  boundaries_.emplace_back(group_, 0, ranks_[0]);
  for (auto &b : boundaries)
    boundaries_.push_back(std::move(b));
  boundaries_.emplace_back(group_, ranks_.back(), 0);
  check();
}

int ChainComplex::rank(int i) const {
  if (i < 0 || i > top())
    return 0;
  return ranks_[static_cast<std::size_t>(i)];
}

const GRMatrix &ChainComplex::boundary(int i) const {
  if (i < 0 || i > top() + 1)
    return empty_;
  return boundaries_[static_cast<std::size_t>(i)];
}

void ChainComplex::check() const {
  for (int i = 1; i <= top(); ++i) {
    const GRMatrix &d = boundary(i);
    if (d.rows() != rank(i - 1) || d.cols() != rank(i))
      throw Error(ErrorKind::InvalidInput,
                  "d_" + std::to_string(i) + " has shape " +
                      std::to_string(d.rows()) + "x" + std::to_string(d.cols()) +
                      ", expected " + std::to_string(rank(i - 1)) + "x" +
                      std::to_string(rank(i)));
  }
  for (int i = 2; i <= top(); ++i)
    if (!(boundary(i - 1) * boundary(i)).is_zero())
      throw Error(ErrorKind::InvalidInput,
                  "d_" + std::to_string(i - 1) + " d_" + std::to_string(i) +
                      " is not zero");
}

int ChainComplex::euler_characteristic() const {
  int chi = 0;
  for (int i = 0; i <= top(); ++i)
    chi += (i % 2 == 0 ? 1 : -1) * rank(i);
  return chi;
}

std::int64_t ChainComplex::min_boundary_degree(const Character &chi, int lo,
                                               int hi) const {
  std::int64_t m = 0;
  bool any = false;
  for (int i = std::max(lo, 1); i <= std::min(hi, top()); ++i) {
    const GRMatrix &d = boundary(i);
    for (int r = 0; r < d.rows(); ++r)
      for (int c = 0; c < d.cols(); ++c)
        if (auto v = d.at(r, c).min_degree(chi)) {
          m = any ? std::min(m, *v) : *v;
          any = true;
        }
  }
  return any ? m : 0;
}

std::int64_t ChainComplex::max_abs_boundary_degree(const Character &chi, int lo,
                                                   int hi) const {
  std::int64_t m = 0;
  for (int i = std::max(lo, 1); i <= std::min(hi, top()); ++i) {
    const GRMatrix &d = boundary(i);
    for (int r = 0; r < d.rows(); ++r)
      for (int c = 0; c < d.cols(); ++c) {
        if (auto v = d.at(r, c).min_degree(chi))
          m = std::max(m, *v < 0 ? -*v : *v);
        if (auto v = d.at(r, c).max_degree(chi))
          m = std::max(m, *v < 0 ? -*v : *v);
      }
  }
  return m;
}

json ChainComplex::to_json() const {
  json j;
  j["group"] = spec_to_json(group_->spec());
  j["ranks"] = ranks_;
  json bs = json::array();
  for (int i = 1; i <= top(); ++i)
    bs.push_back(boundary(i).to_json());
  j["boundaries"] = bs;
  if (!name_.empty())
    j["name"] = name_;
  return j;
}

ChainComplex ChainComplex::from_json(const json &j, const GroupSpec *spec) {
  if (!j.is_object() || !j.contains("ranks") || !j.contains("boundaries"))
    throw Error(ErrorKind::InvalidInput,
                "complex JSON needs 'ranks' and 'boundaries'");
  GroupSpec s;
  if (j.contains("group"))
    s = spec_from_json(j.at("group"));
  else if (spec)
    s = *spec;
  else
    throw Error(ErrorKind::InvalidInput, "complex JSON has no group");
  if (spec && j.contains("group") && !(s == *spec))
    throw Error(ErrorKind::SpecMismatch, "complex group differs from --group");
  GroupPtr g = Group::make(s);
  std::vector<int> ranks = j.at("ranks").get<std::vector<int>>();
  const json &bs = j.at("boundaries");
  if (!bs.is_array() || bs.size() + 1 != ranks.size())
    throw Error(ErrorKind::InvalidInput,
                "complex needs one boundary matrix per positive degree");
  std::vector<GRMatrix> mats;
  for (std::size_t i = 1; i < ranks.size(); ++i)
    mats.push_back(GRMatrix::from_json(g, bs[i - 1], ranks[i - 1], ranks[i]));
  return ChainComplex(g, std::move(ranks), std::move(mats),
                      j.value("name", std::string{}));
}

std::string ChainComplex::hash() const {
  json j = to_json();
  j.erase("name");
  return sha256_hex(j.dump());
}

// ---------------------------------------------------------------- builders

std::vector<GroupRingElement> fox_derivatives(const GroupPtr &group,
                                              const Word &word) {
  const int n = group->generator_count();
  std::vector<std::vector<GroupRingElement::Term>> terms(static_cast<std::size_t>(n));
  // suffix[p] = x_{p+1} ... x_end
  std::vector<Element> suffix(word.size() + 1);
  suffix[word.size()] = group->identity();
  for (std::size_t p = word.size(); p-- > 0;) {
    int l = word[p];
    suffix[p] = group->multiply(group->generator(std::abs(l) - 1, l < 0), suffix[p + 1]);
  }
  for (std::size_t p = 0; p < word.size(); ++p) {
    int l = word[p];
    auto j = static_cast<std::size_t>(std::abs(l) - 1);
    if (l > 0)
      terms[j].emplace_back(suffix[p + 1], Rational(1));
    else
      terms[j].emplace_back(suffix[p], Rational(-1)); // -x^{-1} * rest
  }
  std::vector<GroupRingElement> out;
  for (auto &t : terms)
    out.push_back(GroupRingElement::from_terms(group, std::move(t)));
  return out;
}

namespace {

GRMatrix first_boundary(const GroupPtr &g) {
  const int n = g->generator_count();
  GRMatrix d(g, 1, n);
  for (int j = 0; j < n; ++j)
    d.at(0, j) = GroupRingElement::monomial(g, g->generator(j)) -
                 GroupRingElement::scalar(g, 1);
  return d;
}

GRMatrix relator_boundary(const GroupPtr &g, const std::vector<Word> &relators) {
  const int n = g->generator_count();
  GRMatrix d(g, n, static_cast<int>(relators.size()));
  for (std::size_t r = 0; r < relators.size(); ++r) {
    auto fox = fox_derivatives(g, relators[r]);
    for (int j = 0; j < n; ++j)
      d.at(j, static_cast<int>(r)) = fox[static_cast<std::size_t>(j)];
  }
  return d;
}

} // namespace

ChainComplex presentation_complex(const GroupSpec &spec) {
  GroupPtr g = Group::make(spec);
  switch (spec.kind) {
  case GroupSpec::Kind::FreeGroup:
    return ChainComplex(g, {1, spec.rank}, {first_boundary(g)});
  case GroupSpec::Kind::FreeAbelian:
    if (spec.rank == 1)
      return ChainComplex(g, {1, 1}, {first_boundary(g)});
    if (spec.rank == 2) {
      Word commutator{-2, -1, 2, 1}; // b^-1 a^-1 b a
      return ChainComplex(g, {1, 2, 1},
                          {first_boundary(g), relator_boundary(g, {commutator})});
    }
    break;
  case GroupSpec::Kind::FreeByZ: {
    const int r = spec.rank;
    const int t = r + 1;
    std::vector<Word> relators;
    for (int i = 0; i < r; ++i) {
      // t a_i t^-1 alpha(a_i)^-1
      Word w{t, i + 1, -t};
      Word img = invert_word(spec.automorphism[static_cast<std::size_t>(i)]);
      w.insert(w.end(), img.begin(), img.end());
      relators.push_back(w);
    }
    return ChainComplex(g, {1, r + 1, r},
                        {first_boundary(g), relator_boundary(g, relators)});
  }
  case GroupSpec::Kind::DirectProduct:
    break;
  }
  throw Error(ErrorKind::Unsupported,
              "no built-in presentation complex for this group");
}

ChainComplex point_complex(const GroupSpec &spec) {
  return ChainComplex(Group::make(spec), {1}, {});
}

ChainComplex product_complex(const ChainComplex &x, const ChainComplex &y) {
  GroupPtr g = Group::make(
      GroupSpec::direct_product({x.group()->spec(), y.group()->spec()}));
  const int top = x.top() + y.top();
  // Basis of degree n: (p, i, j) with p + q = n, lexicographic.
  std::vector<std::vector<std::array<int, 3>>> basis(static_cast<std::size_t>(top + 1));
  for (int n = 0; n <= top; ++n)
    for (int p = 0; p <= n; ++p)
      for (int i = 0; i < x.rank(p); ++i)
        for (int j = 0; j < y.rank(n - p); ++j)
          basis[static_cast<std::size_t>(n)].push_back({p, i, j});
  auto index_of = [&](int n, int p, int i, int j) {
    const auto &b = basis[static_cast<std::size_t>(n)];
    for (std::size_t k = 0; k < b.size(); ++k)
      if (b[k][0] == p && b[k][1] == i && b[k][2] == j)
        return static_cast<int>(k);
    throw Error(ErrorKind::Internal, "product basis lookup failed");
  };
  auto lift = [&](const GroupRingElement &e, std::size_t factor) {
    std::vector<GroupRingElement::Term> terms;
    for (const auto &[h, c] : e.terms())
      terms.emplace_back(g->embed_factor(factor, h), c);
    return GroupRingElement::from_terms(g, std::move(terms));
  };
  std::vector<int> ranks;
  for (const auto &b : basis)
    ranks.push_back(static_cast<int>(b.size()));
  std::vector<GRMatrix> mats;
  for (int n = 1; n <= top; ++n) {
    GRMatrix d(g, ranks[static_cast<std::size_t>(n - 1)], ranks[static_cast<std::size_t>(n)]);
    const auto &cols = basis[static_cast<std::size_t>(n)];
    for (std::size_t col = 0; col < cols.size(); ++col) {
      const auto [p, i, j] = cols[col];
      const int q = n - p;
      if (p >= 1) {
        const GRMatrix &dx = x.boundary(p);
        for (int r = 0; r < dx.rows(); ++r)
          if (!dx.at(r, i).is_zero())
            d.at(index_of(n - 1, p - 1, r, j), static_cast<int>(col)) +=
                lift(dx.at(r, i), 0);
      }
      if (q >= 1) {
        const GRMatrix &dy = y.boundary(q);
        const Rational sign = p % 2 == 0 ? 1 : -1;
        for (int r = 0; r < dy.rows(); ++r)
          if (!dy.at(r, j).is_zero())
            d.at(index_of(n - 1, p, i, r), static_cast<int>(col)) +=
                lift(dy.at(r, j), 1).scaled(sign);
      }
    }
    mats.push_back(std::move(d));
  }
  std::string name;
  if (!x.name().empty() && !y.name().empty())
    name = x.name() + "x" + y.name();
  return ChainComplex(g, std::move(ranks), std::move(mats), name);
}

// ---------------------------------------------------------------- fixtures

namespace {

struct FixtureInfo {
  const char *name;
  const char *description;
};

constexpr FixtureInfo kFixtures[] = {
    {"circle", "FreeAbelian(1): one vertex, one edge t"},
    {"torus", "FreeAbelian(2) presentation complex <a,b | [a,b]>"},
    {"f1", "FreeGroup(1) wedge of one circle"},
    {"f2", "FreeGroup(2) wedge of two circles"},
    {"f3", "FreeGroup(3) wedge of three circles"},
    {"f2xf2", "product of two FreeGroup(2) complexes"},
    {"mapping-torus", "F2 x| Z with a -> b, b -> ab"},
};

} // namespace

std::vector<std::string> fixture_names() {
  std::vector<std::string> v;
  for (const auto &f : kFixtures)
    v.emplace_back(f.name);
  return v;
}

std::string fixture_description(const std::string &name) {
  for (const auto &f : kFixtures)
    if (name == f.name)
      return f.description;
  throw Error(ErrorKind::InvalidInput, "unknown fixture '" + name + "'");
}

ChainComplex fixture(const std::string &name) {
  auto named = [&](ChainComplex c) {
    return ChainComplex(c.group(), c.ranks(),
                        [&] {
                          std::vector<GRMatrix> m;
                          for (int i = 1; i <= c.top(); ++i)
                            m.push_back(c.boundary(i));
                          return m;
                        }(),
                        name);
  };
  if (name == "circle")
    return named(presentation_complex(GroupSpec::free_abelian(1)));
  if (name == "torus")
    return named(presentation_complex(GroupSpec::free_abelian(2)));
  if (name == "f1")
    return named(presentation_complex(GroupSpec::free_group(1)));
  if (name == "f2")
    return named(presentation_complex(GroupSpec::free_group(2)));
  if (name == "f3")
    return named(presentation_complex(GroupSpec::free_group(3)));
  if (name == "f2xf2") {
    auto f2 = presentation_complex(GroupSpec::free_group(2));
    return named(product_complex(f2, f2));
  }
  if (name == "mapping-torus")
    return named(presentation_complex(
        GroupSpec::free_by_z(2, {Word{2}, Word{1, 2}})));
  throw Error(ErrorKind::InvalidInput, "unknown fixture '" + name + "'");
}

} // namespace novikov
