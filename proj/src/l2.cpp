#include "l2.hpp"

#include <cstdlib>

#include "error.hpp"
#include "sparse_solver.hpp"

namespace novikov {

namespace {

Permutation compose(const Permutation &p, const Permutation &q) { // p after q
  Permutation r(q.size());
  for (std::size_t i = 0; i < q.size(); ++i)
    r[i] = p[static_cast<std::size_t>(q[i])];
  return r;
}

Permutation inverse(const Permutation &p) {
  Permutation r(p.size());
  for (std::size_t i = 0; i < p.size(); ++i)
    r[static_cast<std::size_t>(p[i])] = static_cast<int>(i);
  return r;
}

Permutation word_action(const std::vector<Permutation> &images, const Word &w, int offset,
                        std::size_t degree) {
  Permutation r(degree);
  for (std::size_t i = 0; i < degree; ++i)
    r[i] = static_cast<int>(i);
  for (int letter : w) {
    const auto g = static_cast<std::size_t>(std::abs(letter) - 1 + offset);
    r = compose(r, letter > 0 ? images[g] : inverse(images[g]));
  }
  return r;
}

void check_relations(const Group &group, const std::vector<Permutation> &images, int offset,
                     std::size_t degree) {
  const GroupSpec &spec = group.spec();
  const auto img = [&](int i) -> const Permutation & {
    return images[static_cast<std::size_t>(offset + i)];
  };
  auto fail = [](const std::string &what) {
    throw Error(ErrorKind::InvalidQuotient, "quotient images violate " + what);
  };
  switch (spec.kind) {
  case GroupSpec::Kind::FreeGroup:
    return;
  case GroupSpec::Kind::FreeAbelian:
    for (int i = 0; i < spec.rank; ++i)
      for (int j = i + 1; j < spec.rank; ++j)
        if (compose(img(i), img(j)) != compose(img(j), img(i)))
          fail("commutation of generators " + std::to_string(i + 1) + " and " +
               std::to_string(j + 1));
    return;
  case GroupSpec::Kind::DirectProduct: {
    int off = offset;
    std::vector<std::pair<int, int>> ranges;
    for (const auto &f : group.factors()) {
      check_relations(*f, images, off, degree);
      ranges.emplace_back(off, off + f->generator_count());
      off += f->generator_count();
    }
    for (std::size_t a = 0; a < ranges.size(); ++a)
      for (std::size_t b = a + 1; b < ranges.size(); ++b)
        for (int i = ranges[a].first; i < ranges[a].second; ++i)
          for (int j = ranges[b].first; j < ranges[b].second; ++j) {
            const auto &x = images[static_cast<std::size_t>(i)];
            const auto &y = images[static_cast<std::size_t>(j)];
            if (compose(x, y) != compose(y, x))
              fail("commutation between product factors");
          }
    return;
  }
  case GroupSpec::Kind::FreeByZ: {
    const Permutation &t = img(spec.rank);
    const Permutation tinv = inverse(t);
    for (int i = 0; i < spec.rank; ++i) {
      const Permutation lhs = compose(compose(t, img(i)), tinv);
      const Permutation rhs =
          word_action(images, spec.automorphism[static_cast<std::size_t>(i)], offset, degree);
      if (lhs != rhs)
        fail("the mapping-torus relation for fiber generator " + std::to_string(i + 1));
    }
    return;
  }
  }
}

} // namespace

void check_permutation_action(const Group &group, const std::vector<Permutation> &images) {
  if (static_cast<int>(images.size()) != group.generator_count())
    throw Error(ErrorKind::InvalidQuotient, "need one permutation per generator");
  if (images.empty())
    throw Error(ErrorKind::InvalidQuotient, "no generator images");
  const std::size_t degree = images.front().size();
  if (degree == 0)
    throw Error(ErrorKind::InvalidQuotient, "permutations must act on at least one point");
  for (const auto &p : images) {
    if (p.size() != degree)
      throw Error(ErrorKind::InvalidQuotient, "permutations have different degrees");
    std::vector<char> seen(degree, 0);
    for (int v : p) {
      if (v < 0 || static_cast<std::size_t>(v) >= degree || seen[static_cast<std::size_t>(v)])
        throw Error(ErrorKind::InvalidQuotient, "image is not a permutation");
      seen[static_cast<std::size_t>(v)] = 1;
    }
  }
  check_relations(group, images, 0, degree);
}

Permutation act(const Group &group, const std::vector<Permutation> &images, const Element &g) {
  return word_action(images, group.canonical_word(g), 0, images.front().size());
}

FiniteQuotient::FiniteQuotient(GroupPtr group, std::vector<Permutation> images)
    : group_(std::move(group)), images_(std::move(images)) {
  check_permutation_action(*group_, images_);
  const std::size_t degree = images_.front().size();
  Permutation id(degree);
  for (std::size_t i = 0; i < degree; ++i)
    id[i] = static_cast<int>(i);
  elements_.push_back(id);
  index_.emplace(id, 0);
  std::vector<Permutation> gens;
  for (const auto &p : images_) {
    gens.push_back(p);
    gens.push_back(inverse(p));
  }
  for (std::size_t i = 0; i < elements_.size(); ++i)
    for (const auto &g : gens) {
      Permutation next = compose(g, elements_[i]);
      if (index_.emplace(next, static_cast<int>(elements_.size())).second) {
        elements_.push_back(std::move(next));
        if (elements_.size() > 1000)
          throw Error(ErrorKind::InvalidQuotient, "quotient order exceeds 1000");
      }
    }
  const std::size_t m = elements_.size();
  table_.assign(m, std::vector<int>(m));
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b)
      table_[a][b] = index_.at(compose(elements_[a], elements_[b]));
  for (const auto &p : images_)
    generator_index_.push_back(index_.at(p));
}

FiniteQuotient FiniteQuotient::from_json(GroupPtr group, const json &j) {
  try {
    const json &imgs = j.is_object() ? j.at("images") : j;
    return FiniteQuotient(std::move(group), imgs.get<std::vector<Permutation>>());
  } catch (const json::exception &e) {
    throw Error(ErrorKind::InvalidQuotient, std::string("malformed quotient: ") + e.what());
  }
}

int FiniteQuotient::image_index(const Element &g) const {
  int cur = 0;
  for (int letter : group_->canonical_word(g)) {
    int gi = generator_index_[static_cast<std::size_t>(std::abs(letter) - 1)];
    if (letter < 0) {
      // inverse in the quotient
      const auto &row = table_[static_cast<std::size_t>(gi)];
      for (std::size_t k = 0; k < row.size(); ++k)
        if (row[k] == 0) {
          gi = static_cast<int>(k);
          break;
        }
    }
    cur = table_[static_cast<std::size_t>(cur)][static_cast<std::size_t>(gi)];
  }
  return cur;
}

int FiniteQuotient::multiply(int a, int b) const {
  return table_[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
}

json FiniteQuotient::to_json() const { return json{{"images", images_}, {"order", order()}}; }

json L2Report::to_json() const {
  json b = json::array();
  for (const auto &v : betti)
    b.push_back(v.str());
  json j = {{"method", method}, {"euler_characteristic", euler_characteristic}};
  if (method == "euler-rule") {
    j["betti"] = b;
    j["length"] = length;
    j["predictions"] = json::array();
    for (int n : empty_sigma_degrees)
      j["predictions"].push_back({{"degree", n}, {"sigma_empty", true}});
  } else {
    json qs = json::array();
    for (const auto &q : quotients) {
      json nb = json::array();
      for (const auto &v : q.normalized)
        nb.push_back(v.str());
      qs.push_back({{"order", q.order},
                    {"betti", q.betti},
                    {"normalized", nb},
                    {"alternating_sum", q.alternating_sum.str()}});
    }
    j["estimates"] = qs;
  }
  if (!note.empty())
    j["note"] = note;
  return j;
}

L2Report betti_by_euler_rule(const GroupSpec &spec, const ChainComplex &c) {
  if (!(c.group()->spec() == spec))
    throw Error(ErrorKind::SpecMismatch, "complex is not over the given group");
  int length = 0;
  bool mapping_torus = false;
  switch (spec.kind) {
  case GroupSpec::Kind::FreeGroup:
    length = 1;
    break;
  case GroupSpec::Kind::DirectProduct:
    for (const auto &f : spec.factors)
      if (f.kind != GroupSpec::Kind::FreeGroup)
        throw Error(ErrorKind::Unsupported, "euler rule only covers products of free groups");
    length = static_cast<int>(spec.factors.size());
    break;
  case GroupSpec::Kind::FreeByZ:
    length = 2;
    mapping_torus = true;
    break;
  default:
    throw Error(ErrorKind::Unsupported, "group class is outside the euler-rule list");
  }
  L2Report rep;
  rep.method = "euler-rule";
  rep.length = length;
  rep.euler_characteristic = c.euler_characteristic();
  rep.betti.assign(static_cast<std::size_t>(std::max(length, c.top()) + 1), Rational(0));
  if (mapping_torus) {
    if (rep.euler_characteristic != 0)
      throw Error(ErrorKind::Internal, "mapping torus complex with nonzero Euler characteristic");
    rep.note = "mapping torus: all values vanish";
    return rep;
  }
  if (rep.euler_characteristic == 0)
    throw Error(ErrorKind::Unsupported, "euler rule needs a nonzero Euler characteristic");
  rep.betti[static_cast<std::size_t>(length)] = Rational(std::abs(rep.euler_characteristic));
  rep.empty_sigma_degrees.push_back(length);
  return rep;
}

L2Report betti_by_quotients(const ChainComplex &c, const std::vector<FiniteQuotient> &quotients) {
  L2Report rep;
  rep.method = "quotient-sequence";
  rep.euler_characteristic = c.euler_characteristic();
  rep.note = "finite-quotient estimates";
  for (const auto &q : quotients) {
    if (!(q.group()->spec() == c.group()->spec()))
      throw Error(ErrorKind::InvalidQuotient, "quotient is for a different group");
    const int m = q.order();
    // Ranks of each boundary specialized to the left-regular representation.
    std::vector<int> rk(static_cast<std::size_t>(c.top()) + 2, 0);
    for (int p = 1; p <= c.top(); ++p) {
      const GRMatrix &d = c.boundary(p);
      SparseEliminator e(d.cols() * m);
      for (int i = 0; i < d.rows(); ++i) {
        std::vector<SparseVec> rows(static_cast<std::size_t>(m));
        for (int j = 0; j < d.cols(); ++j)
          for (const auto &[g, coef] : d.at(i, j).terms()) {
            const int gi = q.image_index(g);
            for (int b = 0; b < m; ++b)
              rows[static_cast<std::size_t>(q.multiply(gi, b))].emplace_back(j * m + b, coef);
          }
        for (auto &r : rows)
          e.add_row(std::move(r));
      }
      rk[static_cast<std::size_t>(p)] = e.rank();
    }
    QuotientEstimate est;
    est.order = m;
    Rational alt(0);
    for (int p = 0; p <= c.top(); ++p) {
      const int b = c.rank(p) * m - rk[static_cast<std::size_t>(p)] -
                    rk[static_cast<std::size_t>(p) + 1];
      est.betti.push_back(b);
      est.normalized.emplace_back(b, m);
      if (p % 2 == 0)
        alt += Rational(b, m);
      else
        alt -= Rational(b, m);
    }
    est.alternating_sum = alt;
    if (!(alt == Rational(rep.euler_characteristic)))
      throw Error(ErrorKind::Internal, "alternating sum of quotient Betti numbers differs from chi");
    rep.quotients.push_back(std::move(est));
  }
  return rep;
}

std::optional<int> predicted_empty_from(const ChainComplex &c) {
  try {
    L2Report r = betti_by_euler_rule(c.group()->spec(), c);
    if (r.empty_sigma_degrees.empty())
      return std::nullopt;
    return r.empty_sigma_degrees.front();
  } catch (const Error &e) {
    if (e.kind() == ErrorKind::Unsupported)
      return std::nullopt;
    throw;
  }
}

} // namespace novikov
