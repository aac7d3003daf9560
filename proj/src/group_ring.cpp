#include "group_ring.hpp"

#include <algorithm>
#include <unordered_map>

#include "error.hpp"

namespace novikov {

const GroupPtr &common_group(const GroupPtr &a, const GroupPtr &b) {
  if (!a)
    return b;
  if (!b || a == b)
    return a;
  if (!(a->spec() == b->spec()))
    throw Error(ErrorKind::SpecMismatch,
                "group ring elements over different groups");
  return a;
}

namespace {

using Term = GroupRingElement::Term;

std::vector<Term> collect(std::unordered_map<Element, Rational, ElementHash> &acc) {
  std::vector<Term> out;
  out.reserve(acc.size());
  for (auto &[g, c] : acc)
    if (!c.is_zero())
      out.emplace_back(g, std::move(c));
  std::sort(out.begin(), out.end(),
            [](const Term &x, const Term &y) { return x.first < y.first; });
  return out;
}

std::vector<Term> merge(const std::vector<Term> &a, const std::vector<Term> &b,
                        bool subtract) {
  std::vector<Term> out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j].first < a[i].first) {
      out.emplace_back(b[j].first, subtract ? -b[j].second : b[j].second);
      ++j;
    } else {
      Rational c = subtract ? a[i].second - b[j].second
                            : a[i].second + b[j].second;
      if (!c.is_zero())
        out.emplace_back(a[i].first, std::move(c));
      ++i;
      ++j;
    }
  }
  return out;
}

} // namespace

GroupRingElement GroupRingElement::monomial(GroupPtr group, Element g,
                                            Rational c) {
  GroupRingElement x(std::move(group));
  if (!c.is_zero())
    x.terms_.emplace_back(std::move(g), std::move(c));
  return x;
}

GroupRingElement GroupRingElement::scalar(GroupPtr group, Rational c) {
  Element e = group->identity();
  return monomial(std::move(group), std::move(e), std::move(c));
}

GroupRingElement GroupRingElement::from_terms(GroupPtr group,
                                              std::vector<Term> terms) {
  std::unordered_map<Element, Rational, ElementHash> acc;
  for (auto &[g, c] : terms)
    acc[g] += c;
  GroupRingElement x(std::move(group));
  x.terms_ = collect(acc);
  return x;
}

GroupRingElement GroupRingElement::from_sorted(GroupPtr group,
                                               std::vector<Term> terms) {
  GroupRingElement x(std::move(group));
  x.terms_ = std::move(terms);
  return x;
}

Rational GroupRingElement::coefficient(const Element &g) const {
  auto it = std::lower_bound(
      terms_.begin(), terms_.end(), g,
      [](const Term &t, const Element &e) { return t.first < e; });
  if (it != terms_.end() && it->first == g)
    return it->second;
  return Rational(0);
}

GroupRingElement GroupRingElement::operator-() const {
  GroupRingElement x(*this);
  for (auto &t : x.terms_)
    t.second = -t.second;
  return x;
}

GroupRingElement GroupRingElement::scaled(const Rational &c) const {
  if (c.is_zero())
    return GroupRingElement(group_);
  GroupRingElement x(*this);
  for (auto &t : x.terms_)
    t.second *= c;
  return x;
}

GroupRingElement operator+(const GroupRingElement &a,
                           const GroupRingElement &b) {
  GroupRingElement x(common_group(a.group_, b.group_));
  x.terms_ = merge(a.terms_, b.terms_, false);
  return x;
}

GroupRingElement operator-(const GroupRingElement &a,
                           const GroupRingElement &b) {
  GroupRingElement x(common_group(a.group_, b.group_));
  x.terms_ = merge(a.terms_, b.terms_, true);
  return x;
}

GroupRingElement &GroupRingElement::operator+=(const GroupRingElement &b) {
  group_ = common_group(group_, b.group_);
  terms_ = merge(terms_, b.terms_, false);
  return *this;
}

GroupRingElement operator*(const GroupRingElement &a,
                           const GroupRingElement &b) {
  const GroupPtr &g = common_group(a.group_, b.group_);
  if (a.is_zero() || b.is_zero())
    return GroupRingElement(g);
  std::unordered_map<Element, Rational, ElementHash> acc;
  acc.reserve(a.size() * b.size());
  for (const auto &[x, c] : a.terms_)
    for (const auto &[y, d] : b.terms_)
      acc[g->multiply(x, y)] += c * d;
  GroupRingElement out(g);
  out.terms_ = collect(acc);
  return out;
}

GroupRingElement multiply_truncated(const GroupRingElement &a,
                                    const GroupRingElement &b,
                                    const Character &chi, std::int64_t r) {
  const GroupPtr &g = common_group(a.group(), b.group());
  if (a.is_zero() || b.is_zero())
    return GroupRingElement(g);
  std::vector<std::pair<std::int64_t, const Term *>> bs;
  bs.reserve(b.size());
  for (const auto &t : b.terms())
    bs.emplace_back(g->phi(chi, t.first), &t);
  std::sort(bs.begin(), bs.end(),
            [](const auto &x, const auto &y) { return x.first < y.first; });
  std::unordered_map<Element, Rational, ElementHash> acc;
  for (const auto &[x, c] : a.terms()) {
    const std::int64_t px = g->phi(chi, x);
    for (const auto &[py, t] : bs) {
      if (px + py > r)
        break;
      acc[g->multiply(x, t->first)] += c * t->second;
    }
  }
  return GroupRingElement::from_sorted(g, collect(acc));
}

GroupRingElement GroupRingElement::truncated(const Character &chi,
                                             std::int64_t r) const {
  GroupRingElement x(group_);
  for (const auto &t : terms_)
    if (group_->phi(chi, t.first) <= r)
      x.terms_.push_back(t);
  return x;
}

GroupRingElement GroupRingElement::tail(const Character &chi,
                                        std::int64_t r) const {
  GroupRingElement x(group_);
  for (const auto &t : terms_)
    if (group_->phi(chi, t.first) > r)
      x.terms_.push_back(t);
  return x;
}

std::optional<std::int64_t>
GroupRingElement::min_degree(const Character &chi) const {
  std::optional<std::int64_t> m;
  for (const auto &t : terms_) {
    std::int64_t v = group_->phi(chi, t.first);
    if (!m || v < *m)
      m = v;
  }
  return m;
}

std::optional<std::int64_t>
GroupRingElement::max_degree(const Character &chi) const {
  std::optional<std::int64_t> m;
  for (const auto &t : terms_) {
    std::int64_t v = group_->phi(chi, t.first);
    if (!m || v > *m)
      m = v;
  }
  return m;
}

Rational GroupRingElement::augmentation() const {
  Rational s;
  for (const auto &t : terms_)
    s += t.second;
  return s;
}

json GroupRingElement::to_json() const {
  json a = json::array();
  for (const auto &[g, c] : terms_)
    a.push_back({{"word", group_->element_to_json(g)}, {"coeff", c.str()}});
  return a;
}

GroupRingElement GroupRingElement::from_json(GroupPtr group, const json &j) {
  if (!j.is_array())
    throw Error(ErrorKind::InvalidInput, "group ring element must be a list");
  std::vector<Term> terms;
  for (const auto &t : j) {
    if (!t.is_object() || !t.contains("word") || !t.contains("coeff"))
      throw Error(ErrorKind::InvalidInput,
                  "group ring term needs 'word' and 'coeff'");
    const json &c = t.at("coeff");
    Rational q = c.is_string() ? Rational::parse(c.get<std::string>())
                               : Rational(c.get<std::int64_t>());
    terms.emplace_back(group->normalize(group->element_from_json(t.at("word"))),
                       std::move(q));
  }
  return from_terms(std::move(group), std::move(terms));
}

std::string GroupRingElement::str() const {
  if (terms_.empty())
    return "0";
  std::string s;
  for (const auto &[g, c] : terms_) {
    if (!s.empty())
      s += " + ";
    s += c.str();
    if (!group_->is_identity(g))
      s += "*" + group_->element_to_string(g);
  }
  return s;
}

// ---------------------------------------------------------------- GRMatrix

GRMatrix::GRMatrix(GroupPtr group, int rows, int cols)
    : group_(std::move(group)), rows_(rows), cols_(cols),
      entries_(static_cast<std::size_t>(rows * cols),
               GroupRingElement(group_)) {}

GRMatrix GRMatrix::identity(GroupPtr group, int n) {
  GRMatrix m(group, n, n);
  for (int i = 0; i < n; ++i)
    m.at(i, i) = GroupRingElement::scalar(group, 1);
  return m;
}

bool GRMatrix::is_zero() const {
  return std::all_of(entries_.begin(), entries_.end(),
                     [](const GroupRingElement &x) { return x.is_zero(); });
}

GRMatrix operator*(const GRMatrix &a, const GRMatrix &b) {
  if (a.cols_ != b.rows_)
    throw Error(ErrorKind::Internal, "matrix shape mismatch in product");
  GRMatrix m(common_group(a.group_, b.group_), a.rows_, b.cols_);
  for (int i = 0; i < a.rows_; ++i)
    for (int k = 0; k < a.cols_; ++k) {
      const auto &x = a.at(i, k);
      if (x.is_zero())
        continue;
      for (int j = 0; j < b.cols_; ++j)
        if (!b.at(k, j).is_zero())
          m.at(i, j) += x * b.at(k, j);
    }
  return m;
}

GRMatrix operator+(const GRMatrix &a, const GRMatrix &b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_)
    throw Error(ErrorKind::Internal, "matrix shape mismatch in sum");
  GRMatrix m(common_group(a.group_, b.group_), a.rows_, a.cols_);
  for (std::size_t i = 0; i < m.entries_.size(); ++i)
    m.entries_[i] = a.entries_[i] + b.entries_[i];
  return m;
}

GRMatrix operator-(const GRMatrix &a, const GRMatrix &b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_)
    throw Error(ErrorKind::Internal, "matrix shape mismatch in difference");
  GRMatrix m(common_group(a.group_, b.group_), a.rows_, a.cols_);
  for (std::size_t i = 0; i < m.entries_.size(); ++i)
    m.entries_[i] = a.entries_[i] - b.entries_[i];
  return m;
}

GRMatrix GRMatrix::truncated(const Character &chi, std::int64_t r) const {
  GRMatrix m(*this);
  for (auto &e : m.entries_)
    e = e.truncated(chi, r);
  return m;
}

json GRMatrix::to_json() const {
  json rows = json::array();
  for (int i = 0; i < rows_; ++i) {
    json row = json::array();
    for (int j = 0; j < cols_; ++j)
      row.push_back(at(i, j).to_json());
    rows.push_back(row);
  }
  return rows;
}

GRMatrix GRMatrix::from_json(GroupPtr group, const json &j, int rows,
                             int cols) {
  if (!j.is_array() || static_cast<int>(j.size()) != rows)
    throw Error(ErrorKind::InvalidInput,
                "matrix needs " + std::to_string(rows) + " rows");
  GRMatrix m(group, rows, cols);
  for (int i = 0; i < rows; ++i) {
    const json &row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<int>(row.size()) != cols)
      throw Error(ErrorKind::InvalidInput,
                  "matrix row needs " + std::to_string(cols) + " entries");
    for (int k = 0; k < cols; ++k)
      m.at(i, k) = GroupRingElement::from_json(group, row[static_cast<std::size_t>(k)]);
  }
  return m;
}

} // namespace novikov
