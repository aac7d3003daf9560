#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "group.hpp"

namespace novikov {

/// Finite Q-linear combination of group elements. Terms are kept sorted by
/// Element order with no zero coefficients. A default-constructed value is
/// the zero of every group ring.
class GroupRingElement {
public:
  using Term = std::pair<Element, Rational>;

  GroupRingElement() = default;
  explicit GroupRingElement(GroupPtr group) : group_(std::move(group)) {}

  static GroupRingElement monomial(GroupPtr group, Element g, Rational c = 1);
  static GroupRingElement scalar(GroupPtr group, Rational c);
  /// Sums duplicate elements and drops zero coefficients.
  static GroupRingElement from_terms(GroupPtr group, std::vector<Term> terms);
  /// Caller guarantees sorted, distinct, nonzero terms.
  static GroupRingElement from_sorted(GroupPtr group, std::vector<Term> terms);

  const GroupPtr &group() const { return group_; }
  const std::vector<Term> &terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  Rational coefficient(const Element &g) const;

  GroupRingElement operator-() const;
  GroupRingElement scaled(const Rational &c) const;
  friend GroupRingElement operator+(const GroupRingElement &a,
                                    const GroupRingElement &b);
  friend GroupRingElement operator-(const GroupRingElement &a,
                                    const GroupRingElement &b);
  friend GroupRingElement operator*(const GroupRingElement &a,
                                    const GroupRingElement &b);
  GroupRingElement &operator+=(const GroupRingElement &b);
  friend bool operator==(const GroupRingElement &a, const GroupRingElement &b) {
    return a.terms_ == b.terms_;
  }

  /// Terms with phi(g) <= r.
  GroupRingElement truncated(const Character &chi, std::int64_t r) const;
  /// Terms with phi(g) > r.
  GroupRingElement tail(const Character &chi, std::int64_t r) const;
  /// Minimum / maximum phi over the support; empty for zero.
  std::optional<std::int64_t> min_degree(const Character &chi) const;
  std::optional<std::int64_t> max_degree(const Character &chi) const;
  Rational augmentation() const;

  json to_json() const;
  static GroupRingElement from_json(GroupPtr group, const json &j);
  std::string str() const;

private:
  GroupPtr group_;
  std::vector<Term> terms_;
};

/// Product keeping only terms with phi <= r.
GroupRingElement multiply_truncated(const GroupRingElement &a,
                                    const GroupRingElement &b,
                                    const Character &chi, std::int64_t r);

/// Dense matrix of group-ring elements (complexes have few cells, so dense
/// storage of sparse entries is enough).
class GRMatrix {
public:
  GRMatrix() = default;
  GRMatrix(GroupPtr group, int rows, int cols);
  static GRMatrix identity(GroupPtr group, int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  const GroupPtr &group() const { return group_; }
  GroupRingElement &at(int i, int j) {
    return entries_[static_cast<std::size_t>(i * cols_ + j)];
  }
  const GroupRingElement &at(int i, int j) const {
    return entries_[static_cast<std::size_t>(i * cols_ + j)];
  }
  bool is_zero() const;

  friend GRMatrix operator*(const GRMatrix &a, const GRMatrix &b);
  friend GRMatrix operator+(const GRMatrix &a, const GRMatrix &b);
  friend GRMatrix operator-(const GRMatrix &a, const GRMatrix &b);
  friend bool operator==(const GRMatrix &a, const GRMatrix &b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ &&
           a.entries_ == b.entries_;
  }
  GRMatrix truncated(const Character &chi, std::int64_t r) const;

  json to_json() const;
  static GRMatrix from_json(GroupPtr group, const json &j, int rows, int cols);

private:
  GroupPtr group_;
  int rows_ = 0;
  int cols_ = 0;
  std::vector<GroupRingElement> entries_;
};

/// Throws SpecMismatch unless both groups agree (null means "any").
const GroupPtr &common_group(const GroupPtr &a, const GroupPtr &b);

} // namespace novikov
