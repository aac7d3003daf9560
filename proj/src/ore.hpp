#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "rational.hpp"
#include "sparse_solver.hpp"

namespace novikov {

using json = nlohmann::json;

/// Group algebra QK of a finite group K with an automorphism tau, realized
/// through the left regular representation. Elements are dense coefficient
/// vectors indexed by group elements; index 0 need not be the identity.
class FiniteTracedAlgebra {
public:
  /// Validates the table (closure, identity, inverses, associativity) and
  /// that tau is a multiplicative bijection.
  FiniteTracedAlgebra(std::string name, std::vector<std::vector<int>> table,
                      std::vector<int> tau);

  static std::shared_ptr<const FiniteTracedAlgebra> trivial();
  static std::shared_ptr<const FiniteTracedAlgebra> cyclic(int n, int tau_multiplier = 1);
  /// S3 on permutations of {0,1,2} in lexicographic order; tau is
  /// conjugation by the element with index `tau_conjugator`.
  static std::shared_ptr<const FiniteTracedAlgebra> symmetric3(int tau_conjugator = 0);
  /// {"name": "trivial"|"Z<n>"|"S3", "tau": ...} or {"table": [[...]], "tau": [...]}
  static std::shared_ptr<const FiniteTracedAlgebra> from_json(const json &j);

  const std::string &name() const { return name_; }
  int order() const { return m_; }
  int identity() const { return identity_; }
  int mul(int a, int b) const { return table_[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]; }
  int inverse(int a) const { return inverse_[static_cast<std::size_t>(a)]; }
  /// tau^power applied to a group index; power may be negative.
  int tau(int a, std::int64_t power = 1) const;
  const std::vector<int> &tau_permutation() const { return tau_; }
  json to_json() const;

private:
  std::string name_;
  int m_ = 0;
  int identity_ = 0;
  std::vector<std::vector<int>> table_;
  std::vector<int> inverse_;
  std::vector<int> tau_;
  std::vector<int> tau_inv_;
  int tau_order_ = 1;
};

using AlgebraPtr = std::shared_ptr<const FiniteTracedAlgebra>;

/// Element of QK as a dense coefficient vector.
struct AlgebraElement {
  std::vector<Rational> c;

  bool is_zero() const;
  friend bool operator==(const AlgebraElement &, const AlgebraElement &) = default;
};

AlgebraElement algebra_zero(const FiniteTracedAlgebra &a);
AlgebraElement algebra_one(const FiniteTracedAlgebra &a);
AlgebraElement algebra_basis(const FiniteTracedAlgebra &a, int g, Rational coef = 1);
AlgebraElement algebra_add(const AlgebraElement &x, const AlgebraElement &y);
AlgebraElement algebra_sub(const AlgebraElement &x, const AlgebraElement &y);
AlgebraElement algebra_mul(const FiniteTracedAlgebra &a, const AlgebraElement &x,
                           const AlgebraElement &y);
AlgebraElement algebra_tau(const FiniteTracedAlgebra &a, const AlgebraElement &x,
                           std::int64_t power);
/// m x m matrix of left multiplication by x in the basis of group elements.
DenseMatrix left_matrix(const FiniteTracedAlgebra &a, const AlgebraElement &x);
/// Normalized trace: coefficient of the identity.
Rational trace(const FiniteTracedAlgebra &a, const AlgebraElement &x);
/// dim ker(left multiplication) / m.
Rational kernel_dimension(const FiniteTracedAlgebra &a, const AlgebraElement &x);
json algebra_element_to_json(const AlgebraElement &x);
AlgebraElement algebra_element_from_json(const FiniteTracedAlgebra &a, const json &j);

/// Twisted Laurent polynomial sum_i t^i c_i with t x = tau(x) t.
class TwistedPoly {
public:
  TwistedPoly() = default;
  explicit TwistedPoly(AlgebraPtr algebra) : algebra_(std::move(algebra)) {}
  TwistedPoly(AlgebraPtr algebra, std::map<std::int64_t, AlgebraElement> terms);

  static TwistedPoly constant(AlgebraPtr algebra, AlgebraElement c);
  /// t^power (coefficient 1).
  static TwistedPoly monomial(AlgebraPtr algebra, std::int64_t power,
                              AlgebraElement c);

  const AlgebraPtr &algebra() const { return algebra_; }
  const std::map<std::int64_t, AlgebraElement> &terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  /// Coefficient of t^power (zero if absent).
  AlgebraElement coefficient(std::int64_t power) const;

  std::int64_t init_power() const;
  /// Pure part of the initial term; zero for the zero polynomial.
  AlgebraElement pure_part() const;
  std::int64_t degree() const;
  /// Normalized kernel dimension of the pure part; 1 for zero.
  Rational nullity() const;

  friend TwistedPoly operator+(const TwistedPoly &x, const TwistedPoly &y);
  friend TwistedPoly operator-(const TwistedPoly &x, const TwistedPoly &y);
  friend TwistedPoly operator*(const TwistedPoly &x, const TwistedPoly &y);
  friend bool operator==(const TwistedPoly &x, const TwistedPoly &y) {
    return x.terms_ == y.terms_;
  }

  json to_json() const;
  static TwistedPoly from_json(AlgebraPtr algebra, const json &j);

private:
  void prune();

  AlgebraPtr algebra_;
  std::map<std::int64_t, AlgebraElement> terms_;
};

TwistedPoly twisted_multiply(const TwistedPoly &x, const TwistedPoly &y);

/// lambda_k for q, q' whose initial powers are 0, as a (k+N)m x 2km matrix.
/// Columns are ordered x_0, y_0, x_1, y_1, ... with m coordinates each.
DenseMatrix build_lambda_k(const TwistedPoly &q, const TwistedPoly &qp, int k);

struct OreResult {
  TwistedPoly r;
  TwistedPoly rp;
  int k = 0;
  int k_bound = 0;
  int N = 0;
  std::vector<Rational> d; // d_1..d_k
  Rational nul_r;
  Rational nul_rp;
  int draws = 0;
  bool exact = false;
  json to_json() const;
};

/// Finds r, r' with q r = q' r', nul r < nul q' + eps and
/// nul r' < nul q + nul q' + eps. Deterministic for a given seed.
OreResult approx_ore(const TwistedPoly &q, const TwistedPoly &qp, const Rational &eps,
                     std::uint64_t seed = 0);

struct CommonMultipleEntry {
  TwistedPoly x, y, z;
  Rational eps;
  Rational nul_y, nul_z;
  int k = 0;
};

struct CommonMultipleResult {
  std::vector<CommonMultipleEntry> entries;
  std::vector<Rational> partial_sums; // running sum of nul(y_n) + nul(z_n)
  json to_json() const;
};

/// For each index n (from 1), approx_ore with eps = 2^-n; x_n = q_n y_n = q'_n z_n.
CommonMultipleResult common_multiple(const std::vector<TwistedPoly> &q,
                                     const std::vector<TwistedPoly> &qp,
                                     std::uint64_t seed = 0);

} // namespace novikov
