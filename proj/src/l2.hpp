#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "complex.hpp"

namespace novikov {

using Permutation = std::vector<int>;

/// Checks that permutations of {0..n-1}, one per generator, respect the
/// defining relations of the group. Throws InvalidQuotient otherwise.
void check_permutation_action(const Group &group, const std::vector<Permutation> &images);

/// Permutation image of a group element under a generator assignment,
/// composed as a left action: (xy).i = x.(y.i).
Permutation act(const Group &group, const std::vector<Permutation> &images, const Element &g);

/// Finite quotient given by permutation images of the generators. The
/// quotient group is the permutation group they generate.
class FiniteQuotient {
public:
  FiniteQuotient(GroupPtr group, std::vector<Permutation> images);
  static FiniteQuotient from_json(GroupPtr group, const json &j);

  const GroupPtr &group() const { return group_; }
  const std::vector<Permutation> &images() const { return images_; }
  int order() const { return static_cast<int>(elements_.size()); }
  /// Index in the enumerated quotient of the image of g.
  int image_index(const Element &g) const;
  /// Left-regular action: index of q_a * q_b.
  int multiply(int a, int b) const;
  json to_json() const;

private:
  GroupPtr group_;
  std::vector<Permutation> images_;
  std::vector<Permutation> elements_;
  std::map<Permutation, int> index_;
  std::vector<std::vector<int>> table_;
  std::vector<int> generator_index_;
};

struct QuotientEstimate {
  int order = 0;
  std::vector<int> betti;            // b_p(Q)
  std::vector<Rational> normalized;  // b_p(Q) / |Q|
  Rational alternating_sum;          // sum (-1)^p b_p(Q) / |Q|
};

struct L2Report {
  std::string method; // euler-rule | quotient-sequence
  std::vector<Rational> betti;
  std::int64_t euler_characteristic = 0;
  int length = 0;
  std::vector<int> empty_sigma_degrees; // n with b_n != 0, so Sigma^n is empty
  std::vector<QuotientEstimate> quotients;
  std::string note;
  json to_json() const;
};

/// Euler-rule values for the recognized poly-free classes. Throws Unsupported
/// for anything else.
L2Report betti_by_euler_rule(const GroupSpec &spec, const ChainComplex &c);

/// Normalized Betti numbers of the finite covers given by each quotient.
L2Report betti_by_quotients(const ChainComplex &c, const std::vector<FiniteQuotient> &quotients);

/// Smallest degree n such that the euler rule predicts Sigma^n empty, if any.
std::optional<int> predicted_empty_from(const ChainComplex &c);

} // namespace novikov
