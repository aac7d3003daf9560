#pragma once

#include <string>
#include <vector>

#include "group_ring.hpp"

namespace novikov {

/// Based free chain complex of right QG-modules. boundary(i) is the
/// ranks[i-1] x ranks[i] matrix of d_i : C_i -> C_{i-1}; vectors are columns.
class ChainComplex {
public:
  ChainComplex() = default;
  /// Validates shapes and d o d = 0; throws InvalidInput otherwise.
  ChainComplex(GroupPtr group, std::vector<int> ranks,
               std::vector<GRMatrix> boundaries, std::string name = {});

  const GroupPtr &group() const { return group_; }
  const std::vector<int> &ranks() const { return ranks_; }
  const std::string &name() const { return name_; }
  int top() const { return static_cast<int>(ranks_.size()) - 1; }
  /// Rank of C_i, zero outside 0..top.
  int rank(int i) const;
  /// d_i for any i; zero matrices of the right shape outside 1..top.
  const GRMatrix &boundary(int i) const;

  int euler_characteristic() const;
  /// Smallest phi over all terms of all boundary entries in degrees lo..hi
  /// (0 if there are none).
  std::int64_t min_boundary_degree(const Character &chi, int lo, int hi) const;
  std::int64_t max_abs_boundary_degree(const Character &chi, int lo, int hi) const;

  /// {"group":..., "ranks":[...], "boundaries":[...]} plus optional name.
  json to_json() const;
  static ChainComplex from_json(const json &j, const GroupSpec *spec = nullptr);
  /// SHA-256 of the canonical JSON without the name.
  std::string hash() const;

private:
  void check() const;

  GroupPtr group_;
  std::vector<int> ranks_;
  std::vector<GRMatrix> boundaries_; // index i holds d_i for i = 0..top+1
  std::string name_;
  GRMatrix empty_;
};

/// Right Fox derivatives of a word: w - 1 = sum_j (x_j - 1) D_j(w).
std::vector<GroupRingElement> fox_derivatives(const GroupPtr &group,
                                              const Word &word);

ChainComplex presentation_complex(const GroupSpec &spec);
ChainComplex product_complex(const ChainComplex &x, const ChainComplex &y);
/// One free generator in degree 0, no cells above.
ChainComplex point_complex(const GroupSpec &spec);

std::vector<std::string> fixture_names();
ChainComplex fixture(const std::string &name);
std::string fixture_description(const std::string &name);

std::string sha256_hex(const std::string &data);

} // namespace novikov
