#pragma once

#include <optional>
#include <string>
#include <vector>

#include "complex.hpp"
#include "novikov.hpp"

namespace novikov {

/// Truncated chain homotopy H_0..H_k with
/// d_{i+1} H_i + H_{i-1} d_i = I - P_i and every P_i supported on phi >= 1.
struct ContractionCertificate {
  std::string complex_name;
  std::string complex_hash;
  GroupSpec group;
  Character chi;
  int degree = 0;
  std::vector<GRMatrix> maps; // maps[i] = H_i : C_i -> C_{i+1}
  std::int64_t positivity_radius = 0;
  int word_length = 0;
  std::int64_t window_lo = 0;
  std::int64_t window_hi = 0;

  json to_json() const;
  static ContractionCertificate from_json(const json &j);
};

struct SearchParams {
  int degree = 1;
  int word_length = 4;
  std::optional<int> window; // W; defaults to word_length
  int retries = 0;           // further attempts, doubling W each time
  EnumerationLimits limits;
};

struct SearchOutcome {
  std::optional<ContractionCertificate> certificate;
  int degree = 0;
  int word_length = 0;
  int window = 0;
  std::int64_t window_hi = 0;
  int attempts = 0;
  std::size_t unknowns = 0;
  std::size_t equations = 0;
  json to_json() const;
};

SearchOutcome search_contraction(const ChainComplex &c, const Character &chi,
                                 const SearchParams &params);

struct Verdict {
  bool accepted = false;
  std::string message;
  int degree = -1;
  int row = -1;
  int col = -1;
  json element;
  Rational expected;
  Rational found;
  json to_json() const;
};

/// Exact re-check of every identity. Throws WrongComplex on hash mismatch.
Verdict verify_certificate(const ContractionCertificate &cert,
                           const ChainComplex &c);

/// Genuine Novikov homotopy H_i (I - P_i)^{-1} obtained from a certificate.
/// Entries are opaque series nodes, known only through truncations.
std::vector<NovikovMatrix> novikov_homotopy(const ChainComplex &c,
                                            const ContractionCertificate &cert,
                                            const ContextPtr &ctx);

struct RebuildResult {
  NovikovMatrix H;
  std::int64_t radius = 0;
  std::int64_t verify_radius = 0;
};

/// Replaces a Novikov H_n by trunc(H_n) (I - P)^{-1} with
/// I - P = d_{n+1} trunc(H_n) + H_{n-1} d_n, doubling r until P is positive.
RebuildResult rebuild_contraction(const GRMatrix &d_next, const GRMatrix &d_n,
                                  const NovikovMatrix &H_prev,
                                  const NovikovMatrix &H_n, std::int64_t r,
                                  int max_doublings = 10);

/// Degree-by-degree rebuild of H_0..H_n over the division closure.
std::vector<RebuildResult> rebuild_all(const ChainComplex &c,
                                       const std::vector<NovikovMatrix> &H,
                                       std::int64_t r, int max_doublings = 10);

struct WitnessParams {
  int degree = 1;
  int depth = 6;
  int word_length = 7;
  std::optional<int> boundary_length; // default: word_length + (depth + 1) * step
  EnumerationLimits limits;
};

struct KernelWitnessReport {
  std::string complex_name;
  std::string complex_hash;
  std::vector<std::int64_t> character;
  int degree = 0;
  int depth = 0;
  int word_length = 0;
  int boundary_length = 0;
  std::vector<int> dimensions;
  std::string verdict; // persistent | extinguished-at | budget-exhausted
  int extinguished_at = -1;
  std::string note;
  json to_json() const;
};

KernelWitnessReport kernel_witness(const ChainComplex &c, const Character &chi,
                                   const WitnessParams &params);

/// Dimension of truncated cycles modulo truncated boundaries at one depth.
int witness_dimension(const ChainComplex &c, const Character &chi, int degree,
                      int depth, int word_length, int boundary_length,
                      const EnumerationLimits &limits);

} // namespace novikov
