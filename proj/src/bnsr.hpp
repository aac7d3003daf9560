#pragma once

#include <optional>
#include <string>
#include <vector>

#include "contraction.hpp"
#include "l2.hpp"

namespace novikov {

/// Nonzero characters with values in {-1, 0, 1} that are valid on the group,
/// one per ray, in lexicographic order of their values.
std::vector<Character> default_characters(const Group &group);

struct CampaignParams {
  int degree = 1;
  int word_length = 4;
  std::optional<int> window;
  int retries = 0;
  int witness_depth = 6;
  std::optional<int> witness_length; // default: witness_depth + witness degree
  std::optional<int> witness_boundary_length; // default: witness length
  int threads = 1;
  EnumerationLimits limits;
};

struct CharacterOutcome {
  Character chi;
  std::string outcome; // certified-in-Sigma | witness-persistent | no-certificate | budget-exhausted
  std::optional<ContractionCertificate> certificate;
  bool certificate_reverified = false;
  int certified_through = -1; // highest degree with a certificate
  int witness_degree = -1;
  std::optional<KernelWitnessReport> witness;
  std::vector<SearchOutcome> searches;
  std::string error;
  bool budget_limited = false;
};

struct CampaignReport {
  std::string complex_name;
  std::string complex_hash;
  int degree = 0;
  CampaignParams params;
  std::optional<L2Report> prediction;
  std::optional<int> empty_from; // predicted Sigma^n empty for n >= this
  std::vector<CharacterOutcome> outcomes;
  std::vector<std::string> fatal;
  bool budget_limited = false;

  /// 0 consistent, 2 budget-limited, 3 fatal inconsistency.
  int exit_code() const;
  json to_json() const;
  std::string summary() const;
};

/// Searches each character at degree n, and at 0..n-1 when that fails, runs
/// the kernel witness at the lowest degree without a certificate and
/// confronts the results with the euler-rule prediction.
CampaignReport run_campaign(const ChainComplex &c, const std::vector<Character> &characters,
                            const CampaignParams &params);

/// Finite-index subgroup H given by the action of each generator on the
/// cosets g H (coset 0 is H itself).
struct CosetTable {
  std::vector<Permutation> actions;
  static CosetTable from_json(const json &j);
  json to_json() const;
};

/// The complex and a certificate restricted to H. Entries stay in QG but
/// every group element lies in H.
struct RestrictedData {
  int index = 0;
  std::vector<Element> transversal; // s_c with s_c H = coset c
  std::vector<int> ranks;
  std::vector<GRMatrix> boundaries; // index i holds d_i, i = 1..top
  std::vector<GRMatrix> maps;       // H_0..H_k
};

RestrictedData restrict_to_subgroup(const ContractionCertificate &cert, const ChainComplex &c,
                                    const CosetTable &table);

/// Re-verifies the restricted identity over QH with phi restricted to H.
Verdict verify_restricted(const RestrictedData &data, const ChainComplex &c,
                          const CosetTable &table, const Character &chi);

Verdict finite_index_transfer_check(const ContractionCertificate &cert, const ChainComplex &c,
                                    const CosetTable &table);

} // namespace novikov
