#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <boost/container/small_vector.hpp>
#include <json.hpp>

#include "rational.hpp"

namespace novikov {

using json = nlohmann::json;

/// A word over generators: letter +(i+1) is generator i, -(i+1) its inverse.
using Word = std::vector<int>;

struct GroupSpec {
  enum class Kind { FreeGroup, FreeAbelian, DirectProduct, FreeByZ };

  Kind kind = Kind::FreeGroup;
  int rank = 1; // FreeGroup / FreeAbelian rank, FreeByZ fiber rank
  std::vector<GroupSpec> factors;    // DirectProduct
  std::vector<Word> automorphism;    // FreeByZ: images of the fiber generators

  static GroupSpec free_group(int rank);
  static GroupSpec free_abelian(int rank);
  static GroupSpec direct_product(std::vector<GroupSpec> factors);
  static GroupSpec free_by_z(int fiber_rank, std::vector<Word> images);

  friend bool operator==(const GroupSpec &, const GroupSpec &) = default;
};

json spec_to_json(const GroupSpec &spec);
GroupSpec spec_from_json(const json &j);

/// Normal-form code of a group element. The layout depends on the group:
///  FreeGroup     freely reduced letters
///  FreeAbelian   exponent vector
///  DirectProduct per factor: [length, factor code...]
///  FreeByZ       freely reduced fiber letters followed by the t-exponent
struct Element {
  boost::container::small_vector<std::int32_t, 10> code;

  std::span<const std::int32_t> view() const { return {code.data(), code.size()}; }

  friend bool operator==(const Element &, const Element &) = default;
  /// Shortlex on the raw code; used only for deterministic container order.
  friend bool operator<(const Element &a, const Element &b) {
    if (a.code.size() != b.code.size())
      return a.code.size() < b.code.size();
    return a.code < b.code;
  }
};

struct ElementHash {
  std::size_t operator()(const Element &e) const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    for (std::int32_t v : e.code) {
      h ^= static_cast<std::uint32_t>(v);
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

class Character;

/// Immutable group object built from a validated GroupSpec.
class Group {
public:
  static std::shared_ptr<const Group> make(const GroupSpec &spec);

  const GroupSpec &spec() const { return spec_; }
  GroupSpec::Kind kind() const { return spec_.kind; }
  int generator_count() const { return generator_count_; }
  std::string generator_name(int index) const;

  Element identity() const;
  bool is_identity(const Element &x) const;
  /// Generator `index` (flattened order) or its inverse.
  Element generator(int index, bool inverse = false) const;
  Element multiply(const Element &x, const Element &y) const;
  Element invert(const Element &x) const;
  Element from_word(std::span<const int> letters) const;
  /// Re-normalizes an arbitrary code of the right layout.
  Element normalize(const Element &x) const;

  /// Letters of the canonical word spelling the normal form.
  Word canonical_word(const Element &x) const;
  /// Sum of |exponents| of the canonical word; equals word length for free
  /// groups, free abelian groups and their products.
  std::int64_t phi(const Character &chi, const Element &x) const;
  std::int64_t phi(std::span<const std::int64_t> values,
                   const Element &x) const;

  json element_to_json(const Element &x) const;
  Element element_from_json(const json &j) const;
  std::string element_to_string(const Element &x) const;

  /// Children for DirectProduct.
  const std::vector<std::shared_ptr<const Group>> &factors() const {
    return factors_;
  }
  /// Fiber automorphism power applied to a reduced fiber word (FreeByZ).
  Word apply_automorphism(const Word &w, std::int64_t power) const;
  /// Embeds a factor element into this DirectProduct.
  Element embed_factor(std::size_t factor, const Element &x) const;
  /// Splits a DirectProduct element into factor elements.
  std::vector<Element> split(const Element &x) const;

private:
  explicit Group(GroupSpec spec);

  void mul_into(std::span<const std::int32_t> a,
                std::span<const std::int32_t> b, Element &out) const;
  void inv_into(std::span<const std::int32_t> a, Element &out) const;
  std::int64_t phi_span(std::span<const std::int64_t> values,
                        std::span<const std::int32_t> code) const;
  void word_into(std::span<const std::int32_t> code, int offset,
                 Word &out) const;

  GroupSpec spec_;
  int generator_count_ = 0;
  std::vector<std::shared_ptr<const Group>> factors_;
  std::vector<int> factor_offsets_;
  std::vector<Word> alpha_;     // FreeByZ images
  std::vector<Word> alpha_inv_; // FreeByZ inverse images
};

using GroupPtr = std::shared_ptr<const Group>;

/// Freely reduces a word in place.
void free_reduce(Word &w);
Word invert_word(const Word &w);
std::string word_to_string(const Word &w, int offset = 0);
Word word_from_string(const std::string &s);

/// Element bundled with its group; the checked public surface.
struct GroupElement {
  GroupPtr group;
  Element value;
};

GroupElement multiply(const GroupElement &x, const GroupElement &y);
GroupElement invert(const GroupElement &x);

/// Homomorphism G -> Z given on generators. Rational inputs are rescaled to
/// coprime integers; Sigma-membership only depends on the ray.
class Character {
public:
  Character(const Group &group, std::vector<Rational> values);
  Character(const Group &group, std::vector<std::int64_t> values);

  const std::vector<std::int64_t> &values() const { return values_; }
  const std::vector<Rational> &input() const { return input_; }
  std::int64_t operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }

  Character scaled(std::int64_t k) const;
  Character negated() const;
  std::string str() const;

  json to_json() const;
  static Character from_json(const Group &group, const json &j);

  friend bool operator==(const Character &a, const Character &b) {
    return a.values_ == b.values_;
  }

private:
  void validate(const Group &group) const;

  std::vector<Rational> input_;
  std::vector<std::int64_t> values_;
};

Rational phi_value(const Character &chi, const GroupElement &x);

struct EnumerationLimits {
  int max_length = 8;
  std::size_t support_cap = 5'000'000;
};

/// All elements of word length <= max_length whose phi-value lies in
/// [lo, hi], sorted by (word length, canonical word in shortlex with
/// a1 < a1^-1 < a2 < ...).
std::vector<Element> enumerate_support(const Group &group,
                                       const Character &chi, int max_length,
                                       std::int64_t lo, std::int64_t hi,
                                       const EnumerationLimits &limits = {});

/// Same, returning only the word-length ball (no phi filter).
std::vector<std::pair<Element, int>> enumerate_ball(
    const Group &group, int max_length, const EnumerationLimits &limits = {});

/// Shortlex comparison of canonical words.
bool shortlex_less(const Word &a, const Word &b);

} // namespace novikov
