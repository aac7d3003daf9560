#pragma once

#include <atomic>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "group_ring.hpp"

namespace novikov {

struct NovikovOptions {
  bool memoize = true;
  std::size_t support_cap = 5'000'000;
};

/// Group, character and evaluation options shared by a family of expressions.
struct NovikovContext {
  GroupPtr group;
  Character chi;
  NovikovOptions options;
};

using ContextPtr = std::shared_ptr<const NovikovContext>;

ContextPtr make_context(GroupPtr group, Character chi,
                        NovikovOptions options = {});

/// Lazily evaluated element of the Novikov ring, given as an expression DAG
/// over group-ring leaves. Only truncations are ever materialized.
class NovikovExpr {
public:
  enum class Kind { Embed, Sum, Product, Negate, GeomInv, Series };
  using Oracle = std::function<GroupRingElement(std::int64_t r)>;
  static constexpr std::int64_t kInfinity = INT64_MAX;

  NovikovExpr() = default;

  static NovikovExpr embed(ContextPtr ctx, GroupRingElement x);
  static NovikovExpr zero(ContextPtr ctx);
  static NovikovExpr one(ContextPtr ctx);
  /// (1 - u)^{-1}; requires u to be certified strictly phi-positive.
  static NovikovExpr geom_inv(const NovikovExpr &u);
  /// Opaque Novikov element known only through its truncations. `bound` must
  /// be a lower bound for phi over its support. Not part of the division
  /// closure.
  static NovikovExpr series(ContextPtr ctx, Oracle oracle, std::int64_t bound,
                            std::string label);

  friend NovikovExpr operator+(const NovikovExpr &a, const NovikovExpr &b);
  friend NovikovExpr operator-(const NovikovExpr &a, const NovikovExpr &b);
  friend NovikovExpr operator*(const NovikovExpr &a, const NovikovExpr &b);
  NovikovExpr operator-() const;

  /// Sum of terms with phi(g) <= r.
  GroupRingElement truncate(std::int64_t r) const;
  /// Structural lower bound for phi over the support, kInfinity for zero.
  std::int64_t min_degree_bound() const;
  /// True if the support is certified to satisfy phi >= 1, either
  /// structurally or by an exact truncation probe at radius 0.
  bool certify_positive() const;

  Kind kind() const;
  bool is_literal_zero() const;
  /// Literal value of an Embed node.
  const GroupRingElement *literal() const;
  /// No Series nodes below this one.
  bool in_division_closure() const;
  /// All leaves are Embed nodes (group-ring elements).
  bool leaves_in_group_ring() const { return in_division_closure(); }
  /// Largest phi over all Embed leaves (0 if there are none).
  std::int64_t max_leaf_degree() const;
  std::size_t node_count() const;
  const ContextPtr &context() const;

  json to_json() const;
  static NovikovExpr from_json(ContextPtr ctx, const json &j);

  struct Node;

private:
  explicit NovikovExpr(std::shared_ptr<Node> n) : node_(std::move(n)) {}
  std::shared_ptr<Node> node_;
  friend struct ExprAccess;
};

struct NovikovExpr::Node {
  Kind kind = Kind::Embed;
  ContextPtr ctx;
  GroupRingElement literal;
  NovikovExpr a, b;
  Oracle oracle;
  std::string label;
  std::atomic<std::int64_t> bound{0};
  std::int64_t geom_step = 1; // certified positivity of the GeomInv argument
  bool closed = true;         // no Series below

  mutable std::mutex mutex;
  mutable std::map<std::int64_t, GroupRingElement> memo;
};

/// Dense matrix of Novikov expressions sharing one context.
class NovikovMatrix {
public:
  NovikovMatrix() = default;
  NovikovMatrix(ContextPtr ctx, int rows, int cols);
  static NovikovMatrix identity(ContextPtr ctx, int n);
  static NovikovMatrix from_group_ring(ContextPtr ctx, const GRMatrix &m);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  const ContextPtr &context() const { return ctx_; }
  NovikovExpr &at(int i, int j) {
    return entries_[static_cast<std::size_t>(i * cols_ + j)];
  }
  const NovikovExpr &at(int i, int j) const {
    return entries_[static_cast<std::size_t>(i * cols_ + j)];
  }

  friend NovikovMatrix operator*(const NovikovMatrix &a, const NovikovMatrix &b);
  friend NovikovMatrix operator+(const NovikovMatrix &a, const NovikovMatrix &b);
  friend NovikovMatrix operator-(const NovikovMatrix &a, const NovikovMatrix &b);

  GRMatrix truncate(std::int64_t r) const;
  bool in_division_closure() const;
  std::int64_t max_leaf_degree() const;
  json to_json() const;

private:
  ContextPtr ctx_;
  int rows_ = 0;
  int cols_ = 0;
  std::vector<NovikovExpr> entries_;
};

/// (I - P)^{-1} over the division closure, by diagonal elimination with
/// geometric inverses. Every nonzero entry of P must be certified positive.
/// The result is checked on both sides at `verify_radius` (default
/// 2 * max leaf degree + 4).
NovikovMatrix invert_I_minus_P(const NovikovMatrix &P,
                               std::optional<std::int64_t> verify_radius = {});

struct InverseResult {
  NovikovMatrix inverse;
  std::int64_t radius = 0;
  std::int64_t verify_radius = 0;
};

/// Two-sided inverse of A over the division closure, given a Novikov right
/// inverse B. Truncates B at r, doubling r until I - A*trunc(B) is
/// positive, at most `max_doublings` times.
InverseResult invert_over_division_closure(const NovikovMatrix &A,
                                           const NovikovMatrix &B,
                                           std::optional<std::int64_t> r = {},
                                           int max_doublings = 10);

} // namespace novikov
