#include "novikov.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "error.hpp"

namespace novikov {

using Kind = NovikovExpr::Kind;
using Node = NovikovExpr::Node;

struct ExprAccess {
  static NovikovExpr wrap(std::shared_ptr<Node> n) { return NovikovExpr(std::move(n)); }
  static const std::shared_ptr<Node> &node(const NovikovExpr &x) { return x.node_; }
};

namespace {

constexpr std::int64_t kInf = NovikovExpr::kInfinity;

std::int64_t add_bounds(std::int64_t a, std::int64_t b) {
  if (a == kInf || b == kInf)
    return kInf;
  return a + b;
}

std::shared_ptr<Node> new_node(Kind kind, ContextPtr ctx) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->ctx = std::move(ctx);
  return n;
}

const ContextPtr &same_context(const NovikovExpr &a, const NovikovExpr &b) {
  const auto &ca = a.context();
  const auto &cb = b.context();
  if (ca != cb && !(ca->chi == cb->chi && ca->group->spec() == cb->group->spec()))
    throw Error(ErrorKind::SpecMismatch,
                "Novikov expressions with different characters");
  return ca;
}

void check_cap(const NovikovContext &ctx, const GroupRingElement &x) {
  if (x.size() > ctx.options.support_cap)
    throw Error(ErrorKind::BudgetExceeded,
                "truncation support exceeded cap of " +
                    std::to_string(ctx.options.support_cap));
}

GroupRingElement evaluate(const Node &n, std::int64_t r);

GroupRingElement truncate_node(const Node &n, std::int64_t r) {
  if (n.kind == Kind::Embed)
    return n.literal.truncated(n.ctx->chi, r);
  if (n.bound.load() > r)
    return GroupRingElement(n.ctx->group);
  if (!n.ctx->options.memoize)
    return evaluate(n, r);
  {
    std::lock_guard<std::mutex> lock(n.mutex);
    auto it = n.memo.lower_bound(r);
    if (it != n.memo.end()) {
      if (it->first == r)
        return it->second;
      return it->second.truncated(n.ctx->chi, r);
    }
  }
  GroupRingElement value = evaluate(n, r);
  std::lock_guard<std::mutex> lock(n.mutex);
  n.memo.emplace(r, value);
  return value;
}

GroupRingElement evaluate(const Node &n, std::int64_t r) {
  const NovikovContext &ctx = *n.ctx;
  GroupRingElement out(ctx.group);
  switch (n.kind) {
  case Kind::Embed:
    out = n.literal.truncated(ctx.chi, r);
    break;
  case Kind::Sum:
    out = n.a.truncate(r) + n.b.truncate(r);
    break;
  case Kind::Negate:
    out = -n.a.truncate(r);
    break;
  case Kind::Product: {
    const std::int64_t ba = n.a.min_degree_bound();
    const std::int64_t bb = n.b.min_degree_bound();
    if (ba == kInf || bb == kInf)
      break;
    GroupRingElement x = n.a.truncate(r - bb);
    if (x.is_zero())
      break;
    GroupRingElement y = n.b.truncate(r - ba);
    out = multiply_truncated(x, y, ctx.chi, r);
    break;
  }
  case Kind::GeomInv: {
    if (r < 0)
      break;
    const std::int64_t m = n.geom_step;
    const std::int64_t terms = (r + m - 1) / m + 1;
    GroupRingElement u = n.a.truncate(r);
    GroupRingElement one = GroupRingElement::scalar(ctx.group, 1);
    out = one;
    for (std::int64_t k = 0; k < terms; ++k) {
      GroupRingElement next = one + multiply_truncated(u, out, ctx.chi, r);
      check_cap(ctx, next);
      if (next == out)
        break;
      out = std::move(next);
    }
    break;
  }
  case Kind::Series:
    out = n.oracle(r).truncated(ctx.chi, r);
    break;
  }
  check_cap(ctx, out);
  return out;
}

} // namespace

ContextPtr make_context(GroupPtr group, Character chi, NovikovOptions options) {
  return std::make_shared<const NovikovContext>(
      NovikovContext{std::move(group), std::move(chi), options});
}

NovikovExpr NovikovExpr::embed(ContextPtr ctx, GroupRingElement x) {
  auto n = new_node(Kind::Embed, std::move(ctx));
  if (x.group())
    common_group(n->ctx->group, x.group());
  n->literal = GroupRingElement::from_sorted(n->ctx->group, x.terms());
  auto m = n->literal.min_degree(n->ctx->chi);
  n->bound = m ? *m : kInf;
  return NovikovExpr(n);
}

NovikovExpr NovikovExpr::zero(ContextPtr ctx) {
  return embed(ctx, GroupRingElement(ctx->group));
}

NovikovExpr NovikovExpr::one(ContextPtr ctx) {
  auto g = ctx->group;
  return embed(std::move(ctx), GroupRingElement::scalar(g, 1));
}

NovikovExpr NovikovExpr::geom_inv(const NovikovExpr &u) {
  if (u.is_literal_zero())
    return one(u.context());
  if (!u.certify_positive())
    throw Error(ErrorKind::Positivity,
                "geometric inverse of an element not certified positive");
  auto n = new_node(Kind::GeomInv, u.context());
  n->a = u;
  n->geom_step = std::max<std::int64_t>(1, u.min_degree_bound());
  n->bound = 0;
  n->closed = u.node_->closed;
  return NovikovExpr(n);
}

NovikovExpr NovikovExpr::series(ContextPtr ctx, Oracle oracle,
                                std::int64_t bound, std::string label) {
  auto n = new_node(Kind::Series, std::move(ctx));
  n->oracle = std::move(oracle);
  n->bound = bound;
  n->label = std::move(label);
  n->closed = false;
  return NovikovExpr(n);
}

NovikovExpr operator+(const NovikovExpr &a, const NovikovExpr &b) {
  const ContextPtr &ctx = same_context(a, b);
  if (a.is_literal_zero())
    return b;
  if (b.is_literal_zero())
    return a;
  if (a.literal() && b.literal())
    return NovikovExpr::embed(ctx, *a.literal() + *b.literal());
  auto n = new_node(Kind::Sum, ctx);
  n->a = a;
  n->b = b;
  n->bound = std::min(a.min_degree_bound(), b.min_degree_bound());
  n->closed = a.in_division_closure() && b.in_division_closure();
  return ExprAccess::wrap(n);
}

NovikovExpr NovikovExpr::operator-() const {
  if (literal())
    return embed(context(), -*literal());
  if (node_->kind == Kind::Negate)
    return node_->a;
  auto n = new_node(Kind::Negate, context());
  n->a = *this;
  n->bound = min_degree_bound();
  n->closed = node_->closed;
  return NovikovExpr(n);
}

NovikovExpr operator-(const NovikovExpr &a, const NovikovExpr &b) {
  return a + (-b);
}

NovikovExpr operator*(const NovikovExpr &a, const NovikovExpr &b) {
  const ContextPtr &ctx = same_context(a, b);
  if (a.is_literal_zero() || b.is_literal_zero())
    return NovikovExpr::zero(ctx);
  const GroupRingElement *la = a.literal();
  const GroupRingElement *lb = b.literal();
  auto is_one = [&](const GroupRingElement *x) {
    return x && x->size() == 1 && x->terms()[0].second.is_one() &&
           ctx->group->is_identity(x->terms()[0].first);
  };
  if (is_one(la))
    return b;
  if (is_one(lb))
    return a;
  if (la && lb)
    return NovikovExpr::embed(ctx, *la * *lb);
  auto n = new_node(Kind::Product, ctx);
  n->a = a;
  n->b = b;
  n->bound = add_bounds(a.min_degree_bound(), b.min_degree_bound());
  n->closed = a.in_division_closure() && b.in_division_closure();
  return ExprAccess::wrap(n);
}

GroupRingElement NovikovExpr::truncate(std::int64_t r) const {
  return truncate_node(*node_, r);
}

std::int64_t NovikovExpr::min_degree_bound() const { return node_->bound.load(); }

bool NovikovExpr::certify_positive() const {
  std::int64_t b = node_->bound.load();
  if (b >= 1)
    return true;
  if (!truncate(0).is_zero())
    return false;
  // Exact probe: nothing at phi <= 0, so phi >= 1 on the support.
  std::int64_t expected = b;
  while (expected < 1 &&
         !node_->bound.compare_exchange_weak(expected, 1)) {
  }
  return true;
}

Kind NovikovExpr::kind() const { return node_->kind; }

bool NovikovExpr::is_literal_zero() const {
  return node_->kind == Kind::Embed && node_->literal.is_zero();
}

const GroupRingElement *NovikovExpr::literal() const {
  return node_->kind == Kind::Embed ? &node_->literal : nullptr;
}

bool NovikovExpr::in_division_closure() const { return node_->closed; }

const ContextPtr &NovikovExpr::context() const { return node_->ctx; }

namespace {

template <class F> void visit_dag(const NovikovExpr &root, F &&f) {
  std::unordered_set<const Node *> seen;
  std::vector<const NovikovExpr *> stack{&root};
  while (!stack.empty()) {
    const NovikovExpr *x = stack.back();
    stack.pop_back();
    const Node *n = ExprAccess::node(*x).get();
    if (!seen.insert(n).second)
      continue;
    f(*n);
    if (n->kind == Kind::Sum || n->kind == Kind::Product) {
      stack.push_back(&n->a);
      stack.push_back(&n->b);
    } else if (n->kind == Kind::Negate || n->kind == Kind::GeomInv) {
      stack.push_back(&n->a);
    }
  }
}

const char *kind_tag(Kind k) {
  switch (k) {
  case Kind::Embed:
    return "embed";
  case Kind::Sum:
    return "sum";
  case Kind::Product:
    return "product";
  case Kind::Negate:
    return "negate";
  case Kind::GeomInv:
    return "geominv";
  case Kind::Series:
    return "series";
  }
  return "?";
}

} // namespace

std::int64_t NovikovExpr::max_leaf_degree() const {
  std::int64_t m = 0;
  visit_dag(*this, [&](const Node &n) {
    if (n.kind == Kind::Embed) {
      auto d = n.literal.max_degree(n.ctx->chi);
      if (d)
        m = std::max(m, *d);
    }
  });
  return m;
}

std::size_t NovikovExpr::node_count() const {
  std::size_t c = 0;
  visit_dag(*this, [&](const Node &) { ++c; });
  return c;
}

json NovikovExpr::to_json() const {
  // Post-order numbering so children always precede parents.
  std::unordered_map<const Node *, int> ids;
  json nodes = json::array();
  std::function<int(const NovikovExpr &)> emit = [&](const NovikovExpr &x) -> int {
    const Node *n = ExprAccess::node(x).get();
    if (auto it = ids.find(n); it != ids.end())
      return it->second;
    json j;
    j["op"] = kind_tag(n->kind);
    switch (n->kind) {
    case Kind::Embed:
      j["value"] = n->literal.to_json();
      break;
    case Kind::Sum:
    case Kind::Product:
      j["args"] = {emit(n->a), emit(n->b)};
      break;
    case Kind::Negate:
    case Kind::GeomInv:
      j["args"] = {emit(n->a)};
      break;
    case Kind::Series:
      j["label"] = n->label;
      j["bound"] = n->bound.load();
      break;
    }
    int id = static_cast<int>(nodes.size());
    j["id"] = id;
    nodes.push_back(std::move(j));
    ids.emplace(n, id);
    return id;
  };
  int root = emit(*this);
  return json{{"nodes", nodes}, {"root", root}};
}

NovikovExpr NovikovExpr::from_json(ContextPtr ctx, const json &j) {
  std::vector<NovikovExpr> built;
  for (const auto &n : j.at("nodes")) {
    const std::string op = n.at("op").get<std::string>();
    auto arg = [&](std::size_t i) -> const NovikovExpr & {
      int id = n.at("args").at(i).get<int>();
      if (id < 0 || static_cast<std::size_t>(id) >= built.size())
        throw Error(ErrorKind::InvalidInput, "expression node refers forward");
      return built[static_cast<std::size_t>(id)];
    };
    if (op == "embed")
      built.push_back(embed(ctx, GroupRingElement::from_json(ctx->group, n.at("value"))));
    else if (op == "sum")
      built.push_back(arg(0) + arg(1));
    else if (op == "product")
      built.push_back(arg(0) * arg(1));
    else if (op == "negate")
      built.push_back(-arg(0));
    else if (op == "geominv")
      built.push_back(geom_inv(arg(0)));
    else
      throw Error(ErrorKind::InvalidInput,
                  "expression node '" + op + "' cannot be deserialized");
  }
  int root = j.at("root").get<int>();
  if (root < 0 || static_cast<std::size_t>(root) >= built.size())
    throw Error(ErrorKind::InvalidInput, "bad expression root");
  return built[static_cast<std::size_t>(root)];
}

// ---------------------------------------------------------------- matrices

NovikovMatrix::NovikovMatrix(ContextPtr ctx, int rows, int cols)
    : ctx_(std::move(ctx)), rows_(rows), cols_(cols) {
  if (rows * cols > 0)
    entries_.assign(static_cast<std::size_t>(rows * cols), NovikovExpr::zero(ctx_));
}

NovikovMatrix NovikovMatrix::identity(ContextPtr ctx, int n) {
  NovikovMatrix m(ctx, n, n);
  for (int i = 0; i < n; ++i)
    m.at(i, i) = NovikovExpr::one(ctx);
  return m;
}

NovikovMatrix NovikovMatrix::from_group_ring(ContextPtr ctx, const GRMatrix &g) {
  NovikovMatrix m(ctx, g.rows(), g.cols());
  for (int i = 0; i < g.rows(); ++i)
    for (int j = 0; j < g.cols(); ++j)
      m.at(i, j) = NovikovExpr::embed(ctx, g.at(i, j));
  return m;
}

NovikovMatrix operator*(const NovikovMatrix &a, const NovikovMatrix &b) {
  if (a.cols_ != b.rows_)
    throw Error(ErrorKind::Internal, "Novikov matrix shape mismatch");
  NovikovMatrix m(a.ctx_ ? a.ctx_ : b.ctx_, a.rows_, b.cols_);
  for (int i = 0; i < a.rows_; ++i)
    for (int j = 0; j < b.cols_; ++j) {
      NovikovExpr s = NovikovExpr::zero(m.ctx_);
      for (int k = 0; k < a.cols_; ++k)
        s = s + a.at(i, k) * b.at(k, j);
      m.at(i, j) = s;
    }
  return m;
}

NovikovMatrix operator+(const NovikovMatrix &a, const NovikovMatrix &b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_)
    throw Error(ErrorKind::Internal, "Novikov matrix shape mismatch");
  NovikovMatrix m(a.ctx_, a.rows_, a.cols_);
  for (std::size_t i = 0; i < m.entries_.size(); ++i)
    m.entries_[i] = a.entries_[i] + b.entries_[i];
  return m;
}

NovikovMatrix operator-(const NovikovMatrix &a, const NovikovMatrix &b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_)
    throw Error(ErrorKind::Internal, "Novikov matrix shape mismatch");
  NovikovMatrix m(a.ctx_, a.rows_, a.cols_);
  for (std::size_t i = 0; i < m.entries_.size(); ++i)
    m.entries_[i] = a.entries_[i] - b.entries_[i];
  return m;
}

GRMatrix NovikovMatrix::truncate(std::int64_t r) const {
  GRMatrix m(ctx_ ? ctx_->group : nullptr, rows_, cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j)
      m.at(i, j) = at(i, j).truncate(r);
  return m;
}

bool NovikovMatrix::in_division_closure() const {
  return std::all_of(entries_.begin(), entries_.end(),
                     [](const NovikovExpr &x) { return x.in_division_closure(); });
}

std::int64_t NovikovMatrix::max_leaf_degree() const {
  std::int64_t m = 0;
  for (const auto &e : entries_)
    m = std::max(m, e.max_leaf_degree());
  return m;
}

json NovikovMatrix::to_json() const {
  json rows = json::array();
  for (int i = 0; i < rows_; ++i) {
    json row = json::array();
    for (int j = 0; j < cols_; ++j)
      row.push_back(at(i, j).to_json());
    rows.push_back(row);
  }
  return rows;
}

// ---------------------------------------------------------------- inversion

namespace {

bool is_identity_at(const NovikovMatrix &m, std::int64_t r) {
  GRMatrix t = m.truncate(r);
  return t == GRMatrix::identity(m.context()->group, m.rows());
}

} // namespace

NovikovMatrix invert_I_minus_P(const NovikovMatrix &P,
                               std::optional<std::int64_t> verify_radius) {
  if (P.rows() != P.cols())
    throw Error(ErrorKind::InvalidInput, "I - P needs a square matrix");
  const ContextPtr &ctx = P.context();
  const int n = P.rows();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const NovikovExpr &e = P.at(i, j);
      if (!e.is_literal_zero() && !e.certify_positive())
        throw Error(ErrorKind::Positivity,
                    "entry (" + std::to_string(i) + "," + std::to_string(j) +
                        ") of P is not certified positive");
    }

  // Q holds I - M for the partially reduced M; L and R accumulate the row
  // and column operations so that L (I - P) R = I.
  NovikovMatrix Q = P;
  NovikovMatrix L = NovikovMatrix::identity(ctx, n);
  NovikovMatrix R = NovikovMatrix::identity(ctx, n);
  for (int i = 0; i < n; ++i) {
    NovikovExpr g = NovikovExpr::geom_inv(Q.at(i, i));
    Q.at(i, i) = NovikovExpr::zero(ctx);
    for (int j = i + 1; j < n; ++j)
      Q.at(i, j) = g * Q.at(i, j);
    for (int c = 0; c < n; ++c)
      L.at(i, c) = g * L.at(i, c);
    for (int j = i + 1; j < n; ++j) {
      const NovikovExpr qij = Q.at(i, j);
      if (qij.is_literal_zero())
        continue;
      for (int k = i + 1; k < n; ++k)
        if (!Q.at(k, i).is_literal_zero())
          Q.at(k, j) = Q.at(k, j) + Q.at(k, i) * qij;
      for (int k = 0; k < n; ++k)
        if (!R.at(k, i).is_literal_zero())
          R.at(k, j) = R.at(k, j) + R.at(k, i) * qij;
      Q.at(i, j) = NovikovExpr::zero(ctx);
    }
    for (int k = i + 1; k < n; ++k) {
      const NovikovExpr qki = Q.at(k, i);
      if (qki.is_literal_zero())
        continue;
      for (int c = 0; c < n; ++c)
        if (!L.at(i, c).is_literal_zero())
          L.at(k, c) = L.at(k, c) + qki * L.at(i, c);
      Q.at(k, i) = NovikovExpr::zero(ctx);
    }
  }
  NovikovMatrix result = R * L;

  const std::int64_t rv = verify_radius ? *verify_radius : 2 * P.max_leaf_degree() + 4;
  NovikovMatrix IminusP = NovikovMatrix::identity(ctx, n) - P;
  if (!is_identity_at(IminusP * result, rv) || !is_identity_at(result * IminusP, rv))
    throw Error(ErrorKind::Internal,
                "(I - P)^{-1} failed verification at radius " + std::to_string(rv));
  return result;
}

InverseResult invert_over_division_closure(const NovikovMatrix &A,
                                           const NovikovMatrix &B,
                                           std::optional<std::int64_t> r,
                                           int max_doublings) {
  if (A.rows() != A.cols() || B.rows() != A.cols() || B.cols() != A.rows())
    throw Error(ErrorKind::InvalidInput, "A must be square and B its inverse shape");
  const ContextPtr &ctx = A.context();
  const int n = A.rows();
  std::int64_t radius = r ? *r : A.max_leaf_degree() + 1;
  const std::int64_t start = radius;
  const std::int64_t check_radius = std::max<std::int64_t>(2 * std::max<std::int64_t>(radius, 1), 4);
  if (!is_identity_at(A * B, check_radius))
    throw Error(ErrorKind::InvalidInverse,
                "A * B is not the identity at radius " + std::to_string(check_radius));

  NovikovMatrix I = NovikovMatrix::identity(ctx, n);
  for (int attempt = 0; attempt <= max_doublings; ++attempt) {
    {
      NovikovMatrix Bbar = NovikovMatrix::from_group_ring(ctx, B.truncate(radius));
      NovikovMatrix P = I - A * Bbar;
      bool positive = true;
      for (int i = 0; i < n && positive; ++i)
        for (int j = 0; j < n && positive; ++j)
          if (!P.at(i, j).is_literal_zero() && !P.at(i, j).certify_positive())
            positive = false;
      if (positive) {
        const std::int64_t rv = std::max<std::int64_t>(2 * radius, 4);
        NovikovMatrix inv = Bbar * invert_I_minus_P(P, rv);
        if (!is_identity_at(A * inv, rv) || !is_identity_at(inv * A, rv))
          throw Error(ErrorKind::Internal,
                      "inverse over the division closure failed verification");
        return {inv, radius, rv};
      }
    }
    if (attempt == max_doublings)
      break;
    radius = radius <= 0 ? 1 : 2 * radius;
  }
  throw Error(ErrorKind::Inconclusive,
              "no positive truncation found; started at r = " + std::to_string(start) +
                  ", last r = " + std::to_string(radius));
}

} // namespace novikov
