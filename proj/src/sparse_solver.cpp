#include "sparse_solver.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>

#include "error.hpp"

namespace novikov {

namespace {

void canonicalize(SparseVec &v) {
  std::sort(v.begin(), v.end(),
            [](const auto &a, const auto &b) { return a.first < b.first; });
  std::size_t out = 0;
  for (std::size_t i = 0; i < v.size();) {
    int c = v[i].first;
    Rational s = std::move(v[i].second);
    std::size_t j = i + 1;
    for (; j < v.size() && v[j].first == c; ++j)
      s += v[j].second;
    if (!s.is_zero())
      v[out++] = {c, std::move(s)};
    i = j;
  }
  v.resize(out);
}

const Rational *find(const SparseVec &v, int c) {
  auto it = std::lower_bound(v.begin(), v.end(), c,
                             [](const auto &e, int col) { return e.first < col; });
  if (it != v.end() && it->first == c)
    return &it->second;
  return nullptr;
}

// r -= f * p
SparseVec axpy(const SparseVec &r, const Rational &f, const SparseVec &p) {
  SparseVec out;
  out.reserve(r.size() + p.size());
  std::size_t i = 0, j = 0;
  while (i < r.size() || j < p.size()) {
    if (j == p.size() || (i < r.size() && r[i].first < p[j].first)) {
      out.push_back(r[i++]);
    } else if (i == r.size() || p[j].first < r[i].first) {
      out.emplace_back(p[j].first, -(f * p[j].second));
      ++j;
    } else {
      Rational v = r[i].second;
      v.sub_mul(f, p[j].second);
      if (!v.is_zero())
        out.emplace_back(r[i].first, std::move(v));
      ++i;
      ++j;
    }
  }
  return out;
}

} // namespace

SparseEliminator::SparseEliminator(int cols) : cols_(cols) {
  if (cols < 0)
    throw Error(ErrorKind::Internal, "negative column count");
}

void SparseEliminator::add_row(SparseVec row, Rational rhs) {
  if (done_)
    throw Error(ErrorKind::Internal, "row added after elimination");
  canonicalize(row);
  for (const auto &e : row)
    if (e.first < 0 || e.first >= cols_)
      throw Error(ErrorKind::Internal, "column index out of range");
  rows_.push_back({std::move(row), std::move(rhs), true, -1});
}

void SparseEliminator::eliminate() {
  if (done_)
    return;
  done_ = true;
  col_pivot_.assign(static_cast<std::size_t>(cols_), -1);
  std::vector<int> count(static_cast<std::size_t>(cols_), 0);
  std::vector<std::vector<int>> col_rows(static_cast<std::size_t>(cols_));
  for (std::size_t r = 0; r < rows_.size(); ++r)
    for (const auto &e : rows_[r].v) {
      ++count[static_cast<std::size_t>(e.first)];
      col_rows[static_cast<std::size_t>(e.first)].push_back(static_cast<int>(r));
    }
  // Columns bucketed by active count; each bucket is a min-heap on the column
  // index. Stale entries are skipped when popped.
  std::vector<std::vector<int>> buckets(1);
  std::size_t lowest = SIZE_MAX;
  auto push = [&](int c) {
    const auto k = static_cast<std::size_t>(count[static_cast<std::size_t>(c)]);
    if (k >= buckets.size())
      buckets.resize(k + 1);
    auto &b = buckets[k];
    b.push_back(c);
    std::push_heap(b.begin(), b.end(), std::greater<>());
    lowest = std::min(lowest, k);
  };
  for (int c = 0; c < cols_; ++c)
    if (count[static_cast<std::size_t>(c)] > 0)
      push(c);

  auto adjust = [&](int c, int delta) {
    auto &k = count[static_cast<std::size_t>(c)];
    k += delta;
    if (col_pivot_[static_cast<std::size_t>(c)] < 0 && k > 0)
      push(c);
  };
  auto next_column = [&]() -> int {
    for (; lowest < buckets.size(); ++lowest) {
      auto &b = buckets[lowest];
      while (!b.empty()) {
        std::pop_heap(b.begin(), b.end(), std::greater<>());
        const int c = b.back();
        b.pop_back();
        if (col_pivot_[static_cast<std::size_t>(c)] < 0 &&
            static_cast<std::size_t>(count[static_cast<std::size_t>(c)]) == lowest)
          return c;
      }
    }
    return -1;
  };

  for (int c; (c = next_column()) >= 0;) {
    auto &candidates = col_rows[static_cast<std::size_t>(c)];
    int best = -1;
    std::vector<int> holders;
    for (int r : candidates) {
      const Row &row = rows_[static_cast<std::size_t>(r)];
      if (!row.active || !find(row.v, c))
        continue;
      if (!holders.empty() && holders.back() == r)
        continue;
      holders.push_back(r);
      if (best < 0 || row.v.size() < rows_[static_cast<std::size_t>(best)].v.size() ||
          (row.v.size() == rows_[static_cast<std::size_t>(best)].v.size() && r < best))
        best = r;
    }
    std::sort(holders.begin(), holders.end());
    holders.erase(std::unique(holders.begin(), holders.end()), holders.end());
    candidates.clear();
    if (best < 0)
      continue;

    Row &p = rows_[static_cast<std::size_t>(best)];
    p.active = false;
    p.pivot = c;
    col_pivot_[static_cast<std::size_t>(c)] = best;
    pivot_rows_.push_back(best);
    count[static_cast<std::size_t>(c)] = 0;
    for (const auto &e : p.v)
      if (e.first != c)
        adjust(e.first, -1);
    Rational inv = Rational(1) / *find(p.v, c);
    if (!inv.is_one()) {
      for (auto &e : p.v)
        e.second *= inv;
      p.rhs *= inv;
    }

    for (int r : holders) {
      if (r == best)
        continue;
      Row &row = rows_[static_cast<std::size_t>(r)];
      Rational f = *find(row.v, c);
      for (const auto &e : row.v)
        if (e.first != c)
          adjust(e.first, -1);
      row.v = axpy(row.v, f, p.v);
      row.rhs.sub_mul(f, p.rhs);
      for (const auto &e : row.v) {
        adjust(e.first, +1);
        auto &lst = col_rows[static_cast<std::size_t>(e.first)];
        if (lst.empty() || lst.back() != r)
          lst.push_back(r);
      }
      if (row.v.empty()) {
        row.active = false;
        if (!row.rhs.is_zero() && !bad_row_)
          bad_row_ = static_cast<std::size_t>(r);
      }
    }
  }
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    Row &row = rows_[r];
    if (row.pivot < 0 && row.v.empty() && !row.rhs.is_zero() &&
        (!bad_row_ || r < *bad_row_))
      bad_row_ = r;
  }
}

int SparseEliminator::rank() {
  eliminate();
  return static_cast<int>(pivot_rows_.size());
}

bool SparseEliminator::consistent() {
  eliminate();
  return !bad_row_;
}

std::optional<std::size_t> SparseEliminator::inconsistent_row() {
  eliminate();
  return bad_row_;
}

std::vector<Rational> SparseEliminator::back_substitute(std::vector<Rational> x,
                                                        bool homogeneous) const {
  for (auto it = pivot_rows_.rbegin(); it != pivot_rows_.rend(); ++it) {
    const Row &p = rows_[static_cast<std::size_t>(*it)];
    Rational v = homogeneous ? Rational(0) : p.rhs;
    for (const auto &e : p.v)
      if (e.first != p.pivot && !x[static_cast<std::size_t>(e.first)].is_zero())
        v.sub_mul(e.second, x[static_cast<std::size_t>(e.first)]);
    x[static_cast<std::size_t>(p.pivot)] = std::move(v);
  }
  return x;
}

std::vector<Rational> SparseEliminator::solve() {
  eliminate();
  if (bad_row_)
    throw Error(ErrorKind::Internal, "solve() on an inconsistent system");
  return back_substitute(std::vector<Rational>(static_cast<std::size_t>(cols_)), false);
}

std::vector<int> SparseEliminator::free_columns() {
  eliminate();
  std::vector<int> f;
  for (int c = 0; c < cols_; ++c)
    if (col_pivot_[static_cast<std::size_t>(c)] < 0)
      f.push_back(c);
  return f;
}

std::vector<std::vector<Rational>> SparseEliminator::nullspace() {
  std::vector<std::vector<Rational>> basis;
  for (int f : free_columns()) {
    std::vector<Rational> x(static_cast<std::size_t>(cols_));
    x[static_cast<std::size_t>(f)] = 1;
    basis.push_back(back_substitute(std::move(x), true));
  }
  return basis;
}

int sparse_rank(const std::vector<SparseVec> &rows, int cols) {
  SparseEliminator e(cols);
  for (const auto &r : rows)
    e.add_row(r);
  return e.rank();
}

int dense_rank(const DenseMatrix &m) {
  if (m.empty())
    return 0;
  const int cols = static_cast<int>(m[0].size());
  SparseEliminator e(cols);
  for (const auto &row : m) {
    SparseVec v;
    for (int j = 0; j < cols; ++j)
      if (!row[static_cast<std::size_t>(j)].is_zero())
        v.emplace_back(j, row[static_cast<std::size_t>(j)]);
    e.add_row(std::move(v));
  }
  return e.rank();
}

std::vector<std::vector<Rational>> dense_nullspace(const DenseMatrix &m, int cols) {
  SparseEliminator e(cols);
  for (const auto &row : m) {
    SparseVec v;
    for (int j = 0; j < cols; ++j)
      if (!row[static_cast<std::size_t>(j)].is_zero())
        v.emplace_back(j, row[static_cast<std::size_t>(j)]);
    e.add_row(std::move(v));
  }
  return e.nullspace();
}

} // namespace novikov
