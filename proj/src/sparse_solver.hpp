#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "rational.hpp"

namespace novikov {

using SparseVec = std::vector<std::pair<int, Rational>>; // sorted by column

/// Exact Gaussian elimination over Q on sparse rows with Markowitz-style
/// pivoting: the column with fewest nonzeros first, then the shortest row,
/// ties broken by smallest index. Pivot rows are normalized to a unit pivot.
class SparseEliminator {
public:
  explicit SparseEliminator(int cols);

  int cols() const { return cols_; }
  std::size_t row_count() const { return rows_.size(); }
  /// Adds the equation row . x = rhs. Entries may be unsorted or repeated.
  void add_row(SparseVec row, Rational rhs = 0);

  void eliminate();
  int rank();
  /// False if some equation reduced to 0 = nonzero.
  bool consistent();
  /// Index (in insertion order) of a row that reduced to 0 = nonzero.
  std::optional<std::size_t> inconsistent_row();
  /// Particular solution with free variables set to zero.
  std::vector<Rational> solve();
  /// Basis of the solution space of the homogeneous system, one dense
  /// vector per free column in increasing order.
  std::vector<std::vector<Rational>> nullspace();
  /// Columns without a pivot.
  std::vector<int> free_columns();

private:
  struct Row {
    SparseVec v;
    Rational rhs;
    bool active = true;
    int pivot = -1;
  };

  int cols_;
  std::vector<Row> rows_;
  std::vector<int> pivot_rows_; // in pivot order
  std::vector<int> col_pivot_;  // pivot row per column or -1
  bool done_ = false;
  std::optional<std::size_t> bad_row_;

  std::vector<Rational> back_substitute(std::vector<Rational> x, bool homogeneous) const;
};

/// Rank of a list of sparse rows.
int sparse_rank(const std::vector<SparseVec> &rows, int cols);

/// Dense helpers for small exact matrices.
using DenseMatrix = std::vector<std::vector<Rational>>;
int dense_rank(const DenseMatrix &m);
std::vector<std::vector<Rational>> dense_nullspace(const DenseMatrix &m, int cols);

} // namespace novikov
