#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace thbq {

using DenseMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Solves a x = b for symmetric positive definite a. Throws NumericalFault
/// when a pivot drops below pivot_tol * trace(a).
Vector cholesky_solve(const DenseMatrix& a, const Vector& b, double pivot_tol = 1e-14);
DenseMatrix cholesky_solve(const DenseMatrix& a, const DenseMatrix& b, double pivot_tol = 1e-14);

struct RankInfo {
  int rank = 0;
  int nullity = 0;                 // columns minus rank
  double sigma_max = 0.0;
  double smallest_kept = 0.0;      // 0 when rank == 0
  double largest_dropped = 0.0;    // 0 when nothing was dropped
  std::vector<double> singular_values;  // descending

  /// Number of singular values with lo < sigma/sigma_max <= hi.
  int count_in_band(double lo, double hi) const;
};

/// Numerical rank with a threshold relative to the largest singular value.
RankInfo svd_rank(const DenseMatrix& a, double rel_tol);
/// Same for a sparse matrix (densified).
RankInfo svd_rank(const Eigen::SparseMatrix<double>& a, double rel_tol);

struct Triplet {
  std::int64_t row;
  std::int64_t col;
  double value;
};

/// Compressed sparse row matrix. Duplicate triplets are summed after sorting
/// by (row, col, value), so assembly order never changes the result.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  static SparseMatrix from_triplets(std::int64_t rows, std::int64_t cols,
                                    std::vector<Triplet> triplets);

  std::int64_t rows() const { return rows_; }
  std::int64_t cols() const { return cols_; }
  std::int64_t nnz() const { return std::int64_t(values_.size()); }
  const std::vector<std::int64_t>& row_ptr() const { return row_ptr_; }
  const std::vector<std::int64_t>& col_index() const { return col_; }
  const std::vector<double>& values() const { return values_; }

  double coeff(std::int64_t r, std::int64_t c) const;
  Vector multiply(const Vector& x) const;
  Eigen::SparseMatrix<double> to_eigen() const;
  DenseMatrix to_dense() const;

 private:
  std::int64_t rows_ = 0;
  std::int64_t cols_ = 0;
  std::vector<std::int64_t> row_ptr_{0};
  std::vector<std::int64_t> col_;
  std::vector<double> values_;
};

/// Direct solve of a square sparse system; small systems go through a dense
/// LU. Throws NumericalFault when the relative residual exceeds 1e-9.
Vector sparse_solve(const SparseMatrix& a, const Vector& b);

}  // namespace thbq
