#include "thbq/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include <Eigen/SVD>
#include <Eigen/SparseLU>

#include "thbq/error.hpp"

namespace thbq {

namespace {

constexpr std::int64_t kDenseLimit = 400;

// In-place lower Cholesky factor; returns false on a small pivot.
bool factor(DenseMatrix& l, double pivot_tol, int& bad) {
  const int n = int(l.rows());
  double trace = 0.0;
  for (int i = 0; i < n; ++i) trace += l(i, i);
  const double floor = pivot_tol * std::abs(trace);
  for (int j = 0; j < n; ++j) {
    double d = l(j, j);
    for (int k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > floor)) {
      bad = j;
      return false;
    }
    d = std::sqrt(d);
    l(j, j) = d;
    for (int i = j + 1; i < n; ++i) {
      double s = l(i, j);
      for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / d;
    }
  }
  return true;
}

}  // namespace

DenseMatrix cholesky_solve(const DenseMatrix& a, const DenseMatrix& b, double pivot_tol) {
  require(a.rows() == a.cols(), "cholesky_solve: matrix is not square");
  require(a.rows() == b.rows(), "cholesky_solve: size mismatch");
  DenseMatrix l = a;
  int bad = -1;
  if (!factor(l, pivot_tol, bad))
    throw NumericalFault("cholesky_solve: pivot " + std::to_string(bad) +
                         " below tolerance (matrix not positive definite)");
  const int n = int(a.rows());
  DenseMatrix x = b;
  for (int c = 0; c < x.cols(); ++c) {
    for (int i = 0; i < n; ++i) {
      double s = x(i, c);
      for (int k = 0; k < i; ++k) s -= l(i, k) * x(k, c);
      x(i, c) = s / l(i, i);
    }
    for (int i = n - 1; i >= 0; --i) {
      double s = x(i, c);
      for (int k = i + 1; k < n; ++k) s -= l(k, i) * x(k, c);
      x(i, c) = s / l(i, i);
    }
  }
  return x;
}

Vector cholesky_solve(const DenseMatrix& a, const Vector& b, double pivot_tol) {
  DenseMatrix x = cholesky_solve(a, DenseMatrix(b), pivot_tol);
  return x.col(0);
}

int RankInfo::count_in_band(double lo, double hi) const {
  if (sigma_max <= 0.0) return 0;
  int n = 0;
  for (double s : singular_values) {
    const double r = s / sigma_max;
    if (r > lo && r <= hi) ++n;
  }
  return n;
}

namespace {

RankInfo rank_from_values(const Vector& s, int cols, double rel_tol) {
  RankInfo info;
  info.singular_values.assign(s.data(), s.data() + s.size());
  std::sort(info.singular_values.begin(), info.singular_values.end(), std::greater<>());
  info.sigma_max = info.singular_values.empty() ? 0.0 : info.singular_values.front();
  const double cut = rel_tol * info.sigma_max;
  for (double v : info.singular_values) {
    if (v > cut && info.sigma_max > 0.0) {
      ++info.rank;
      info.smallest_kept = v;
    } else if (info.largest_dropped == 0.0) {
      info.largest_dropped = v;
    }
  }
  info.nullity = cols - info.rank;
  return info;
}

// Singular values of a square upper-triangular factor. One-sided Jacobi is
// the most accurate for small singular values; above a size where it gets slow
// the divide-and-conquer solver with vectors is used. Its values-only path on
// tall matrices is not reliable for small singular values, hence the QR step.
Vector triangular_singular_values(const DenseMatrix& r) {
  if (r.cols() <= 200) return Eigen::JacobiSVD<DenseMatrix>(r).singularValues();
  return Eigen::BDCSVD<DenseMatrix>(r, Eigen::ComputeThinU | Eigen::ComputeThinV).singularValues();
}

}  // namespace

RankInfo svd_rank(const DenseMatrix& a, double rel_tol) {
  if (a.cols() == 0) return {};
  if (a.rows() == 0) return rank_from_values(Vector(), int(a.cols()), rel_tol);
  const DenseMatrix t = a.rows() >= a.cols() ? a : DenseMatrix(a.transpose());
  Eigen::HouseholderQR<DenseMatrix> qr(t);
  const DenseMatrix r = qr.matrixQR().topRows(t.cols()).triangularView<Eigen::Upper>();
  return rank_from_values(triangular_singular_values(r), int(a.cols()), rel_tol);
}

RankInfo svd_rank(const Eigen::SparseMatrix<double>& a, double rel_tol) {
  return svd_rank(DenseMatrix(a), rel_tol);
}

SparseMatrix SparseMatrix::from_triplets(std::int64_t rows, std::int64_t cols,
                                         std::vector<Triplet> t) {
  for (const Triplet& e : t)
    require(e.row >= 0 && e.row < rows && e.col >= 0 && e.col < cols,
            "SparseMatrix: triplet out of range");
  std::sort(t.begin(), t.end(), [](const Triplet& a, const Triplet& b) {
    if (a.row != b.row) return a.row < b.row;
    if (a.col != b.col) return a.col < b.col;
    return a.value < b.value;
  });
  SparseMatrix m;
  m.rows_ = rows;
  m.cols_ = cols;
  m.row_ptr_.assign(std::size_t(rows) + 1, 0);
  for (std::size_t k = 0; k < t.size();) {
    std::size_t e = k;
    double sum = 0.0;
    while (e < t.size() && t[e].row == t[k].row && t[e].col == t[k].col) sum += t[e++].value;
    m.col_.push_back(t[k].col);
    m.values_.push_back(sum);
    ++m.row_ptr_[std::size_t(t[k].row) + 1];
    k = e;
  }
  for (std::int64_t r = 0; r < rows; ++r) m.row_ptr_[r + 1] += m.row_ptr_[r];
  return m;
}

double SparseMatrix::coeff(std::int64_t r, std::int64_t c) const {
  auto b = col_.begin() + row_ptr_[r], e = col_.begin() + row_ptr_[r + 1];
  auto it = std::lower_bound(b, e, c);
  return (it != e && *it == c) ? values_[std::size_t(it - col_.begin())] : 0.0;
}

Vector SparseMatrix::multiply(const Vector& x) const {
  require(x.size() == cols_, "SparseMatrix::multiply: size mismatch");
  Vector y = Vector::Zero(rows_);
  for (std::int64_t r = 0; r < rows_; ++r)
    for (std::int64_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) y(r) += values_[k] * x(col_[k]);
  return y;
}

Eigen::SparseMatrix<double> SparseMatrix::to_eigen() const {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(values_.size());
  for (std::int64_t r = 0; r < rows_; ++r)
    for (std::int64_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
      t.emplace_back(int(r), int(col_[k]), values_[k]);
  Eigen::SparseMatrix<double> m(rows_, cols_);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

DenseMatrix SparseMatrix::to_dense() const {
  DenseMatrix d = DenseMatrix::Zero(rows_, cols_);
  for (std::int64_t r = 0; r < rows_; ++r)
    for (std::int64_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) d(r, col_[k]) = values_[k];
  return d;
}

Vector sparse_solve(const SparseMatrix& a, const Vector& b) {
  require(a.rows() == a.cols(), "sparse_solve: matrix is not square");
  require(b.size() == a.rows(), "sparse_solve: size mismatch");
  if (a.rows() == 0) return Vector();
  Vector x;
  if (a.rows() < kDenseLimit) {
    Eigen::FullPivLU<DenseMatrix> lu(a.to_dense());
    if (!lu.isInvertible()) throw NumericalFault("sparse_solve: singular matrix");
    x = lu.solve(b);
  } else {
    Eigen::SparseMatrix<double> m = a.to_eigen();
    m.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(m);
    if (lu.info() != Eigen::Success) throw NumericalFault("sparse_solve: factorization failed");
    x = lu.solve(b);
  }
  const double bn = b.norm();
  const double res = (a.multiply(x) - b).norm() / (bn > 0 ? bn : 1.0);
  if (!(res <= 1e-9)) throw NumericalFault("sparse_solve: residual " + std::to_string(res));
  return x;
}

}  // namespace thbq
