#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "thbq/error.hpp"
#include "thbq/numerics.hpp"

using namespace thbq;

TEST(Cholesky, SolvesSpdSystem) {
  DenseMatrix a(3, 3);
  a << 4, 2, 0, 2, 5, 1, 0, 1, 3;
  Vector x_true(3);
  x_true << 1, -2, 0.5;
  const Vector x = cholesky_solve(a, Vector(a * x_true));
  EXPECT_LT((x - x_true).norm(), 1e-13);
}

TEST(Cholesky, RejectsIndefiniteMatrix) {
  DenseMatrix a(2, 2);
  a << 1, 2, 2, 1;
  EXPECT_THROW(cholesky_solve(a, Vector(Vector::Ones(2))), NumericalFault);
}

TEST(Cholesky, RejectsSingularGramian) {
  DenseMatrix v(4, 2);
  v << 1, 2, 3, 6, 5, 10, 7, 14;  // second column duplicates the first
  EXPECT_THROW(cholesky_solve(DenseMatrix(v.transpose() * v), Vector(Vector::Ones(2))), NumericalFault);
}

TEST(SvdRank, CountsRankAndNullity) {
  DenseMatrix a(4, 3);
  a << 1, 0, 1, 0, 1, 1, 1, 1, 2, 2, 0, 2;
  const RankInfo r = svd_rank(a, 1e-10);
  EXPECT_EQ(r.rank, 2);
  EXPECT_EQ(r.nullity, 1);
  EXPECT_GT(r.smallest_kept, 0.0);
  EXPECT_LT(r.largest_dropped, 1e-12);
}

TEST(SvdRank, ZeroMatrixHasFullNullity) {
  const RankInfo r = svd_rank(DenseMatrix::Zero(3, 4), 1e-10);
  EXPECT_EQ(r.rank, 0);
  EXPECT_EQ(r.nullity, 4);
}

TEST(SparseMatrix, SumsDuplicatesIndependentOfOrder) {
  std::vector<Triplet> t = {{0, 0, 0.1}, {1, 2, 3.0}, {0, 0, 0.2}, {2, 1, -1.0},
                            {0, 0, 0.3}, {1, 2, 1e-17}, {2, 2, 5.0}};
  const SparseMatrix a = SparseMatrix::from_triplets(3, 3, t);
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    std::shuffle(t.begin(), t.end(), rng);
    const SparseMatrix b = SparseMatrix::from_triplets(3, 3, t);
    EXPECT_EQ(a.values(), b.values());
    EXPECT_EQ(a.col_index(), b.col_index());
  }
  EXPECT_EQ(a.nnz(), 4);
  EXPECT_DOUBLE_EQ(a.coeff(2, 1), -1.0);
  EXPECT_EQ(a.coeff(1, 1), 0.0);
}

TEST(SparseMatrix, RejectsOutOfRangeTriplet) {
  EXPECT_THROW(SparseMatrix::from_triplets(2, 2, {{2, 0, 1.0}}), InvalidArgument);
}

namespace {

SparseMatrix laplacian_1d(int n) {
  std::vector<Triplet> t;
  for (int i = 0; i < n; ++i) {
    t.push_back({i, i, 2.0});
    if (i > 0) t.push_back({i, i - 1, -1.0});
    if (i + 1 < n) t.push_back({i, i + 1, -1.0});
  }
  return SparseMatrix::from_triplets(n, n, t);
}

}  // namespace

TEST(SparseSolve, SmallAndLargeSystems) {
  for (int n : {10, 3000}) {
    const SparseMatrix a = laplacian_1d(n);
    Vector x_true(n);
    for (int i = 0; i < n; ++i) x_true(i) = std::sin(0.01 * i);
    const Vector x = sparse_solve(a, a.multiply(x_true));
    EXPECT_LT((x - x_true).norm() / x_true.norm(), 1e-8) << n;
  }
}

TEST(SparseSolve, SingularSystemFaults) {
  const SparseMatrix a = SparseMatrix::from_triplets(2, 2, {{0, 0, 1.0}, {1, 0, 1.0}});
  EXPECT_THROW(sparse_solve(a, Vector::Ones(2)), NumericalFault);
}
