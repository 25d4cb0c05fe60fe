#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "thbq/error.hpp"
#include "thbq/knot_vector.hpp"
#include "thbq/tensor_space.hpp"

using namespace thbq;

TEST(KnotVector, OpenKnotsQuadratic) {
  KnotVector kv({0.0, 0.5, 1.0}, 2, 1);
  EXPECT_EQ(kv.knots(), (std::vector<double>{0, 0, 0, 0.5, 1, 1, 1}));
  EXPECT_EQ(kv.num_basis(), 4);
}

TEST(KnotVector, LinearSingleElement) {
  KnotVector kv({0.0, 1.0}, 1, 1);
  EXPECT_EQ(kv.num_basis(), 2);
}

TEST(KnotVector, CubicWithDoubleKnots) {
  KnotVector kv({0.0, 0.25, 0.5, 0.75, 1.0}, 3, 2);
  EXPECT_EQ(kv.num_basis(), 10);
  EXPECT_EQ(kv.knots().size(), 14u);
}

TEST(KnotVector, RejectsInvalidInput) {
  EXPECT_THROW(KnotVector({0.0, 0.5, 0.5, 1.0}, 2, 1), InvalidArgument);
  EXPECT_THROW(KnotVector({0.0, 1.0}, 2, 4), InvalidArgument);
  EXPECT_THROW(KnotVector({0.0, 1.0}, 2, 0), InvalidArgument);
  EXPECT_THROW(KnotVector({0.0, 0.6}, 2, 1), InvalidArgument);
}

TEST(KnotVector, QuasiUniformityDiagnostic) {
  EXPECT_DOUBLE_EQ(KnotVector::uniform(4, 2, 1).quasi_uniformity(), 1.0);
  EXPECT_DOUBLE_EQ(KnotVector({0.0, 0.2, 1.0}, 2, 1).quasi_uniformity(), 4.0);
}

TEST(KnotVector, BisectionKeepsDegreeAndMultiplicity) {
  KnotVector kv({0.0, 0.3, 1.0}, 3, 2);
  KnotVector f = kv.bisected();
  EXPECT_EQ(f.breakpoints(), (std::vector<double>{0.0, 0.15, 0.3, 0.65, 1.0}));
  EXPECT_EQ(f.degree(), 3);
  EXPECT_EQ(f.multiplicity(), 2);
}

class BasisFamily : public ::testing::TestWithParam<std::tuple<int, int>> {};

TEST_P(BasisFamily, PartitionOfUnityAndNonnegativity) {
  auto [p, m] = GetParam();
  KnotVector kv({0.0, 0.1, 0.35, 0.5, 0.8, 1.0}, p, m);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    const double x = t == 0 ? 1.0 : (t == 1 ? 0.0 : u(rng));
    double s = 0.0;
    for (int j = 0; j < kv.num_basis(); ++j) {
      const double v = eval_basis(kv, j, x);
      EXPECT_GE(v, -1e-15);
      s += v;
    }
    EXPECT_NEAR(s, 1.0, 1e-13) << x;
  }
}

TEST_P(BasisFamily, ElementEvaluationMatchesRecursion) {
  auto [p, m] = GetParam();
  KnotVector kv({0.0, 0.1, 0.35, 0.5, 0.8, 1.0}, p, m);
  std::vector<double> buf((p + 2) * (p + 1));
  for (int e = 0; e < kv.num_elements(); ++e) {
    const double a = kv.breakpoints()[e], b = kv.breakpoints()[e + 1];
    for (double s : {0.13, 0.5, 0.91}) {
      const double x = a + s * (b - a);
      eval_element_basis(kv, e, x, p + 1, buf.data());
      for (int d = 0; d <= p + 1; ++d)
        for (int r = 0; r <= p; ++r)
          EXPECT_NEAR(buf[d * (p + 1) + r], eval_basis(kv, kv.first_basis(e) + r, x, d),
                      1e-9 * std::pow(40.0, d))
              << "e=" << e << " d=" << d << " r=" << r;
    }
  }
}

TEST_P(BasisFamily, DerivativeMatchesFiniteDifference) {
  auto [p, m] = GetParam();
  if (p == 0) return;
  KnotVector kv({0.0, 0.1, 0.35, 0.5, 0.8, 1.0}, p, m);
  const double h = 1e-6;
  for (int j = 0; j < kv.num_basis(); ++j)
    for (double x : {0.05, 0.2, 0.42, 0.66, 0.9}) {
      const double fd = (eval_basis(kv, j, x + h) - eval_basis(kv, j, x - h)) / (2 * h);
      EXPECT_NEAR(eval_basis(kv, j, x, 1), fd, 1e-5);
    }
}

INSTANTIATE_TEST_SUITE_P(Degrees, BasisFamily,
                         ::testing::Values(std::make_tuple(0, 1), std::make_tuple(1, 1),
                                           std::make_tuple(2, 1), std::make_tuple(2, 2),
                                           std::make_tuple(3, 1), std::make_tuple(3, 3),
                                           std::make_tuple(4, 2)));

TEST(TwoScale, LinearHatRows) {
  const DenseMatrix r = two_scale_matrix(KnotVector::uniform(2, 1, 1), KnotVector::uniform(4, 1, 1));
  // Interior hat: 1/2, 1, 1/2 on the fine hats.
  EXPECT_DOUBLE_EQ(r(1, 1), 0.5);
  EXPECT_DOUBLE_EQ(r(1, 2), 1.0);
  EXPECT_DOUBLE_EQ(r(1, 3), 0.5);
}

TEST(TwoScale, IdentityForEqualKnotVectors) {
  const KnotVector kv = KnotVector::uniform(3, 2, 1);
  const DenseMatrix r = two_scale_matrix(kv, kv);
  EXPECT_TRUE(r.isApprox(DenseMatrix::Identity(5, 5)));
}

TEST(TwoScale, RejectsNonBisection) {
  EXPECT_THROW(two_scale_rows(KnotVector::uniform(2, 2, 1), KnotVector::uniform(3, 2, 1)),
               InvalidArgument);
}

// Oracle: least-squares fit of each coarse function by the fine basis,
// sampled densely; exact because the coarse space is contained in the fine one.
TEST(TwoScale, MatchesSampledFit) {
  for (auto [p, m] : {std::pair{1, 1}, {2, 1}, {2, 2}, {3, 1}, {3, 2}, {3, 4}, {4, 3}}) {
    KnotVector c({0.0, 0.2, 0.45, 1.0}, p, m);
    KnotVector f = c.bisected();
    const int ns = 400;
    DenseMatrix bf(ns, f.num_basis()), bc(ns, c.num_basis());
    for (int s = 0; s < ns; ++s) {
      const double x = (s + 0.5) / ns;
      for (int j = 0; j < f.num_basis(); ++j) bf(s, j) = eval_basis(f, j, x);
      for (int j = 0; j < c.num_basis(); ++j) bc(s, j) = eval_basis(c, j, x);
    }
    const DenseMatrix oracle = bf.colPivHouseholderQr().solve(bc).transpose();
    const DenseMatrix r = two_scale_matrix(c, f);
    EXPECT_LT((r - oracle).cwiseAbs().maxCoeff(), 1e-11) << "p=" << p << " m=" << m;
    // Partition of unity carries over: every column of R sums to one.
    const Vector ones = r.transpose() * Vector::Ones(r.rows());
    EXPECT_LT((ones - Vector::Ones(r.cols())).cwiseAbs().maxCoeff(), 1e-13);
  }
}

TEST(Gauss, LowOrderRules) {
  const GaussRule g1 = gauss_rule(1, 0.0, 1.0);
  EXPECT_DOUBLE_EQ(g1.nodes[0], 0.5);
  EXPECT_DOUBLE_EQ(g1.weights[0], 1.0);
  const GaussRule g2 = gauss_rule(2, -1.0, 1.0);
  EXPECT_NEAR(g2.nodes[0], -1.0 / std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(g2.nodes[1], 1.0 / std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(g2.weights[0], 1.0, 1e-15);
  EXPECT_NEAR(g2.weights[1], 1.0, 1e-15);
  double s = 0.0;
  for (int i = 0; i < 2; ++i) s += g2.weights[i] * g2.nodes[i] * g2.nodes[i];
  EXPECT_NEAR(s, 2.0 / 3.0, 1e-15);
}

TEST(Gauss, ExactForPolynomialsUpToTwiceOrderMinusOne) {
  for (int n = 1; n <= 12; ++n) {
    const GaussRule g = gauss_rule(n, 0.25, 1.5);
    for (int k = 0; k <= 2 * n - 1; ++k) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += g.weights[i] * std::pow(g.nodes[i], k);
      const double exact = (std::pow(1.5, k + 1) - std::pow(0.25, k + 1)) / (k + 1);
      EXPECT_NEAR(s, exact, 1e-13 * std::max(1.0, exact)) << n << " " << k;
    }
  }
}

TEST(TensorSpace, ProductOfUnivariateValues) {
  TensorSpace ts = TensorSpace::uniform(3, {2, 3, 4}, {2, 1, 3}, {1, 1, 2});
  const Point x{0.3, 0.71, 0.52};
  for (Ivec j : {Ivec{0, 0, 0}, Ivec{1, 2, 3}, Ivec{3, 3, 7}}) {
    double v = 1.0;
    for (int d = 0; d < 3; ++d) v *= eval_basis(ts.direction(d), j[d], x[d]);
    EXPECT_DOUBLE_EQ(ts.eval(j, x), v);
  }
  EXPECT_EQ(ts.num_basis(), 4 * 4 * 10);
}

TEST(LevelSequence, BisectsOnlyUsedDirections) {
  LevelSequence ls = LevelSequence::uniform(2, {3, 2, 1}, {2, 2, 0}, {1, 1, 1}, 3);
  EXPECT_EQ(ls.level(2).elements().extent, (Ivec{12, 8, 1}));
  EXPECT_EQ(ls.rows(1, 2).size(), 1u);
}
