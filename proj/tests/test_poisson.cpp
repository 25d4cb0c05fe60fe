#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "thbq/poisson.hpp"
#include "thbq/random_hierarchy.hpp"

using namespace thbq;

namespace {

Field sine_solution() {
  Field u = sine_product(2);
  u.laplacian = [](const Point& x) {
    return -2.0 * M_PI * M_PI * std::sin(M_PI * x[0]) * std::sin(M_PI * x[1]);
  };
  return u;
}

Field source_of(const Field& u) {
  Field f;
  f.value = u.laplacian;
  return f;
}

ThbSpace uniform_space(int n, int p) {
  auto ls = make_levels(2, {n, n, 1}, {p, p, 0}, {1, 1, 1}, 1);
  return ThbSpace(ls, DomainHierarchy(2, {n, n, 1}, {p, p, 1}));
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = double(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

TEST(Poisson, ZeroDataGivesZero) {
  const ThbSpace s = uniform_space(6, 2);
  Field zero;
  zero.value = [](const Point&) { return 0.0; };
  const Vector u = poisson_solve(s, zero, zero);
  EXPECT_EQ(u.size(), s.num_functions());
  EXPECT_EQ(u.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Poisson, BoundaryFunctionsAreTheBoundaryIndices) {
  const ThbSpace s = uniform_space(6, 2);
  Field zero;
  zero.value = [](const Point&) { return 0.0; };
  PoissonInfo info;
  poisson_solve(s, zero, zero, 0, &info);
  // 8 x 8 tensor functions, the outer ring has 28
  ASSERT_EQ(info.boundary.size(), 28u);
  for (int i : info.boundary) {
    const Ivec j = s.function(i).index;
    EXPECT_TRUE(j[0] == 0 || j[0] == 7 || j[1] == 0 || j[1] == 7);
  }
}

TEST(Poisson, QuadraticSolutionIsExactAndSystemResidualSmall) {
  // u = x^2 + x y - y^2 has Delta u = 0 and lies in the p = 2 space
  Field u;
  u.value = [](const Point& x) { return x[0] * x[0] + x[0] * x[1] - x[1] * x[1]; };
  u.gradient = [](const Point& x) { return Point{2 * x[0] + x[1], x[0] - 2 * x[1], 0.0}; };
  Field f;
  f.value = [](const Point&) { return 0.0; };
  auto ls = make_levels(2, {4, 4, 1}, {2, 2, 0}, {1, 1, 1}, 3);
  RandomHierarchyOptions opt;
  opt.level0_elements = {4, 4, 1};
  opt.levels = 3;
  const ThbSpace s(ls, random_hierarchy(*ls, opt, 3));
  ASSERT_GT(s.num_levels(), 1);
  PoissonInfo info;
  const Vector c = poisson_solve(s, f, u, 0, &info);
  EXPECT_LE(info.residual, 1e-10);
  const PoissonErrors err = poisson_errors(s, c, u);
  EXPECT_LE(err.l2, 1e-11);
  EXPECT_LE(err.h1, 1e-10);
}

TEST(Poisson, ManufacturedSineRates) {
  const Field u = sine_solution();
  std::vector<double> l2, h1;
  for (int n : {4, 8, 16, 32}) {
    const ThbSpace s = uniform_space(n, 2);
    PoissonInfo info;
    const Vector c = poisson_solve(s, source_of(u), u, 0, &info);
    EXPECT_LE(info.residual, 1e-10);
    const PoissonErrors e = poisson_errors(s, c, u);
    l2.push_back(e.l2);
    h1.push_back(e.h1);
  }
  for (std::size_t i = 1; i < l2.size(); ++i) {
    EXPECT_NEAR(std::log2(l2[i - 1] / l2[i]), 3.0, 0.25);
    EXPECT_NEAR(std::log2(h1[i - 1] / h1[i]), 2.0, 0.25);
  }
}

TEST(ResidualEstimator, VanishesForExactPolynomial) {
  // u_h = x^2 y + y^2 in the p = 2 space, f = Delta u_h = 2 y + 2
  const ThbSpace s = uniform_space(4, 2);
  Field u, f;
  u.value = [](const Point& x) { return x[0] * x[0] * x[1] + x[1] * x[1]; };
  u.gradient = [](const Point& x) { return Point{2 * x[0] * x[1], x[0] * x[0] + 2 * x[1], 0.0}; };
  f.value = [](const Point& x) { return 2.0 * x[1] + 2.0; };
  const Vector c = poisson_solve(s, f, u);
  EXPECT_LE(poisson_errors(s, c, u).h1, 1e-10);
  for (double v : residual_element_estimator(s, c, f)) EXPECT_LE(v, 1e-20);
  const IndicatorField ind = residual_estimator(s, c, f);
  EXPECT_EQ(ind.size(), s.hierarchy().active_boxes().size());
}

TEST(ResidualEstimator, HalvingElementsQuartersTheWeight) {
  // a fixed u_h (here zero) on a mesh and its uniform refinement
  Field f;
  f.value = [](const Point& x) { return 1.0 + x[0] * x[1]; };
  const ThbSpace coarse = uniform_space(4, 2);
  const ThbSpace fine = uniform_space(8, 2);
  const auto ec = residual_element_estimator(coarse, Vector::Zero(coarse.num_functions()), f);
  const auto ef = residual_element_estimator(fine, Vector::Zero(fine.num_functions()), f);
  const double sc = std::accumulate(ec.begin(), ec.end(), 0.0);
  const double sf = std::accumulate(ef.begin(), ef.end(), 0.0);
  EXPECT_NEAR(sf / sc, 0.25, 1e-13);
}

TEST(ResidualEstimator, BoxValuesAggregateElements) {
  const ThbSpace s = uniform_space(4, 2);
  const Field u = sine_solution();
  const Vector c = poisson_solve(s, source_of(u), u);
  const auto el = residual_element_estimator(s, c, source_of(u));
  const IndicatorField ind = residual_estimator(s, c, source_of(u));
  const DomainHierarchy& h = s.hierarchy();
  for (const auto& [b, v] : ind) {
    double sum = 0.0;
    for (int e = 0; e < s.num_elements(); ++e)
      if (h.box_of(s.element(e)) == b) sum += el[e];
    EXPECT_NEAR(v * v, sum, 1e-14 * sum);
  }
}

TEST(AdaptPoisson, SteepFrontEstimatorDecreasesAndTracksError) {
  const Field u = arctan_front(60.0, 0.5, -0.1, -0.1);
  auto ls = make_levels(2, {4, 4, 1}, {2, 2, 0}, {1, 1, 1}, 10);
  AdaptiveConfig cfg;
  cfg.theta_refine = 0.9;
  cfg.tolerance = 1e-6;
  cfg.max_iterations = 8;
  std::vector<double> h1;
  auto observer = [&](const ThbSpace& s, const Vector& c, const TraceRow&) {
    h1.push_back(poisson_errors(s, c, u).h1);
    EXPECT_LE(s.admissibility_class(), cfg.c);
  };
  const Trace t = adapt_poisson(ls, DomainHierarchy(2, {4, 4, 1}, {2, 2, 1}), u, cfg, observer);
  ASSERT_EQ(t.rows.size(), 8u);
  std::vector<double> eta;
  for (const TraceRow& r : t.rows) eta.push_back(r.eta_total);
  for (std::size_t i = 1; i < eta.size(); ++i) EXPECT_LT(eta[i], eta[i - 1]) << "step " << i;
  EXPECT_GE(pearson(eta, h1), 0.8);
  EXPECT_LT(h1.back(), 0.05 * h1.front());
}
