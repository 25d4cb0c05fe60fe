#pragma once

#include <utility>
#include <vector>

#include "thbq/numerics.hpp"

namespace thbq {

/// Open knot vector on [0, 1]: end knots repeated degree+1 times, interior
/// breakpoints repeated `multiplicity` times.
class KnotVector {
 public:
  KnotVector(std::vector<double> breakpoints, int degree, int multiplicity);
  static KnotVector uniform(int elements, int degree, int multiplicity);

  int degree() const { return p_; }
  int multiplicity() const { return m_; }
  const std::vector<double>& breakpoints() const { return breaks_; }
  const std::vector<double>& knots() const { return knots_; }
  int num_elements() const { return int(breaks_.size()) - 1; }
  int num_basis() const { return int(knots_.size()) - p_ - 1; }

  /// Knot span index k with knots[k] = breakpoint e and knots[k+1] = breakpoint e+1.
  int span(int e) const { return span_[e]; }
  /// First of the degree+1 functions that are nonzero on element e.
  int first_basis(int e) const { return span_[e] - p_; }
  /// Elements [lo, hi) covered by the support of function j.
  std::pair<int, int> support(int j) const { return support_[j]; }
  /// Element containing x; half-open except that x = 1 maps to the last element.
  int find_element(double x) const;

  /// Ratio of largest to smallest element length (a diagnostic only).
  double quasi_uniformity() const;

  /// Knot vector with every element bisected; degree and multiplicity kept.
  KnotVector bisected() const;

  bool operator==(const KnotVector& o) const {
    return p_ == o.p_ && m_ == o.m_ && breaks_ == o.breaks_;
  }

 private:
  int p_;
  int m_;
  std::vector<double> breaks_;
  std::vector<double> knots_;
  std::vector<int> span_;
  std::vector<int> break_of_knot_;
  std::vector<std::pair<int, int>> support_;
};

/// Cox-de Boor evaluation of derivative `deriv` of function j at x, with 0/0 := 0.
double eval_basis(const KnotVector& kv, int j, double x, int deriv = 0);

/// Values and derivatives up to `nderiv` of the degree+1 functions nonzero on
/// element e, evaluated with that element's polynomial piece at x.
/// Output layout: out[d * (p + 1) + a] for derivative d of function first_basis(e) + a.
void eval_element_basis(const KnotVector& kv, int e, double x, int nderiv, double* out);

/// Coarse function j written in the fine basis: fine indices first .. first + w.size() - 1.
struct RefinementRow {
  int first = 0;
  std::vector<double> w;
};

/// Refinement relation between nested knot vectors, one row per coarse function.
std::vector<RefinementRow> two_scale_rows(const KnotVector& coarse, const KnotVector& fine);
/// Dense num_basis(coarse) x num_basis(fine) form of two_scale_rows.
DenseMatrix two_scale_matrix(const KnotVector& coarse, const KnotVector& fine);

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule with `order` points on [a, b].
GaussRule gauss_rule(int order, double a = 0.0, double b = 1.0);

}  // namespace thbq
