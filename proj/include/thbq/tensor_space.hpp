#pragma once

#include <array>
#include <vector>

#include "thbq/knot_vector.hpp"
#include "thbq/multi_index.hpp"

namespace thbq {

/// Tensor-product B-spline space on [0, 1]^dim. Directions >= dim carry a
/// single constant function on a single element.
class TensorSpace {
 public:
  TensorSpace(int dim, std::array<KnotVector, kMaxDim> directions);
  TensorSpace(const std::vector<KnotVector>& directions);
  static TensorSpace uniform(int dim, const Ivec& elements, const Ivec& degree,
                             const Ivec& multiplicity);

  int dim() const { return dim_; }
  const KnotVector& direction(int d) const { return kv_[d]; }
  Ivec degree() const;
  const GridShape& elements() const { return elems_; }
  const GridShape& basis() const { return basis_; }
  int num_basis() const { return int(basis_.size()); }
  /// Number of functions nonzero on one element, prod(degree + 1).
  int local_count() const { return nloc_; }

  /// Element index box covered by the support of function j.
  IndexBox support(const Ivec& j) const;
  /// Function index box of the functions nonzero on element e.
  IndexBox functions_on(const Ivec& e) const;
  Ivec first_basis(const Ivec& e) const;
  Point element_lo(const Ivec& e) const;
  Point element_hi(const Ivec& e) const;
  Ivec find_element(const Point& x) const;

  /// Partial derivative `deriv` of tensor function j at x.
  double eval(const Ivec& j, const Point& x, const Ivec& deriv = {0, 0, 0}) const;

  /// The same space with every element bisected in the first dim directions.
  TensorSpace bisected() const;

 private:
  int dim_;
  std::array<KnotVector, kMaxDim> kv_;
  GridShape elems_;
  GridShape basis_;
  int nloc_;
};

/// Nested sequence of tensor spaces obtained by repeated bisection, with the
/// univariate refinement rows between consecutive levels.
class LevelSequence {
 public:
  LevelSequence(TensorSpace level0, int num_levels);
  static LevelSequence uniform(int dim, const Ivec& elements, const Ivec& degree,
                               const Ivec& multiplicity, int num_levels);

  int dim() const { return levels_.front().dim(); }
  int num_levels() const { return int(levels_.size()); }
  const TensorSpace& level(int l) const { return levels_.at(l); }
  /// Refinement rows from level l to level l + 1 in direction d.
  const std::vector<RefinementRow>& rows(int l, int d) const { return rows_.at(l)[d]; }

 private:
  std::vector<TensorSpace> levels_;
  std::vector<std::array<std::vector<RefinementRow>, kMaxDim>> rows_;
};

}  // namespace thbq
