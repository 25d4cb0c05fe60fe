#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "thbq/domain_hierarchy.hpp"
#include "thbq/numerics.hpp"
#include "thbq/tensor_space.hpp"

namespace thbq {

/// Sparse coefficient vector over one level's tensor basis: (flat index, value),
/// ascending by index.
using SparseCoeffs = std::vector<std::pair<std::int64_t, double>>;

/// Coefficients of a level-`level` vector written in the level + 1 basis.
SparseCoeffs refine_coefficients(const LevelSequence& levels, int level, const SparseCoeffs& c);
/// Zeroes the coefficients of level-`level` functions whose support lies in Omega_level.
SparseCoeffs truncate(const LevelSequence& levels, const DomainHierarchy& h, int level,
                      const SparseCoeffs& c);
Vector truncate(const LevelSequence& levels, const DomainHierarchy& h, int level, const Vector& c);

enum class BasisKind { truncated, hierarchical };

/// One basis function: a level-`level` B-spline, possibly truncated.
/// cascade[k] holds its coefficients at level `level + k` after the truncations
/// up to that level; entries whose support misses Omega_{level+k} are dropped
/// because they never reach an active element of that level or finer.
struct HierarchicalFunction {
  int level = 0;
  Ivec index{0, 0, 0};
  std::vector<SparseCoeffs> cascade;
};

/// Tensor grid of points inside one element: per-direction coordinates and
/// weights (weights are 1 for sampling grids).
struct ElementPoints {
  std::array<std::vector<double>, kMaxDim> x;
  std::array<std::vector<double>, kMaxDim> w;

  int size() const { return int(x[0].size() * x[1].size() * x[2].size()); }
  Point point(int q) const;
  double weight(int q) const;
};

/// Hierarchical spline space (THB or HB) over a domain hierarchy.
class ThbSpace {
 public:
  ThbSpace(std::shared_ptr<const LevelSequence> levels, DomainHierarchy hierarchy,
           BasisKind kind = BasisKind::truncated);

  int dim() const { return hierarchy_.dim(); }
  BasisKind kind() const { return kind_; }
  const LevelSequence& levels() const { return *levels_; }
  const std::shared_ptr<const LevelSequence>& levels_ptr() const { return levels_; }
  const DomainHierarchy& hierarchy() const { return hierarchy_; }
  int num_levels() const { return hierarchy_.num_levels(); }
  Ivec degree() const { return levels_->level(0).degree(); }
  int local_count() const { return levels_->level(0).local_count(); }

  int num_functions() const { return int(functions_.size()); }
  const HierarchicalFunction& function(int i) const { return functions_[i]; }
  /// Index of the function (level, index), or -1 if it is not in the basis.
  int find_function(int level, const Ivec& index) const;

  int num_elements() const { return int(elements_.size()); }
  const CellId& element(int e) const { return elements_[e]; }
  int find_element(const CellId& c) const;
  /// Active element containing x (half-open elements, closed at x = 1).
  int locate(const Point& x) const;
  Point element_lo(int e) const;
  Point element_hi(int e) const;
  double element_volume(int e) const;

  /// Functions nonzero on element e and their coefficients on the element's
  /// local tensor B-splines (row-major, local_count() per function).
  std::span<const int> element_functions(int e) const;
  DenseMatrix element_operator(int e) const;

  /// Local B-spline values (local_count x points) for partial derivative `deriv`.
  DenseMatrix local_values(int e, const ElementPoints& pts, const Ivec& deriv = {0, 0, 0}) const;
  /// Values of the element's functions (element_functions(e).size() x points).
  DenseMatrix function_values(int e, const ElementPoints& pts, const Ivec& deriv = {0, 0, 0}) const;

  ElementPoints gauss_points(int e, int order) const;
  /// n equispaced points per direction including the element corners.
  ElementPoints sample_points(int e, int n) const;

  double eval(int func, const Point& x, const Ivec& deriv = {0, 0, 0}) const;
  /// Value of sum_j c_j T_j at x.
  double eval_sum(const Vector& c, const Point& x, const Ivec& deriv = {0, 0, 0}) const;

  /// Integral of every basis function over the domain.
  const std::vector<double>& integrals() const { return integrals_; }

  /// Largest number of consecutive levels among functions nonzero on one active element.
  int admissibility_class() const;
  /// Levels (min, max) of the functions nonzero on element e.
  std::pair<int, int> element_level_range(int e) const;

 private:
  void build_functions();
  void build_extraction();
  void build_integrals();

  std::shared_ptr<const LevelSequence> levels_;
  DomainHierarchy hierarchy_;
  BasisKind kind_;
  std::vector<HierarchicalFunction> functions_;
  std::vector<std::vector<std::pair<std::int64_t, int>>> function_lookup_;  // per level
  std::vector<CellId> elements_;
  std::vector<std::vector<std::int64_t>> element_flats_;  // per level, ascending
  std::vector<int> element_offset_;                        // per level
  std::vector<int> elem_ptr_;
  std::vector<int> entry_func_;
  std::vector<double> entry_coeff_;
  std::vector<double> integrals_;
};

std::shared_ptr<const LevelSequence> make_levels(int dim, const Ivec& level0_elements,
                                                 const Ivec& degree, const Ivec& multiplicity,
                                                 int num_levels);

}  // namespace thbq
