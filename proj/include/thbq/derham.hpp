#pragma once

#include <optional>
#include <string>
#include <vector>

#include "thbq/thb_space.hpp"

namespace thbq {

/// THB de Rham complex over one hierarchy: forms[k] lists the component
/// spaces of the k-th space (2D: H1 -rot-> H(div) -div-> L2; 3D: grad, curl, div).
struct ComplexSpaces {
  int dim = 2;
  Ivec degree{0, 0, 0};
  int multiplicity = 1;
  std::vector<std::vector<ThbSpace>> forms;

  int form_dim(int k) const;
  int total_dofs() const;
};

/// Builds the complex of degree p over a hierarchy made of (p+1)-boxes. With
/// require_boxes = false any hierarchy is accepted (to study meshes where
/// exactness may fail).
ComplexSpaces build_complex(const DomainHierarchy& h, const Ivec& degree, int multiplicity = 1,
                            bool require_boxes = true);

/// Point samples of every basis function (samples[k]) and of the images of the
/// basis of form k under the k-th operator (images[k]) at (max p + 1)^dim
/// Gauss points per active element. Rows run over (component, element, point).
struct ComplexSamples {
  std::vector<Eigen::SparseMatrix<double>> samples;
  std::vector<Eigen::SparseMatrix<double>> images;
  int points_per_element = 0;
};
ComplexSamples sample_complex(const ComplexSpaces& cs);

struct ExactnessReport {
  std::vector<int> betti;                 // h0, h1, ... (dimension of each cohomology space)
  std::vector<int> dims;                  // dim of each space
  std::vector<int> ranks;                 // rank of each operator
  double containment_residual = 0.0;      // max relative LS residual of images in the next space
  bool indeterminate = false;             // singular values found in (1e-9, 1e-7]
  bool exact() const;
  std::string verdict() const;            // "exact", "not-exact" or "indeterminate"
};

/// Rank-based cohomology of the complex. 3D complexes are limited to 4000 dofs.
ExactnessReport exactness_report(const ComplexSpaces& cs);

/// Inclusive index box {t : lo <= t <= hi}.
struct Grid {
  Ivec lo{0, 0, 0};
  Ivec hi{0, 0, 0};
  bool contains(const Ivec& t) const;
};

struct Chain {
  std::vector<Ivec> nodes;
  int switch_index = 0;  // nodes up to it lie in the first grid, from it on in the second
};

/// Shortest lattice chain from s1 to s2 staying in g1 ∪ g2; absent when the
/// grids do not overlap or an end point lies outside both.
std::optional<Chain> shortest_chain(int dim, const Grid& g1, const Grid& g2, const Ivec& s1, const Ivec& s2);

struct AssumptionCheck {
  bool pass = true;
  long checked = 0;
  // First violation: level and the indices involved. For 3a, a and b are the two
  // level functions; for 3b, a is the failing function of degree `phi_degree`
  // at level `phi_level` and [box_lo, box_hi) the bounding box (level + 1 elements).
  int level = -1;
  Ivec a{0, 0, 0};
  Ivec b{0, 0, 0};
  Ivec phi_degree{0, 0, 0};
  int phi_level = -1;
  Ivec box_lo{0, 0, 0};
  Ivec box_hi{0, 0, 0};
  std::string describe(int dim) const;
};

/// Level functions of `levels` (the V0 degree) whose support lies in Omega_{level+1}.
std::vector<Ivec> interior_functions(const LevelSequence& levels, const DomainHierarchy& h, int level);

/// Pairs of interior level functions whose support closures meet in a set of
/// dimension >= dim - 1 must be joined by a shortest chain of interior functions.
AssumptionCheck check_assumption_3a(const LevelSequence& levels, const DomainHierarchy& h, int level);
AssumptionCheck check_assumption_3a(const LevelSequence& levels, const DomainHierarchy& h);

/// Every level or level+1 function phi of full or reduced degree with support in
/// Omega_{level+1}, covered by interior level functions A, lies in the support of
/// one interior function whose support stays in the bounding box of A.
AssumptionCheck check_assumption_3b(const LevelSequence& levels, const DomainHierarchy& h, int level);
AssumptionCheck check_assumption_3b(const LevelSequence& levels, const DomainHierarchy& h);

}  // namespace thbq
