#pragma once

#include <span>
#include <vector>

#include "thbq/field.hpp"
#include "thbq/qbox.hpp"
#include "thbq/thb_space.hpp"

namespace thbq {

/// A well-behaved or regular p-box: the active elements it contains and the
/// basis functions that are nonzero on it.
struct MacroElement {
  BoxId box;
  bool well_behaved = false;
  std::vector<int> elements;
  std::vector<int> functions;
};

struct ProjectorPartition {
  std::vector<MacroElement> members;
  std::vector<int> member_of_element;               // per active element
  std::vector<std::vector<int>> members_of_function;  // members on which a function is nonzero
};

/// Partition of the active elements into well-behaved and regular p-boxes.
/// The hierarchy must be a union of p-boxes.
ProjectorPartition make_partition(const ThbSpace& space);

struct OverloadCheck {
  bool non_overloaded = false;
  int functions = 0;
  int rank = 0;
  double min_ratio = 0.0;  // smallest / largest Gramian singular value
};

/// Linear independence of the given functions restricted to the union of the
/// given elements, decided from the scaled Gramian with relative threshold 1e-10.
OverloadCheck verify_non_overloaded(const ThbSpace& space, std::span<const int> elements,
                                    std::span<const int> functions);
/// Same check for all functions that are nonzero on the elements.
OverloadCheck verify_non_overloaded(const ThbSpace& space, std::span<const int> elements);

/// Local L2 projection on one macro-element; coefficients follow member.functions.
Vector local_l2_project(const ThbSpace& space, const MacroElement& member, const Field& f,
                        int order = 0);

/// Weights integral_E T_j / integral_Omega T_j over the members E on which T_j is nonzero.
std::vector<std::pair<int, double>> smoothing_weights(const ThbSpace& space,
                                                      const ProjectorPartition& partition, int j);

struct Projection {
  Vector coefficients;
  ProjectorPartition partition;
};

/// Local projection onto the hierarchical space: local fits on the partition,
/// blended with the smoothing weights. order <= 0 selects max(p) + 1 points.
Projection bezier_project(const ThbSpace& space, const Field& f, int order = 0);
Projection bezier_project(const ThbSpace& space, const ProjectorPartition& partition, const Field& f,
                          int order = 0);

struct SupportExtension {
  std::vector<int> members;  // indices into partition.members
  Point lo{0, 0, 0};
  Point hi{1, 1, 1};  // bounding box of the member closures
};

/// Union of the members that influence the projection on active element e.
SupportExtension support_extension(const ThbSpace& space, const ProjectorPartition& partition, int e);

struct ErrorOptions {
  int quad_order = 0;  // <= 0: max(p) + 3
  int samples = 0;     // <= 0: 2 max(p) + 3 per direction
};

struct ErrorReport {
  std::vector<double> element_l2;    // ||f - u||_{L2(e)}
  std::vector<double> element_rms;   // ||f - u||_{L2(e)} / |e|^{1/2}
  std::vector<double> element_linf;  // sampled max |f - u| on e
  std::vector<double> element_h1;    // |f - u|_{H1(e)}, when f has a gradient
  double l2 = 0.0;
  double h1 = 0.0;
  double linf = 0.0;
  double max_element_l2 = 0.0;
  double max_element_rms = 0.0;
};

ErrorReport error_report(const ThbSpace& space, const Field& f, const Vector& coefficients,
                         const ErrorOptions& options = {});

/// Per-element integrals of the element's functions (aligned with element_functions).
Vector element_integrals(const ThbSpace& space, int e);

}  // namespace thbq
