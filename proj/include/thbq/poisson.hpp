#pragma once

#include <memory>
#include <vector>

#include "thbq/adaptive.hpp"
#include "thbq/field.hpp"
#include "thbq/thb_space.hpp"

namespace thbq {

struct PoissonInfo {
  std::vector<int> boundary;  // functions with a nonzero trace on the boundary
  double residual = 0.0;      // relative residual of the interior system
};

/// Galerkin solution of Delta u = f on the unit square with u = g on the
/// boundary. Boundary functions take the boundary L2 projection of g; the
/// remaining coefficients solve the stiffness system. quad_order <= 0
/// selects max(p) + 1 points per direction.
Vector poisson_solve(const ThbSpace& space, const Field& f, const Field& g, int quad_order = 0,
                     PoissonInfo* info = nullptr);

/// h_e^2 * integral_e (f - Delta u_h)^2 per active element, h_e the element diameter.
std::vector<double> residual_element_estimator(const ThbSpace& space, const Vector& u, const Field& f,
                                               int quad_order = 0);
/// Per active q-box of the space's hierarchy, the square root of the summed
/// element contributions.
IndicatorField residual_estimator(const ThbSpace& space, const Vector& u, const Field& f,
                                  int quad_order = 0);

struct PoissonErrors {
  double l2 = 0.0;
  double h1 = 0.0;  // H1 seminorm
};

/// Errors against an exact solution with value and gradient.
PoissonErrors poisson_errors(const ThbSpace& space, const Vector& u, const Field& exact,
                             int quad_order = 0);

/// Adaptive Poisson solve driven by the residual estimator; the trace records
/// L2 and sampled max errors against `exact` and stops once the largest box
/// indicator is below the tolerance.
Trace adapt_poisson(std::shared_ptr<const LevelSequence> levels, const DomainHierarchy& initial,
                    const Field& exact, const AdaptiveConfig& cfg, const StepObserver& observer = {});

}  // namespace thbq
