#pragma once

#include <functional>

#include "thbq/multi_index.hpp"

namespace thbq {

/// Scalar function on the parameter domain with optional derivatives.
struct Field {
  std::function<double(const Point&)> value;
  std::function<Point(const Point&)> gradient;    // may be empty
  std::function<double(const Point&)> laplacian;  // may be empty
};

/// prod_d sin(k pi x_d) over the first dim directions.
Field sine_product(int dim, double k = 1.0);

/// Sharp ring 1 - tanh((|y| - 0.3) / (0.05 sqrt 2)) with y = -1 + 2x, i.e. the
/// ring on [-1, 1]^dim pulled back to the unit cube.
Field tanh_ring(int dim);

/// Radial front atan(alpha (r - r0)) around center c (two dimensions).
Field arctan_front(double alpha, double r0, double cx, double cy);

/// Polynomial prod_d x_d^k (for exactness checks).
Field monomial(int dim, int k);

}  // namespace thbq
