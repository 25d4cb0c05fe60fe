#include "thbq/field.hpp"

#include <cmath>
#include <numbers>

namespace thbq {

Field sine_product(int dim, double k) {
  const double w = k * std::numbers::pi;
  Field f;
  f.value = [dim, w](const Point& x) {
    double v = 1.0;
    for (int d = 0; d < dim; ++d) v *= std::sin(w * x[d]);
    return v;
  };
  f.gradient = [dim, w](const Point& x) {
    Point g{0, 0, 0};
    for (int d = 0; d < dim; ++d) {
      double v = w * std::cos(w * x[d]);
      for (int e = 0; e < dim; ++e)
        if (e != d) v *= std::sin(w * x[e]);
      g[d] = v;
    }
    return g;
  };
  f.laplacian = [dim, w](const Point& x) {
    double v = 1.0;
    for (int d = 0; d < dim; ++d) v *= std::sin(w * x[d]);
    return -dim * w * w * v;
  };
  return f;
}

Field tanh_ring(int dim) {
  const double width = 0.05 * std::sqrt(2.0);
  Field f;
  auto radius = [dim](const Point& x) {
    double r2 = 0.0;
    for (int d = 0; d < dim; ++d) {
      const double y = -1.0 + 2.0 * x[d];
      r2 += y * y;
    }
    return std::sqrt(r2);
  };
  f.value = [radius, width](const Point& x) { return 1.0 - std::tanh((radius(x) - 0.3) / width); };
  f.gradient = [dim, radius, width](const Point& x) {
    const double r = radius(x);
    const double t = std::tanh((r - 0.3) / width);
    const double dr = -(1.0 - t * t) / width;
    Point g{0, 0, 0};
    if (r == 0.0) return g;
    for (int d = 0; d < dim; ++d) g[d] = dr * (-1.0 + 2.0 * x[d]) / r * 2.0;
    return g;
  };
  return f;
}

Field arctan_front(double alpha, double r0, double cx, double cy) {
  Field f;
  f.value = [=](const Point& x) {
    const double r = std::hypot(x[0] - cx, x[1] - cy);
    return std::atan(alpha * (r - r0));
  };
  f.gradient = [=](const Point& x) {
    const double dx = x[0] - cx, dy = x[1] - cy;
    const double r = std::hypot(dx, dy);
    const double s = alpha * (r - r0);
    const double du = alpha / (1.0 + s * s);
    return Point{du * dx / r, du * dy / r, 0.0};
  };
  f.laplacian = [=](const Point& x) {
    const double r = std::hypot(x[0] - cx, x[1] - cy);
    const double s = alpha * (r - r0);
    const double den = 1.0 + s * s;
    const double du = alpha / den;
    const double ddu = -2.0 * alpha * alpha * alpha * (r - r0) / (den * den);
    return ddu + du / r;
  };
  return f;
}

Field monomial(int dim, int k) {
  Field f;
  f.value = [dim, k](const Point& x) {
    double v = 1.0;
    for (int d = 0; d < dim; ++d) v *= std::pow(x[d], k);
    return v;
  };
  f.gradient = [dim, k](const Point& x) {
    Point g{0, 0, 0};
    for (int d = 0; d < dim; ++d) {
      double v = k == 0 ? 0.0 : k * std::pow(x[d], k - 1);
      for (int e = 0; e < dim; ++e)
        if (e != d) v *= std::pow(x[e], k);
      g[d] = v;
    }
    return g;
  };
  return f;
}

}  // namespace thbq
