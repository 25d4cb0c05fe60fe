#include "thbq/poisson.hpp"

#include <algorithm>
#include <cmath>

#include "thbq/bezier_projection.hpp"
#include "thbq/error.hpp"

namespace thbq {

namespace {

int max_degree(const ThbSpace& space) {
  int p = 0;
  for (int d = 0; d < space.dim(); ++d) p = std::max(p, space.degree()[d]);
  return p;
}

Ivec unit(int d, int k = 1) {
  Ivec v{0, 0, 0};
  v[d] = k;
  return v;
}

double diameter(const ThbSpace& space, int e) {
  const Point lo = space.element_lo(e), hi = space.element_hi(e);
  double s = 0.0;
  for (int d = 0; d < space.dim(); ++d) s += (hi[d] - lo[d]) * (hi[d] - lo[d]);
  return std::sqrt(s);
}

Vector local_coefficients(const ThbSpace& space, int e, const Vector& u) {
  const auto funcs = space.element_functions(e);
  Vector c(funcs.size());
  for (std::size_t a = 0; a < funcs.size(); ++a) c[a] = u[funcs[a]];
  return c;
}

}  // namespace

Vector poisson_solve(const ThbSpace& space, const Field& f, const Field& g, int quad_order,
                     PoissonInfo* info) {
  require(bool(f.value) && bool(g.value), "poisson_solve: source and boundary data are required");
  require(max_degree(space) >= 1, "poisson_solve: degree must be at least 1");
  const int dim = space.dim();
  const int order = quad_order > 0 ? quad_order : max_degree(space) + 1;
  const int n = space.num_functions();

  std::vector<Triplet> stiff, bmass;
  Vector load = Vector::Zero(n), bload = Vector::Zero(n);
  std::vector<char> on_boundary(n, 0);

  for (int e = 0; e < space.num_elements(); ++e) {
    const auto funcs = space.element_functions(e);
    const int nf = int(funcs.size());
    const ElementPoints pts = space.gauss_points(e, order);
    const int nq = pts.size();
    Vector w(nq), fq(nq);
    for (int q = 0; q < nq; ++q) {
      w[q] = pts.weight(q);
      fq[q] = f.value(pts.point(q));
    }
    DenseMatrix k = DenseMatrix::Zero(nf, nf);
    for (int d = 0; d < dim; ++d) {
      const DenseMatrix gd = space.function_values(e, pts, unit(d));
      k.noalias() += gd * w.asDiagonal() * gd.transpose();
    }
    const DenseMatrix v = space.function_values(e, pts);
    const Vector fl = -(v * w.cwiseProduct(fq));
    for (int a = 0; a < nf; ++a) {
      load[funcs[a]] += fl[a];
      for (int b = 0; b < nf; ++b) stiff.push_back({funcs[a], funcs[b], k(a, b)});
    }

    // boundary faces of this element
    const Point lo = space.element_lo(e), hi = space.element_hi(e);
    for (int d = 0; d < dim; ++d) {
      for (int side = 0; side < 2; ++side) {
        const double x = side == 0 ? lo[d] : hi[d];
        if (x != double(side)) continue;
        ElementPoints face = pts;
        face.x[d] = {x};
        face.w[d] = {1.0};
        const DenseMatrix fv = space.function_values(e, face);
        const int nfq = face.size();
        Vector fw(nfq), gq(nfq);
        for (int q = 0; q < nfq; ++q) {
          fw[q] = face.weight(q);
          gq[q] = g.value(face.point(q));
        }
        for (int a = 0; a < nf; ++a)
          if (fv.row(a).cwiseAbs().maxCoeff() > 1e-13) on_boundary[funcs[a]] = 1;
        const DenseMatrix m = fv * fw.asDiagonal() * fv.transpose();
        const Vector gl = fv * fw.cwiseProduct(gq);
        for (int a = 0; a < nf; ++a) {
          bload[funcs[a]] += gl[a];
          for (int b = 0; b < nf; ++b) bmass.push_back({funcs[a], funcs[b], m(a, b)});
        }
      }
    }
  }

  std::vector<int> local(n, -1), boundary, interior;
  for (int i = 0; i < n; ++i) {
    if (on_boundary[i]) {
      local[i] = int(boundary.size());
      boundary.push_back(i);
    } else {
      local[i] = int(interior.size());
      interior.push_back(i);
    }
  }

  Vector u = Vector::Zero(n);
  if (!boundary.empty()) {
    std::vector<Triplet> mbb;
    for (const Triplet& t : bmass)
      if (on_boundary[t.row] && on_boundary[t.col]) mbb.push_back({local[t.row], local[t.col], t.value});
    Vector rhs(boundary.size());
    for (std::size_t i = 0; i < boundary.size(); ++i) rhs[i] = bload[boundary[i]];
    const auto m = SparseMatrix::from_triplets(boundary.size(), boundary.size(), std::move(mbb));
    const Vector ub = sparse_solve(m, rhs);
    for (std::size_t i = 0; i < boundary.size(); ++i) u[boundary[i]] = ub[i];
  }

  double residual = 0.0;
  if (!interior.empty()) {
    std::vector<Triplet> kii;
    Vector rhs(interior.size());
    for (std::size_t i = 0; i < interior.size(); ++i) rhs[i] = load[interior[i]];
    for (const Triplet& t : stiff) {
      if (on_boundary[t.row]) continue;
      if (on_boundary[t.col])
        rhs[local[t.row]] -= t.value * u[t.col];
      else
        kii.push_back({local[t.row], local[t.col], t.value});
    }
    const auto k = SparseMatrix::from_triplets(interior.size(), interior.size(), std::move(kii));
    const Vector ui = sparse_solve(k, rhs);
    const double rn = rhs.norm();
    residual = rn > 0.0 ? (k.multiply(ui) - rhs).norm() / rn : (k.multiply(ui) - rhs).norm();
    for (std::size_t i = 0; i < interior.size(); ++i) u[interior[i]] = ui[i];
  }
  if (info) {
    info->boundary = boundary;
    info->residual = residual;
  }
  return u;
}

std::vector<double> residual_element_estimator(const ThbSpace& space, const Vector& u, const Field& f,
                                               int quad_order) {
  require(bool(f.value), "residual_estimator: source is required");
  require(u.size() == space.num_functions(), "residual_estimator: coefficient size mismatch");
  const int order = quad_order > 0 ? quad_order : max_degree(space) + 3;
  std::vector<double> out(space.num_elements(), 0.0);
  for (int e = 0; e < space.num_elements(); ++e) {
    const ElementPoints pts = space.gauss_points(e, order);
    const Vector c = local_coefficients(space, e, u);
    Vector lap = Vector::Zero(pts.size());
    for (int d = 0; d < space.dim(); ++d)
      lap.noalias() += space.function_values(e, pts, unit(d, 2)).transpose() * c;
    double s = 0.0;
    for (int q = 0; q < pts.size(); ++q) {
      const double r = f.value(pts.point(q)) - lap[q];
      s += pts.weight(q) * r * r;
    }
    const double h = diameter(space, e);
    out[e] = h * h * s;
  }
  return out;
}

IndicatorField residual_estimator(const ThbSpace& space, const Vector& u, const Field& f,
                                  int quad_order) {
  IndicatorField ind = box_sum(space, residual_element_estimator(space, u, f, quad_order));
  for (auto& [b, v] : ind) v = std::sqrt(v);
  return ind;
}

PoissonErrors poisson_errors(const ThbSpace& space, const Vector& u, const Field& exact,
                             int quad_order) {
  require(bool(exact.value) && bool(exact.gradient), "poisson_errors: exact value and gradient required");
  const int order = quad_order > 0 ? quad_order : max_degree(space) + 3;
  double l2 = 0.0, h1 = 0.0;
  for (int e = 0; e < space.num_elements(); ++e) {
    const ElementPoints pts = space.gauss_points(e, order);
    const Vector c = local_coefficients(space, e, u);
    const Vector val = space.function_values(e, pts).transpose() * c;
    std::vector<Vector> grad;
    for (int d = 0; d < space.dim(); ++d)
      grad.push_back(space.function_values(e, pts, unit(d)).transpose() * c);
    for (int q = 0; q < pts.size(); ++q) {
      const Point x = pts.point(q);
      const double w = pts.weight(q);
      const double ev = exact.value(x) - val[q];
      l2 += w * ev * ev;
      const Point gx = exact.gradient(x);
      for (int d = 0; d < space.dim(); ++d) {
        const double eg = gx[d] - grad[d][q];
        h1 += w * eg * eg;
      }
    }
  }
  return {std::sqrt(l2), std::sqrt(h1)};
}

Trace adapt_poisson(std::shared_ptr<const LevelSequence> levels, const DomainHierarchy& initial,
                    const Field& exact, const AdaptiveConfig& cfg, const StepObserver& observer) {
  require(bool(exact.laplacian), "adapt_poisson: the exact solution needs a Laplacian");
  Field f;
  f.value = exact.laplacian;
  auto solve = [&](const ThbSpace& space) { return poisson_solve(space, f, exact); };
  auto estimate = [&](const ThbSpace& space, const Vector& u) {
    Estimate est;
    est.indicators = residual_estimator(space, u, f);
    double sum = 0.0, top = 0.0;
    for (const auto& [b, v] : est.indicators) {
      sum += v * v;
      top = std::max(top, v);
    }
    est.eta_total = std::sqrt(sum);
    est.stop_value = top;
    const ErrorReport err = error_report(space, exact, u);
    est.error_l2 = err.l2;
    est.error_linf = err.linf;
    return est;
  };
  return adapt_loop(std::move(levels), initial, solve, estimate, cfg, observer);
}

}  // namespace thbq
