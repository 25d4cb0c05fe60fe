#include "thbq/bezier_projection.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <Eigen/Eigenvalues>

#include "thbq/error.hpp"

namespace thbq {

namespace {

int default_order(const ThbSpace& space) {
  int p = 0;
  for (int d = 0; d < space.dim(); ++d) p = std::max(p, space.degree()[d]);
  return p + 1;
}

// Active element ids inside box b (recursing through refined elements).
void collect_elements(const ThbSpace& space, int level, const Ivec& e, std::vector<int>& out) {
  const DomainHierarchy& h = space.hierarchy();
  if (!h.refined(level, e)) {
    const int id = space.find_element({level, e});
    if (id >= 0) out.push_back(id);
    return;
  }
  for_each_index(h.children(e), [&](const Ivec& c) { collect_elements(space, level + 1, c, out); });
}

std::vector<int> functions_on(const ThbSpace& space, std::span<const int> elements) {
  std::vector<int> f;
  for (int e : elements) {
    auto fe = space.element_functions(e);
    f.insert(f.end(), fe.begin(), fe.end());
  }
  std::sort(f.begin(), f.end());
  f.erase(std::unique(f.begin(), f.end()), f.end());
  return f;
}

// Gramian of `functions` over `elements`; duplicates in `functions` are kept.
DenseMatrix gramian(const ThbSpace& space, std::span<const int> elements, std::span<const int> functions,
                    int order) {
  const int n = int(functions.size());
  DenseMatrix g = DenseMatrix::Zero(n, n);
  for (int e : elements) {
    const ElementPoints pts = space.gauss_points(e, order);
    const DenseMatrix v = space.function_values(e, pts);
    const auto fe = space.element_functions(e);
    // Rows of v for every requested function (zero rows if absent).
    DenseMatrix sel = DenseMatrix::Zero(n, v.cols());
    for (int i = 0; i < n; ++i) {
      auto it = std::lower_bound(fe.begin(), fe.end(), functions[i]);
      if (it != fe.end() && *it == functions[i]) sel.row(i) = v.row(int(it - fe.begin()));
    }
    Vector w(v.cols());
    for (int q = 0; q < pts.size(); ++q) w(q) = pts.weight(q);
    g.noalias() += sel * w.asDiagonal() * sel.transpose();
  }
  return g;
}

}  // namespace

ProjectorPartition make_partition(const ThbSpace& space) {
  const Ivec p = space.degree();
  Ivec q{1, 1, 1};
  for (int d = 0; d < space.dim(); ++d) {
    require(p[d] >= 1, "make_partition: degree must be at least one");
    q[d] = p[d];
  }
  const QBoxMesh mesh = classify(space.hierarchy(), q);
  const DomainHierarchy& h = mesh.hierarchy();
  ProjectorPartition part;
  part.member_of_element.assign(space.num_elements(), -1);
  part.members_of_function.assign(space.num_functions(), {});
  for (const QBoxRecord& r : mesh.boxes()) {
    if (!r.well_behaved && !r.regular) continue;
    MacroElement m;
    m.box = r.id;
    m.well_behaved = r.well_behaved;
    for_each_index(h.box_elements(r.id), [&](const Ivec& e) { collect_elements(space, r.id.level, e, m.elements); });
    std::sort(m.elements.begin(), m.elements.end());
    m.functions = functions_on(space, m.elements);
    const int id = int(part.members.size());
    for (int e : m.elements) {
      require(part.member_of_element[e] < 0, "make_partition: element covered twice");
      part.member_of_element[e] = id;
    }
    for (int f : m.functions) part.members_of_function[f].push_back(id);
    part.members.push_back(std::move(m));
  }
  for (int e = 0; e < space.num_elements(); ++e)
    require(part.member_of_element[e] >= 0, "make_partition: element not covered");
  return part;
}

OverloadCheck verify_non_overloaded(const ThbSpace& space, std::span<const int> elements,
                                    std::span<const int> functions) {
  OverloadCheck r;
  r.functions = int(functions.size());
  if (functions.empty()) {
    r.non_overloaded = true;
    return r;
  }
  DenseMatrix g = gramian(space, elements, functions, default_order(space));
  Vector s(g.rows());
  for (int i = 0; i < g.rows(); ++i) s(i) = g(i, i) > 0 ? 1.0 / std::sqrt(g(i, i)) : 0.0;
  g = s.asDiagonal() * g * s.asDiagonal();
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(g, Eigen::EigenvaluesOnly);
  const Vector ev = es.eigenvalues().cwiseAbs();
  const double top = ev.maxCoeff();
  for (int i = 0; i < ev.size(); ++i)
    if (top > 0 && ev(i) > 1e-10 * top) ++r.rank;
  r.min_ratio = top > 0 ? ev.minCoeff() / top : 0.0;
  r.non_overloaded = r.rank == r.functions;
  return r;
}

OverloadCheck verify_non_overloaded(const ThbSpace& space, std::span<const int> elements) {
  const std::vector<int> f = functions_on(space, elements);
  return verify_non_overloaded(space, elements, f);
}

Vector local_l2_project(const ThbSpace& space, const MacroElement& member, const Field& f, int order) {
  if (order <= 0) order = default_order(space);
  const int n = int(member.functions.size());
  struct Block {
    std::vector<int> pos;  // position of each element function in member.functions
    DenseMatrix v;
    Vector w, fq;
  };
  std::vector<Block> blocks;
  blocks.reserve(member.elements.size());
  DenseMatrix g = DenseMatrix::Zero(n, n);
  for (int e : member.elements) {
    const ElementPoints pts = space.gauss_points(e, order);
    Block blk;
    blk.v = space.function_values(e, pts);
    const auto fe = space.element_functions(e);
    blk.pos.resize(fe.size());
    for (std::size_t k = 0; k < fe.size(); ++k)
      blk.pos[k] = int(std::lower_bound(member.functions.begin(), member.functions.end(), fe[k]) -
                       member.functions.begin());
    blk.w.resize(pts.size());
    blk.fq.resize(pts.size());
    for (int q = 0; q < pts.size(); ++q) {
      blk.w(q) = pts.weight(q);
      blk.fq(q) = f.value(pts.point(q));
    }
    const DenseMatrix ge = blk.v * blk.w.asDiagonal() * blk.v.transpose();
    for (std::size_t a = 0; a < fe.size(); ++a)
      for (std::size_t c = 0; c < fe.size(); ++c) g(blk.pos[a], blk.pos[c]) += ge(int(a), int(c));
    blocks.push_back(std::move(blk));
  }
  // Symmetric diagonal scaling keeps the pivot test independent of function size.
  Vector s(n);
  for (int i = 0; i < n; ++i) {
    if (!(g(i, i) > 0)) throw NumericalFault("local_l2_project: function vanishes on macro-element");
    s(i) = 1.0 / std::sqrt(g(i, i));
  }
  const DenseMatrix gs = s.asDiagonal() * g * s.asDiagonal();
  // Right-hand side V W (f - V^T x); with x = 0 this is the plain normal equation.
  auto rhs = [&](const Vector& x) {
    Vector b = Vector::Zero(n);
    for (const Block& blk : blocks) {
      Vector xl(Eigen::Index(blk.pos.size()));
      for (std::size_t k = 0; k < blk.pos.size(); ++k) xl(int(k)) = x(blk.pos[k]);
      const Vector r = blk.fq - blk.v.transpose() * xl;
      const Vector be = blk.v * blk.w.cwiseProduct(r);
      for (std::size_t k = 0; k < blk.pos.size(); ++k) b(blk.pos[k]) += be(int(k));
    }
    return Vector(s.asDiagonal() * b);
  };
  Vector x = s.asDiagonal() * cholesky_solve(gs, rhs(Vector::Zero(n)));
  // Two correction sweeps with the residual taken at the quadrature points
  // (corrected semi-normal equations); they remove the Gramian's conditioning
  // from the coefficient error.
  for (int it = 0; it < 2; ++it) x += s.asDiagonal() * cholesky_solve(gs, rhs(x));
  return x;
}

Vector element_integrals(const ThbSpace& space, int e) {
  const ElementPoints pts = space.gauss_points(e, default_order(space));
  const DenseMatrix v = space.function_values(e, pts);
  Vector w(pts.size());
  for (int q = 0; q < pts.size(); ++q) w(q) = pts.weight(q);
  return v * w;
}

std::vector<std::pair<int, double>> smoothing_weights(const ThbSpace& space,
                                                      const ProjectorPartition& partition, int j) {
  std::vector<std::pair<int, double>> out;
  const double total = space.integrals()[j];
  for (int m : partition.members_of_function[j]) {
    double s = 0.0;
    for (int e : partition.members[m].elements) {
      const auto fe = space.element_functions(e);
      auto it = std::lower_bound(fe.begin(), fe.end(), j);
      if (it == fe.end() || *it != j) continue;
      s += element_integrals(space, e)(int(it - fe.begin()));
    }
    out.emplace_back(m, s / total);
  }
  return out;
}

Projection bezier_project(const ThbSpace& space, const ProjectorPartition& partition, const Field& f,
                          int order) {
  Projection res;
  res.partition = partition;
  res.coefficients = Vector::Zero(space.num_functions());
  const std::vector<double>& total = space.integrals();
  for (const MacroElement& m : partition.members) {
    const Vector c = local_l2_project(space, m, f, order);
    // Integrals over the member of each of its functions.
    Vector part = Vector::Zero(Eigen::Index(m.functions.size()));
    for (int e : m.elements) {
      const Vector ie = element_integrals(space, e);
      const auto fe = space.element_functions(e);
      for (std::size_t k = 0; k < fe.size(); ++k) {
        const auto idx = std::lower_bound(m.functions.begin(), m.functions.end(), fe[k]) - m.functions.begin();
        part(idx) += ie(int(k));
      }
    }
    for (std::size_t k = 0; k < m.functions.size(); ++k) {
      const int j = m.functions[k];
      res.coefficients(j) += part(int(k)) / total[j] * c(int(k));
    }
  }
  return res;
}

Projection bezier_project(const ThbSpace& space, const Field& f, int order) {
  return bezier_project(space, make_partition(space), f, order);
}

SupportExtension support_extension(const ThbSpace& space, const ProjectorPartition& partition, int e) {
  SupportExtension ext;
  const MacroElement& own = partition.members[partition.member_of_element[e]];
  std::vector<int> ms;
  for (int j : own.functions)
    ms.insert(ms.end(), partition.members_of_function[j].begin(), partition.members_of_function[j].end());
  std::sort(ms.begin(), ms.end());
  ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
  ext.members = ms;
  ext.lo = {1, 1, 1};
  ext.hi = {0, 0, 0};
  for (int d = space.dim(); d < kMaxDim; ++d) ext.lo[d] = 0, ext.hi[d] = 1;
  for (int m : ms)
    for (int el : partition.members[m].elements) {
      const Point lo = space.element_lo(el), hi = space.element_hi(el);
      for (int d = 0; d < space.dim(); ++d) {
        ext.lo[d] = std::min(ext.lo[d], lo[d]);
        ext.hi[d] = std::max(ext.hi[d], hi[d]);
      }
    }
  return ext;
}

ErrorReport error_report(const ThbSpace& space, const Field& f, const Vector& coefficients,
                         const ErrorOptions& options) {
  require(coefficients.size() == space.num_functions(), "error_report: wrong coefficient count");
  int p = 0;
  for (int d = 0; d < space.dim(); ++d) p = std::max(p, space.degree()[d]);
  const int order = options.quad_order > 0 ? options.quad_order : p + 3;
  const int ns = options.samples > 0 ? options.samples : 2 * p + 3;
  const bool grad = bool(f.gradient);
  const int ne = space.num_elements();
  ErrorReport r;
  r.element_l2.assign(ne, 0.0);
  r.element_rms.assign(ne, 0.0);
  r.element_linf.assign(ne, 0.0);
  if (grad) r.element_h1.assign(ne, 0.0);
  double l2 = 0.0, h1 = 0.0;
  for (int e = 0; e < ne; ++e) {
    const auto fe = space.element_functions(e);
    Vector c(Eigen::Index(fe.size()));
    for (std::size_t k = 0; k < fe.size(); ++k) c(int(k)) = coefficients(fe[k]);
    const DenseMatrix op = space.element_operator(e);
    const Vector lc = op.transpose() * c;  // coefficients on local B-splines

    const ElementPoints qp = space.gauss_points(e, order);
    const Vector u = space.local_values(e, qp).transpose() * lc;
    std::array<Vector, kMaxDim> du;
    if (grad)
      for (int d = 0; d < space.dim(); ++d) {
        Ivec dv{0, 0, 0};
        dv[d] = 1;
        du[d] = space.local_values(e, qp, dv).transpose() * lc;
      }
    double el2 = 0.0, eh1 = 0.0;
    for (int q = 0; q < qp.size(); ++q) {
      const Point x = qp.point(q);
      const double w = qp.weight(q);
      const double diff = f.value(x) - u(q);
      el2 += w * diff * diff;
      if (grad) {
        const Point g = f.gradient(x);
        for (int d = 0; d < space.dim(); ++d) eh1 += w * (g[d] - du[d](q)) * (g[d] - du[d](q));
      }
    }
    const ElementPoints sp = space.sample_points(e, ns);
    const Vector us = space.local_values(e, sp).transpose() * lc;
    double linf = 0.0;
    for (int q = 0; q < sp.size(); ++q) linf = std::max(linf, std::abs(f.value(sp.point(q)) - us(q)));
    r.element_l2[e] = std::sqrt(el2);
    r.element_rms[e] = std::sqrt(el2 / space.element_volume(e));
    r.element_linf[e] = linf;
    if (grad) r.element_h1[e] = std::sqrt(eh1);
    l2 += el2;
    h1 += eh1;
    r.linf = std::max(r.linf, linf);
    r.max_element_l2 = std::max(r.max_element_l2, r.element_l2[e]);
    r.max_element_rms = std::max(r.max_element_rms, r.element_rms[e]);
  }
  r.l2 = std::sqrt(l2);
  r.h1 = std::sqrt(h1);
  return r;
}

}  // namespace thbq
