#include "thbq/derham.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "thbq/error.hpp"

namespace thbq {

namespace {

// One term of a differential operator: component `dst` of form k+1 receives
// sign * d/dx_dir of component `src` of form k.
struct Term {
  int src, dst, dir;
  double sign;
};

std::vector<std::vector<Term>> operators(int dim) {
  if (dim == 2)
    return {
        {{0, 0, 1, 1.0}, {0, 1, 0, -1.0}},  // rot
        {{0, 0, 0, 1.0}, {1, 0, 1, 1.0}},   // div
    };
  return {
      {{0, 0, 0, 1.0}, {0, 1, 1, 1.0}, {0, 2, 2, 1.0}},  // grad
      {{2, 0, 1, 1.0}, {1, 0, 2, -1.0}, {0, 1, 2, 1.0},
       {2, 1, 0, -1.0}, {1, 2, 0, 1.0}, {0, 2, 1, -1.0}},  // curl
      {{0, 0, 0, 1.0}, {1, 0, 1, 1.0}, {2, 0, 2, 1.0}},    // div
  };
}

// Degrees of the components of form k.
std::vector<Ivec> form_degrees(int dim, const Ivec& p, int k) {
  auto reduce = [&](std::initializer_list<int> dirs) {
    Ivec q = p;
    for (int d : dirs) q[d] -= 1;
    return q;
  };
  if (dim == 2) {
    if (k == 0) return {p};
    if (k == 1) return {reduce({1}), reduce({0})};
    return {reduce({0, 1})};
  }
  if (k == 0) return {p};
  if (k == 1) return {reduce({0}), reduce({1}), reduce({2})};
  if (k == 2) return {reduce({1, 2}), reduce({0, 2}), reduce({0, 1})};
  return {reduce({0, 1, 2})};
}

// Unit columns; columns that are zero up to rounding (an exactly vanishing
// derivative) are set to zero instead of amplifying the noise.
Eigen::SparseMatrix<double> normalize_columns(const Eigen::SparseMatrix<double>& a) {
  Vector n(a.cols());
  for (int j = 0; j < a.cols(); ++j) n(j) = a.col(j).norm();
  const double top = n.size() ? n.maxCoeff() : 0.0;
  Vector scale(a.cols());
  for (int j = 0; j < a.cols(); ++j) scale(j) = n(j) > 1e-11 * top ? 1.0 / n(j) : 0.0;
  Eigen::SparseMatrix<double> r = a * scale.asDiagonal();
  r.prune(0.0);
  return r;
}

bool closures_meet_in_facet(const IndexBox& a, const IndexBox& b, int dim) {
  int degenerate = 0;
  for (int d = 0; d < dim; ++d) {
    const int lo = std::max(a.lo[d], b.lo[d]);
    const int hi = std::min(a.hi[d], b.hi[d]);
    if (hi < lo) return false;
    if (hi == lo) ++degenerate;
  }
  return degenerate <= 1;
}

// Monotone lattice path from s1 to s2 through members of `in`.
bool monotone_path_exists(const std::set<Ivec>& in, const Ivec& s1, const Ivec& s2) {
  Ivec ext, step;
  for (int d = 0; d < kMaxDim; ++d) {
    ext[d] = std::abs(s2[d] - s1[d]) + 1;
    step[d] = s2[d] >= s1[d] ? 1 : -1;
  }
  const GridShape g{ext};
  std::vector<char> reach(std::size_t(g.size()), 0);
  for_each_index(g.box(), [&](const Ivec& o) {
    Ivec t;
    for (int d = 0; d < kMaxDim; ++d) t[d] = s1[d] + step[d] * o[d];
    if (!in.count(t)) return;
    bool ok = o == Ivec{0, 0, 0};
    for (int d = 0; d < kMaxDim && !ok; ++d) {
      if (o[d] == 0) continue;
      Ivec prev = o;
      --prev[d];
      ok = reach[std::size_t(g.flat(prev))];
    }
    reach[std::size_t(g.flat(o))] = ok;
  });
  Ivec last;
  for (int d = 0; d < kMaxDim; ++d) last[d] = ext[d] - 1;
  return reach[std::size_t(g.flat(last))];
}

// Max relative least-squares residual of the columns of `images` in the span of
// `basis`. Each column is first fitted with the basis columns that share a row
// with it (rows restricted to where those columns live), which bounds the
// global residual from above; columns where that bound exceeds 1e-10 are
// refitted against the whole basis.
double containment_residual(const Eigen::SparseMatrix<double>& basis, const Eigen::SparseMatrix<double>& images) {
  const Eigen::SparseMatrix<double, Eigen::RowMajor> basis_rows(basis);
  double top = 0.0;
  for (int j = 0; j < images.cols(); ++j) top = std::max(top, images.col(j).norm());
  double worst = 0.0;
  std::vector<int> hard;
  for (int j = 0; j < images.cols(); ++j) {
    const double n = images.col(j).norm();
    if (!(n > 1e-11 * top)) continue;
    std::set<int> cols;
    for (Eigen::SparseMatrix<double>::InnerIterator it(images, j); it; ++it)
      for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator jt(basis_rows, it.row()); jt; ++jt)
        cols.insert(int(jt.col()));
    std::set<int> rows;
    for (Eigen::SparseMatrix<double>::InnerIterator it(images, j); it; ++it) rows.insert(int(it.row()));
    for (int c : cols)
      for (Eigen::SparseMatrix<double>::InnerIterator it(basis, c); it; ++it) rows.insert(int(it.row()));
    std::vector<int> rv(rows.begin(), rows.end());
    auto local_row = [&](int row) { return int(std::lower_bound(rv.begin(), rv.end(), row) - rv.begin()); };
    DenseMatrix a = DenseMatrix::Zero(int(rv.size()), int(cols.size()));
    Vector b = Vector::Zero(int(rv.size()));
    int k = 0;
    for (int c : cols) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(basis, c); it; ++it) a(local_row(int(it.row())), k) = it.value();
      ++k;
    }
    for (Eigen::SparseMatrix<double>::InnerIterator it(images, j); it; ++it) b(local_row(int(it.row()))) = it.value();
    const double res = cols.empty() ? 1.0 : (b - a * a.colPivHouseholderQr().solve(b)).norm() / n;
    if (res > 1e-10)
      hard.push_back(j);
    else
      worst = std::max(worst, res);
  }
  if (!hard.empty()) {
    const DenseMatrix a(basis);
    const Eigen::ColPivHouseholderQR<DenseMatrix> qr(a);
    for (int j : hard) {
      const Vector b(images.col(j));
      worst = std::max(worst, (b - a * qr.solve(b)).norm() / b.norm());
    }
  }
  return worst;
}

}  // namespace

int ComplexSpaces::form_dim(int k) const {
  int n = 0;
  for (const ThbSpace& s : forms[k]) n += s.num_functions();
  return n;
}

int ComplexSpaces::total_dofs() const {
  int n = 0;
  for (int k = 0; k < int(forms.size()); ++k) n += form_dim(k);
  return n;
}

ComplexSpaces build_complex(const DomainHierarchy& h, const Ivec& degree, int multiplicity,
                            bool require_boxes) {
  const int dim = h.dim();
  require(dim == 2 || dim == 3, "build_complex: dimension must be 2 or 3");
  int pmin = degree[0];
  for (int d = 0; d < dim; ++d) {
    require(degree[d] >= 1, "build_complex: degree must be at least one");
    require(!require_boxes || h.q()[d] == degree[d] + 1, "build_complex: hierarchy must consist of (p+1)-boxes");
    pmin = std::min(pmin, degree[d]);
  }
  require(multiplicity >= 1 && multiplicity <= pmin,
          "build_complex: multiplicity must lie in [1, min degree]");
  ComplexSpaces cs;
  cs.dim = dim;
  cs.degree = degree;
  for (int d = dim; d < kMaxDim; ++d) cs.degree[d] = 0;
  cs.multiplicity = multiplicity;
  const int nlev = std::max(1, h.num_levels());
  for (int k = 0; k <= dim; ++k) {
    std::vector<ThbSpace> comps;
    for (const Ivec& p : form_degrees(dim, cs.degree, k)) {
      Ivec m{1, 1, 1};
      for (int d = 0; d < dim; ++d) m[d] = multiplicity;
      comps.emplace_back(make_levels(dim, h.level0_elements(), p, m, nlev), h);
    }
    cs.forms.push_back(std::move(comps));
  }
  return cs;
}

ComplexSamples sample_complex(const ComplexSpaces& cs) {
  const int dim = cs.dim;
  int pmax = 0;
  for (int d = 0; d < dim; ++d) pmax = std::max(pmax, cs.degree[d]);
  const ThbSpace& ref = cs.forms[0][0];
  const int ne = ref.num_elements();
  ComplexSamples out;
  out.points_per_element = 1;
  for (int d = 0; d < dim; ++d) out.points_per_element *= pmax + 1;
  const int q = out.points_per_element;
  const auto ops = operators(dim);
  const std::size_t nf = cs.forms.size();

  std::vector<std::vector<int>> offsets(nf);
  std::vector<int> cols(nf);
  for (std::size_t k = 0; k < nf; ++k) {
    for (const ThbSpace& s : cs.forms[k]) {
      require(s.num_elements() == ne, "sample_complex: spaces disagree on the mesh");
      offsets[k].push_back(cols[k]);
      cols[k] += s.num_functions();
    }
  }
  using T = Eigen::Triplet<double>;
  std::vector<std::vector<T>> st(nf), it(nf);
  for (int e = 0; e < ne; ++e) {
    const ElementPoints pts = ref.gauss_points(e, pmax + 1);
    for (std::size_t k = 0; k < nf; ++k) {
      for (std::size_t c = 0; c < cs.forms[k].size(); ++c) {
        const ThbSpace& s = cs.forms[k][c];
        const auto fe = s.element_functions(e);
        const DenseMatrix v = s.function_values(e, pts);
        const int row0 = (int(c) * ne + e) * q;
        for (std::size_t i = 0; i < fe.size(); ++i)
          for (int j = 0; j < q; ++j) st[k].emplace_back(row0 + j, offsets[k][c] + fe[i], v(int(i), j));
      }
      if (k + 1 == nf) continue;
      for (const Term& t : ops[k]) {
        const ThbSpace& s = cs.forms[k][t.src];
        const auto fe = s.element_functions(e);
        Ivec dv{0, 0, 0};
        dv[t.dir] = 1;
        const DenseMatrix v = s.function_values(e, pts, dv);
        const int row0 = (t.dst * ne + e) * q;
        for (std::size_t i = 0; i < fe.size(); ++i)
          for (int j = 0; j < q; ++j) it[k].emplace_back(row0 + j, offsets[k][t.src] + fe[i], t.sign * v(int(i), j));
      }
    }
  }
  for (std::size_t k = 0; k < nf; ++k) {
    Eigen::SparseMatrix<double> a(int(cs.forms[k].size()) * ne * q, cols[k]);
    a.setFromTriplets(st[k].begin(), st[k].end());
    out.samples.push_back(std::move(a));
    if (k + 1 < nf) {
      Eigen::SparseMatrix<double> b(int(cs.forms[k + 1].size()) * ne * q, cols[k]);
      b.setFromTriplets(it[k].begin(), it[k].end());
      b.prune(0.0);
      out.images.push_back(std::move(b));
    }
  }
  return out;
}

bool ExactnessReport::exact() const {
  if (indeterminate || betti.empty() || betti[0] != 1) return false;
  for (std::size_t k = 1; k < betti.size(); ++k)
    if (betti[k] != 0) return false;
  return containment_residual <= 1e-10;
}

std::string ExactnessReport::verdict() const {
  if (indeterminate) return "indeterminate";
  return exact() ? "exact" : "not-exact";
}

ExactnessReport exactness_report(const ComplexSpaces& cs) {
  if (cs.dim == 3) require(cs.total_dofs() <= 4000, "exactness_report: 3D complex exceeds 4000 dofs");
  ComplexSamples smp = sample_complex(cs);
  const int nf = int(cs.forms.size());
  ExactnessReport r;
  for (int k = 0; k < nf; ++k) r.dims.push_back(cs.form_dim(k));
  for (int k = 0; k + 1 < nf; ++k) {
    const RankInfo ri = svd_rank(normalize_columns(smp.images[k]), 1e-9);
    if (ri.count_in_band(1e-9, 1e-7) > 0) r.indeterminate = true;
    r.ranks.push_back(ri.rank);

    r.containment_residual = std::max(r.containment_residual,
                                      containment_residual(normalize_columns(smp.samples[k + 1]), smp.images[k]));
  }
  for (int k = 0; k < nf; ++k) {
    const int in = k < nf - 1 ? r.ranks[k] : 0;
    const int out = k > 0 ? r.ranks[k - 1] : 0;
    r.betti.push_back(r.dims[k] - in - out);
  }
  return r;
}

bool Grid::contains(const Ivec& t) const {
  for (int d = 0; d < kMaxDim; ++d)
    if (t[d] < lo[d] || t[d] > hi[d]) return false;
  return true;
}

std::optional<Chain> shortest_chain(int dim, const Grid& g1, const Grid& g2, const Ivec& s1, const Ivec& s2) {
  Grid a = g1, b = g2;
  const bool s1_in_1 = g1.contains(s1), s1_in_2 = g2.contains(s1);
  const bool s2_in_1 = g1.contains(s2), s2_in_2 = g2.contains(s2);
  if (!(s1_in_1 || s1_in_2) || !(s2_in_1 || s2_in_2)) return std::nullopt;
  for (int d = 0; d < dim; ++d)
    if (std::max(g1.lo[d], g2.lo[d]) > std::min(g1.hi[d], g2.hi[d])) return std::nullopt;
  if (!s1_in_1) std::swap(a, b);  // s1 in a from here on

  // Meeting point: s1 clamped into the overlap and towards s2; monotone in every direction.
  Ivec m = s1;
  if (!a.contains(s2)) {
    for (int d = 0; d < dim; ++d) {
      const int lo = std::max({std::max(a.lo[d], b.lo[d]), std::min(s1[d], s2[d])});
      const int hi = std::min({std::min(a.hi[d], b.hi[d]), std::max(s1[d], s2[d])});
      m[d] = std::clamp(s1[d], lo, hi);
    }
  } else {
    m = s2;
  }
  Chain c;
  auto walk = [&](Ivec from, const Ivec& to) {
    for (int d = 0; d < dim; ++d)
      while (from[d] != to[d]) {
        from[d] += to[d] > from[d] ? 1 : -1;
        c.nodes.push_back(from);
      }
  };
  c.nodes.push_back(s1);
  walk(s1, m);
  c.switch_index = int(c.nodes.size()) - 1;
  walk(m, s2);
  return c;
}

std::string AssumptionCheck::describe(int dim) const {
  if (pass) return "pass";
  std::ostringstream os;
  if (phi_level < 0) {
    os << "level " << level << ": no shortest chain between " << to_string(a, dim) << " and " << to_string(b, dim);
  } else {
    os << "level " << level << ": function " << to_string(a, dim) << " of degree " << to_string(phi_degree, dim)
       << " at level " << phi_level << " has no covering interior function inside box " << to_string(box_lo, dim)
       << "-" << to_string(box_hi, dim);
  }
  return os.str();
}

std::vector<Ivec> interior_functions(const LevelSequence& levels, const DomainHierarchy& h, int level) {
  std::vector<Ivec> out;
  if (level + 1 >= h.num_levels()) return out;
  const TensorSpace& ts = levels.level(level);
  for_each_index(ts.basis().box(), [&](const Ivec& j) {
    if (h.all_in(level, ts.support(j), level + 1)) out.push_back(j);
  });
  return out;
}

AssumptionCheck check_assumption_3a(const LevelSequence& levels, const DomainHierarchy& h, int level) {
  AssumptionCheck r;
  const int dim = h.dim();
  const std::vector<Ivec> in = interior_functions(levels, h, level);
  const std::set<Ivec> inset(in.begin(), in.end());
  const TensorSpace& ts = levels.level(level);
  for (std::size_t i = 0; i < in.size(); ++i) {
    const IndexBox si = ts.support(in[i]);
    for (std::size_t k = i + 1; k < in.size(); ++k) {
      const IndexBox sk = ts.support(in[k]);
      if (!closures_meet_in_facet(si, sk, dim)) continue;
      ++r.checked;
      if (!monotone_path_exists(inset, in[i], in[k])) {
        r.pass = false;
        r.level = level;
        r.a = in[i];
        r.b = in[k];
        return r;
      }
    }
  }
  return r;
}

AssumptionCheck check_assumption_3b(const LevelSequence& levels, const DomainHierarchy& h, int level) {
  AssumptionCheck r;
  const int dim = h.dim();
  const std::vector<Ivec> in = interior_functions(levels, h, level);
  if (in.empty()) return r;
  require(levels.num_levels() > level + 1, "check_assumption_3b: level sequence too short");
  const TensorSpace& ts = levels.level(level);
  // Interior supports in level + 1 element indices.
  std::vector<IndexBox> box(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) box[i] = h.refine_box_range(ts.support(in[i]), level, level + 1);

  const Ivec p = ts.degree();
  for (int variant = 0; variant < (1 << dim); ++variant) {
    Ivec pt = p;
    for (int d = 0; d < dim; ++d)
      if (variant & (1 << d)) pt[d] -= 1;
    for (int k = level; k <= level + 1; ++k) {
      std::vector<KnotVector> kvs;
      for (int d = 0; d < kMaxDim; ++d) {
        const KnotVector& kv = levels.level(k).direction(d);
        kvs.emplace_back(kv.breakpoints(), pt[d], std::min(kv.multiplicity(), pt[d] + 1));
      }
      const TensorSpace red(kvs);
      for_each_index(red.basis().box(), [&](const Ivec& j) {
        if (!r.pass) return;
        const IndexBox sk = red.support(j);
        if (!h.all_in(k, sk, level + 1)) return;
        const IndexBox phi = h.refine_box_range(sk, k, level + 1);
        std::vector<int> cand, holders;
        for (std::size_t i = 0; i < in.size(); ++i) {
          if (box[i].intersect(phi).empty()) continue;
          cand.push_back(int(i));
          if (box[i].contains(phi)) holders.push_back(int(i));
        }
        auto covers = [&](const std::vector<int>& a) {
          bool all = true;
          for_each_index(phi, [&](const Ivec& e) {
            if (!all) return;
            bool hit = false;
            for (int i : a) hit = hit || box[i].contains(e);
            all = hit;
          });
          return all;
        };
        if (!covers(cand)) return;  // no admissible cover
        ++r.checked;
        // Candidate bounding boxes from the candidates' support faces.
        std::array<std::vector<int>, kMaxDim> los, his;
        for (int d = 0; d < kMaxDim; ++d) {
          for (int i : cand) {
            if (box[i].lo[d] <= phi.lo[d]) los[d].push_back(box[i].lo[d]);
            if (box[i].hi[d] >= phi.hi[d]) his[d].push_back(box[i].hi[d]);
          }
          for (auto* v : {&los[d], &his[d]}) {
            std::sort(v->begin(), v->end());
            v->erase(std::unique(v->begin(), v->end()), v->end());
          }
        }
        std::array<std::size_t, 2 * kMaxDim> pick{};
        while (r.pass) {
          IndexBox bb;
          for (int d = 0; d < kMaxDim; ++d) {
            if (los[d].empty() || his[d].empty()) return;
            bb.lo[d] = los[d][pick[2 * d]];
            bb.hi[d] = his[d][pick[2 * d + 1]];
          }
          bool held = false;
          for (int i : holders) held = held || bb.contains(box[i]);
          if (!held) {
            // Any cover inside bb has its bounding box inside bb, so it fails too.
            std::vector<int> a;
            for (int i : cand)
              if (bb.contains(box[i])) a.push_back(i);
            if (!a.empty() && covers(a)) {
              IndexBox tight = box[a.front()];
              for (int i : a)
                for (int d = 0; d < kMaxDim; ++d) {
                  tight.lo[d] = std::min(tight.lo[d], box[i].lo[d]);
                  tight.hi[d] = std::max(tight.hi[d], box[i].hi[d]);
                }
              r.pass = false;
              r.level = level;
              r.a = j;
              r.phi_degree = pt;
              r.phi_level = k;
              r.box_lo = tight.lo;
              r.box_hi = tight.hi;
              return;
            }
          }
          // Next combination.
          int slot = 0;
          for (; slot < 2 * kMaxDim; ++slot) {
            const auto& v = slot % 2 ? his[slot / 2] : los[slot / 2];
            if (++pick[slot] < v.size()) break;
            pick[slot] = 0;
          }
          if (slot == 2 * kMaxDim) break;
        }
      });
      if (!r.pass) return r;
    }
  }
  return r;
}

AssumptionCheck check_assumption_3a(const LevelSequence& levels, const DomainHierarchy& h) {
  AssumptionCheck total;
  for (int l = 0; l + 1 < h.num_levels(); ++l) {
    AssumptionCheck r = check_assumption_3a(levels, h, l);
    r.checked += total.checked;
    if (!r.pass) return r;
    total = r;
  }
  return total;
}

AssumptionCheck check_assumption_3b(const LevelSequence& levels, const DomainHierarchy& h) {
  AssumptionCheck total;
  for (int l = 0; l + 1 < h.num_levels(); ++l) {
    AssumptionCheck r = check_assumption_3b(levels, h, l);
    r.checked += total.checked;
    if (!r.pass) return r;
    total = r;
  }
  return total;
}

}  // namespace thbq
