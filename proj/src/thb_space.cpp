#include "thbq/thb_space.hpp"

#include <algorithm>
#include <tuple>

#include "thbq/error.hpp"

namespace thbq {

namespace {

void merge_sorted(SparseCoeffs& v) {
  std::stable_sort(v.begin(), v.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::size_t w = 0;
  for (std::size_t r = 0; r < v.size();) {
    std::size_t e = r;
    double s = 0.0;
    while (e < v.size() && v[e].first == v[r].first) s += v[e++].second;
    if (s != 0.0) v[w++] = {v[r].first, s};
    r = e;
  }
  v.resize(w);
}

}  // namespace

SparseCoeffs refine_coefficients(const LevelSequence& levels, int level, const SparseCoeffs& c) {
  require(level + 1 < levels.num_levels(), "refine_coefficients: no finer level");
  const GridShape& cg = levels.level(level).basis();
  const GridShape& fg = levels.level(level + 1).basis();
  SparseCoeffs out;
  for (const auto& [flat, v] : c) {
    const Ivec i = cg.unflat(flat);
    const RefinementRow& r0 = levels.rows(level, 0)[i[0]];
    const RefinementRow& r1 = levels.rows(level, 1)[i[1]];
    const RefinementRow& r2 = levels.rows(level, 2)[i[2]];
    for (std::size_t a2 = 0; a2 < r2.w.size(); ++a2)
      for (std::size_t a1 = 0; a1 < r1.w.size(); ++a1)
        for (std::size_t a0 = 0; a0 < r0.w.size(); ++a0) {
          const Ivec f{r0.first + int(a0), r1.first + int(a1), r2.first + int(a2)};
          out.emplace_back(fg.flat(f), v * r0.w[a0] * r1.w[a1] * r2.w[a2]);
        }
  }
  merge_sorted(out);
  return out;
}

SparseCoeffs truncate(const LevelSequence& levels, const DomainHierarchy& h, int level,
                      const SparseCoeffs& c) {
  const TensorSpace& ts = levels.level(level);
  SparseCoeffs out;
  for (const auto& e : c)
    if (!h.all_in(level, ts.support(ts.basis().unflat(e.first)), level)) out.push_back(e);
  return out;
}

Vector truncate(const LevelSequence& levels, const DomainHierarchy& h, int level, const Vector& c) {
  const TensorSpace& ts = levels.level(level);
  require(c.size() == ts.num_basis(), "truncate: coefficient vector has wrong length");
  Vector out = c;
  for (int j = 0; j < ts.num_basis(); ++j)
    if (h.all_in(level, ts.support(ts.basis().unflat(j)), level)) out(j) = 0.0;
  return out;
}

Point ElementPoints::point(int q) const {
  const int n0 = int(x[0].size()), n1 = int(x[1].size());
  return {x[0][q % n0], x[1][(q / n0) % n1], x[2][q / (n0 * n1)]};
}

double ElementPoints::weight(int q) const {
  const int n0 = int(x[0].size()), n1 = int(x[1].size());
  return w[0][q % n0] * w[1][(q / n0) % n1] * w[2][q / (n0 * n1)];
}

ThbSpace::ThbSpace(std::shared_ptr<const LevelSequence> levels, DomainHierarchy hierarchy,
                   BasisKind kind)
    : levels_(std::move(levels)), hierarchy_(std::move(hierarchy)), kind_(kind) {
  require(levels_ != nullptr, "ThbSpace: missing level sequence");
  require(levels_->dim() == hierarchy_.dim(), "ThbSpace: dimension mismatch");
  hierarchy_.validate();
  require(levels_->num_levels() >= hierarchy_.num_levels(),
          "ThbSpace: level sequence is shorter than the hierarchy");
  const GridShape& g0 = levels_->level(0).elements();
  for (int d = 0; d < kMaxDim; ++d)
    require(g0.extent[d] == hierarchy_.element_grid(0).extent[d],
            "ThbSpace: level-0 element counts differ between spaces and hierarchy");
  build_functions();
  build_extraction();
  build_integrals();
}

void ThbSpace::build_functions() {
  const int nl = num_levels();
  function_lookup_.assign(nl, {});
  for (int l = 0; l < nl; ++l) {
    const TensorSpace& ts = levels_->level(l);
    std::vector<std::int64_t> cand;
    if (l == 0) {
      cand.resize(std::size_t(ts.basis().size()));
      for (std::int64_t j = 0; j < ts.basis().size(); ++j) cand[j] = j;
    } else {
      const GridShape gp = hierarchy_.element_grid(l - 1);
      for (std::int64_t pf : hierarchy_.refined_set(l - 1))
        for_each_index(hierarchy_.children(gp.unflat(pf)), [&](const Ivec& c) {
          for_each_index(ts.functions_on(c), [&](const Ivec& j) { cand.push_back(ts.basis().flat(j)); });
        });
      std::sort(cand.begin(), cand.end());
      cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    }
    for (std::int64_t flat : cand) {
      const Ivec j = ts.basis().unflat(flat);
      const IndexBox supp = ts.support(j);
      if (l > 0 && !hierarchy_.all_in(l, supp, l)) continue;
      if (hierarchy_.all_in(l, supp, l + 1)) continue;
      HierarchicalFunction f;
      f.level = l;
      f.index = j;
      f.cascade.push_back({{flat, 1.0}});
      for (int k = l + 1; k < nl; ++k) {
        SparseCoeffs next = refine_coefficients(*levels_, k - 1, f.cascade.back());
        const TensorSpace& fs = levels_->level(k);
        SparseCoeffs kept;
        for (const auto& e : next) {
          const IndexBox s = fs.support(fs.basis().unflat(e.first));
          if (!hierarchy_.any_in(k, s, k)) continue;
          if (kind_ == BasisKind::truncated && hierarchy_.all_in(k, s, k)) continue;
          kept.push_back(e);
        }
        if (kept.empty()) break;
        f.cascade.push_back(std::move(kept));
      }
      function_lookup_[l].emplace_back(flat, int(functions_.size()));
      functions_.push_back(std::move(f));
    }
  }
}

int ThbSpace::find_function(int level, const Ivec& index) const {
  if (level < 0 || level >= int(function_lookup_.size())) return -1;
  const std::int64_t flat = levels_->level(level).basis().flat(index);
  const auto& v = function_lookup_[level];
  auto it = std::lower_bound(v.begin(), v.end(), std::make_pair(flat, -1));
  return (it != v.end() && it->first == flat) ? it->second : -1;
}

int ThbSpace::find_element(const CellId& c) const {
  if (c.level < 0 || c.level >= int(element_flats_.size())) return -1;
  const std::int64_t flat = hierarchy_.element_grid(c.level).flat(c.index);
  const auto& v = element_flats_[c.level];
  auto it = std::lower_bound(v.begin(), v.end(), flat);
  if (it == v.end() || *it != flat) return -1;
  return element_offset_[c.level] + int(it - v.begin());
}

void ThbSpace::build_extraction() {
  elements_ = hierarchy_.active_elements();
  const int nl = num_levels();
  element_flats_.assign(nl, {});
  element_offset_.assign(nl + 1, 0);
  for (const CellId& c : elements_)
    element_flats_[c.level].push_back(hierarchy_.element_grid(c.level).flat(c.index));
  for (int l = 0; l < nl; ++l)
    element_offset_[l + 1] = element_offset_[l] + int(element_flats_[l].size());

  const Ivec p = degree();
  const int nloc = local_count();
  struct Entry {
    int elem, func, local;
    double c;
  };
  std::vector<Entry> entries;
  for (int fi = 0; fi < num_functions(); ++fi) {
    const HierarchicalFunction& f = functions_[fi];
    for (int k = 0; k < int(f.cascade.size()); ++k) {
      const int l = f.level + k;
      const TensorSpace& ts = levels_->level(l);
      for (const auto& [flat, v] : f.cascade[k]) {
        const Ivec j = ts.basis().unflat(flat);
        for_each_index(ts.support(j), [&](const Ivec& e) {
          const int id = find_element({l, e});
          if (id < 0) return;
          const Ivec first = ts.first_basis(e);
          const int local = (j[0] - first[0]) +
                            (p[0] + 1) * ((j[1] - first[1]) + (p[1] + 1) * (j[2] - first[2]));
          entries.push_back({id, fi, local, v});
        });
      }
    }
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return std::tie(a.elem, a.func, a.local) < std::tie(b.elem, b.func, b.local);
  });
  elem_ptr_.assign(num_elements() + 1, 0);
  entry_func_.clear();
  entry_coeff_.clear();
  for (std::size_t r = 0; r < entries.size();) {
    const int elem = entries[r].elem, func = entries[r].func;
    entry_func_.push_back(func);
    entry_coeff_.resize(entry_coeff_.size() + nloc, 0.0);
    double* row = entry_coeff_.data() + entry_coeff_.size() - nloc;
    while (r < entries.size() && entries[r].elem == elem && entries[r].func == func) {
      row[entries[r].local] += entries[r].c;
      ++r;
    }
    ++elem_ptr_[elem + 1];
  }
  for (int e = 0; e < num_elements(); ++e) elem_ptr_[e + 1] += elem_ptr_[e];
}

void ThbSpace::build_integrals() {
  integrals_.assign(num_functions(), 0.0);
  const int nloc = local_count();
  for (int e = 0; e < num_elements(); ++e) {
    const Ivec p = degree();
    int order = 1;
    for (int d = 0; d < dim(); ++d) order = std::max(order, p[d] + 1);
    const ElementPoints pts = gauss_points(e, order);
    const DenseMatrix b = local_values(e, pts);
    Vector ib = Vector::Zero(nloc);
    for (int q = 0; q < pts.size(); ++q) ib += pts.weight(q) * b.col(q);
    const auto funcs = element_functions(e);
    for (std::size_t k = 0; k < funcs.size(); ++k) {
      const double* row = entry_coeff_.data() + std::size_t(elem_ptr_[e] + int(k)) * nloc;
      double s = 0.0;
      for (int a = 0; a < nloc; ++a) s += row[a] * ib(a);
      integrals_[funcs[k]] += s;
    }
  }
}

std::span<const int> ThbSpace::element_functions(int e) const {
  return {entry_func_.data() + elem_ptr_[e], std::size_t(elem_ptr_[e + 1] - elem_ptr_[e])};
}

DenseMatrix ThbSpace::element_operator(int e) const {
  const int nloc = local_count();
  const int nf = elem_ptr_[e + 1] - elem_ptr_[e];
  DenseMatrix c(nf, nloc);
  const double* base = entry_coeff_.data() + std::size_t(elem_ptr_[e]) * nloc;
  for (int i = 0; i < nf; ++i)
    for (int a = 0; a < nloc; ++a) c(i, a) = base[std::size_t(i) * nloc + a];
  return c;
}

Point ThbSpace::element_lo(int e) const {
  return levels_->level(elements_[e].level).element_lo(elements_[e].index);
}

Point ThbSpace::element_hi(int e) const {
  return levels_->level(elements_[e].level).element_hi(elements_[e].index);
}

double ThbSpace::element_volume(int e) const {
  const Point lo = element_lo(e), hi = element_hi(e);
  double v = 1.0;
  for (int d = 0; d < dim(); ++d) v *= hi[d] - lo[d];
  return v;
}

int ThbSpace::locate(const Point& x) const {
  int l = 0;
  Ivec e = levels_->level(0).find_element(x);
  while (hierarchy_.refined(l, e)) {
    ++l;
    e = levels_->level(l).find_element(x);
  }
  return find_element({l, e});
}

ElementPoints ThbSpace::gauss_points(int e, int order) const {
  ElementPoints pts;
  const Point lo = element_lo(e), hi = element_hi(e);
  for (int d = 0; d < kMaxDim; ++d) {
    const GaussRule g = gauss_rule(d < dim() ? order : 1, lo[d], hi[d]);
    pts.x[d] = g.nodes;
    pts.w[d] = g.weights;
  }
  return pts;
}

ElementPoints ThbSpace::sample_points(int e, int n) const {
  require(n >= 2, "sample_points: need at least two points per direction");
  ElementPoints pts;
  const Point lo = element_lo(e), hi = element_hi(e);
  for (int d = 0; d < kMaxDim; ++d) {
    if (d >= dim()) {
      pts.x[d] = {0.5};
      pts.w[d] = {1.0};
      continue;
    }
    for (int i = 0; i < n; ++i) {
      pts.x[d].push_back(i == n - 1 ? hi[d] : lo[d] + (hi[d] - lo[d]) * i / (n - 1));
      pts.w[d].push_back(1.0);
    }
  }
  return pts;
}

DenseMatrix ThbSpace::local_values(int e, const ElementPoints& pts, const Ivec& deriv) const {
  const CellId& c = elements_[e];
  const TensorSpace& ts = levels_->level(c.level);
  std::array<DenseMatrix, kMaxDim> tab;
  std::vector<double> buf;
  for (int d = 0; d < kMaxDim; ++d) {
    const KnotVector& kv = ts.direction(d);
    const int p = kv.degree();
    const int nq = int(pts.x[d].size());
    tab[d].resize(p + 1, nq);
    buf.assign(std::size_t(deriv[d] + 1) * (p + 1), 0.0);
    for (int q = 0; q < nq; ++q) {
      eval_element_basis(kv, c.index[d], pts.x[d][q], deriv[d], buf.data());
      for (int a = 0; a <= p; ++a) tab[d](a, q) = buf[std::size_t(deriv[d]) * (p + 1) + a];
    }
  }
  const int n0 = int(tab[0].rows()), n1 = int(tab[1].rows()), n2 = int(tab[2].rows());
  const int q0 = int(tab[0].cols()), q1 = int(tab[1].cols()), q2 = int(tab[2].cols());
  DenseMatrix out(n0 * n1 * n2, q0 * q1 * q2);
  for (int a2 = 0; a2 < n2; ++a2)
    for (int a1 = 0; a1 < n1; ++a1)
      for (int a0 = 0; a0 < n0; ++a0) {
        const int a = a0 + n0 * (a1 + n1 * a2);
        for (int k2 = 0; k2 < q2; ++k2)
          for (int k1 = 0; k1 < q1; ++k1) {
            const double v12 = tab[1](a1, k1) * tab[2](a2, k2);
            for (int k0 = 0; k0 < q0; ++k0)
              out(a, k0 + q0 * (k1 + q1 * k2)) = tab[0](a0, k0) * v12;
          }
      }
  return out;
}

DenseMatrix ThbSpace::function_values(int e, const ElementPoints& pts, const Ivec& deriv) const {
  return element_operator(e) * local_values(e, pts, deriv);
}

namespace {

ElementPoints single_point(const Point& x) {
  ElementPoints p;
  for (int d = 0; d < kMaxDim; ++d) {
    p.x[d] = {x[d]};
    p.w[d] = {1.0};
  }
  return p;
}

}  // namespace

double ThbSpace::eval(int func, const Point& x, const Ivec& deriv) const {
  const int e = locate(x);
  const auto funcs = element_functions(e);
  auto it = std::lower_bound(funcs.begin(), funcs.end(), func);
  if (it == funcs.end() || *it != func) return 0.0;
  const DenseMatrix b = local_values(e, single_point(x), deriv);
  const int nloc = local_count();
  const double* row = entry_coeff_.data() + std::size_t(elem_ptr_[e] + int(it - funcs.begin())) * nloc;
  double s = 0.0;
  for (int a = 0; a < nloc; ++a) s += row[a] * b(a, 0);
  return s;
}

double ThbSpace::eval_sum(const Vector& c, const Point& x, const Ivec& deriv) const {
  require(c.size() == num_functions(), "eval_sum: coefficient vector has wrong length");
  const int e = locate(x);
  const auto funcs = element_functions(e);
  const DenseMatrix v = function_values(e, single_point(x), deriv);
  double s = 0.0;
  for (std::size_t k = 0; k < funcs.size(); ++k) s += c(funcs[k]) * v(int(k), 0);
  return s;
}

std::pair<int, int> ThbSpace::element_level_range(int e) const {
  const int nloc = local_count();
  int lo = 1 << 30, hi = -1;
  const auto funcs = element_functions(e);
  for (std::size_t k = 0; k < funcs.size(); ++k) {
    const double* row = entry_coeff_.data() + std::size_t(elem_ptr_[e] + int(k)) * nloc;
    bool nz = false;
    for (int a = 0; a < nloc && !nz; ++a) nz = row[a] != 0.0;
    if (!nz) continue;
    lo = std::min(lo, functions_[funcs[k]].level);
    hi = std::max(hi, functions_[funcs[k]].level);
  }
  return {lo, hi};
}

int ThbSpace::admissibility_class() const {
  int c = 0;
  for (int e = 0; e < num_elements(); ++e) {
    auto [lo, hi] = element_level_range(e);
    if (hi >= 0) c = std::max(c, hi - lo + 1);
  }
  return c;
}

std::shared_ptr<const LevelSequence> make_levels(int dim, const Ivec& level0_elements,
                                                 const Ivec& degree, const Ivec& multiplicity,
                                                 int num_levels) {
  return std::make_shared<const LevelSequence>(
      LevelSequence::uniform(dim, level0_elements, degree, multiplicity, num_levels));
}

}  // namespace thbq
