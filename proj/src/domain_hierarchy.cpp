#include "thbq/domain_hierarchy.hpp"

#include <algorithm>
#include <string>

#include "thbq/error.hpp"

namespace thbq {

std::string to_string(const Ivec& i, int dim) {
  std::string s = "(";
  for (int d = 0; d < dim; ++d) {
    if (d) s += ",";
    s += std::to_string(i[d]);
  }
  return s + ")";
}

DomainHierarchy::DomainHierarchy(int dim, const Ivec& level0_elements, const Ivec& q)
    : dim_(dim), e0_{1, 1, 1}, q_{1, 1, 1} {
  require(dim >= 1 && dim <= kMaxDim, "DomainHierarchy: dimension must be 1..3");
  for (int d = 0; d < dim; ++d) {
    require(level0_elements[d] >= 1, "DomainHierarchy: need at least one element per direction");
    require(q[d] >= 1, "DomainHierarchy: box size must be positive");
    require(level0_elements[d] % q[d] == 0,
            "DomainHierarchy: level-0 element count " + std::to_string(level0_elements[d]) +
                " is not divisible by box size " + std::to_string(q[d]));
    e0_[d] = level0_elements[d];
    q_[d] = q[d];
  }
}

int DomainHierarchy::num_levels() const {
  int n = 1;
  for (int l = 0; l < int(refined_.size()); ++l)
    if (!refined_[l].empty()) n = l + 2;
  return n;
}

GridShape DomainHierarchy::element_grid(int level) const {
  GridShape g;
  for (int d = 0; d < dim_; ++d) g.extent[d] = e0_[d] << level;
  return g;
}

GridShape DomainHierarchy::box_grid(int level) const {
  GridShape g;
  for (int d = 0; d < dim_; ++d) g.extent[d] = (e0_[d] << level) / q_[d];
  return g;
}

bool DomainHierarchy::refined(int level, const Ivec& e) const {
  if (level < 0 || level >= int(refined_.size())) return false;
  return refined_[level].count(element_grid(level).flat(e)) > 0;
}

bool DomainHierarchy::inside(int level, const Ivec& e) const {
  if (level == 0) return true;
  return refined(level - 1, parent(e));
}

Ivec DomainHierarchy::parent(const Ivec& e) const {
  Ivec p = e;
  for (int d = 0; d < dim_; ++d) p[d] = e[d] >> 1;
  return p;
}

IndexBox DomainHierarchy::children(const Ivec& e) const {
  IndexBox b{e, {e[0] + 1, e[1] + 1, e[2] + 1}};
  for (int d = 0; d < dim_; ++d) {
    b.lo[d] = 2 * e[d];
    b.hi[d] = 2 * e[d] + 2;
  }
  return b;
}

IndexBox DomainHierarchy::coarsen_box(const IndexBox& b, int from, int to) const {
  IndexBox r = b;
  const int s = from - to;
  for (int d = 0; d < dim_; ++d) {
    r.lo[d] = b.lo[d] >> s;
    r.hi[d] = ((b.hi[d] - 1) >> s) + 1;
  }
  return r;
}

IndexBox DomainHierarchy::refine_box_range(const IndexBox& b, int from, int to) const {
  IndexBox r = b;
  const int s = to - from;
  for (int d = 0; d < dim_; ++d) {
    r.lo[d] = b.lo[d] << s;
    r.hi[d] = b.hi[d] << s;
  }
  return r;
}

bool DomainHierarchy::all_in(int level, const IndexBox& elems, int k) const {
  if (k <= 0) return true;
  const IndexBox c = coarsen_box(elems, level, k - 1);
  if (k - 1 >= int(refined_.size())) return false;
  const auto& set = refined_[k - 1];
  const GridShape g = element_grid(k - 1);
  bool ok = true;
  for_each_index(c, [&](const Ivec& i) {
    if (ok && !set.count(g.flat(i))) ok = false;
  });
  return ok;
}

bool DomainHierarchy::any_in(int level, const IndexBox& elems, int k) const {
  if (k <= 0) return !elems.empty();
  if (k - 1 >= int(refined_.size())) return false;
  const IndexBox c = coarsen_box(elems, level, k - 1);
  const auto& set = refined_[k - 1];
  const GridShape g = element_grid(k - 1);
  bool any = false;
  for_each_index(c, [&](const Ivec& i) {
    if (!any && set.count(g.flat(i))) any = true;
  });
  return any;
}

const std::set<std::int64_t>& DomainHierarchy::refined_set(int level) const {
  static const std::set<std::int64_t> empty;
  if (level < 0 || level >= int(refined_.size())) return empty;
  return refined_[level];
}

std::set<std::int64_t>& DomainHierarchy::level_set(int level) {
  if (level >= int(refined_.size())) refined_.resize(level + 1);
  return refined_[level];
}

std::vector<CellId> DomainHierarchy::active_elements() const {
  std::vector<CellId> out;
  const int nl = num_levels();
  for (int l = 0; l < nl; ++l) {
    const GridShape g = element_grid(l);
    if (l == 0) {
      for (std::int64_t f = 0; f < g.size(); ++f)
        if (!refined(0, g.unflat(f))) out.push_back({0, g.unflat(f)});
      continue;
    }
    std::vector<std::int64_t> flats;
    const GridShape gp = element_grid(l - 1);
    for (std::int64_t pf : refined_set(l - 1))
      for_each_index(children(gp.unflat(pf)), [&](const Ivec& c) {
        if (!refined(l, c)) flats.push_back(g.flat(c));
      });
    std::sort(flats.begin(), flats.end());
    for (std::int64_t f : flats) out.push_back({l, g.unflat(f)});
  }
  return out;
}

void DomainHierarchy::refine_element(int level, const Ivec& e) {
  require(element_grid(level).in_bounds(e), "refine_element: index out of range");
  require(inside(level, e), "refine_element: element is not inside the level subdomain");
  level_set(level).insert(element_grid(level).flat(e));
}

void DomainHierarchy::unrefine_element(int level, const Ivec& e) {
  if (level < int(refined_.size())) refined_[level].erase(element_grid(level).flat(e));
}

IndexBox DomainHierarchy::box_elements(const BoxId& b) const {
  IndexBox r;
  for (int d = 0; d < dim_; ++d) {
    r.lo[d] = b.index[d] * q_[d];
    r.hi[d] = r.lo[d] + q_[d];
  }
  return r;
}

bool DomainHierarchy::box_inside(const BoxId& b) const {
  return inside(b.level, box_elements(b).lo);
}

bool DomainHierarchy::box_refined(const BoxId& b) const {
  return refined(b.level, box_elements(b).lo);
}

BoxId DomainHierarchy::box_of(const CellId& element) const {
  BoxId b = element;
  for (int d = 0; d < dim_; ++d) b.index[d] = element.index[d] / q_[d];
  return b;
}

BoxId DomainHierarchy::box_parent(const BoxId& b) const {
  BoxId p{b.level - 1, b.index};
  for (int d = 0; d < dim_; ++d) p.index[d] = b.index[d] >> 1;
  return p;
}

IndexBox DomainHierarchy::box_children(const BoxId& b) const { return children(b.index); }

void DomainHierarchy::refine_qbox(const BoxId& b) {
  require(box_grid(b.level).in_bounds(b.index), "refine_qbox: box out of range");
  require(box_inside(b), "refine_qbox: box is not inside the level subdomain");
  auto& set = level_set(b.level);
  const GridShape g = element_grid(b.level);
  for_each_index(box_elements(b), [&](const Ivec& e) { set.insert(g.flat(e)); });
}

void DomainHierarchy::coarsen_qbox(const BoxId& b) {
  if (b.level >= int(refined_.size())) return;
  auto& set = refined_[b.level];
  const GridShape g = element_grid(b.level);
  for_each_index(box_elements(b), [&](const Ivec& e) { set.erase(g.flat(e)); });
}

std::vector<BoxId> DomainHierarchy::boxes_inside(int level) const {
  std::vector<BoxId> out;
  const GridShape bg = box_grid(level);
  if (level == 0) {
    for (std::int64_t f = 0; f < bg.size(); ++f) out.push_back({0, bg.unflat(f)});
    return out;
  }
  std::set<std::int64_t> flats;
  const GridShape gp = element_grid(level - 1);
  for (std::int64_t pf : refined_set(level - 1))
    for_each_index(children(gp.unflat(pf)), [&](const Ivec& c) {
      Ivec bi = c;
      for (int d = 0; d < dim_; ++d) bi[d] = c[d] / q_[d];
      flats.insert(bg.flat(bi));
    });
  for (std::int64_t f : flats) out.push_back({level, bg.unflat(f)});
  return out;
}

std::vector<BoxId> DomainHierarchy::active_boxes() const {
  std::vector<BoxId> out;
  for (int l = 0; l < num_levels(); ++l)
    for (const BoxId& b : boxes_inside(l))
      if (!box_refined(b)) out.push_back(b);
  return out;
}

bool DomainHierarchy::is_qbox_union() const {
  for (int l = 0; l < int(refined_.size()); ++l) {
    const GridShape g = element_grid(l);
    for (std::int64_t f : refined_[l]) {
      bool all = true;
      for_each_index(box_elements(box_of({l, g.unflat(f)})), [&](const Ivec& e) {
        if (!refined_[l].count(g.flat(e))) all = false;
      });
      if (!all) return false;
    }
  }
  return true;
}

void DomainHierarchy::validate() const {
  for (int l = 0; l < int(refined_.size()); ++l) {
    const GridShape g = element_grid(l);
    for (std::int64_t f : refined_[l]) {
      const Ivec e = g.unflat(f);
      require(g.in_bounds(e), "DomainHierarchy: refined element out of range");
      require(inside(l, e), "DomainHierarchy: subdomains are not nested at level " +
                                std::to_string(l + 1));
    }
  }
  require(is_qbox_union(), "DomainHierarchy: a subdomain is not a union of q-boxes");
}

DomainHierarchy DomainHierarchy::with_q(const Ivec& q) const {
  DomainHierarchy h(dim_, e0_, q);
  h.refined_ = refined_;
  return h;
}

std::vector<std::set<std::int64_t>> DomainHierarchy::trimmed() const {
  std::vector<std::set<std::int64_t>> t = refined_;
  while (!t.empty() && t.back().empty()) t.pop_back();
  return t;
}

}  // namespace thbq
