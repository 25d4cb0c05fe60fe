#include "thbq/qbox.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "thbq/error.hpp"

namespace thbq {

namespace {

bool is_border(const DomainHierarchy& h, const BoxId& b) {
  if (b.level == 0) return false;
  const GridShape g = h.box_grid(b.level);
  IndexBox ring = {b.index, b.index};
  for (int d = 0; d < kMaxDim; ++d) {
    if (d < h.dim()) {
      ring.lo[d] = std::max(0, b.index[d] - 1);
      ring.hi[d] = std::min(g.extent[d], b.index[d] + 2);
    } else {
      ring.hi[d] = ring.lo[d] + 1;
    }
  }
  bool border = false;
  for_each_index(ring, [&](const Ivec& n) {
    if (!border && !h.box_inside({b.level, n})) border = true;
  });
  return border;
}

}  // namespace

QBoxMesh::QBoxMesh(const DomainHierarchy& h) : h_(h) {
  h_.validate();
  std::set<BoxId> wb;
  for (int l = 0; l < h_.num_levels(); ++l) {
    for (const BoxId& b : h_.boxes_inside(l)) {
      QBoxRecord r;
      r.id = b;
      r.active = !h_.box_refined(b);
      r.border = is_border(h_, b);
      bool in_wb = false;
      for (BoxId a = b; a.level >= 1; a = h_.box_parent(a))
        if (a.level < b.level && wb.count(a)) {
          in_wb = true;
          break;
        }
      r.well_behaved = r.border && !in_wb;
      if (r.well_behaved) wb.insert(b);
      r.regular = r.active && !in_wb && !r.well_behaved;
      boxes_.push_back(r);
    }
  }
  for (QBoxRecord& r : boxes_)
    if (r.well_behaved) r.depth = depth(*this, r.id);
}

const QBoxRecord* QBoxMesh::find(const BoxId& b) const {
  auto it = std::lower_bound(boxes_.begin(), boxes_.end(), b,
                             [](const QBoxRecord& r, const BoxId& id) { return r.id < id; });
  return (it != boxes_.end() && it->id == b) ? &*it : nullptr;
}

std::vector<BoxId> QBoxMesh::active() const {
  std::vector<BoxId> v;
  for (const auto& r : boxes_)
    if (r.active) v.push_back(r.id);
  return v;
}

std::vector<BoxId> QBoxMesh::border() const {
  std::vector<BoxId> v;
  for (const auto& r : boxes_)
    if (r.border) v.push_back(r.id);
  return v;
}

std::vector<BoxId> QBoxMesh::well_behaved() const {
  std::vector<BoxId> v;
  for (const auto& r : boxes_)
    if (r.well_behaved) v.push_back(r.id);
  return v;
}

std::vector<BoxId> QBoxMesh::regular() const {
  std::vector<BoxId> v;
  for (const auto& r : boxes_)
    if (r.regular) v.push_back(r.id);
  return v;
}

QBoxMesh classify(const DomainHierarchy& h, const Ivec& q) {
  Ivec qq = q;
  for (int d = h.dim(); d < kMaxDim; ++d) qq[d] = 1;
  return QBoxMesh(h.with_q(qq));
}

QBoxMesh classify(const ThbSpace& space, const Ivec& q) { return classify(space.hierarchy(), q); }

int depth(const QBoxMesh& mesh, const BoxId& b) {
  const DomainHierarchy& h = mesh.hierarchy();
  std::vector<BoxId> layer{b};
  for (int d = 0; !layer.empty(); ++d) {
    std::vector<BoxId> next;
    for (const BoxId& x : layer) {
      if (!h.box_refined(x)) {
        if (is_border(h, x)) return d;
        continue;
      }
      for_each_index(h.box_children(x), [&](const Ivec& c) { next.push_back({x.level + 1, c}); });
    }
    layer.swap(next);
  }
  return -1;
}

IndexBox support_extension(const LevelSequence& levels, const DomainHierarchy& h, const BoxId& p, int k) {
  require(k >= 0 && k < levels.num_levels(), "support_extension: level out of range");
  const IndexBox pe = h.box_elements(p);
  const IndexBox ek = k <= p.level ? h.coarsen_box(pe, p.level, k) : h.refine_box_range(pe, p.level, k);
  const TensorSpace& ts = levels.level(k);
  const GridShape bg = h.box_grid(k);
  IndexBox out;
  for (int d = 0; d < kMaxDim; ++d) {
    if (d >= h.dim()) {
      out.lo[d] = 0;
      out.hi[d] = 1;
      continue;
    }
    const KnotVector& kv = ts.direction(d);
    const int jlo = kv.first_basis(ek.lo[d]);
    const int jhi = kv.first_basis(ek.hi[d] - 1) + kv.degree();
    const int elo = kv.support(jlo).first;
    const int ehi = kv.support(jhi).second;
    const int q = h.q()[d];
    out.lo[d] = std::max(0, elo / q);
    out.hi[d] = std::min(bg.extent[d], (ehi + q - 1) / q);
  }
  return out;
}

std::vector<BoxId> refinement_neighborhood(const LevelSequence& levels, const DomainHierarchy& h,
                                           const BoxId& p, int c) {
  std::vector<BoxId> out;
  if (c <= 0) return out;
  require(c >= 2, "refinement_neighborhood: admissibility class must be at least 2");
  const int target = p.level - c + 1;
  if (target < 0) return out;
  std::set<BoxId> parents;
  for_each_index(support_extension(levels, h, p, target + 1),
                 [&](const Ivec& s) { parents.insert(h.box_parent({target + 1, s})); });
  for (const BoxId& b : parents)
    if (h.box_active(b)) out.push_back(b);
  return out;
}

namespace {

void active_descendants(const DomainHierarchy& h, const BoxId& b, int target, std::set<BoxId>& out) {
  if (b.level == target) {
    if (h.box_active(b)) out.insert(b);
    return;
  }
  if (!h.box_refined(b)) return;
  for_each_index(h.box_children(b), [&](const Ivec& c) { active_descendants(h, {b.level + 1, c}, target, out); });
}

}  // namespace

std::vector<BoxId> coarsening_neighborhood(const LevelSequence& levels, const DomainHierarchy& h,
                                           const BoxId& p, int c) {
  std::vector<BoxId> out;
  if (c <= 0) return out;
  require(c >= 2, "coarsening_neighborhood: admissibility class must be at least 2");
  const int l1 = p.level + 1;
  if (l1 >= levels.num_levels()) return out;
  std::set<BoxId> window;
  for_each_index(h.box_children(p), [&](const Ivec& ci) {
    const BoxId child{l1, ci};
    if (!h.box_active(child)) return;
    for_each_index(support_extension(levels, h, child, l1), [&](const Ivec& s) { window.insert({l1, s}); });
  });
  std::set<BoxId> found;
  for (const BoxId& b : window) active_descendants(h, b, p.level + c, found);
  out.assign(found.begin(), found.end());
  return out;
}

namespace {

void refine_recursive(const LevelSequence& levels, DomainHierarchy& h, const BoxId& p,
                      const AdmissibilityPolicy& policy) {
  if (!h.box_active(p)) return;
  if (p.level + 2 > policy.max_levels || p.level + 1 >= levels.num_levels())
    throw InvalidArgument("refine_qboxes: refinement would exceed the maximum level " +
                          std::to_string(policy.max_levels));
  for (const BoxId& q : refinement_neighborhood(levels, h, p, policy.c))
    refine_recursive(levels, h, q, policy);
  if (h.box_active(p)) h.refine_qbox(p);
}

}  // namespace

DomainHierarchy refine_qboxes(const LevelSequence& levels, const DomainHierarchy& h,
                              const std::vector<BoxId>& marked, const AdmissibilityPolicy& policy) {
  DomainHierarchy out = h;
  std::vector<BoxId> order = marked;
  std::sort(order.begin(), order.end());
  order.erase(std::unique(order.begin(), order.end()), order.end());
  for (const BoxId& b : order) {
    require(b.level >= 0 && out.box_grid(b.level).in_bounds(b.index), "refine_qboxes: box out of range");
    require(out.box_inside(b), "refine_qboxes: marked box is not inside its level subdomain");
  }
  for (const BoxId& b : order) refine_recursive(levels, out, b, policy);
  return out;
}

DomainHierarchy coarsen_qboxes(const LevelSequence& levels, const DomainHierarchy& h,
                               const std::vector<BoxId>& marked, const AdmissibilityPolicy& policy,
                               CoarseningReport* report) {
  DomainHierarchy out = h;
  CoarseningReport local;
  CoarseningReport& rep = report ? *report : local;
  std::vector<BoxId> order = marked;
  std::sort(order.begin(), order.end());
  order.erase(std::unique(order.begin(), order.end()), order.end());
  for (const BoxId& b : order) {
    if (b.level < 0 || !out.box_grid(b.level).in_bounds(b.index) || !out.box_inside(b) ||
        !out.box_refined(b)) {
      rep.skipped.push_back({b, "box is not refined"});
      continue;
    }
    bool leaf_children = true;
    for_each_index(out.box_children(b), [&](const Ivec& c) {
      if (out.box_refined({b.level + 1, c})) leaf_children = false;
    });
    if (!leaf_children) {
      rep.skipped.push_back({b, "children are not all active"});
      continue;
    }
    if (policy.bounded() && !coarsening_neighborhood(levels, out, b, policy.c).empty()) {
      rep.skipped.push_back({b, "coarsening neighborhood is not empty"});
      continue;
    }
    out.coarsen_qbox(b);
    rep.coarsened.push_back(b);
  }
  return out;
}

int qbox_admissibility_class(const ThbSpace& space) {
  const DomainHierarchy& h = space.hierarchy();
  std::map<BoxId, std::pair<int, int>> range;
  for (int e = 0; e < space.num_elements(); ++e) {
    auto [lo, hi] = space.element_level_range(e);
    if (hi < 0) continue;
    auto [it, fresh] = range.try_emplace(h.box_of(space.element(e)), lo, hi);
    if (!fresh) {
      it->second.first = std::min(it->second.first, lo);
      it->second.second = std::max(it->second.second, hi);
    }
  }
  int c = 0;
  for (const auto& [b, r] : range) c = std::max(c, r.second - r.first + 1);
  return c;
}

}  // namespace thbq
