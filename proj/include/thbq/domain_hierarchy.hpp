#pragma once

#include <compare>
#include <cstdint>
#include <set>
#include <vector>

#include "thbq/multi_index.hpp"

namespace thbq {

/// Identifies an element or a q-box: level (0 is the coarsest) and index.
struct CellId {
  int level = 0;
  Ivec index{0, 0, 0};
  auto operator<=>(const CellId& o) const {
    if (auto c = level <=> o.level; c != 0) return c;
    for (int d = kMaxDim - 1; d >= 0; --d)
      if (auto c = index[d] <=> o.index[d]; c != 0) return c;
    return std::strong_ordering::equal;
  }
  bool operator==(const CellId&) const = default;
};
using BoxId = CellId;

/// Nested closed subdomains Omega_0 = [0,1]^dim ⊇ Omega_1 ⊇ ... stored as the
/// level-l elements lying in Omega_{l+1}. Elements of level l + 1 are the
/// bisections of level-l elements. The mesh is additionally a union of
/// q-boxes: blocks of q[d] elements per direction aligned to the level grid.
class DomainHierarchy {
 public:
  DomainHierarchy(int dim, const Ivec& level0_elements, const Ivec& q = {1, 1, 1});

  int dim() const { return dim_; }
  const Ivec& q() const { return q_; }
  const Ivec& level0_elements() const { return e0_; }
  /// Levels in use: one more than the deepest level with a refined element.
  int num_levels() const;

  GridShape element_grid(int level) const;
  GridShape box_grid(int level) const;

  /// Element (level, e) lies in Omega_{level+1}.
  bool refined(int level, const Ivec& e) const;
  /// Element (level, e) lies in Omega_level.
  bool inside(int level, const Ivec& e) const;
  bool active(int level, const Ivec& e) const { return inside(level, e) && !refined(level, e); }

  /// Every element of `elems` (at `level`) lies in Omega_k, for k <= level + 1.
  bool all_in(int level, const IndexBox& elems, int k) const;
  /// Some element of `elems` (at `level`) lies in Omega_k, for k <= level + 1.
  bool any_in(int level, const IndexBox& elems, int k) const;

  /// Flat indices of the level-l elements in Omega_{l+1}, ascending.
  const std::set<std::int64_t>& refined_set(int level) const;

  /// Active elements ordered by (level, flat index).
  std::vector<CellId> active_elements() const;

  Ivec parent(const Ivec& e) const;
  IndexBox children(const Ivec& e) const;
  /// Level-`to` index box covering the level-`from` box b (to <= from).
  IndexBox coarsen_box(const IndexBox& b, int from, int to) const;
  /// Level-`to` index box covering the level-`from` box b (to >= from).
  IndexBox refine_box_range(const IndexBox& b, int from, int to) const;

  // Element-level edits. refine_element requires the element to be inside Omega_level.
  void refine_element(int level, const Ivec& e);
  void unrefine_element(int level, const Ivec& e);

  // q-box view.
  IndexBox box_elements(const BoxId& b) const;
  bool box_inside(const BoxId& b) const;
  bool box_refined(const BoxId& b) const;
  bool box_active(const BoxId& b) const { return box_inside(b) && !box_refined(b); }
  BoxId box_of(const CellId& element) const;
  BoxId box_parent(const BoxId& b) const;
  IndexBox box_children(const BoxId& b) const;
  void refine_qbox(const BoxId& b);
  void coarsen_qbox(const BoxId& b);
  /// Boxes of `level` lying in Omega_level, canonical order.
  std::vector<BoxId> boxes_inside(int level) const;
  std::vector<BoxId> active_boxes() const;

  /// Throws InvalidArgument unless the levels are nested and every Omega_{l+1}
  /// is a union of level-l q-boxes.
  void validate() const;
  bool is_qbox_union() const;

  /// Same element sets regarded with another box size.
  DomainHierarchy with_q(const Ivec& q) const;

  bool operator==(const DomainHierarchy& o) const {
    return dim_ == o.dim_ && e0_ == o.e0_ && q_ == o.q_ && trimmed() == o.trimmed();
  }

 private:
  std::vector<std::set<std::int64_t>> trimmed() const;
  std::set<std::int64_t>& level_set(int level);

  int dim_;
  Ivec e0_;
  Ivec q_;
  std::vector<std::set<std::int64_t>> refined_;
};

}  // namespace thbq
