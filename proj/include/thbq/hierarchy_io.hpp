#pragma once

#include <string>

#include "thbq/domain_hierarchy.hpp"
#include "thbq/thb_space.hpp"

namespace thbq {

/// A hierarchy together with the spline data needed to rebuild its space.
/// Level-0 meshes are uniform.
struct HierarchyDocument {
  int dim = 2;
  Ivec degree{2, 2, 0};
  Ivec multiplicity{1, 1, 1};
  DomainHierarchy hierarchy{2, {1, 1, 1}};

  /// Level sequence with `extra_levels` levels beyond the hierarchy's depth.
  std::shared_ptr<const LevelSequence> levels(int extra_levels = 0) const;
  ThbSpace space(BasisKind kind = BasisKind::truncated) const;
};

/// JSON text with fields dim, degree, multiplicity, level1_elements_per_dir,
/// qbox_q and refined_boxes (per level, the q-box indices refined there).
std::string to_json(const HierarchyDocument& doc);
/// Parses and validates a document; throws ConfigError on malformed input.
HierarchyDocument hierarchy_from_json(const std::string& text);

HierarchyDocument read_hierarchy(const std::string& path);
void write_hierarchy(const std::string& path, const HierarchyDocument& doc);

}  // namespace thbq
