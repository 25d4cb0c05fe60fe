#include "thbq/random_hierarchy.hpp"

#include <random>

#include "thbq/error.hpp"

namespace thbq {

double uniform01(std::uint64_t bits) { return double(bits >> 11) * 0x1.0p-53; }

DomainHierarchy random_hierarchy(const LevelSequence& levels, const RandomHierarchyOptions& opt,
                                 std::uint64_t seed) {
  require(opt.levels >= 1, "random_hierarchy: need at least one level");
  std::mt19937_64 rng(seed);
  DomainHierarchy h(opt.dim, opt.level0_elements, opt.q);
  AdmissibilityPolicy policy = opt.policy;
  policy.max_levels = std::min(opt.levels, levels.num_levels());
  for (int l = 0; l + 1 < policy.max_levels; ++l) {
    std::vector<BoxId> cand;
    for (const BoxId& b : h.boxes_inside(l))
      if (h.box_active(b)) cand.push_back(b);
    if (cand.empty()) break;
    std::vector<BoxId> marked;
    for (const BoxId& b : cand)
      if (uniform01(rng()) < opt.fraction) marked.push_back(b);
    if (marked.empty()) marked.push_back(cand[rng() % cand.size()]);
    h = refine_qboxes(levels, h, marked, policy);
  }
  return h;
}

}  // namespace thbq
