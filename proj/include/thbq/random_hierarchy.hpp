#pragma once

#include <cstdint>

#include "thbq/qbox.hpp"

namespace thbq {

struct RandomHierarchyOptions {
  int dim = 2;
  Ivec level0_elements{8, 8, 1};
  Ivec q{2, 2, 1};
  int levels = 3;          // target number of levels
  double fraction = 0.3;   // marking probability per active box of the finest level
  AdmissibilityPolicy policy{};
};

/// Seeded random q-box hierarchy: each round marks active boxes of the finest
/// level at random (at least one) and refines them under the policy.
DomainHierarchy random_hierarchy(const LevelSequence& levels, const RandomHierarchyOptions& opt,
                                 std::uint64_t seed);

/// Uniform double in [0, 1) from a 64-bit engine, identical on every platform.
double uniform01(std::uint64_t bits);

}  // namespace thbq
