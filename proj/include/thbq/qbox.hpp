#pragma once

#include <string>
#include <utility>
#include <vector>

#include "thbq/domain_hierarchy.hpp"
#include "thbq/tensor_space.hpp"
#include "thbq/thb_space.hpp"

namespace thbq {

struct QBoxRecord {
  BoxId id;
  bool active = false;
  bool border = false;
  bool well_behaved = false;
  bool regular = false;
  int depth = -1;  // set for well-behaved boxes only
};

/// Classification of every q-box lying in its level's subdomain.
/// Border boxes touch the interior part of the subdomain boundary; a
/// well-behaved box is a border box not contained in a coarser well-behaved
/// box; a regular box is an active box outside every well-behaved box.
class QBoxMesh {
 public:
  explicit QBoxMesh(const DomainHierarchy& h);

  const DomainHierarchy& hierarchy() const { return h_; }
  const std::vector<QBoxRecord>& boxes() const { return boxes_; }
  const QBoxRecord* find(const BoxId& b) const;

  std::vector<BoxId> active() const;
  std::vector<BoxId> border() const;
  std::vector<BoxId> well_behaved() const;
  std::vector<BoxId> regular() const;

 private:
  DomainHierarchy h_;
  std::vector<QBoxRecord> boxes_;
};

/// Classifies the hierarchy's boxes for box size q. The subdomains must be
/// unions of q-boxes.
QBoxMesh classify(const DomainHierarchy& h, const Ivec& q);
QBoxMesh classify(const ThbSpace& space, const Ivec& q);

/// Smallest d such that the well-behaved box b contains an active border box of level b.level + d.
int depth(const QBoxMesh& mesh, const BoxId& b);

/// Level-k boxes met by the support of a level-k B-spline that also meets box p
/// (as an index range of the level-k box grid).
IndexBox support_extension(const LevelSequence& levels, const DomainHierarchy& h, const BoxId& p, int k);

/// Active boxes of level p.level - c + 1 that contain a box of
/// support_extension(p, p.level - c + 2).
std::vector<BoxId> refinement_neighborhood(const LevelSequence& levels, const DomainHierarchy& h,
                                           const BoxId& p, int c);
/// Active boxes of level p.level + c inside the level-(p.level + 1) support
/// extension of an active child of p.
std::vector<BoxId> coarsening_neighborhood(const LevelSequence& levels, const DomainHierarchy& h,
                                           const BoxId& p, int c);

struct AdmissibilityPolicy {
  int c = 2;             // admissibility class to preserve; c <= 0 means unbounded
  int max_levels = 10;   // refinement beyond this many levels is an error
  bool bounded() const { return c > 0; }
};

/// Refines the marked active boxes and, recursively, their refinement
/// neighborhoods so that the admissibility class stays at most c.
DomainHierarchy refine_qboxes(const LevelSequence& levels, const DomainHierarchy& h,
                              const std::vector<BoxId>& marked, const AdmissibilityPolicy& policy);

struct CoarseningReport {
  std::vector<BoxId> coarsened;
  std::vector<std::pair<BoxId, std::string>> skipped;
};

/// Reactivates marked refined boxes whose children are all active, skipping
/// (and reporting) those with a nonempty coarsening neighborhood.
DomainHierarchy coarsen_qboxes(const LevelSequence& levels, const DomainHierarchy& h,
                               const std::vector<BoxId>& marked, const AdmissibilityPolicy& policy,
                               CoarseningReport* report = nullptr);

/// Admissibility class measured over active q-boxes instead of elements.
int qbox_admissibility_class(const ThbSpace& space);

}  // namespace thbq
