#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "thbq/field.hpp"
#include "thbq/qbox.hpp"
#include "thbq/thb_space.hpp"

namespace thbq {

struct AdaptiveConfig {
  double theta_refine = 0.5;
  double theta_coarsen = 0.0;
  int c = 2;                // admissibility class kept by refinement and coarsening
  double tolerance = 1e-4;  // stop once the stopping value drops below this
  int max_iterations = 25;
  int coarsen_every = 0;    // steps between coarsening passes; 0 disables coarsening
  int max_levels = 10;
  bool record_time = false;  // trace seconds are 0 unless set, keeping traces reproducible

  /// Throws InvalidArgument on out-of-range values.
  void validate() const;
};

/// Nonnegative indicator per active q-box, in canonical box order.
using IndicatorField = std::map<BoxId, double>;

/// Smallest set of boxes carrying at least theta of the total squared
/// indicator, taken greedily by descending value (ties by box order).
std::vector<BoxId> dorfler_mark(const IndicatorField& ind, double theta);

/// Boxes to coarsen: the boxes with the smallest indicators whose squared sum
/// stays within theta of the total are collected, and every refined box whose
/// children are all collected (and none in `keep`) is returned.
std::vector<BoxId> coarsen_mark(const DomainHierarchy& h, const IndicatorField& ind, double theta,
                                const std::vector<BoxId>& keep = {});

struct Estimate {
  IndicatorField indicators;
  double error_l2 = 0.0;    // NaN when no reference solution is known
  double error_linf = 0.0;
  double eta_total = 0.0;   // sqrt of the summed squared indicators
  double stop_value = 0.0;  // compared against the tolerance
};

struct TraceRow {
  int step = 0;
  int ndof = 0;
  int nelem = 0;
  int nboxes = 0;
  double error_l2 = 0.0;
  double error_linf = 0.0;
  double eta_total = 0.0;
  double seconds = 0.0;
};

struct Trace {
  std::vector<TraceRow> rows;
  std::vector<DomainHierarchy> meshes;  // mesh of every row
  bool converged = false;
  bool exhausted = false;  // stopped by max_iterations or max_levels
  std::string note;
};

/// CSV with header step,ndof,nelem,nboxes,error_l2,error_linf,eta_total,seconds
/// and 17 significant digits per float.
std::string trace_csv(const Trace& trace);

using SolveFn = std::function<Vector(const ThbSpace&)>;
using EstimateFn = std::function<Estimate(const ThbSpace&, const Vector&)>;
using StepObserver = std::function<void(const ThbSpace&, const Vector&, const TraceRow&)>;

/// Solve, estimate, mark and refine until the stopping value is below the
/// tolerance. Every coarsen_every steps a coarsening pass runs before the
/// refinement of that step.
Trace adapt_loop(std::shared_ptr<const LevelSequence> levels, const DomainHierarchy& initial,
                 const SolveFn& solve, const EstimateFn& estimate, const AdaptiveConfig& cfg,
                 const StepObserver& observer = {});

/// Adaptive Bezier projection of f with the per-box sampled max error as
/// indicator. The initial hierarchy must use p-boxes.
Trace adapt_project(std::shared_ptr<const LevelSequence> levels, const DomainHierarchy& initial,
                    const Field& f, const AdaptiveConfig& cfg, const StepObserver& observer = {});

/// Per-box maxima of per-element values.
IndicatorField box_max(const ThbSpace& space, const std::vector<double>& element_values);
/// Per-box sums of per-element values.
IndicatorField box_sum(const ThbSpace& space, const std::vector<double>& element_values);

}  // namespace thbq
