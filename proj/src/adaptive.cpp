#include "thbq/adaptive.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>

#include "thbq/bezier_projection.hpp"
#include "thbq/error.hpp"

namespace thbq {

void AdaptiveConfig::validate() const {
  require(theta_refine > 0.0 && theta_refine <= 1.0, "theta_refine must lie in (0, 1]");
  require(theta_coarsen >= 0.0 && theta_coarsen < 1.0, "theta_coarsen must lie in [0, 1)");
  require(theta_refine > theta_coarsen, "theta_refine must exceed theta_coarsen");
  require(tolerance > 0.0, "tolerance must be positive");
  require(max_iterations >= 1, "max_iterations must be at least 1");
  require(coarsen_every >= 0, "coarsen_every must be nonnegative");
  require(max_levels >= 1, "max_levels must be at least 1");
}

namespace {

void check_indicators(const IndicatorField& ind) {
  for (const auto& [b, v] : ind)
    require(std::isfinite(v) && v >= 0.0, "indicators must be finite and nonnegative");
}

}  // namespace

std::vector<BoxId> dorfler_mark(const IndicatorField& ind, double theta) {
  require(theta > 0.0 && theta <= 1.0, "dorfler_mark: theta must lie in (0, 1]");
  check_indicators(ind);
  std::vector<std::pair<double, BoxId>> order;
  double total = 0.0;
  for (const auto& [b, v] : ind) {
    order.push_back({v * v, b});
    total += v * v;
  }
  if (total == 0.0) return {};
  // map order is the box order, so a stable sort keeps ties lexicographic
  std::stable_sort(order.begin(), order.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<BoxId> marked;
  double sum = 0.0;
  for (const auto& [v2, b] : order) {
    if (v2 == 0.0) break;
    marked.push_back(b);
    sum += v2;
    if (sum >= theta * total) break;
  }
  std::sort(marked.begin(), marked.end());
  return marked;
}

std::vector<BoxId> coarsen_mark(const DomainHierarchy& h, const IndicatorField& ind, double theta,
                                const std::vector<BoxId>& keep) {
  require(theta >= 0.0 && theta < 1.0, "coarsen_mark: theta must lie in [0, 1)");
  check_indicators(ind);
  if (theta == 0.0) return {};
  std::vector<std::pair<double, BoxId>> order;
  double total = 0.0;
  for (const auto& [b, v] : ind) {
    order.push_back({v * v, b});
    total += v * v;
  }
  std::stable_sort(order.begin(), order.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::set<BoxId> low;
  const std::set<BoxId> kept(keep.begin(), keep.end());
  double sum = 0.0;
  for (const auto& [v2, b] : order) {
    if (sum + v2 > theta * total) break;
    sum += v2;
    if (!kept.count(b)) low.insert(b);
  }
  std::set<BoxId> parents;
  for (const BoxId& b : low) {
    if (b.level == 0) continue;
    const BoxId parent = h.box_parent(b);
    if (parents.count(parent)) continue;
    bool all = true;
    for_each_index(h.box_children(parent), [&](const Ivec& c) {
      const BoxId child{parent.level + 1, c};
      if (!low.count(child) || !h.box_active(child)) all = false;
    });
    if (all) parents.insert(parent);
  }
  return {parents.begin(), parents.end()};
}

std::string trace_csv(const Trace& trace) {
  std::string out = "step,ndof,nelem,nboxes,error_l2,error_linf,eta_total,seconds\n";
  char buf[256];
  for (const TraceRow& r : trace.rows) {
    std::snprintf(buf, sizeof buf, "%d,%d,%d,%d,%.17g,%.17g,%.17g,%.17g\n", r.step, r.ndof, r.nelem,
                  r.nboxes, r.error_l2, r.error_linf, r.eta_total, r.seconds);
    out += buf;
  }
  return out;
}

Trace adapt_loop(std::shared_ptr<const LevelSequence> levels, const DomainHierarchy& initial,
                 const SolveFn& solve, const EstimateFn& estimate, const AdaptiveConfig& cfg,
                 const StepObserver& observer) {
  cfg.validate();
  require(levels != nullptr, "adapt_loop: missing level sequence");
  initial.validate();
  AdmissibilityPolicy policy;
  policy.c = cfg.c;
  policy.max_levels = std::min(cfg.max_levels, levels->num_levels());

  Trace trace;
  DomainHierarchy h = initial;
  for (int step = 0; step < cfg.max_iterations; ++step) {
    const auto start = std::chrono::steady_clock::now();
    const ThbSpace space(levels, h);
    const Vector u = solve(space);
    const Estimate est = estimate(space, u);
    const auto stop = std::chrono::steady_clock::now();

    TraceRow row;
    row.step = step;
    row.ndof = space.num_functions();
    row.nelem = space.num_elements();
    row.nboxes = int(h.active_boxes().size());
    row.error_l2 = est.error_l2;
    row.error_linf = est.error_linf;
    row.eta_total = est.eta_total;
    if (cfg.record_time) row.seconds = std::chrono::duration<double>(stop - start).count();
    trace.rows.push_back(row);
    trace.meshes.push_back(h);
    if (observer) observer(space, u, row);

    if (est.stop_value < cfg.tolerance) {
      trace.converged = true;
      return trace;
    }
    if (step + 1 == cfg.max_iterations) break;

    std::vector<BoxId> marked = dorfler_mark(est.indicators, cfg.theta_refine);
    std::erase_if(marked, [&](const BoxId& b) { return b.level + 2 > policy.max_levels; });
    if (marked.empty()) {
      trace.note = "no box can be refined within the level limit";
      trace.exhausted = true;
      return trace;
    }
    if (cfg.coarsen_every > 0 && cfg.theta_coarsen > 0.0 && (step + 1) % cfg.coarsen_every == 0) {
      const auto parents = coarsen_mark(h, est.indicators, cfg.theta_coarsen, marked);
      h = coarsen_qboxes(*levels, h, parents, policy);
      std::erase_if(marked, [&](const BoxId& b) { return !h.box_active(b); });
    }
    try {
      h = refine_qboxes(*levels, h, marked, policy);
    } catch (const InvalidArgument& e) {
      trace.note = e.what();
      trace.exhausted = true;
      return trace;
    }
  }
  trace.exhausted = true;
  trace.note = "maximum number of iterations reached";
  return trace;
}

IndicatorField box_max(const ThbSpace& space, const std::vector<double>& element_values) {
  require(int(element_values.size()) == space.num_elements(), "box_max: one value per element");
  IndicatorField out;
  const DomainHierarchy& h = space.hierarchy();
  for (int e = 0; e < space.num_elements(); ++e) {
    double& v = out[h.box_of(space.element(e))];
    v = std::max(v, element_values[e]);
  }
  return out;
}

IndicatorField box_sum(const ThbSpace& space, const std::vector<double>& element_values) {
  require(int(element_values.size()) == space.num_elements(), "box_sum: one value per element");
  IndicatorField out;
  const DomainHierarchy& h = space.hierarchy();
  for (int e = 0; e < space.num_elements(); ++e) out[h.box_of(space.element(e))] += element_values[e];
  return out;
}

Trace adapt_project(std::shared_ptr<const LevelSequence> levels, const DomainHierarchy& initial,
                    const Field& f, const AdaptiveConfig& cfg, const StepObserver& observer) {
  require(levels != nullptr, "adapt_project: missing level sequence");
  const Ivec p = levels->level(0).degree();
  for (int d = 0; d < initial.dim(); ++d)
    require(initial.q()[d] == p[d], "adapt_project: the hierarchy must use p-boxes");
  int pmax = 0;
  for (int d = 0; d < initial.dim(); ++d) pmax = std::max(pmax, p[d]);
  ErrorOptions opts;
  opts.samples = 2 * pmax + 3;

  auto solve = [&](const ThbSpace& space) { return bezier_project(space, f).coefficients; };
  auto estimate = [&](const ThbSpace& space, const Vector& u) {
    const ErrorReport rep = error_report(space, f, u, opts);
    Estimate est;
    est.indicators = box_max(space, rep.element_linf);
    double sum = 0.0;
    for (const auto& [b, v] : est.indicators) sum += v * v;
    est.eta_total = std::sqrt(sum);
    est.error_l2 = rep.l2;
    est.error_linf = rep.linf;
    est.stop_value = rep.linf;
    return est;
  };
  return adapt_loop(std::move(levels), initial, solve, estimate, cfg, observer);
}

}  // namespace thbq
