// Acceptance runner: one PASS/FAIL line per criterion. Optional arguments
// select criteria by number.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "thbq/adaptive.hpp"
#include "thbq/bezier_projection.hpp"
#include "thbq/derham.hpp"
#include "thbq/experiments.hpp"
#include "thbq/poisson.hpp"
#include "thbq/qbox.hpp"
#include "thbq/random_hierarchy.hpp"

using namespace thbq;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct Mesh {
  std::shared_ptr<const LevelSequence> levels;
  DomainHierarchy h;
};

Mesh random_boxes(int p, const Ivec& q, const Ivec& e0, int c, int nlev, std::uint64_t seed, double fraction) {
  auto ls = make_levels(2, e0, {p, p, 0}, {1, 1, 1}, nlev);
  RandomHierarchyOptions o;
  o.level0_elements = e0;
  o.q = q;
  o.levels = nlev;
  o.fraction = fraction;
  o.policy.c = c;
  return {ls, random_hierarchy(*ls, o, seed)};
}

Mesh random_pbox(int p, int c, int nlev, std::uint64_t seed) {
  const Ivec e0 = p == 3 ? Ivec{6, 6, 1} : Ivec{8, 8, 1};
  return random_boxes(p, {p, p, 1}, e0, c, nlev, seed, 0.25);
}

Field spline_field(const ThbSpace& space, const Vector& c) {
  Field f;
  f.value = [&space, c](const Point& x) { return space.eval_sum(c, x); };
  return f;
}

Field smooth_field() {
  Field f;
  f.value = [](const Point& x) { return std::exp(x[0]) * std::cos(3.0 * x[1]) + x[0] * x[1] * x[1]; };
  return f;
}

// 1. Projection convergence in three dimensions with Omega_2 = [0, 1/2]^3.
Outcome projection_convergence() {
  Outcome out;
  const Field target = sine_product(3);
  for (int p : {2, 3}) {
    const auto t0 = Clock::now();
    const std::vector<int> sizes = p == 2 ? std::vector<int>{4, 8, 16} : std::vector<int>{6, 12, 24};
    std::vector<double> hs, err;
    for (int n : sizes) {
      const Ivec e0{n, n, n}, q{p, p, p};
      auto ls = make_levels(3, e0, q, {1, 1, 1}, 2);
      DomainHierarchy h(3, e0, q);
      const int half = n / 2 / p;
      for_each_index(IndexBox{{0, 0, 0}, {half, half, half}}, [&](const Ivec& b) { h.refine_qbox({0, b}); });
      const ThbSpace space(ls, h);
      const Vector c = bezier_project(space, target).coefficients;
      hs.push_back(1.0 / n);
      err.push_back(error_report(space, target, c).max_element_rms);
    }
    const double slope = loglog_slope(hs, err);
    const double secs = seconds_since(t0);
    const bool ok = std::abs(slope - (p + 1)) <= 0.2 && secs <= 120.0;
    out.pass = out.pass && ok;
    out.detail += "p=" + std::to_string(p) + " slope " + fmt("%.3f", slope) + " (" + fmt("%.1f", secs) + " s) ";
  }
  return out;
}

// 2. Adaptive projection of the tanh ring.
Outcome adaptive_projection() {
  Outcome out;
  for (int c : {2, 3, 4}) {
    auto ls = make_levels(2, {16, 16, 1}, {2, 2, 0}, {1, 1, 1}, 10);
    AdaptiveConfig cfg;
    cfg.c = c;
    cfg.theta_refine = 0.5;
    cfg.tolerance = 1e-4;
    cfg.max_iterations = 25;
    int worst_class = 0;
    auto observer = [&](const ThbSpace& s, const Vector&, const TraceRow&) {
      worst_class = std::max(worst_class, s.admissibility_class());
    };
    const Trace t = adapt_project(ls, DomainHierarchy(2, {16, 16, 1}, {2, 2, 1}), tanh_ring(2), cfg, observer);
    bool monotone = true;
    for (std::size_t i = 1; i < t.rows.size(); ++i)
      if (t.rows[i].error_linf > t.rows[i - 1].error_linf) monotone = false;
    const bool ok = t.converged && t.rows.back().error_linf <= 1e-4 && monotone && worst_class <= c;
    out.pass = out.pass && ok;
    out.detail += "c=" + std::to_string(c) + ": " + std::to_string(t.rows.size()) + " it, err " +
                  fmt("%.2e", t.rows.back().error_linf) + (monotone ? "" : " non-monotone") + ", class " +
                  std::to_string(worst_class) + "; ";
  }
  return out;
}

// 3. Well-behaved and regular p-boxes are never overloaded.
Outcome non_overloaded_suite() {
  const auto t0 = Clock::now();
  int boxes = 0, failures = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const int p = seed % 2 ? 2 : 3;
    const int c = 2 + int(seed % 3);
    const Mesh m = random_pbox(p, c, 4, 1000 + seed);
    const ThbSpace space(m.levels, m.h);
    for (const MacroElement& me : make_partition(space).members) {
      ++boxes;
      if (!verify_non_overloaded(space, me.elements, me.functions).non_overloaded) ++failures;
    }
  }
  const double secs = seconds_since(t0);
  return {failures == 0 && secs <= 300.0, std::to_string(boxes) + " boxes, " + std::to_string(failures) +
                                              " overloaded (" + fmt("%.1f", secs) + " s)"};
}

// 4. (p+1)-box complexes are exact and satisfy the chain assumptions.
Outcome exactness_suite() {
  const auto t0 = Clock::now();
  int exact = 0, assumptions = 0, disagree = 0, total = 0;
  double worst_residual = 0.0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const int p = seed % 2 ? 2 : 3;
    const Ivec e0 = p == 2 ? Ivec{6, 6, 1} : Ivec{8, 8, 1};
    const Mesh m = random_boxes(p, {p + 1, p + 1, 1}, e0, 2, 3, 2000 + seed, 0.3);
    const ExactnessReport r = exactness_report(build_complex(m.h, {p, p, 0}));
    const bool a = check_assumption_3a(*m.levels, m.h).pass && check_assumption_3b(*m.levels, m.h).pass;
    ++total;
    worst_residual = std::max(worst_residual, r.containment_residual);
    if (r.exact()) ++exact;
    if (a) ++assumptions;
    if (a != r.exact()) ++disagree;
  }
  const bool ok = exact == total && assumptions == total && disagree == 0 && worst_residual <= 1e-10;
  return {ok, std::to_string(exact) + "/" + std::to_string(total) + " exact, " + std::to_string(assumptions) + "/" +
                  std::to_string(total) + " pass 3a/3b, " + std::to_string(disagree) + " disagreements, residual " +
                  fmt("%.1e", worst_residual) + " (" + fmt("%.1f", seconds_since(t0)) + " s)"};
}

// 5. Projector algebra on random hierarchies.
Outcome projector_algebra() {
  double repro = 0.0, idem = 0.0, lin = 0.0, local = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const int p = seed % 2 ? 2 : 3;
    const Mesh m = random_pbox(p, 2 + int(seed % 3), 4, 3000 + seed);
    const ThbSpace space(m.levels, m.h);
    const ProjectorPartition part = make_partition(space);

    std::mt19937_64 rng(seed);
    Vector g(space.num_functions());
    for (int i = 0; i < g.size(); ++i) g(i) = 2.0 * uniform01(rng()) - 1.0;
    repro = std::max(repro, (bezier_project(space, part, spline_field(space, g)).coefficients - g).cwiseAbs().maxCoeff());

    const Field f = smooth_field();
    const Vector pf = bezier_project(space, part, f).coefficients;
    const Vector ppf = bezier_project(space, part, spline_field(space, pf)).coefficients;
    idem = std::max(idem, (ppf - pf).cwiseAbs().maxCoeff());

    const Field s = sine_product(2, 2.0);
    const double a = 0.7, b = -1.3;
    Field combo;
    combo.value = [&](const Point& x) { return a * f.value(x) + b * s.value(x); };
    const Vector ps = bezier_project(space, part, s).coefficients;
    const Vector pc = bezier_project(space, part, combo).coefficients;
    lin = std::max(lin, (pc - (a * pf + b * ps)).cwiseAbs().maxCoeff());

    const int e = int(seed * 7) % space.num_elements();
    const SupportExtension ext = support_extension(space, part, e);
    Field pert;
    pert.value = [&f, ext](const Point& x) {
      double d = 0.0;
      for (int k = 0; k < 2; ++k) d += std::pow(std::max({0.0, ext.lo[k] - x[k], x[k] - ext.hi[k]}), 2);
      return f.value(x) + 50.0 * d * std::sqrt(d);
    };
    const Vector pp = bezier_project(space, part, pert).coefficients;
    for (int j : space.element_functions(e)) local = std::max(local, std::abs(pp(j) - pf(j)));
  }
  const bool ok = repro <= 1e-11 && idem <= 1e-12 && lin <= 1e-11 && local <= 1e-12;
  return {ok, "reproduction " + fmt("%.1e", repro) + ", idempotence " + fmt("%.1e", idem) + ", linearity " +
                  fmt("%.1e", lin) + ", locality " + fmt("%.1e", local)};
}

// 6. Random refine/coarsen sequences keep the class and the box structure.
Outcome admissibility_sequences() {
  int violations = 0, steps = 0;
  for (unsigned seed = 1; seed <= 200; ++seed) {
    const int c = 2 + int(seed % 3);
    const int p = seed % 2 ? 2 : 3;
    const Ivec e0 = p == 2 ? Ivec{8, 8, 1} : Ivec{6, 6, 1};
    DomainHierarchy h(2, e0, {p, p, 1});
    auto ls = make_levels(2, e0, {p, p, 0}, {1, 1, 1}, 5);
    AdmissibilityPolicy pol;
    pol.c = c;
    pol.max_levels = 5;
    std::mt19937_64 rng(seed);
    for (int step = 0; step < 10; ++step) {
      const auto act = h.active_boxes();
      std::vector<BoxId> marked;
      if (rng() % 3) {
        for (int i = 0; i < 2; ++i) {
          const BoxId b = act[rng() % act.size()];
          if (b.level + 2 <= pol.max_levels) marked.push_back(b);
        }
        h = refine_qboxes(*ls, h, marked, pol);
      } else {
        for (const BoxId& b : act)
          if (b.level > 0 && rng() % 2) marked.push_back(h.box_parent(b));
        h = coarsen_qboxes(*ls, h, marked, pol);
      }
      ++steps;
      if (!h.is_qbox_union() || ThbSpace(ls, h).admissibility_class() > c) ++violations;
    }
  }
  return {violations == 0, std::to_string(steps) + " steps, " + std::to_string(violations) + " violations"};
}

// 7. Poisson rates on uniform meshes and estimator decrease on a steep front.
Outcome poisson_sanity() {
  Field u = sine_product(2);
  u.laplacian = [](const Point& x) { return -2.0 * M_PI * M_PI * std::sin(M_PI * x[0]) * std::sin(M_PI * x[1]); };
  Field f;
  f.value = u.laplacian;
  std::vector<double> l2, h1;
  for (int n : {4, 8, 16, 32}) {
    auto ls = make_levels(2, {n, n, 1}, {2, 2, 0}, {1, 1, 1}, 1);
    const ThbSpace s(ls, DomainHierarchy(2, {n, n, 1}, {2, 2, 1}));
    const PoissonErrors e = poisson_errors(s, poisson_solve(s, f, u), u);
    l2.push_back(e.l2);
    h1.push_back(e.h1);
  }
  double min_l2 = 1e9, min_h1 = 1e9;
  for (std::size_t i = 1; i < l2.size(); ++i) {
    min_l2 = std::min(min_l2, std::log2(l2[i - 1] / l2[i]));
    min_h1 = std::min(min_h1, std::log2(h1[i - 1] / h1[i]));
  }

  const Field front = arctan_front(60.0, 0.5, -0.1, -0.1);
  auto ls = make_levels(2, {4, 4, 1}, {2, 2, 0}, {1, 1, 1}, 10);
  AdaptiveConfig cfg;
  cfg.theta_refine = 0.9;
  cfg.tolerance = 1e-6;
  cfg.max_iterations = 9;
  const Trace t = adapt_poisson(ls, DomainHierarchy(2, {4, 4, 1}, {2, 2, 1}), front, cfg);
  bool monotone = t.rows.size() >= 2;
  for (std::size_t i = 1; i < t.rows.size(); ++i)
    if (!(t.rows[i].eta_total < t.rows[i - 1].eta_total)) monotone = false;
  const bool ok = min_l2 >= 2.75 && min_h1 >= 1.75 && monotone;
  return {ok, "L2 order " + fmt("%.3f", min_l2) + ", H1 order " + fmt("%.3f", min_h1) + ", estimator " +
                  (monotone ? "decreasing" : "not decreasing") + " over " + std::to_string(t.rows.size()) +
                  " steps"};
}

std::string read_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// 8. Repeated runs give byte-identical artifacts.
Outcome determinism() {
  const std::vector<std::string> configs = {
      R"({"kind": "converge-projection", "dim": 2, "degree": 2, "mesh_sizes": [4, 8, 16]})",
      R"({"kind": "adapt-project", "degree": 2, "elements": 16, "tolerance": 1e-3, "theta_refine": 0.5})",
      R"({"kind": "adapt-poisson", "degree": 2, "elements": 4, "theta_refine": 0.9, "max_iterations": 5,
          "theta_coarsen": 0.05, "coarsen_every": 2})",
      R"({"kind": "derham-check", "degree": 2, "elements": 6, "levels": 3, "seed": 7})",
      R"({"kind": "mesh-info", "degree": 3, "elements": 6, "levels": 4, "seed": 11, "admissibility_class": 3})",
      R"({"kind": "mesh-svg", "degree": 2, "elements": 8, "levels": 4, "seed": 5})"};
  const auto root = std::filesystem::temp_directory_path() / "thbq-acceptance";
  std::filesystem::remove_all(root);
  int files = 0, differ = 0;
  for (std::size_t k = 0; k < configs.size(); ++k) {
    std::vector<std::string> artifacts[2];
    for (int run = 0; run < 2; ++run) {
      ExperimentConfig cfg = parse_experiment(configs[k]);
      cfg.output_dir = (root / ("run" + std::to_string(run)) / std::to_string(k)).string();
      artifacts[run] = run_experiment(cfg).artifacts;
    }
    if (artifacts[0] != artifacts[1]) ++differ;
    for (const auto& name : artifacts[0]) {
      ++files;
      if (read_bytes(root / "run0" / std::to_string(k) / name) != read_bytes(root / "run1" / std::to_string(k) / name))
        ++differ;
    }
  }
  std::filesystem::remove_all(root);
  return {differ == 0 && files > 0, std::to_string(files) + " artifacts compared, " + std::to_string(differ) + " differ"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"projection convergence", projection_convergence},
      {"adaptive projection", adaptive_projection},
      {"non-overloaded p-boxes", non_overloaded_suite},
      {"de Rham exactness", exactness_suite},
      {"projector algebra", projector_algebra},
      {"admissibility preservation", admissibility_sequences},
      {"Poisson sanity", poisson_sanity},
      {"determinism", determinism}};
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = int(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    Outcome r;
    try {
      r = criteria[i].second();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    if (!r.pass) ++failed;
    std::cout << (r.pass ? "PASS" : "FAIL") << " " << id << " " << criteria[i].first << ": " << r.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
