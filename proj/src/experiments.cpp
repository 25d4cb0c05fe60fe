#include "thbq/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "thbq/adaptive.hpp"
#include "thbq/bezier_projection.hpp"
#include "thbq/derham.hpp"
#include "thbq/error.hpp"
#include "thbq/hierarchy_io.hpp"
#include "thbq/mesh_svg.hpp"
#include "thbq/poisson.hpp"
#include "thbq/qbox.hpp"
#include "thbq/random_hierarchy.hpp"

namespace thbq {

using nlohmann::json;

namespace {

const std::set<std::string> kKinds = {"converge-projection", "adapt-project", "adapt-poisson",
                                      "derham-check",        "mesh-info",     "mesh-svg"};

const std::set<std::string> kFields = {
    "kind",          "dim",           "degree",        "multiplicity",   "admissibility_class",
    "theta_refine",  "theta_coarsen", "coarsen_every", "tolerance",      "max_iterations",
    "max_levels",    "seed",          "output_dir",    "elements",       "mesh_sizes",
    "target",        "levels",        "fraction",      "hierarchy",      "front",
    "svg"};

[[noreturn]] void fail(const std::string& msg) { throw ConfigError("config: " + msg); }

int get_int(const json& j, const char* name) {
  if (!j.is_number_integer()) fail(std::string("'") + name + "' must be an integer");
  return j.get<int>();
}

double get_double(const json& j, const char* name) {
  if (!j.is_number()) fail(std::string("'") + name + "' must be a number");
  return j.get<double>();
}

std::string get_string(const json& j, const char* name) {
  if (!j.is_string()) fail(std::string("'") + name + "' must be a string");
  return j.get<std::string>();
}

Ivec get_ivec(const json& j, const char* name, int dim, int fill) {
  Ivec v{fill, fill, fill};
  if (j.is_number_integer()) {
    for (int d = 0; d < dim; ++d) v[d] = j.get<int>();
    return v;
  }
  if (!j.is_array() || int(j.size()) != dim)
    fail(std::string("'") + name + "' must be an integer or an array of length dim");
  for (int d = 0; d < dim; ++d) v[d] = get_int(j[d], name);
  return v;
}

int max_of(const Ivec& v, int dim) {
  int m = v[0];
  for (int d = 1; d < dim; ++d) m = std::max(m, v[d]);
  return m;
}

int min_of(const Ivec& v, int dim) {
  int m = v[0];
  for (int d = 1; d < dim; ++d) m = std::min(m, v[d]);
  return m;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string svg_name(int step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "mesh_step%03d.svg", step);
  return buf;
}

json ivec_json(const Ivec& v, int dim) {
  json a = json::array();
  for (int d = 0; d < dim; ++d) a.push_back(v[d]);
  return a;
}

AdaptiveConfig adaptive_config(const ExperimentConfig& cfg) {
  AdaptiveConfig a;
  a.theta_refine = cfg.theta_refine;
  a.theta_coarsen = cfg.theta_coarsen;
  a.c = cfg.admissibility_class;
  a.tolerance = cfg.tolerance;
  a.max_iterations = cfg.max_iterations;
  a.coarsen_every = cfg.coarsen_every;
  a.max_levels = cfg.max_levels;
  return a;
}

class Runner {
 public:
  Runner(const ExperimentConfig& cfg, std::ostream* log) : cfg_(cfg), log_(log), dir_(cfg.output_dir) {
    std::filesystem::create_directories(dir_);
  }

  ExperimentResult run() {
    if (cfg_.kind == "converge-projection") return converge_projection();
    if (cfg_.kind == "adapt-project") return adapt_projection();
    if (cfg_.kind == "adapt-poisson") return adaptive_poisson();
    if (cfg_.kind == "derham-check") return derham_check();
    if (cfg_.kind == "mesh-info") return mesh_info();
    return mesh_picture();
  }

 private:
  void say(const std::string& line) {
    if (log_) *log_ << line << "\n";
  }

  void emit(const std::string& name, const std::string& text) {
    write_file(dir_ / name, text);
    result_.artifacts.push_back(name);
  }

  DomainHierarchy given_or_random(const LevelSequence& levels, const Ivec& q) {
    if (!cfg_.hierarchy.empty()) {
      const HierarchyDocument doc = read_hierarchy(cfg_.hierarchy);
      if (doc.dim != cfg_.dim) fail("hierarchy dimension differs from 'dim'");
      if (doc.hierarchy.level0_elements() != levels.level(0).elements().extent)
        fail("hierarchy level-0 mesh differs from 'elements'");
      if (doc.hierarchy.num_levels() > levels.num_levels()) fail("hierarchy is deeper than 'levels'");
      DomainHierarchy h = doc.hierarchy.with_q(q);
      try {
        h.validate();
      } catch (const InvalidArgument& e) {
        fail(std::string("hierarchy is not a union of the required boxes: ") + e.what());
      }
      return h;
    }
    RandomHierarchyOptions opt;
    opt.dim = cfg_.dim;
    opt.level0_elements = cfg_.elements;
    opt.q = q;
    opt.levels = cfg_.levels;
    opt.fraction = cfg_.fraction;
    opt.policy.c = cfg_.admissibility_class;
    opt.policy.max_levels = cfg_.levels;
    if (cfg_.levels == 1) return DomainHierarchy(cfg_.dim, cfg_.elements, q);
    return random_hierarchy(levels, opt, cfg_.seed);
  }

  json hierarchy_json(const DomainHierarchy& h) const {
    HierarchyDocument doc;
    doc.dim = cfg_.dim;
    doc.degree = cfg_.degree;
    doc.multiplicity = Ivec{cfg_.multiplicity, cfg_.multiplicity, cfg_.multiplicity};
    doc.hierarchy = h;
    return json::parse(to_json(doc));
  }

  Ivec multiplicity() const {
    Ivec m{1, 1, 1};
    for (int d = 0; d < cfg_.dim; ++d) m[d] = cfg_.multiplicity;
    return m;
  }

  ExperimentResult converge_projection() {
    const int dim = cfg_.dim;
    const int p = max_of(cfg_.degree, dim);
    const Field target = sine_product(dim);
    std::vector<double> hs, rms;
    std::string csv = "h,ndof,nelem,max_element_l2,max_element_rms,l2,linf,slope\n";
    std::vector<std::string> rows;
    for (int n : cfg_.mesh_sizes) {
      for (int d = 0; d < dim; ++d)
        if (n % 2 != 0 || (n / 2) % cfg_.degree[d] != 0)
          fail("mesh size " + std::to_string(n) + " does not split [0,1/2] into p-boxes");
      Ivec e0{1, 1, 1}, q{1, 1, 1};
      for (int d = 0; d < dim; ++d) {
        e0[d] = n;
        q[d] = cfg_.degree[d];
      }
      auto levels = make_levels(dim, e0, cfg_.degree, multiplicity(), 2);
      DomainHierarchy h(dim, e0, q);
      Ivec half{1, 1, 1};
      for (int d = 0; d < dim; ++d) half[d] = n / 2 / q[d];
      for_each_index(IndexBox{{0, 0, 0}, half}, [&](const Ivec& b) { h.refine_qbox(BoxId{0, b}); });
      const ThbSpace space(levels, h);
      const Vector c = bezier_project(space, target).coefficients;
      const ErrorReport rep = error_report(space, target, c);
      hs.push_back(1.0 / n);
      rms.push_back(rep.max_element_rms);
      char buf[512];
      std::snprintf(buf, sizeof buf, "%.17g,%d,%d,%.17g,%.17g,%.17g,%.17g,", 1.0 / n, space.num_functions(),
                    space.num_elements(), rep.max_element_l2, rep.max_element_rms, rep.l2, rep.linf);
      rows.push_back(buf);
      say("h=1/" + std::to_string(n) + " ndof " + std::to_string(space.num_functions()) + " max element rms " +
          std::to_string(rep.max_element_rms));
    }
    const double slope = hs.size() >= 2 ? loglog_slope(hs, rms) : std::nan("");
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g\n", slope);
    for (const auto& r : rows) csv += r + buf;
    emit("converge.csv", csv);
    const bool ok = std::abs(slope - (p + 1)) <= 0.2;
    json rep;
    rep["kind"] = cfg_.kind;
    rep["dim"] = dim;
    rep["degree"] = ivec_json(cfg_.degree, dim);
    rep["slope"] = slope;
    rep["expected_slope"] = p + 1;
    rep["pass"] = ok;
    emit("report.json", rep.dump(2) + "\n");
    say("fitted slope " + std::to_string(slope) + " (expected " + std::to_string(p + 1) + ")");
    result_.exit_code = ok ? 0 : 2;
    result_.summary = "slope " + std::to_string(slope);
    return result_;
  }

  StepObserver step_logger(const std::string& error_label) {
    return [this, error_label](const ThbSpace& space, const Vector&, const TraceRow& row) {
      std::ostringstream os;
      os << "step " << row.step << " ndof " << row.ndof << " nelem " << row.nelem << " " << error_label
         << " " << row.error_linf << " eta " << row.eta_total;
      say(os.str());
      if (cfg_.svg && cfg_.dim == 2) emit(svg_name(row.step), mesh_svg(space));
    };
  }

  Ivec box_elements() const {
    Ivec e0{1, 1, 1};
    for (int d = 0; d < cfg_.dim; ++d) e0[d] = cfg_.elements[d];
    return e0;
  }

  Ivec pbox() const {
    Ivec q{1, 1, 1};
    for (int d = 0; d < cfg_.dim; ++d) q[d] = cfg_.degree[d];
    return q;
  }

  ExperimentResult adapt_projection() {
    const Field target = cfg_.target == "sine" ? sine_product(cfg_.dim) : tanh_ring(cfg_.dim);
    auto levels = make_levels(cfg_.dim, box_elements(), cfg_.degree, multiplicity(), cfg_.max_levels);
    const DomainHierarchy h0(cfg_.dim, box_elements(), pbox());
    h0.validate();
    const Trace t = adapt_project(levels, h0, target, adaptive_config(cfg_), step_logger("error_linf"));
    emit("trace.csv", trace_csv(t));
    say("iterations " + std::to_string(t.rows.size()) + (t.converged ? " converged" : " not converged"));
    if (!t.note.empty()) say(t.note);
    result_.exit_code = t.converged ? 0 : 2;
    result_.summary = t.converged ? "tolerance reached" : "tolerance not reached";
    return result_;
  }

  ExperimentResult adaptive_poisson() {
    if (cfg_.dim != 2) fail("adapt-poisson runs on the unit square (dim 2)");
    const Field exact =
        arctan_front(cfg_.front_alpha, cfg_.front_radius, cfg_.front_center[0], cfg_.front_center[1]);
    auto levels = make_levels(2, box_elements(), cfg_.degree, multiplicity(), cfg_.max_levels);
    const DomainHierarchy h0(2, box_elements(), pbox());
    h0.validate();
    const Trace t = adapt_poisson(levels, h0, exact, adaptive_config(cfg_), step_logger("error_linf"));
    emit("trace.csv", trace_csv(t));
    bool monotone = true;
    for (std::size_t i = 1; i < t.rows.size(); ++i)
      if (!(t.rows[i].eta_total < t.rows[i - 1].eta_total)) monotone = false;
    say("iterations " + std::to_string(t.rows.size()) + (t.converged ? " converged" : " not converged"));
    if (!t.note.empty()) say(t.note);
    say(monotone ? "estimator decreased at every step" : "estimator increased at some step");
    result_.exit_code = monotone ? 0 : 2;
    result_.summary = monotone ? "estimator monotone" : "estimator not monotone";
    return result_;
  }

  ExperimentResult derham_check() {
    Ivec q{1, 1, 1};
    for (int d = 0; d < cfg_.dim; ++d) q[d] = cfg_.degree[d] + 1;
    auto levels = make_levels(cfg_.dim, box_elements(), cfg_.degree, multiplicity(), cfg_.levels);
    const DomainHierarchy h = given_or_random(*levels, q);
    const ComplexSpaces cs = build_complex(h, cfg_.degree, cfg_.multiplicity);
    const ExactnessReport r = exactness_report(cs);
    const AssumptionCheck a = check_assumption_3a(*levels, h);
    const AssumptionCheck b = check_assumption_3b(*levels, h);
    json rep;
    rep["kind"] = cfg_.kind;
    rep["dim"] = cfg_.dim;
    rep["degree"] = ivec_json(cfg_.degree, cfg_.dim);
    rep["multiplicity"] = cfg_.multiplicity;
    rep["seed"] = cfg_.seed;
    rep["dims"] = r.dims;
    rep["ranks"] = r.ranks;
    for (std::size_t k = 0; k < r.betti.size(); ++k) rep["h" + std::to_string(k)] = r.betti[k];
    rep["residual"] = r.containment_residual;
    rep["indeterminate"] = r.indeterminate;
    rep["verdict"] = r.verdict();
    rep["assumption3a"] = {{"pass", a.pass}, {"checked", a.checked}, {"detail", a.describe(cfg_.dim)}};
    rep["assumption3b"] = {{"pass", b.pass}, {"checked", b.checked}, {"detail", b.describe(cfg_.dim)}};
    rep["hierarchy"] = hierarchy_json(h);
    emit("report.json", rep.dump(2) + "\n");
    if (cfg_.svg && cfg_.dim == 2) emit(svg_name(0), mesh_svg(cs.forms[0][0]));
    std::ostringstream os;
    os << "betti";
    for (int v : r.betti) os << " " << v;
    os << " verdict " << r.verdict() << " assumptions " << (a.pass ? "3a pass" : "3a fail") << ", "
       << (b.pass ? "3b pass" : "3b fail");
    say(os.str());
    result_.exit_code = r.exact() ? 0 : 2;
    result_.summary = r.verdict();
    return result_;
  }

  ExperimentResult mesh_info() {
    auto levels = make_levels(cfg_.dim, box_elements(), cfg_.degree, multiplicity(), cfg_.levels);
    const ThbSpace space(levels, given_or_random(*levels, pbox()));
    const QBoxMesh mesh = classify(space, pbox());
    json rep;
    rep["kind"] = cfg_.kind;
    rep["dim"] = cfg_.dim;
    rep["degree"] = ivec_json(cfg_.degree, cfg_.dim);
    rep["seed"] = cfg_.seed;
    rep["levels"] = space.num_levels();
    rep["elements"] = space.num_elements();
    rep["functions"] = space.num_functions();
    rep["active_boxes"] = mesh.active().size();
    rep["border_boxes"] = mesh.border().size();
    rep["well_behaved_boxes"] = mesh.well_behaved().size();
    rep["regular_boxes"] = mesh.regular().size();
    rep["admissibility_class"] = space.admissibility_class();
    rep["qbox_admissibility_class"] = qbox_admissibility_class(space);
    rep["hierarchy"] = hierarchy_json(space.hierarchy());
    emit("report.json", rep.dump(2) + "\n");
    say("levels " + std::to_string(space.num_levels()) + " elements " + std::to_string(space.num_elements()) +
        " functions " + std::to_string(space.num_functions()));
    result_.summary = std::to_string(space.num_elements()) + " elements";
    return result_;
  }

  ExperimentResult mesh_picture() {
    if (cfg_.dim != 2) fail("mesh-svg draws two-dimensional meshes only");
    auto levels = make_levels(2, box_elements(), cfg_.degree, multiplicity(), cfg_.levels);
    const ThbSpace space(levels, given_or_random(*levels, pbox()));
    emit(svg_name(0), mesh_svg(space));
    say("elements " + std::to_string(space.num_elements()));
    result_.summary = std::to_string(space.num_elements()) + " elements";
    return result_;
  }

  const ExperimentConfig& cfg_;
  std::ostream* log_;
  std::filesystem::path dir_;
  ExperimentResult result_;
};

}  // namespace

ExperimentConfig parse_experiment(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) fail("document must be an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!kFields.count(it.key())) fail("unknown field '" + it.key() + "'");
  if (!j.contains("kind")) fail("missing field 'kind'");

  ExperimentConfig c;
  c.kind = get_string(j["kind"], "kind");
  if (!kKinds.count(c.kind)) fail("unknown kind '" + c.kind + "'");
  if (j.contains("dim")) c.dim = get_int(j["dim"], "dim");
  if (c.dim != 2 && c.dim != 3) fail("'dim' must be 2 or 3");
  c.degree = j.contains("degree") ? get_ivec(j["degree"], "degree", c.dim, 0) : Ivec{2, 2, c.dim == 3 ? 2 : 0};
  c.elements = j.contains("elements") ? get_ivec(j["elements"], "elements", c.dim, 1)
                                      : Ivec{16, 16, c.dim == 3 ? 16 : 1};
  if (j.contains("multiplicity")) c.multiplicity = get_int(j["multiplicity"], "multiplicity");
  if (j.contains("admissibility_class")) c.admissibility_class = get_int(j["admissibility_class"], "admissibility_class");
  if (j.contains("theta_refine")) c.theta_refine = get_double(j["theta_refine"], "theta_refine");
  if (j.contains("theta_coarsen")) c.theta_coarsen = get_double(j["theta_coarsen"], "theta_coarsen");
  if (j.contains("coarsen_every")) c.coarsen_every = get_int(j["coarsen_every"], "coarsen_every");
  if (j.contains("tolerance")) c.tolerance = get_double(j["tolerance"], "tolerance");
  if (j.contains("max_iterations")) c.max_iterations = get_int(j["max_iterations"], "max_iterations");
  if (j.contains("max_levels")) c.max_levels = get_int(j["max_levels"], "max_levels");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) fail("'seed' must be a nonnegative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("output_dir")) c.output_dir = get_string(j["output_dir"], "output_dir");
  if (j.contains("mesh_sizes")) {
    if (!j["mesh_sizes"].is_array() || j["mesh_sizes"].empty()) fail("'mesh_sizes' must be a nonempty array");
    c.mesh_sizes.clear();
    for (const auto& v : j["mesh_sizes"]) c.mesh_sizes.push_back(get_int(v, "mesh_sizes"));
  }
  if (j.contains("target")) c.target = get_string(j["target"], "target");
  if (j.contains("levels")) c.levels = get_int(j["levels"], "levels");
  if (j.contains("fraction")) c.fraction = get_double(j["fraction"], "fraction");
  if (j.contains("hierarchy")) c.hierarchy = get_string(j["hierarchy"], "hierarchy");
  if (j.contains("front")) {
    const json& f = j["front"];
    if (!f.is_object()) fail("'front' must be an object");
    for (auto it = f.begin(); it != f.end(); ++it)
      if (it.key() != "alpha" && it.key() != "radius" && it.key() != "center")
        fail("unknown field 'front." + it.key() + "'");
    if (f.contains("alpha")) c.front_alpha = get_double(f["alpha"], "front.alpha");
    if (f.contains("radius")) c.front_radius = get_double(f["radius"], "front.radius");
    if (f.contains("center")) {
      if (!f["center"].is_array() || f["center"].size() != 2) fail("'front.center' must be an array of length 2");
      c.front_center[0] = get_double(f["center"][0], "front.center");
      c.front_center[1] = get_double(f["center"][1], "front.center");
    }
  }
  if (j.contains("svg")) {
    if (!j["svg"].is_boolean()) fail("'svg' must be a boolean");
    c.svg = j["svg"].get<bool>();
  }

  if (min_of(c.degree, c.dim) < 1) fail("'degree' must be at least 1");
  if (min_of(c.elements, c.dim) < 1) fail("'elements' must be positive");
  if (c.multiplicity < 1 || c.multiplicity > min_of(c.degree, c.dim))
    fail("'multiplicity' must lie in [1, min degree]");
  if (c.admissibility_class < 0) fail("'admissibility_class' must be nonnegative (0: unbounded)");
  if (c.levels < 1) fail("'levels' must be at least 1");
  if (!(c.fraction > 0.0 && c.fraction <= 1.0)) fail("'fraction' must lie in (0, 1]");
  if (c.target != "tanh-ring" && c.target != "sine") fail("'target' must be tanh-ring or sine");
  if (c.output_dir.empty()) fail("'output_dir' must not be empty");
  for (int n : c.mesh_sizes)
    if (n < 1) fail("'mesh_sizes' must be positive");
  if (!(c.front_alpha > 0.0)) fail("'front.alpha' must be positive");
  try {
    adaptive_config(c).validate();
  } catch (const InvalidArgument& e) {
    fail(e.what());
  }
  return c;
}

ExperimentConfig read_experiment(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_experiment(ss.str());
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, std::ostream* log) {
  Runner runner(cfg, log);
  return runner.run();
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2, "loglog_slope: need at least two points");
  const double n = double(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace thbq
