#include "thbq/hierarchy_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "thbq/error.hpp"

namespace thbq {

using nlohmann::json;

std::shared_ptr<const LevelSequence> HierarchyDocument::levels(int extra_levels) const {
  return make_levels(dim, hierarchy.level0_elements(), degree, multiplicity,
                     hierarchy.num_levels() + extra_levels);
}

ThbSpace HierarchyDocument::space(BasisKind kind) const {
  return ThbSpace(levels(), hierarchy, kind);
}

namespace {

json ivec_json(const Ivec& v, int dim) {
  json a = json::array();
  for (int d = 0; d < dim; ++d) a.push_back(v[d]);
  return a;
}

Ivec ivec_from(const json& j, int dim, const char* name, Ivec fill) {
  if (!j.is_array() || int(j.size()) != dim)
    throw ConfigError(std::string("hierarchy: field '") + name + "' must be an array of length dim");
  Ivec v = fill;
  for (int d = 0; d < dim; ++d) {
    if (!j[d].is_number_integer())
      throw ConfigError(std::string("hierarchy: field '") + name + "' must hold integers");
    v[d] = j[d].get<int>();
  }
  return v;
}

}  // namespace

std::string to_json(const HierarchyDocument& doc) {
  const DomainHierarchy& h = doc.hierarchy;
  json j;
  j["dim"] = doc.dim;
  j["degree"] = ivec_json(doc.degree, doc.dim);
  j["multiplicity"] = ivec_json(doc.multiplicity, doc.dim);
  j["level1_elements_per_dir"] = ivec_json(h.level0_elements(), doc.dim);
  j["qbox_q"] = ivec_json(h.q(), doc.dim);
  json levels = json::array();
  for (int l = 0; l + 1 < h.num_levels(); ++l) {
    std::set<BoxId> boxes;
    const GridShape g = h.element_grid(l);
    for (std::int64_t f : h.refined_set(l)) boxes.insert(h.box_of({l, g.unflat(f)}));
    json lv = json::array();
    for (const BoxId& b : boxes) lv.push_back(ivec_json(b.index, doc.dim));
    levels.push_back(lv);
  }
  j["refined_boxes"] = levels;
  return j.dump(2) + "\n";
}

HierarchyDocument hierarchy_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("hierarchy: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("hierarchy: document must be an object");
  static const std::set<std::string> known = {"dim", "degree", "multiplicity",
                                              "level1_elements_per_dir", "qbox_q", "refined_boxes"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key())) throw ConfigError("hierarchy: unknown field '" + it.key() + "'");
  for (const auto& k : known)
    if (!j.contains(k)) throw ConfigError("hierarchy: missing field '" + k + "'");
  if (!j["dim"].is_number_integer()) throw ConfigError("hierarchy: 'dim' must be an integer");
  const int dim = j["dim"].get<int>();
  if (dim < 1 || dim > kMaxDim) throw ConfigError("hierarchy: 'dim' must be 1, 2 or 3");

  HierarchyDocument doc;
  doc.dim = dim;
  doc.degree = ivec_from(j["degree"], dim, "degree", {0, 0, 0});
  doc.multiplicity = ivec_from(j["multiplicity"], dim, "multiplicity", {1, 1, 1});
  const Ivec e0 = ivec_from(j["level1_elements_per_dir"], dim, "level1_elements_per_dir", {1, 1, 1});
  const Ivec q = ivec_from(j["qbox_q"], dim, "qbox_q", {1, 1, 1});
  for (int d = 0; d < dim; ++d) {
    if (doc.degree[d] < 0) throw ConfigError("hierarchy: negative degree");
    if (doc.multiplicity[d] < 1 || doc.multiplicity[d] > doc.degree[d] + 1)
      throw ConfigError("hierarchy: multiplicity must lie in [1, degree + 1]");
  }
  try {
    doc.hierarchy = DomainHierarchy(dim, e0, q);
    const json& levels = j["refined_boxes"];
    if (!levels.is_array()) throw ConfigError("hierarchy: 'refined_boxes' must be an array");
    for (int l = 0; l < int(levels.size()); ++l) {
      if (!levels[l].is_array()) throw ConfigError("hierarchy: 'refined_boxes' entries must be arrays");
      for (const json& b : levels[l]) {
        const BoxId id{l, ivec_from(b, dim, "refined_boxes", {0, 0, 0})};
        if (!doc.hierarchy.box_grid(l).in_bounds(id.index))
          throw ConfigError("hierarchy: refined box out of range at level " + std::to_string(l + 1));
        if (!doc.hierarchy.box_inside(id))
          throw ConfigError("hierarchy: refined boxes are not nested at level " + std::to_string(l + 1));
        doc.hierarchy.refine_qbox(id);
      }
    }
    doc.hierarchy.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("hierarchy: ") + e.what());
  }
  return doc;
}

HierarchyDocument read_hierarchy(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open hierarchy file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return hierarchy_from_json(ss.str());
}

void write_hierarchy(const std::string& path, const HierarchyDocument& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << to_json(doc);
}

}  // namespace thbq
