#include <gtest/gtest.h>

#include <filesystem>
#include <regex>
#include <set>
#include <string>

#include "thbq/error.hpp"
#include "thbq/experiments.hpp"
#include "thbq/hierarchy_io.hpp"
#include "thbq/mesh_svg.hpp"
#include "thbq/random_hierarchy.hpp"

using namespace thbq;

namespace {

int count(const std::string& text, const std::string& needle) {
  int n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

std::set<std::string> fills(const std::string& svg) {
  std::set<std::string> out;
  const std::regex re("fill=\"(#[0-9a-f]{6})\"");
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), re); it != std::sregex_iterator(); ++it)
    out.insert((*it)[1]);
  return out;
}

HierarchyDocument random_document(std::uint64_t seed) {
  HierarchyDocument doc;
  doc.dim = 2;
  doc.degree = {2, 2, 0};
  RandomHierarchyOptions o;
  o.level0_elements = {8, 8, 1};
  o.q = {2, 2, 1};
  o.levels = 4;
  auto ls = make_levels(2, o.level0_elements, doc.degree, {1, 1, 1}, 4);
  doc.hierarchy = random_hierarchy(*ls, o, seed);
  return doc;
}

}  // namespace

TEST(HierarchyJson, RoundTrip) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const HierarchyDocument doc = random_document(seed);
    const std::string text = to_json(doc);
    const HierarchyDocument back = hierarchy_from_json(text);
    EXPECT_TRUE(back.hierarchy == doc.hierarchy);
    EXPECT_EQ(back.degree, doc.degree);
    EXPECT_EQ(to_json(back), text);
  }
}

TEST(HierarchyJson, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "thbq_io_hierarchy.json";
  const HierarchyDocument doc = random_document(9);
  write_hierarchy(path.string(), doc);
  EXPECT_TRUE(read_hierarchy(path.string()).hierarchy == doc.hierarchy);
  std::filesystem::remove(path);
}

TEST(HierarchyJson, RejectsMalformedDocuments) {
  const std::string good = to_json(random_document(2));
  EXPECT_THROW(hierarchy_from_json("{"), ConfigError);
  EXPECT_THROW(hierarchy_from_json("[]"), ConfigError);
  std::string extra = good;
  extra.insert(1, "\"colour\": 1,");
  EXPECT_THROW(hierarchy_from_json(extra), ConfigError);
  // a level-1 box refined without its parent being refined
  EXPECT_THROW(hierarchy_from_json(R"({"dim": 2, "degree": [2, 2], "multiplicity": [1, 1],
      "level1_elements_per_dir": [4, 4], "qbox_q": [2, 2], "refined_boxes": [[], [[0, 0]]]})"),
               ConfigError);
  EXPECT_THROW(hierarchy_from_json(R"({"dim": 2, "degree": [2, 2], "multiplicity": [1, 1],
      "level1_elements_per_dir": [4, 4], "qbox_q": [2, 2], "refined_boxes": [[[5, 0]]]})"),
               ConfigError);
}

TEST(MeshSvg, UniformMeshOneColour) {
  auto ls = make_levels(2, {4, 4, 1}, {2, 2, 0}, {1, 1, 1}, 1);
  const std::string svg = mesh_svg(ThbSpace(ls, DomainHierarchy(2, {4, 4, 1}, {2, 2, 1})));
  EXPECT_EQ(count(svg, "<rect"), 16);
  EXPECT_EQ(fills(svg).size(), 1u);
  EXPECT_NE(svg.find("viewBox=\"0 0 1000 1000\""), std::string::npos);
}

TEST(MeshSvg, RectanglePerActiveElement) {
  const HierarchyDocument doc = random_document(4);
  auto ls = make_levels(2, {8, 8, 1}, doc.degree, {1, 1, 1}, 4);
  const ThbSpace space(ls, doc.hierarchy);
  ASSERT_GT(space.num_levels(), 1);
  const std::string svg = mesh_svg(space);
  EXPECT_EQ(count(svg, "<rect"), space.num_elements());
  EXPECT_EQ(int(fills(svg).size()), space.num_levels());
  EXPECT_EQ(svg, mesh_svg(ThbSpace(ls, doc.hierarchy)));
}

TEST(ExperimentConfig, Defaults) {
  const ExperimentConfig c = parse_experiment(R"({"kind": "adapt-project"})");
  EXPECT_EQ(c.dim, 2);
  EXPECT_EQ(c.degree, (Ivec{2, 2, 0}));
  EXPECT_EQ(c.elements, (Ivec{16, 16, 1}));
  EXPECT_EQ(c.admissibility_class, 2);
  EXPECT_DOUBLE_EQ(c.theta_refine, 0.5);
  EXPECT_DOUBLE_EQ(c.tolerance, 1e-4);
}

TEST(ExperimentConfig, ScalarAndArrayVectors) {
  const ExperimentConfig a = parse_experiment(R"({"kind": "mesh-info", "dim": 3, "degree": 3, "elements": 6})");
  EXPECT_EQ(a.degree, (Ivec{3, 3, 3}));
  EXPECT_EQ(a.elements, (Ivec{6, 6, 6}));
  const ExperimentConfig b = parse_experiment(R"({"kind": "mesh-info", "degree": [2, 3], "elements": [8, 6]})");
  EXPECT_EQ(b.degree, (Ivec{2, 3, 0}));
  EXPECT_EQ(b.elements, (Ivec{8, 6, 1}));
}

TEST(ExperimentConfig, RejectsInvalid) {
  const char* bad[] = {
      "not json",
      "[1]",
      R"({"dim": 2})",
      R"({"kind": "plot"})",
      R"({"kind": "mesh-info", "colour": "red"})",
      R"({"kind": "mesh-info", "dim": 4})",
      R"({"kind": "mesh-info", "degree": [2]})",
      R"({"kind": "mesh-info", "degree": 0})",
      R"({"kind": "mesh-info", "multiplicity": 3})",
      R"({"kind": "adapt-project", "theta_refine": 0.2, "theta_coarsen": 0.3})",
      R"({"kind": "adapt-project", "tolerance": -1})",
      R"({"kind": "adapt-project", "seed": -3})",
      R"({"kind": "adapt-project", "target": "bump"})",
      R"({"kind": "adapt-poisson", "front": {"alpha": 10, "width": 2}})",
      R"({"kind": "mesh-info", "fraction": 0})",
      R"({"kind": "mesh-info", "svg": 1})"};
  for (const char* text : bad) EXPECT_THROW(parse_experiment(text), ConfigError) << text;
}

TEST(ExperimentConfig, LoglogSlope) {
  EXPECT_NEAR(loglog_slope({1.0, 0.5, 0.25}, {3.0, 3.0 / 8.0, 3.0 / 64.0}), 3.0, 1e-14);
  EXPECT_THROW(loglog_slope({1.0}, {1.0}), InvalidArgument);
}

TEST(ExperimentConfig, ShippedConfigsParse) {
  int n = 0;
  for (const auto& entry : std::filesystem::directory_iterator(THBQ_CONFIG_DIR)) {
    if (entry.path().extension() != ".json") continue;
    EXPECT_NO_THROW(read_experiment(entry.path().string())) << entry.path();
    ++n;
  }
  EXPECT_GE(n, 5);
}
