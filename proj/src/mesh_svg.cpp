#include "thbq/mesh_svg.hpp"

#include <cstdio>

#include "thbq/error.hpp"

namespace thbq {

namespace {

constexpr const char* kPalette[8] = {"#f7fbff", "#deebf7", "#c6dbef", "#9ecae1",
                                     "#6baed6", "#4292c6", "#2171b5", "#084594"};

}  // namespace

std::string mesh_svg(const ThbSpace& space) {
  require(space.dim() == 2, "mesh_svg: only two-dimensional meshes can be drawn");
  std::string out =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 1000 1000\" width=\"1000\" "
      "height=\"1000\">\n";
  char buf[256];
  for (int e = 0; e < space.num_elements(); ++e) {
    const Point lo = space.element_lo(e), hi = space.element_hi(e);
    const double x = 1000.0 * lo[0], w = 1000.0 * (hi[0] - lo[0]);
    const double y = 1000.0 * (1.0 - hi[1]), h = 1000.0 * (hi[1] - lo[1]);
    std::snprintf(buf, sizeof buf,
                  "<rect x=\"%.4f\" y=\"%.4f\" width=\"%.4f\" height=\"%.4f\" fill=\"%s\" "
                  "stroke=\"#000000\" stroke-width=\"0.5\"/>\n",
                  x, y, w, h, kPalette[space.element(e).level % 8]);
    out += buf;
  }
  out += "</svg>\n";
  return out;
}

}  // namespace thbq
