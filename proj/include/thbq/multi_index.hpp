#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <string>

namespace thbq {

inline constexpr int kMaxDim = 3;

/// Integer multi-index. Directions beyond the problem dimension hold 0
/// (or extent 1), so every loop can run over all kMaxDim directions.
using Ivec = std::array<int, kMaxDim>;
using Point = std::array<double, kMaxDim>;

/// Half-open integer box [lo, hi).
struct IndexBox {
  Ivec lo{0, 0, 0};
  Ivec hi{1, 1, 1};

  bool empty() const {
    for (int d = 0; d < kMaxDim; ++d)
      if (hi[d] <= lo[d]) return true;
    return false;
  }
  std::int64_t count() const {
    if (empty()) return 0;
    std::int64_t n = 1;
    for (int d = 0; d < kMaxDim; ++d) n *= hi[d] - lo[d];
    return n;
  }
  bool contains(const Ivec& i) const {
    for (int d = 0; d < kMaxDim; ++d)
      if (i[d] < lo[d] || i[d] >= hi[d]) return false;
    return true;
  }
  bool contains(const IndexBox& o) const {
    for (int d = 0; d < kMaxDim; ++d)
      if (o.lo[d] < lo[d] || o.hi[d] > hi[d]) return false;
    return true;
  }
  IndexBox intersect(const IndexBox& o) const {
    IndexBox r;
    for (int d = 0; d < kMaxDim; ++d) {
      r.lo[d] = lo[d] > o.lo[d] ? lo[d] : o.lo[d];
      r.hi[d] = hi[d] < o.hi[d] ? hi[d] : o.hi[d];
    }
    return r;
  }
  auto operator<=>(const IndexBox&) const = default;
};

/// Visits every index of a box; the first direction varies fastest.
template <class F>
void for_each_index(const IndexBox& b, F&& f) {
  if (b.empty()) return;
  Ivec i;
  for (i[2] = b.lo[2]; i[2] < b.hi[2]; ++i[2])
    for (i[1] = b.lo[1]; i[1] < b.hi[1]; ++i[1])
      for (i[0] = b.lo[0]; i[0] < b.hi[0]; ++i[0]) f(static_cast<const Ivec&>(i));
}

/// Extents of a structured grid with first-direction-fastest flattening.
struct GridShape {
  Ivec extent{1, 1, 1};

  std::int64_t size() const {
    return std::int64_t(extent[0]) * extent[1] * extent[2];
  }
  std::int64_t flat(const Ivec& i) const {
    return i[0] + std::int64_t(extent[0]) * (i[1] + std::int64_t(extent[1]) * i[2]);
  }
  Ivec unflat(std::int64_t f) const {
    Ivec i;
    i[0] = int(f % extent[0]);
    f /= extent[0];
    i[1] = int(f % extent[1]);
    i[2] = int(f / extent[1]);
    return i;
  }
  bool in_bounds(const Ivec& i) const {
    for (int d = 0; d < kMaxDim; ++d)
      if (i[d] < 0 || i[d] >= extent[d]) return false;
    return true;
  }
  IndexBox box() const { return IndexBox{{0, 0, 0}, extent}; }
};

std::string to_string(const Ivec& i, int dim);

}  // namespace thbq
