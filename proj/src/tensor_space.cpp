#include "thbq/tensor_space.hpp"

#include "thbq/error.hpp"

namespace thbq {

namespace {

KnotVector trivial_direction() { return KnotVector({0.0, 1.0}, 0, 1); }

std::array<KnotVector, kMaxDim> pad(const std::vector<KnotVector>& dirs) {
  require(!dirs.empty() && int(dirs.size()) <= kMaxDim, "TensorSpace: dimension must be 1..3");
  return {dirs.size() > 0 ? dirs[0] : trivial_direction(),
          dirs.size() > 1 ? dirs[1] : trivial_direction(),
          dirs.size() > 2 ? dirs[2] : trivial_direction()};
}

}  // namespace

TensorSpace::TensorSpace(int dim, std::array<KnotVector, kMaxDim> directions)
    : dim_(dim), kv_(std::move(directions)) {
  require(dim >= 1 && dim <= kMaxDim, "TensorSpace: dimension must be 1..3");
  for (int d = dim; d < kMaxDim; ++d) kv_[d] = trivial_direction();
  nloc_ = 1;
  for (int d = 0; d < kMaxDim; ++d) {
    elems_.extent[d] = kv_[d].num_elements();
    basis_.extent[d] = kv_[d].num_basis();
    nloc_ *= kv_[d].degree() + 1;
  }
}

TensorSpace::TensorSpace(const std::vector<KnotVector>& directions)
    : TensorSpace(int(directions.size()), pad(directions)) {}

TensorSpace TensorSpace::uniform(int dim, const Ivec& elements, const Ivec& degree,
                                 const Ivec& multiplicity) {
  std::vector<KnotVector> dirs;
  for (int d = 0; d < dim; ++d)
    dirs.push_back(KnotVector::uniform(elements[d], degree[d], multiplicity[d]));
  return TensorSpace(dirs);
}

Ivec TensorSpace::degree() const {
  return {kv_[0].degree(), kv_[1].degree(), kv_[2].degree()};
}

IndexBox TensorSpace::support(const Ivec& j) const {
  IndexBox b;
  for (int d = 0; d < kMaxDim; ++d) {
    auto [lo, hi] = kv_[d].support(j[d]);
    b.lo[d] = lo;
    b.hi[d] = hi;
  }
  return b;
}

IndexBox TensorSpace::functions_on(const Ivec& e) const {
  IndexBox b;
  for (int d = 0; d < kMaxDim; ++d) {
    b.lo[d] = kv_[d].first_basis(e[d]);
    b.hi[d] = b.lo[d] + kv_[d].degree() + 1;
  }
  return b;
}

Ivec TensorSpace::first_basis(const Ivec& e) const {
  return {kv_[0].first_basis(e[0]), kv_[1].first_basis(e[1]), kv_[2].first_basis(e[2])};
}

Point TensorSpace::element_lo(const Ivec& e) const {
  Point p;
  for (int d = 0; d < kMaxDim; ++d) p[d] = kv_[d].breakpoints()[e[d]];
  return p;
}

Point TensorSpace::element_hi(const Ivec& e) const {
  Point p;
  for (int d = 0; d < kMaxDim; ++d) p[d] = kv_[d].breakpoints()[e[d] + 1];
  return p;
}

Ivec TensorSpace::find_element(const Point& x) const {
  Ivec e{0, 0, 0};
  for (int d = 0; d < dim_; ++d) e[d] = kv_[d].find_element(x[d]);
  return e;
}

double TensorSpace::eval(const Ivec& j, const Point& x, const Ivec& deriv) const {
  double v = 1.0;
  for (int d = 0; d < dim_; ++d) {
    v *= eval_basis(kv_[d], j[d], x[d], deriv[d]);
    if (v == 0.0) return 0.0;
  }
  return v;
}

TensorSpace TensorSpace::bisected() const {
  std::vector<KnotVector> dirs;
  for (int d = 0; d < dim_; ++d) dirs.push_back(kv_[d].bisected());
  return TensorSpace(dirs);
}

LevelSequence::LevelSequence(TensorSpace level0, int num_levels) {
  require(num_levels >= 1, "LevelSequence: need at least one level");
  levels_.push_back(std::move(level0));
  for (int l = 1; l < num_levels; ++l) levels_.push_back(levels_.back().bisected());
  rows_.resize(num_levels - 1);
  for (int l = 0; l + 1 < num_levels; ++l) {
    for (int d = 0; d < kMaxDim; ++d) {
      if (d < dim()) {
        rows_[l][d] = two_scale_rows(levels_[l].direction(d), levels_[l + 1].direction(d));
      } else {
        rows_[l][d] = {RefinementRow{0, {1.0}}};
      }
    }
  }
}

LevelSequence LevelSequence::uniform(int dim, const Ivec& elements, const Ivec& degree,
                                     const Ivec& multiplicity, int num_levels) {
  return LevelSequence(TensorSpace::uniform(dim, elements, degree, multiplicity), num_levels);
}

}  // namespace thbq
