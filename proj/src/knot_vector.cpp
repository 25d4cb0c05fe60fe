#include "thbq/knot_vector.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "thbq/error.hpp"

namespace thbq {

KnotVector::KnotVector(std::vector<double> breakpoints, int degree, int multiplicity)
    : p_(degree), m_(multiplicity), breaks_(std::move(breakpoints)) {
  require(p_ >= 0, "KnotVector: negative degree");
  require(m_ >= 1 && m_ <= p_ + 1, "KnotVector: multiplicity must lie in [1, degree + 1]");
  require(breaks_.size() >= 2, "KnotVector: need at least two breakpoints");
  require(breaks_.front() == 0.0 && breaks_.back() == 1.0, "KnotVector: breakpoints must span [0, 1]");
  for (std::size_t i = 1; i < breaks_.size(); ++i)
    require(breaks_[i] > breaks_[i - 1], "KnotVector: breakpoints must be strictly increasing");

  const int ne = num_elements();
  for (int e = 0; e <= ne; ++e) {
    const int rep = (e == 0 || e == ne) ? p_ + 1 : m_;
    for (int r = 0; r < rep; ++r) {
      knots_.push_back(breaks_[e]);
      break_of_knot_.push_back(e);
    }
    if (e < ne) span_.push_back(int(knots_.size()) - 1);
  }
  const int n = num_basis();
  support_.resize(n);
  for (int j = 0; j < n; ++j) support_[j] = {break_of_knot_[j], break_of_knot_[j + p_ + 1]};
}

KnotVector KnotVector::uniform(int elements, int degree, int multiplicity) {
  require(elements >= 1, "KnotVector::uniform: need at least one element");
  std::vector<double> b(elements + 1);
  for (int i = 0; i <= elements; ++i) b[i] = double(i) / elements;
  b.back() = 1.0;
  return KnotVector(std::move(b), degree, multiplicity);
}

int KnotVector::find_element(double x) const {
  if (x >= breaks_.back()) return num_elements() - 1;
  if (x <= breaks_.front()) return 0;
  auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
  return int(it - breaks_.begin()) - 1;
}

double KnotVector::quasi_uniformity() const {
  double lo = 1e300, hi = 0.0;
  for (int e = 0; e < num_elements(); ++e) {
    const double h = breaks_[e + 1] - breaks_[e];
    lo = std::min(lo, h);
    hi = std::max(hi, h);
  }
  return hi / lo;
}

KnotVector KnotVector::bisected() const {
  std::vector<double> b;
  b.reserve(2 * breaks_.size());
  for (std::size_t i = 0; i + 1 < breaks_.size(); ++i) {
    b.push_back(breaks_[i]);
    b.push_back(0.5 * (breaks_[i] + breaks_[i + 1]));
  }
  b.push_back(breaks_.back());
  return KnotVector(std::move(b), p_, m_);
}

namespace {

double cox_de_boor(const std::vector<double>& t, int j, int p, double x, int deriv) {
  if (deriv > p) return 0.0;
  if (deriv > 0) {
    double v = 0.0;
    const double d1 = t[j + p] - t[j];
    const double d2 = t[j + p + 1] - t[j + 1];
    if (d1 > 0) v += p / d1 * cox_de_boor(t, j, p - 1, x, deriv - 1);
    if (d2 > 0) v -= p / d2 * cox_de_boor(t, j + 1, p - 1, x, deriv - 1);
    return v;
  }
  if (p == 0) {
    if (t[j] <= x && x < t[j + 1]) return 1.0;
    // The last nonempty span is closed at the right end of the domain.
    if (x == t.back() && t[j] < t[j + 1] && t[j + 1] == t.back()) return 1.0;
    return 0.0;
  }
  double v = 0.0;
  const double d1 = t[j + p] - t[j];
  const double d2 = t[j + p + 1] - t[j + 1];
  if (d1 > 0) v += (x - t[j]) / d1 * cox_de_boor(t, j, p - 1, x, 0);
  if (d2 > 0) v += (t[j + p + 1] - x) / d2 * cox_de_boor(t, j + 1, p - 1, x, 0);
  return v;
}

}  // namespace

double eval_basis(const KnotVector& kv, int j, double x, int deriv) {
  require(j >= 0 && j < kv.num_basis(), "eval_basis: index out of range");
  require(deriv >= 0, "eval_basis: negative derivative order");
  return cox_de_boor(kv.knots(), j, kv.degree(), x, deriv);
}

void eval_element_basis(const KnotVector& kv, int e, double x, int nderiv, double* out) {
  const int p = kv.degree();
  const int k = kv.span(e);
  const std::vector<double>& t = kv.knots();
  const int nd = std::min(nderiv, p);

  // Triangular table of basis values and knot differences.
  double ndu[8][8], left[8], right[8], a[2][8];
  require(p < 8, "eval_element_basis: degree too large");
  ndu[0][0] = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = x - t[k + 1 - j];
    right[j] = t[k + j] - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      ndu[j][r] = right[r + 1] + left[j - r];
      const double tmp = ndu[r][j - 1] / ndu[j][r];
      ndu[r][j] = saved + right[r + 1] * tmp;
      saved = left[j - r] * tmp;
    }
    ndu[j][j] = saved;
  }
  for (int d = 0; d <= nderiv; ++d)
    for (int r = 0; r <= p; ++r) out[d * (p + 1) + r] = 0.0;
  for (int r = 0; r <= p; ++r) out[r] = ndu[r][p];

  for (int r = 0; r <= p; ++r) {
    int s1 = 0, s2 = 1;
    a[0][0] = 1.0;
    for (int d = 1; d <= nd; ++d) {
      double v = 0.0;
      const int rk = r - d, pk = p - d;
      if (r >= d) {
        a[s2][0] = a[s1][0] / ndu[pk + 1][rk];
        v = a[s2][0] * ndu[rk][pk];
      }
      const int j1 = rk >= -1 ? 1 : -rk;
      const int j2 = (r - 1 <= pk) ? d - 1 : p - r;
      for (int j = j1; j <= j2; ++j) {
        a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][rk + j];
        v += a[s2][j] * ndu[rk + j][pk];
      }
      if (r <= pk) {
        a[s2][d] = -a[s1][d - 1] / ndu[pk + 1][r];
        v += a[s2][d] * ndu[r][pk];
      }
      out[d * (p + 1) + r] = v;
      std::swap(s1, s2);
    }
  }
  double f = p;
  for (int d = 1; d <= nd; ++d) {
    for (int r = 0; r <= p; ++r) out[d * (p + 1) + r] *= f;
    f *= (p - d);
  }
}

namespace {

// Inserts x (strictly inside the knot range) into t, updating coefficients c.
void insert_knot(std::vector<double>& t, std::vector<double>& c, int p, double x) {
  int k = int(std::upper_bound(t.begin(), t.end(), x) - t.begin()) - 1;
  const int n = int(c.size());
  std::vector<double> out(n + 1, 0.0);
  auto at = [&](int i) { return (i >= 0 && i < n) ? c[i] : 0.0; };
  for (int i = 0; i <= n; ++i) {
    if (i <= k - p) {
      out[i] = at(i);
    } else if (i >= k + 1) {
      out[i] = at(i - 1);
    } else {
      const double alpha = (x - t[i]) / (t[i + p] - t[i]);
      out[i] = alpha * at(i) + (1.0 - alpha) * at(i - 1);
    }
  }
  t.insert(t.begin() + k + 1, x);
  c.swap(out);
}

}  // namespace

std::vector<RefinementRow> two_scale_rows(const KnotVector& coarse, const KnotVector& fine) {
  const int p = coarse.degree();
  require(fine.degree() == p && fine.multiplicity() == coarse.multiplicity(),
          "two_scale_rows: degree or multiplicity differ");
  if (fine == coarse) {
    std::vector<RefinementRow> id(coarse.num_basis());
    for (int j = 0; j < coarse.num_basis(); ++j) id[j] = {j, {1.0}};
    return id;
  }
  const auto& cb = coarse.breakpoints();
  const auto& fb = fine.breakpoints();
  require(fb.size() == 2 * cb.size() - 1, "two_scale_rows: fine is not a bisection of coarse");
  for (std::size_t i = 0; i < cb.size(); ++i)
    require(fb[2 * i] == cb[i], "two_scale_rows: fine is not a bisection of coarse");
  for (std::size_t i = 0; i + 1 < cb.size(); ++i)
    require(fb[2 * i + 1] == 0.5 * (cb[i] + cb[i + 1]),
            "two_scale_rows: fine is not a bisection of coarse");

  const auto& ct = coarse.knots();
  const auto& ft = fine.knots();
  std::vector<RefinementRow> rows(coarse.num_basis());
  for (int j = 0; j < coarse.num_basis(); ++j) {
    std::vector<double> t(ct.begin() + j, ct.begin() + j + p + 2);
    std::vector<double> c{1.0};
    // Every fine knot strictly inside the support, minus those already present.
    auto lo = std::upper_bound(ft.begin(), ft.end(), t.front());
    auto hi = std::lower_bound(ft.begin(), ft.end(), t.back());
    std::vector<double> extra;
    for (auto it = lo; it != hi;) {
      auto e = std::upper_bound(it, hi, *it);
      const int want = int(e - it);
      const int have = int(std::count(t.begin(), t.end(), *it));
      for (int r = have; r < want; ++r) extra.push_back(*it);
      it = e;
    }
    for (double x : extra) insert_knot(t, c, p, x);
    // Offset of the first local knot within its multiplicity group carries over.
    const int group_c = int(std::lower_bound(ct.begin(), ct.end(), t.front()) - ct.begin());
    const int group_f = int(std::lower_bound(ft.begin(), ft.end(), t.front()) - ft.begin());
    rows[j].first = group_f + (j - group_c);
    rows[j].w = std::move(c);
  }
  return rows;
}

DenseMatrix two_scale_matrix(const KnotVector& coarse, const KnotVector& fine) {
  const auto rows = two_scale_rows(coarse, fine);
  DenseMatrix m = DenseMatrix::Zero(coarse.num_basis(), fine.num_basis());
  for (int j = 0; j < int(rows.size()); ++j)
    for (std::size_t a = 0; a < rows[j].w.size(); ++a) m(j, rows[j].first + int(a)) = rows[j].w[a];
  return m;
}

GaussRule gauss_rule(int order, double a, double b) {
  require(order >= 1, "gauss_rule: order must be positive");
  GaussRule g;
  g.nodes.resize(order);
  g.weights.resize(order);
  for (int i = 0; i < (order + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double pk = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double pk = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    g.nodes[i] = -x;
    g.nodes[order - 1 - i] = x;
    g.weights[i] = w;
    g.weights[order - 1 - i] = w;
  }
  if (order % 2 == 1) g.nodes[order / 2] = 0.0;
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  for (int i = 0; i < order; ++i) {
    g.nodes[i] = mid + half * g.nodes[i];
    g.weights[i] *= half;
  }
  return g;
}

}  // namespace thbq
