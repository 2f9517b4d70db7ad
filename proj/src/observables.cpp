#include "ckmc/observables.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <ostream>

namespace ckmc {

double xi_window(const LatticeCurve& c, int k, int ell, int side) {
  if (ell < 0 || ell + 1 > c.n_edges())
    throw CurveError("xi window exceeds curve length");
  int id = c.node_at(c.pole(k).L);
  long long s = 0;
  for (int i = 0; i <= ell; ++i) {
    s += xi_of(c, id);
    id = side >= 0 ? c.next(id) : c.prev(id);
  }
  return static_cast<double>(s) / (ell + 1);
}

namespace {

// depth of a cell below the extremal level of pole k, in lattice units
int cap_depth(const IV& cell, int k, int z) {
  switch (k) {
    case 1: return z - 1 - cell.y;
    case 2: return z - 1 - cell.x;
    case 3: return cell.y - z;
    default: return cell.x - z;
  }
}

}  // namespace

double cap_volume_rows(const LatticeCurve& c, int k, double eta) {
  int d = static_cast<int>(eta * c.N());
  if (d <= 0) return 0.0;
  int z = c.pole(k).z;
  long long count = 0;
  for (const IV& cell : c.block_cells()) {
    int dep = cap_depth(cell, k, z);
    if (dep >= 0 && dep < d) ++count;
  }
  double N = c.N();
  return count / (N * N);
}

double cap_volume_clip(const LatticeCurve& c, int k, double eta) {
  int d = static_cast<int>(eta * c.N());
  if (d <= 0) return 0.0;
  int z = c.pole(k).z;
  int line = (k == 1 || k == 2) ? z - d : z + d;
  bool horizontal_line = (k == 1 || k == 3);

  std::vector<IV> poly;
  poly.reserve(c.n_edges());
  int id = c.entry_node();
  for (int i = 0; i < c.n_edges(); ++i) {
    poly.push_back(c.vertex(id));
    id = c.next(id);
  }

  // signed distance to the keep side of the clip line, nonnegative inside
  auto inside = [&](const IV& p) -> int {
    int u = horizontal_line ? p.y : p.x;
    return (k == 1 || k == 2) ? u - line : line - u;
  };

  std::vector<IV> out;
  out.reserve(poly.size() + 4);
  for (size_t i = 0; i < poly.size(); ++i) {
    const IV& a = poly[i];
    const IV& b = poly[(i + 1) % poly.size()];
    int da = inside(a), db = inside(b);
    if (da >= 0) out.push_back(a);
    if ((da < 0) != (db < 0))
      out.push_back(horizontal_line ? IV{a.x, line} : IV{line, a.y});
  }

  long long twice_area = 0;
  for (size_t i = 0; i < out.size(); ++i) {
    const IV& a = out[i];
    const IV& b = out[(i + 1) % out.size()];
    twice_area += static_cast<long long>(a.x) * b.y -
                  static_cast<long long>(b.x) * a.y;
  }
  long long count = std::abs(twice_area) / 2;
  double N = c.N();
  return count / (N * N);
}

double width_plus(const LatticeCurve& c, double alpha) {
  int d = static_cast<int>(alpha * c.N());
  if (d <= 0) return 0.0;
  int y = c.pole(1).z - d;
  int xl, xr;
  if (!c.row_interval(y, xl, xr)) return 0.0;
  return static_cast<double>(xr + 1 - c.pole(1).L.x) / c.N();
}

double width_minus(const LatticeCurve& c, double alpha) {
  int d = static_cast<int>(alpha * c.N());
  if (d <= 0) return 0.0;
  int y = c.pole(1).z - d;
  int xl, xr;
  if (!c.row_interval(y, xl, xr)) return 0.0;
  return static_cast<double>(c.pole(1).L.x - xl) / c.N();
}

void Series::add(double t, const std::vector<double>& vals) {
  if (vals.size() != names_.size())
    throw CurveError("series row width mismatch");
  if (!t_.empty() && t < t_.back())
    throw CurveError("series times must be nondecreasing");
  t_.push_back(t);
  v_.push_back(vals);
}

double Series::time_average(size_t col, double a, double b) const {
  if (b <= a || t_.empty()) return 0.0;
  double acc = 0.0;
  for (size_t i = 0; i < t_.size(); ++i) {
    double lo = std::max(a, t_[i]);
    double hi = std::min(b, i + 1 < t_.size() ? t_[i + 1] : b);
    if (hi > lo) acc += v_[i][col] * (hi - lo);
  }
  return acc / (b - a);
}

double Series::integral_trapezoid(size_t col, double a, double b) const {
  double acc = 0.0;
  for (size_t i = 0; i + 1 < t_.size(); ++i) {
    double lo = std::max(a, t_[i]);
    double hi = std::min(b, t_[i + 1]);
    if (hi <= lo) continue;
    double span = t_[i + 1] - t_[i];
    double va = v_[i][col], vb = v_[i + 1][col];
    // linear interpolation of the endpoint values onto [lo, hi]
    double fa = span > 0 ? va + (vb - va) * (lo - t_[i]) / span : va;
    double fb = span > 0 ? va + (vb - va) * (hi - t_[i]) / span : vb;
    acc += 0.5 * (fa + fb) * (hi - lo);
  }
  return acc;
}

double Series::fit_slope(size_t col, double a, double b) const {
  double st = 0, sv = 0;
  long long n = 0;
  for (size_t i = 0; i < t_.size(); ++i)
    if (t_[i] >= a && t_[i] <= b) {
      st += t_[i];
      sv += v_[i][col];
      ++n;
    }
  if (n < 2) return 0.0;
  double tb = st / n, vb = sv / n, num = 0, den = 0;
  for (size_t i = 0; i < t_.size(); ++i)
    if (t_[i] >= a && t_[i] <= b) {
      num += (t_[i] - tb) * (v_[i][col] - vb);
      den += (t_[i] - tb) * (t_[i] - tb);
    }
  return den > 0 ? num / den : 0.0;
}

void Series::write_csv(std::ostream& os) const {
  os << "t";
  for (const auto& n : names_) os << "," << n;
  os << "\n";
  char buf[64];
  for (size_t i = 0; i < t_.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", t_[i]);
    os << buf;
    for (size_t j = 0; j < names_.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", v_[i][j]);
      os << "," << buf;
    }
    os << "\n";
  }
}

}  // namespace ckmc
