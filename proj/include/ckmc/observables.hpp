#ifndef CKMC_OBSERVABLES_HPP
#define CKMC_OBSERVABLES_HPP

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ckmc/lattice_curve.hpp"

namespace ckmc {

// Occupation variable of a vertex: 1 when its outgoing edge is vertical.
inline int xi_of(const LatticeCurve& c, int node_id) {
  return dir_vertical(c.dir(node_id)) ? 1 : 0;
}

// Average of xi over the run-start vertex of pole k and the next ell
// vertices clockwise (side=+1) or the previous ell counterclockwise
// (side=-1). Throws if the window exceeds the curve length.
double xi_window(const LatticeCurve& c, int k, int ell, int side);

// 1 when pole k has minimal size 2
inline double pole_p2(const LatticeCurve& c, int k) {
  return c.pole(k).p == 2 ? 1.0 : 0.0;
}

// Droplet area within depth floor(eta*N) lattice rows of the extremal level
// of pole k, in continuum units. Two independent evaluators.
double cap_volume_rows(const LatticeCurve& c, int k, double eta);
double cap_volume_clip(const LatticeCurve& c, int k, double eta);

// Widths of the droplet cut at the cell row floor(alpha*N) below the top
// level, measured from the top pole start vertex, in continuum units.
double width_plus(const LatticeCurve& c, double alpha);
double width_minus(const LatticeCurve& c, double alpha);

// effective snapped parameter used by the cap and width observables
inline double snapped(double x, int N) {
  return static_cast<double>(static_cast<int>(x * N)) / N;
}

// Sampled time series with named columns; values are piecewise constant
// from each sample time to the next.
class Series {
 public:
  explicit Series(std::vector<std::string> names) : names_(std::move(names)) {}
  void add(double t, const std::vector<double>& vals);
  size_t rows() const { return t_.size(); }
  size_t cols() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  double t(size_t i) const { return t_[i]; }
  double value(size_t i, size_t col) const { return v_[i][col]; }
  double time_average(size_t col, double a, double b) const;
  // trapezoid integral of column col over [a,b] on the sample grid
  double integral_trapezoid(size_t col, double a, double b) const;
  // least squares slope of column col against t over [a,b]
  double fit_slope(size_t col, double a, double b) const;
  void write_csv(std::ostream& os) const;

 private:
  std::vector<std::string> names_;
  std::vector<double> t_;
  std::vector<std::vector<double>> v_;
};

struct Welford {
  long long n = 0;
  double mean = 0.0, m2 = 0.0;
  void add(double x) {
    ++n;
    double d = x - mean;
    mean += d / n;
    m2 += d * (x - mean);
  }
  double var() const { return n > 1 ? m2 / (n - 1) : 0.0; }
  double se() const { return n > 1 ? std::sqrt(var() / n) : 0.0; }
};

}  // namespace ckmc

#endif
