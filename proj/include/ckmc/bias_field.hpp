#ifndef CKMC_BIAS_FIELD_HPP
#define CKMC_BIAS_FIELD_HPP

#include <cmath>
#include <cstddef>
#include <vector>

namespace ckmc {

// quintic smoothstep on [0,1], C2 at both ends
inline double smoothstep5(double u) {
  return u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
}
inline double smoothstep5_deriv(double u) {
  double w = u * (1.0 - u);
  return 30.0 * w * w;
}
// antiderivative of smoothstep5 with value 0 at u=0; equals 1/2 at u=1
inline double smoothstep5_integral(double u) {
  double u2 = u * u;
  return u2 * u2 * (2.5 + u * (-3.0 + u));
}

// One-dimensional plateau bump: 1 on [c-wp, c+wp], 0 outside [c-ws, c+ws],
// quintic ramps in between. C2 everywhere.
struct Bump1D {
  double c = 0.0;
  double wp = 0.1;  // plateau half width
  double ws = 0.2;  // support half width

  double ramp() const { return ws - wp; }

  double value(double x) const {
    double t = std::abs(x - c);
    if (t >= ws) return 0.0;
    if (t <= wp) return 1.0;
    return smoothstep5((ws - t) / ramp());
  }

  double deriv(double x) const {
    double t = std::abs(x - c);
    if (t >= ws || t <= wp) return 0.0;
    double r = ramp();
    double d = smoothstep5_deriv((ws - t) / r) / r;
    return x > c ? -d : d;
  }

  // antiderivative F with F(c - ws) = 0
  double integral(double x) const {
    double r = ramp();
    if (x <= c - ws) return 0.0;
    if (x < c - wp) return r * smoothstep5_integral((x - (c - ws)) / r);
    if (x <= c + wp) return 0.5 * r + (x - (c - wp));
    if (x < c + ws)
      return 0.5 * r + 2.0 * wp + r * (0.5 - smoothstep5_integral((ws - (x - c)) / r));
    return r + 2.0 * wp;
  }

  double total_integral() const { return ramp() + 2.0 * wp; }
  double sup_deriv() const { return 1.875 / ramp(); }  // max of s', 30/16
};

// Smooth space-time test field: psi(t) * sum_i amp_i bx_i(x) by_i(y).
// Used both as the tilting potential and as weak-form test functions.
class BiasField {
 public:
  struct Term {
    double amp = 0.0;
    Bump1D bx, by;
  };

  enum class Profile { Const, Cosine };
  enum class CellRule { Midpoint, Gauss3 };

  std::vector<Term> terms;
  Profile profile = Profile::Const;
  double omega = 0.0;  // Cosine: psi(t) = cos(omega t)

  bool empty() const { return terms.empty(); }

  double psi(double t) const {
    return profile == Profile::Const ? 1.0 : std::cos(omega * t);
  }
  double dpsi(double t) const {
    return profile == Profile::Const ? 0.0 : -omega * std::sin(omega * t);
  }
  bool time_dependent() const { return profile != Profile::Const; }

  double spatial(double x, double y) const {
    double s = 0.0;
    for (const Term& tm : terms) s += tm.amp * tm.bx.value(x) * tm.by.value(y);
    return s;
  }

  void spatial_grad(double x, double y, double& gx, double& gy) const {
    gx = gy = 0.0;
    for (const Term& tm : terms) {
      gx += tm.amp * tm.bx.deriv(x) * tm.by.value(y);
      gy += tm.amp * tm.bx.value(x) * tm.by.deriv(y);
    }
  }

  double value(double t, double x, double y) const {
    return psi(t) * spatial(x, y);
  }

  // exact integral of the spatial part over [x0,x0+h] x [y0,y0+h]
  double cell_integral(double x0, double y0, double h) const {
    double s = 0.0;
    for (const Term& tm : terms)
      s += tm.amp * (tm.bx.integral(x0 + h) - tm.bx.integral(x0)) *
           (tm.by.integral(y0 + h) - tm.by.integral(y0));
    return s;
  }

  // cell functional: average of the spatial part over the cell under the
  // given quadrature rule, times the cell area h^2
  double cell_value(double x0, double y0, double h, CellRule rule) const {
    if (rule == CellRule::Midpoint)
      return spatial(x0 + 0.5 * h, y0 + 0.5 * h) * h * h;
    static const double q = 0.5 * std::sqrt(0.6);
    const double nodes[3] = {0.5 - q, 0.5, 0.5 + q};
    const double w[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
    double s = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        s += w[i] * w[j] * spatial(x0 + nodes[i] * h, y0 + nodes[j] * h);
    return s * h * h;
  }

  // antiderivative of spatial in y (zero at -infinity), for area integrals
  // of smooth regions via the divergence theorem
  double spatial_y_antiderivative(double x, double y) const {
    double s = 0.0;
    for (const Term& tm : terms)
      s += tm.amp * tm.bx.value(x) * tm.by.integral(y);
    return s;
  }

  double sup_abs() const {
    double s = 0.0;
    for (const Term& tm : terms) s += std::abs(tm.amp);
    return s;
  }

  double sup_grad() const {
    double s = 0.0;
    for (const Term& tm : terms)
      s += std::abs(tm.amp) *
           std::max(tm.bx.sup_deriv(), tm.by.sup_deriv());
    return s;
  }

  // single plateau bump helper
  static BiasField bump(double amp, double cx, double cy, double plateau,
                        double support) {
    BiasField f;
    Term t;
    t.amp = amp;
    t.bx = {cx, plateau, support};
    t.by = {cy, plateau, support};
    f.terms.push_back(t);
    return f;
  }
};

}  // namespace ckmc

#endif
