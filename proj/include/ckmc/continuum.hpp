#ifndef CKMC_CONTINUUM_HPP
#define CKMC_CONTINUUM_HPP

#include <functional>
#include <vector>

#include "ckmc/bias_field.hpp"
#include "ckmc/lattice_curve.hpp"

namespace ckmc {

// anisotropy, mobility and transport kernels of the limit flow, as
// functions of the tangent angle
double aniso_a(double theta);
double aniso_mu(double theta);
double aniso_alpha(double theta);

// area decay rate of the limit flow and one-sided transport limit at a pole
double area_decay_rate(double beta);
double pole_alpha_limit(double beta);

// integral of aniso_a over a full turn (equals 2)
double aniso_a_turn(int panels = 1 << 16);

// Spatial functional terms of one curve snapshot, all per unit time.
// Sums run over the vertices at L1 distance >= eps from every extremal run,
// with the direction-averaged tangent over the 2*floor(eps*N)+1 nearest
// edges. Lengths are in continuum units.
struct FunctionalTerms {
  double transport = 0.0;   // (1/4) sum v_eps^2 [T.m][T.gradH] dl
  double mobility = 0.0;    // (1/2) sum |T.b1||T.b2| v_eps^2 H^2 dl
  double alpha_flux = 0.0;  // sum alpha(theta_eps) dH over edges
  double pole_lr = 0.0;     // sum_k H(L_k) + H(R_k)
  double pole_l = 0.0;      // sum_k H(L_k)
};

FunctionalTerms evaluate_terms(const LatticeCurve& c, const BiasField& F,
                               double t, double eps);

// Clockwise closed curve with an explicit parametrization on [0,1).
struct SmoothCurve {
  std::function<void(double u, double& x, double& y)> gamma;
  std::function<void(double u, double& dx, double& dy)> dgamma;
};

// axis-aligned ellipse traversed clockwise, scaled by s(t)
struct ShrinkingEllipse {
  double a = 0.45, b = 0.3;
  double shrink = 0.5;  // scale factor 1 - shrink * t
  double scale(double t) const { return 1.0 - shrink * t; }
  SmoothCurve at(double t) const;
  // extremal points in pole order: top, right, bottom, left
  void poles(double t, double px[4], double py[4]) const;
  double area(double t) const;
};

// Large deviation action of a smooth trajectory against a bias field.
// eps > 0 evaluates the direction-averaged form with the pole bands of
// L1 radius eps removed; eps == 0 evaluates the limit form with exact
// tangents and the pole point terms.
double smooth_action(const ShrinkingEllipse& traj, const BiasField& H,
                     double beta, double T, double eps, int time_panels,
                     int arc_panels);

// droplet integral of the field over the region enclosed by the curve,
// via the divergence identity applied to the clockwise boundary
double smooth_droplet_integral(const SmoothCurve& c, const BiasField& F,
                               double t, int panels);

}  // namespace ckmc

#endif
