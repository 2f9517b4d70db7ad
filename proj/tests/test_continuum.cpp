#include <cmath>

#include "ckmc/continuum.hpp"
#include "doctest.h"

using namespace ckmc;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("anisotropy kernel values and symmetries") {
  CHECK(aniso_a(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(aniso_a(kPi / 4) == doctest::Approx(0.25).epsilon(1e-14));
  for (int i = 0; i < 40; ++i) {
    double th = -kPi + 2.0 * kPi * i / 40.0 + 0.013;
    CHECK(aniso_a(th) == doctest::Approx(aniso_a(th + kPi / 2)).epsilon(1e-13));
    CHECK(aniso_a(th) == doctest::Approx(aniso_a(-th)).epsilon(1e-13));
  }
  CHECK(aniso_a_turn() == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("mobility kernel factors into tangent projections") {
  CHECK(aniso_mu(0.0) == 0.0);
  CHECK(aniso_mu(kPi / 4) == doctest::Approx(1.0 / (2.0 * std::sqrt(2.0)))
                                 .epsilon(1e-14));
  for (int i = 0; i < 80; ++i) {
    double th = -kPi + 2.0 * kPi * i / 80.0 + 0.007;
    double c = std::cos(th), s = std::sin(th);
    double want = std::abs(c * s) / (std::abs(c) + std::abs(s));
    CHECK(std::abs(aniso_mu(th) - want) <= 1e-15);
  }
}

TEST_CASE("transport kernel equals the diagonal projection form") {
  // theta ranges of the four monotone regions on a clockwise curve
  const double lo[5] = {0, -kPi / 2, -kPi, kPi / 2, 0};
  const double hi[5] = {0, 0, -kPi / 2, kPi, kPi / 2};
  for (int k = 1; k <= 4; ++k) {
    IV m = region_m(k);
    for (int i = 1; i < 40; ++i) {
      double th = lo[k] + (hi[k] - lo[k]) * i / 40.0;
      double c = std::cos(th), s = std::sin(th);
      double v = 1.0 / (std::abs(c) + std::abs(s));
      double want = v * (c * m.x + s * m.y) / 4.0;
      CHECK(aniso_alpha(th) == doctest::Approx(want).epsilon(1e-13));
    }
  }
  CHECK(aniso_alpha(0.0) == 0.0);
  CHECK(aniso_alpha(-1e-9) == doctest::Approx(-0.25).epsilon(1e-6));
  CHECK(aniso_alpha(1e-9) == doctest::Approx(0.25).epsilon(1e-6));
}

TEST_CASE("decay rate and pole transport constants") {
  CHECK(area_decay_rate(2.0) ==
        doctest::Approx(2.0 - 4.0 * std::exp(-2.0)).epsilon(1e-15));
  CHECK(area_decay_rate(INFINITY) == 2.0);
  CHECK(area_decay_rate(std::log(2.0)) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(pole_alpha_limit(2.0) ==
        doctest::Approx(0.25 - 0.5 * std::exp(-2.0)).epsilon(1e-15));
  CHECK(pole_alpha_limit(INFINITY) == 0.25);
}

TEST_CASE("rectangle terms reduce to the pole sums") {
  LatticeCurve c = LatticeCurve::rectangle(16, 8, 6);
  BiasField F = BiasField::bump(0.8, 0.0, 0.0, 0.3, 0.5);
  FunctionalTerms ft = evaluate_terms(c, F, 0.0, 0.05);
  CHECK(ft.transport == 0.0);
  CHECK(ft.mobility == 0.0);
  CHECK(ft.alpha_flux == 0.0);
  CHECK(ft.pole_lr == doctest::Approx(8.0 * 0.8).epsilon(1e-13));
  CHECK(ft.pole_l == doctest::Approx(4.0 * 0.8).epsilon(1e-13));
}

TEST_CASE("shrinking ellipse parametrization") {
  ShrinkingEllipse traj;
  CHECK(traj.area(0.0) == doctest::Approx(kPi * 0.45 * 0.3).epsilon(1e-15));
  CHECK(traj.area(0.2) ==
        doctest::Approx(kPi * 0.45 * 0.3 * 0.9 * 0.9).epsilon(1e-15));
  double px[4], py[4];
  traj.poles(0.0, px, py);
  CHECK(px[0] == 0.0);
  CHECK(py[0] == doctest::Approx(0.3));
  CHECK(px[1] == doctest::Approx(0.45));
  CHECK(py[2] == doctest::Approx(-0.3));
  CHECK(px[3] == doctest::Approx(-0.45));
  SmoothCurve c = traj.at(0.1);
  for (int i = 0; i < 16; ++i) {
    double u = i / 16.0, h = 1e-6;
    double xp, yp, xm, ym, dx, dy;
    c.gamma(u + h, xp, yp);
    c.gamma(u - h, xm, ym);
    c.dgamma(u, dx, dy);
    CHECK(dx == doctest::Approx((xp - xm) / (2 * h)).epsilon(1e-6));
    CHECK(dy == doctest::Approx((yp - ym) / (2 * h)).epsilon(1e-6));
  }
  // clockwise means the NE arc moves right and down
  double x, y, dx, dy;
  c.gamma(0.9, x, y);
  CHECK(x > 0.0);
  CHECK(y > 0.0);
  c.dgamma(0.9, dx, dy);
  CHECK(dx > 0.0);
  CHECK(dy < 0.0);
}

TEST_CASE("droplet integral of a covering field is the area") {
  ShrinkingEllipse traj;
  BiasField F = BiasField::bump(0.9, 0.0, 0.0, 0.6, 1.0);
  double got = smooth_droplet_integral(traj.at(0.0), F, 0.0, 4096);
  CHECK(got == doctest::Approx(0.9 * kPi * 0.45 * 0.3).epsilon(1e-10));
}

TEST_CASE("droplet integral against a column decomposition") {
  ShrinkingEllipse traj;
  const double A = 0.45, B = 0.3;
  BiasField F = BiasField::bump(0.7, 0.1, 0.05, 0.1, 0.3);
  const BiasField::Term& tm = F.terms[0];
  int n = 1 << 14;
  double h = 2.0 * A / n, acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    double x = -A + i * h;
    double r = 1.0 - (x / A) * (x / A);
    double yt = B * std::sqrt(std::max(0.0, r));
    double f = tm.amp * tm.bx.value(x) *
               (tm.by.integral(yt) - tm.by.integral(-yt));
    acc += f * (i == 0 || i == n ? 1.0 : (i % 2 ? 4.0 : 2.0));
  }
  double want = acc * h / 3.0;
  double got = smooth_droplet_integral(traj.at(0.0), F, 0.0, 4096);
  CHECK(got == doctest::Approx(want).epsilon(3e-6));
}

namespace {

// static-curve action per unit time of the band functional
double smooth_static_rate(const BiasField& H, double beta, double eps) {
  ShrinkingEllipse traj;
  traj.shrink = 0.0;
  return smooth_action(traj, H, beta, 1.0, eps, 2, 32768);
}

double lattice_static_rate(const BiasField& H, double beta, double eps) {
  ShapeSpec s;
  s.kind = ShapeKind::Ellipse;
  s.a = 0.45;
  s.b = 0.3;
  LatticeCurve c = LatticeCurve::discretize(s, 256);
  FunctionalTerms ft = evaluate_terms(c, H, 0.0, eps);
  double cpol = 0.25 - 0.5 * std::exp(-beta);
  return -ft.transport + cpol * ft.pole_lr - ft.mobility;
}

}  // namespace

TEST_CASE("lattice terms converge to the smooth functional") {
  const double beta = 2.0, eps = 0.05;

  // gradient support kept away from every pole band: the excluded bands
  // then differ only where the integrands are small, so the match is tight
  BiasField P = BiasField::bump(0.4, 0.0, 0.0, 0.6, 1.0);
  BiasField::Term patch;
  patch.amp = 0.5;
  patch.bx = {0.318, 0.04, 0.1};
  patch.by = {0.212, 0.04, 0.1};
  P.terms.push_back(patch);
  CHECK(lattice_static_rate(P, beta, eps) ==
        doctest::Approx(smooth_static_rate(P, beta, eps)).epsilon(0.02));

  // generic bump: band mismatch near the poles is O(eps), so looser
  BiasField H = BiasField::bump(0.6, 0.1, 0.15, 0.25, 0.55);
  CHECK(lattice_static_rate(H, beta, eps) ==
        doctest::Approx(smooth_static_rate(H, beta, eps)).epsilon(0.10));
}

TEST_CASE("band functional approaches the limit form") {
  ShrinkingEllipse traj;
  BiasField H = BiasField::bump(0.6, 0.1, 0.15, 0.25, 0.55);
  const double beta = 2.0, T = 0.2;
  double j0 = smooth_action(traj, H, beta, T, 0.0, 64, 4096);
  double j1 = smooth_action(traj, H, beta, T, 0.1, 64, 16384);
  double j2 = smooth_action(traj, H, beta, T, 0.05, 64, 16384);
  CHECK(std::isfinite(j0));
  CHECK(std::abs(j1 - j0) > std::abs(j2 - j0));
  CHECK(std::abs(j2 - j0) < 0.05);
}
