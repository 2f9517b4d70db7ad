#include "ckmc/continuum.hpp"

#include <algorithm>
#include <cmath>

namespace ckmc {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double aniso_a(double theta) {
  double s = std::abs(std::sin(theta)) + std::abs(std::cos(theta));
  return 0.5 / (s * s);
}

double aniso_mu(double theta) {
  double s = std::abs(std::sin(theta)) + std::abs(std::cos(theta));
  return std::abs(std::sin(2.0 * theta)) / (2.0 * s);
}

double aniso_alpha(double theta) {
  double s2 = std::sin(2.0 * theta);
  double sgn = s2 > 0.0 ? 1.0 : (s2 < 0.0 ? -1.0 : 0.0);
  return 0.5 * aniso_a(theta) * sgn * std::cos(2.0 * theta);
}

double area_decay_rate(double beta) { return 2.0 - 4.0 * std::exp(-beta); }

double pole_alpha_limit(double beta) { return 0.25 - 0.5 * std::exp(-beta); }

double aniso_a_turn(int panels) {
  // integrate per quadrant; the integrand has kinks at multiples of pi/2
  int n = std::max(2, panels / 4);
  if (n % 2) ++n;
  double total = 0.0;
  for (int q = 0; q < 4; ++q) {
    double lo = q * 0.5 * kPi, h = 0.5 * kPi / n;
    double acc = aniso_a(lo) + aniso_a(lo + n * h);
    for (int i = 1; i < n; ++i)
      acc += aniso_a(lo + i * h) * (i % 2 ? 4.0 : 2.0);
    total += acc * h / 3.0;
  }
  return total;
}

namespace {

// L1 distance from a lattice vertex to the extremal run of pole k
int run_dist(const LatticeCurve& c, const IV& v, int k) {
  const PoleInfo& P = c.pole(k);
  int lo, hi, perp, along;
  if (k == 1 || k == 3) {
    lo = std::min(P.L.x, P.R.x);
    hi = std::max(P.L.x, P.R.x);
    perp = std::abs(v.y - P.z);
    along = v.x < lo ? lo - v.x : (v.x > hi ? v.x - hi : 0);
  } else {
    lo = std::min(P.L.y, P.R.y);
    hi = std::max(P.L.y, P.R.y);
    perp = std::abs(v.x - P.z);
    along = v.y < lo ? lo - v.y : (v.y > hi ? v.y - hi : 0);
  }
  return perp + along;
}

}  // namespace

FunctionalTerms evaluate_terms(const LatticeCurve& c, const BiasField& F,
                               double t, double eps) {
  const int E = c.n_edges();
  const double N = c.N();
  std::vector<IV> pos(E);
  std::vector<Dir> dd(E);
  int id = c.entry_node();
  for (int i = 0; i < E; ++i) {
    pos[i] = c.vertex(id);
    dd[i] = c.dir(id);
    id = c.next(id);
  }

  // region index of every vertex between consecutive extremal runs
  std::vector<int> region(E, 0);
  int idx_r[5] = {0, 0, 0, 0, 0};
  for (int i = 0; i < E; ++i)
    for (int k = 1; k <= 4; ++k)
      if (pos[i] == c.pole(k).R) idx_r[k] = i;
  for (int k = 1; k <= 4; ++k) {
    IV stop = c.pole(k % 4 + 1).L;
    for (int j = idx_r[k]; pos[j] != stop; j = (j + 1) % E) region[j] = k;
  }

  FunctionalTerms out;
  for (int k = 1; k <= 4; ++k) {
    const PoleInfo& P = c.pole(k);
    double hl = F.value(t, P.L.x / N, P.L.y / N);
    double hr = F.value(t, P.R.x / N, P.R.y / N);
    out.pole_l += hl;
    out.pole_lr += hl + hr;
  }

  const double psi = F.psi(t);
  const int w = static_cast<int>(eps * N);
  const double keep = eps * N;
  for (int i = 0; i < E; ++i) {
    if (region[i] == 0) continue;
    int dist = run_dist(c, pos[i], 1);
    for (int k = 2; k <= 4 && dist >= keep; ++k)
      dist = std::min(dist, run_dist(c, pos[i], k));
    if (dist < keep) continue;

    double tx = 0.0, ty = 0.0;
    for (int j = i - w; j <= i + w; ++j) {
      Dir d = dd[(j % E + E) % E];
      tx += dir_dx(d);
      ty += dir_dy(d);
    }
    tx /= 2 * w + 1;
    ty /= 2 * w + 1;
    double veps = std::hypot(tx, ty);
    double Tx = tx / veps, Ty = ty / veps;

    double x = pos[i].x / N, y = pos[i].y / N;
    double gx, gy;
    F.spatial_grad(x, y, gx, gy);
    gx *= psi;
    gy *= psi;
    double h = psi * F.spatial(x, y);
    IV m = region_m(region[i]);
    double v2 = veps * veps;

    out.transport += 0.25 * v2 * (Tx * m.x + Ty * m.y) * (Tx * gx + Ty * gy) / N;
    out.mobility += 0.5 * std::abs(Tx * Ty) * v2 * h * h / N;

    const IV& q = pos[(i + 1) % E];
    double dh = F.value(t, q.x / N, q.y / N) - F.value(t, x, y);
    out.alpha_flux += aniso_alpha(std::atan2(ty, tx)) * dh;
  }
  return out;
}

SmoothCurve ShrinkingEllipse::at(double t) const {
  double A = a * scale(t), B = b * scale(t);
  SmoothCurve c;
  c.gamma = [A, B](double u, double& x, double& y) {
    double th = 2.0 * kPi * u;
    x = A * std::cos(th);
    y = -B * std::sin(th);
  };
  c.dgamma = [A, B](double u, double& dx, double& dy) {
    double th = 2.0 * kPi * u;
    dx = -2.0 * kPi * A * std::sin(th);
    dy = -2.0 * kPi * B * std::cos(th);
  };
  return c;
}

void ShrinkingEllipse::poles(double t, double px[4], double py[4]) const {
  double A = a * scale(t), B = b * scale(t);
  px[0] = 0.0;
  py[0] = B;
  px[1] = A;
  py[1] = 0.0;
  px[2] = 0.0;
  py[2] = -B;
  px[3] = -A;
  py[3] = 0.0;
}

double ShrinkingEllipse::area(double t) const {
  double s = scale(t);
  return kPi * a * b * s * s;
}

namespace {

double droplet_spatial(const SmoothCurve& c, const BiasField& F, int panels) {
  int n = panels % 2 ? panels + 1 : panels;
  double h = 1.0 / n, acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    double x, y, dx, dy;
    c.gamma(i * h, x, y);
    c.dgamma(i * h, dx, dy);
    double f = F.spatial_y_antiderivative(x, y) * dx;
    acc += f * (i == 0 || i == n ? 1.0 : (i % 2 ? 4.0 : 2.0));
  }
  return acc * h / 3.0;
}

struct SmoothTerms {
  double transport = 0.0;
  double mobility = 0.0;
  double pole_lr = 0.0;
};

int quadrant_region(double x, double y) {
  if (x >= 0.0) return y >= 0.0 ? 1 : 2;
  return y >= 0.0 ? 4 : 3;
}

// limit form: exact tangents on each quadrant arc, Simpson in the parameter
SmoothTerms smooth_terms_limit(const SmoothCurve& c, const BiasField& F,
                               double t, int panels) {
  SmoothTerms out;
  const double psi = F.psi(t);
  int n = std::max(2, panels / 4);
  if (n % 2) ++n;
  for (int q = 0; q < 4; ++q) {
    double lo = 0.25 * q, h = 0.25 / n;
    double dxm, dym;
    c.dgamma(lo + 0.5 * 0.25, dxm, dym);
    double s2 = std::sin(2.0 * std::atan2(dym, dxm));
    double sgn = s2 >= 0.0 ? 1.0 : -1.0;
    double tr = 0.0, mo = 0.0;
    for (int i = 0; i <= n; ++i) {
      double u = lo + i * h;
      double x, y, dx, dy;
      c.gamma(u, x, y);
      c.dgamma(u, dx, dy);
      double theta = std::atan2(dy, dx);
      double alpha = 0.5 * aniso_a(theta) * sgn * std::cos(2.0 * theta);
      double gx, gy;
      F.spatial_grad(x, y, gx, gy);
      double wgt = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      tr += wgt * alpha * (gx * dx + gy * dy) * psi;
      double l2 = std::hypot(dx, dy);
      double hv = psi * F.spatial(x, y);
      mo += wgt * aniso_mu(theta) * l2 * hv * hv;
    }
    out.transport += tr * h / 3.0;
    out.mobility += 0.5 * mo * h / 3.0;
  }
  return out;
}

// direction averaged form at scale eps with the pole bands removed
SmoothTerms smooth_terms_eps(const SmoothCurve& c, const BiasField& F,
                             double t, double eps, const double px[4],
                             const double py[4], int panels) {
  SmoothTerms out;
  const double psi = F.psi(t);
  const int M = panels;
  std::vector<double> s_edge(M + 1, 0.0);
  std::vector<double> l1_mid(M);
  for (int j = 0; j < M; ++j) {
    double dx, dy;
    c.dgamma((j + 0.5) / M, dx, dy);
    l1_mid[j] = (std::abs(dx) + std::abs(dy)) / M;
    s_edge[j + 1] = s_edge[j] + l1_mid[j];
  }
  const double S = s_edge[M];

  auto gamma_at_s = [&](double s, double& x, double& y) {
    s = std::fmod(s, S);
    if (s < 0.0) s += S;
    int lo = 0, hi = M;
    while (hi - lo > 1) {
      int mid = (lo + hi) / 2;
      if (s_edge[mid] <= s)
        lo = mid;
      else
        hi = mid;
    }
    double frac = (s - s_edge[lo]) / (s_edge[lo + 1] - s_edge[lo]);
    c.gamma((lo + frac) / M, x, y);
  };

  for (int j = 0; j < M; ++j) {
    double x, y;
    c.gamma((j + 0.5) / M, x, y);
    double dist = 1e300;
    for (int k = 0; k < 4; ++k)
      dist = std::min(dist, std::abs(x - px[k]) + std::abs(y - py[k]));
    if (dist < eps) continue;

    double sm = 0.5 * (s_edge[j] + s_edge[j + 1]);
    double xp, yp, xm, ym;
    gamma_at_s(sm + eps, xp, yp);
    gamma_at_s(sm - eps, xm, ym);
    double tx = (xp - xm) / (2.0 * eps), ty = (yp - ym) / (2.0 * eps);
    double veps = std::hypot(tx, ty);
    double Tx = tx / veps, Ty = ty / veps;
    double ratio = veps * veps;

    double gx, gy;
    F.spatial_grad(x, y, gx, gy);
    double hv = psi * F.spatial(x, y);
    IV m = region_m(quadrant_region(x, y));
    out.transport +=
        0.25 * ratio * (Tx * m.x + Ty * m.y) * (Tx * gx + Ty * gy) * psi * l1_mid[j];
    out.mobility += 0.5 * std::abs(Tx * Ty) * ratio * hv * hv * l1_mid[j];
  }
  return out;
}

}  // namespace

double smooth_droplet_integral(const SmoothCurve& c, const BiasField& F,
                               double t, int panels) {
  return F.psi(t) * droplet_spatial(c, F, panels);
}

double smooth_action(const ShrinkingEllipse& traj, const BiasField& H,
                     double beta, double T, double eps, int time_panels,
                     int arc_panels) {
  const double cpol = 0.25 - 0.5 * std::exp(-beta);
  int n = time_panels % 2 ? time_panels + 1 : time_panels;
  double ht = T / n;

  auto integrand = [&](double t) {
    SmoothCurve c = traj.at(t);
    double px[4], py[4];
    traj.poles(t, px, py);
    SmoothTerms st = eps > 0.0
                         ? smooth_terms_eps(c, H, t, eps, px, py, arc_panels)
                         : smooth_terms_limit(c, H, t, arc_panels);
    double pole_lr = 0.0;
    for (int k = 0; k < 4; ++k) pole_lr += 2.0 * H.value(t, px[k], py[k]);
    double dts = H.dpsi(t) * droplet_spatial(c, H, arc_panels);
    return -dts - st.transport + cpol * pole_lr - st.mobility;
  };

  double acc = integrand(0.0) + integrand(T);
  for (int i = 1; i < n; ++i) acc += integrand(i * ht) * (i % 2 ? 4.0 : 2.0);
  double time_int = acc * ht / 3.0;

  double bd = smooth_droplet_integral(traj.at(T), H, T, arc_panels) -
              smooth_droplet_integral(traj.at(0.0), H, 0.0, arc_panels);
  return bd + time_int;
}

}  // namespace ckmc
