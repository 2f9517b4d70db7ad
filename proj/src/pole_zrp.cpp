#include "ckmc/pole_zrp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ckmc {

namespace {

double log_binom(long long n, long long k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

ZrpExact::ZrpExact(int ell, double beta) : ell_(ell), beta_(beta) {
  if (ell < 2) throw std::invalid_argument("window length must be >= 2");
  std::vector<double> lw;
  double best = -1e300;
  for (int q = 0;; ++q) {
    double w = log_binom(2LL * q + ell - 2, 2LL * q) - 2.0 * beta * q;
    best = std::max(best, w);
    lw.push_back(w);
    if (q > 0 && w < best - 45.0) break;
    if (q > 2000000) throw std::runtime_error("window weight tail too heavy");
  }
  double z = 0.0;
  for (double w : lw) z += std::exp(w - best);
  double log_z = best + std::log(z);
  log_pmf_.resize(lw.size());
  pmf_.resize(lw.size());
  for (size_t q = 0; q < lw.size(); ++q) {
    log_pmf_[q] = lw[q] - log_z;
    pmf_[q] = std::exp(log_pmf_[q]);
  }
}

double ZrpExact::log_pmf(int q) const {
  if (q < 0 || q > q_max()) return -1e300;
  return log_pmf_[q];
}

double ZrpExact::e_p2() const {
  double s = ell_ == 2 ? pmf_[0] : 0.0;
  for (int q = 1; q <= q_max(); ++q)
    s += pmf_[q] * (2.0 * q) / (2.0 * q + ell_ - 2);
  return s;
}

double zrp_rate(double u, double beta) {
  if (u <= 0.0) return -std::log(1.0 - std::exp(-beta));
  return 2.0 * beta * u - 2.0 * u * std::log1p(1.0 / (2.0 * u)) -
         std::log1p(2.0 * u) - std::log(1.0 - std::exp(-beta));
}

double zrp_rate_prime(double u, double beta) {
  return 2.0 * beta - 2.0 * std::log1p(1.0 / (2.0 * u));
}

double zrp_rate_second(double u, double) { return 2.0 / (u + 2.0 * u * u); }

double zrp_critical_density(double beta) {
  return 0.5 / (std::exp(beta) - 1.0);
}

ZrpSim::ZrpSim(int ell, double beta, uint64_t seed)
    : ell_(ell),
      beta_(beta),
      grow_rate_(std::exp(-2.0 * beta)),
      eta_(ell + 1, 0),
      L_(0),
      R_(ell),
      rng_(seed) {
  if (ell < 2) throw std::invalid_argument("window length must be >= 2");
  double qc = zrp_critical_density(beta) * ell;
  q_cap_ = std::max<long long>(40, static_cast<long long>(20.0 * qc) + 1);
  moves_.reserve(4 * ell + 8);
}

void ZrpSim::scan_moves() {
  moves_.clear();
  int p = R_ - L_;
  for (int i = 0; i <= ell_; ++i) {
    if (eta_[i] > 0) {
      if (i >= 1) moves_.push_back({0, i, -1, 0.5});
      if (i < L_ || (i == L_ && p >= 3)) moves_.push_back({0, i, +1, 0.5});
    } else if (eta_[i] < 0) {
      if (i <= ell_ - 1) moves_.push_back({0, i, +1, 0.5});
      if (i > R_ || (i == R_ && p >= 3)) moves_.push_back({0, i, -1, 0.5});
    }
  }
  if (p == 2 && q_ >= 1) moves_.push_back({1, L_, 0, 1.0});
  if (q_ < q_cap_) {
    for (int x = L_ + 1; x <= R_ - 1; ++x)
      moves_.push_back({2, x, 0, grow_rate_});
  } else {
    ++cap_hits_;
  }
}

void ZrpSim::apply(const MoveZ& m) {
  if (m.type == 0) {
    int s = eta_[m.site] > 0 ? 1 : -1;
    eta_[m.site] -= s;
    eta_[m.site + m.dir] += s;
  } else if (m.type == 1) {
    eta_[L_] -= 1;
    eta_[R_] += 1;
    --q_;
  } else {
    eta_[m.site - 1] += 1;
    eta_[m.site + 1] -= 1;
    ++q_;
  }
  recompute_bounds();
}

void ZrpSim::recompute_bounds() {
  L_ = 0;
  R_ = ell_;
  for (int i = 0; i <= ell_; ++i) {
    if (eta_[i] > 0) L_ = i;
    if (eta_[i] < 0 && R_ == ell_) R_ = std::min(R_, i);
  }
  if (eta_[ell_] < 0) R_ = std::min(R_, ell_);
}

void ZrpSim::run(long long events, double burn_in_fraction) {
  long long burn = static_cast<long long>(events * burn_in_fraction);
  batch_len_ = std::max<long long>(1000, (events - burn) / 64);
  for (long long e = 0; e < events; ++e) {
    scan_moves();
    double lam = 0.0;
    for (const MoveZ& m : moves_) lam += m.rate;
    if (e >= burn) {
      double w = 1.0 / lam;
      if (q_ >= static_cast<long long>(q_weight_.size()))
        q_weight_.resize(q_ + 1, 0.0);
      q_weight_[q_] += w;
      double p2 = (R_ - L_ == 2) ? 1.0 : 0.0;
      p2_weight_ += p2 * w;
      total_weight_ += w;
      batch_acc_ += p2 * w;
      batch_w_ += w;
      if (++batch_events_ == batch_len_) {
        batch_p2_.push_back(batch_acc_ / batch_w_);
        batch_acc_ = batch_w_ = 0.0;
        batch_events_ = 0;
      }
    }
    double u = rng_.u01() * lam;
    const MoveZ* pick = &moves_.back();
    for (const MoveZ& m : moves_) {
      u -= m.rate;
      if (u < 0.0) {
        pick = &m;
        break;
      }
    }
    apply(*pick);
  }
}

double ZrpSim::p2_stderr() const {
  size_t nb = batch_p2_.size();
  if (nb < 2) return 1.0;
  double mean = 0.0;
  for (double b : batch_p2_) mean += b;
  mean /= nb;
  double v = 0.0;
  for (double b : batch_p2_) v += (b - mean) * (b - mean);
  v /= (nb - 1);
  return std::sqrt(v / nb);
}

double ZrpSim::tv_distance(const ZrpExact& ex) const {
  size_t n = std::max(q_weight_.size(), static_cast<size_t>(ex.q_max() + 1));
  double tv = 0.0;
  for (size_t q = 0; q < n; ++q) {
    double emp =
        q < q_weight_.size() && total_weight_ > 0 ? q_weight_[q] / total_weight_ : 0.0;
    tv += std::abs(emp - ex.pmf(static_cast<int>(q)));
  }
  return 0.5 * tv;
}

}  // namespace ckmc
