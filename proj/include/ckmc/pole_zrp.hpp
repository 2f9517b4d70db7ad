#ifndef CKMC_POLE_ZRP_HPP
#define CKMC_POLE_ZRP_HPP

#include <cstdint>
#include <vector>

#include "ckmc/rng.hpp"

namespace ckmc {

// Exact stationary law of the signed particle window on ell+1 sites.
// Particle number q has weight binom(2q+ell-2, 2q) * exp(-2*beta*q).
class ZrpExact {
 public:
  ZrpExact(int ell, double beta);
  int ell() const { return ell_; }
  int q_max() const { return static_cast<int>(pmf_.size()) - 1; }
  double pmf(int q) const { return q <= q_max() ? pmf_[q] : 0.0; }
  double log_pmf(int q) const;
  // stationary expectation of the minimal-gap indicator
  double e_p2() const;

 private:
  int ell_;
  double beta_;
  std::vector<double> pmf_;
  std::vector<double> log_pmf_;
};

// large deviation rate function of the particle density u = q/ell
double zrp_rate(double u, double beta);
double zrp_rate_prime(double u, double beta);
double zrp_rate_second(double u, double beta);
double zrp_critical_density(double beta);

// Event-driven simulator of the window dynamics: signed particles on sites
// 0..ell, every positive site strictly left of every negative site.
// Hops at rate 1/2 per occupied site per direction, annihilation at rate 1
// when the gap is minimal, pair creation at rate exp(-2*beta) per interior
// gap site.
class ZrpSim {
 public:
  ZrpSim(int ell, double beta, uint64_t seed);

  void run(long long events, double burn_in_fraction = 0.1);

  const std::vector<double>& q_weights() const { return q_weight_; }
  double total_weight() const { return total_weight_; }
  double p2_estimate() const { return p2_weight_ / total_weight_; }
  double p2_stderr() const;
  // total variation distance between the dwell-weighted q histogram and
  // the exact law
  double tv_distance(const ZrpExact& ex) const;
  long long cap_hits() const { return cap_hits_; }

  int L() const { return L_; }
  int R() const { return R_; }
  long long q() const { return q_; }
  const std::vector<int>& eta() const { return eta_; }

 private:
  struct MoveZ {
    int type;  // 0 hop, 1 annihilate, 2 create
    int site;
    int dir;  // hop displacement
    double rate;
  };

  void scan_moves();
  void apply(const MoveZ& m);
  void recompute_bounds();

  int ell_;
  double beta_, grow_rate_;
  std::vector<int> eta_;
  int L_, R_;
  long long q_ = 0;
  long long q_cap_;
  long long cap_hits_ = 0;
  Rng rng_;
  std::vector<MoveZ> moves_;

  std::vector<double> q_weight_;
  double p2_weight_ = 0.0, total_weight_ = 0.0;
  std::vector<double> batch_p2_;
  double batch_acc_ = 0.0, batch_w_ = 0.0;
  long long batch_events_ = 0, batch_len_ = 0;
};

}  // namespace ckmc

#endif
