#include <cmath>
#include <vector>

#include "ckmc/pole_zrp.hpp"
#include "doctest.h"

using namespace ckmc;

namespace {

// Brute enumeration of the ell=4 window with per-site charge in [-3,3].
// Exhaustive for q <= 3; higher q would need larger per-site charges.
struct BruteCounts {
  long long configs[4] = {0, 0, 0, 0};
  long long gap_two[4] = {0, 0, 0, 0};
};

BruteCounts enumerate_ell4() {
  BruteCounts bc;
  const int ell = 4;
  int eta[5];
  for (long long code = 0; code < 7LL * 7 * 7 * 7 * 7; ++code) {
    long long c = code;
    for (int x = 0; x <= ell; ++x, c /= 7) eta[x] = static_cast<int>(c % 7) - 3;
    int last_pos = -1, first_neg = ell + 1;
    long long plus = 0, minus = 0;
    for (int x = 0; x <= ell; ++x) {
      if (eta[x] > 0) {
        last_pos = x;
        plus += eta[x];
      } else if (eta[x] < 0) {
        if (first_neg > ell) first_neg = x;
        minus -= eta[x];
      }
    }
    if (plus != minus || plus > 3) continue;
    if (plus > 0 && last_pos >= first_neg) continue;
    int L = last_pos < 0 ? 0 : last_pos;
    int R = first_neg > ell ? ell : first_neg;
    if (R - L < 2) continue;
    bc.configs[plus] += 1;
    if (R - L == 2) bc.gap_two[plus] += 1;
  }
  return bc;
}

long long binom_ll(int n, int k) {
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

TEST_CASE("window config counts match the closed form") {
  BruteCounts bc = enumerate_ell4();
  for (int q = 0; q <= 3; ++q)
    CHECK(bc.configs[q] == binom_ll(2 * q + 2, 2 * q));
  // minimal-gap fraction is 2q/(2q+ell-2), checked in integer arithmetic
  for (int q = 1; q <= 3; ++q)
    CHECK(bc.gap_two[q] * (2 * q + 2) == bc.configs[q] * 2 * q);
  CHECK(bc.gap_two[0] == 0);
}

TEST_CASE("stationary pmf ratios carry the edge-cost weight") {
  BruteCounts bc = enumerate_ell4();
  const double beta = 0.7;
  ZrpExact ex(4, beta);
  for (int q = 1; q <= 3; ++q) {
    double want = static_cast<double>(bc.configs[q]) / bc.configs[0] *
                  std::exp(-2.0 * beta * q);
    CHECK(ex.pmf(q) / ex.pmf(0) == doctest::Approx(want).epsilon(1e-12));
  }
  ZrpExact tiny(2, 1.3);
  CHECK(tiny.pmf(1) / tiny.pmf(0) ==
        doctest::Approx(std::exp(-2.6)).epsilon(1e-12));
  CHECK(tiny.e_p2() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("minimal-gap expectation against brute force at large beta") {
  BruteCounts bc = enumerate_ell4();
  const double beta = 3.0;
  double num = 0.0, den = 0.0;
  for (int q = 0; q <= 3; ++q) {
    double w = static_cast<double>(bc.configs[q]) * std::exp(-2.0 * beta * q);
    den += w;
    num += w * (q == 0 ? 0.0
                       : static_cast<double>(bc.gap_two[q]) / bc.configs[q]);
  }
  // q >= 4 tail is below 2e-9 of the mass
  CHECK(ZrpExact(4, beta).e_p2() == doctest::Approx(num / den).epsilon(1e-8));
}

TEST_CASE("minimal-gap expectation climbs to exp(-beta) from below") {
  const double beta = 1.5;
  double prev = 0.0;
  double last = 0.0;
  for (int ell : {10, 20, 40, 80}) {
    double e = ZrpExact(ell, beta).e_p2();
    CHECK(e > prev);
    CHECK(e <= std::exp(-beta) + 1e-12);
    prev = e;
    last = e;
  }
  CHECK(std::abs(last - std::exp(-beta)) <= 1e-9);
}

TEST_CASE("rate function vanishes at the critical density") {
  for (double beta : {1.0, 1.5, 2.5}) {
    double uc = zrp_critical_density(beta);
    CHECK(uc == doctest::Approx(1.0 / (2.0 * std::expm1(beta))).epsilon(1e-14));
    CHECK(std::abs(zrp_rate(uc, beta)) <= 1e-12);
    CHECK(std::abs(zrp_rate_prime(uc, beta)) <= 1e-12);
    // strict minimum
    CHECK(zrp_rate(uc * 0.95, beta) > 0.0);
    CHECK(zrp_rate(uc * 1.05, beta) > 0.0);
  }
}

TEST_CASE("derivatives agree with central differences") {
  for (double beta : {1.0, 1.5}) {
    double uc = zrp_critical_density(beta);
    double h = 1e-4;
    double d = (zrp_rate(uc + h, beta) - zrp_rate(uc - h, beta)) / (2.0 * h);
    CHECK(std::abs(d) <= 1e-6);
  }
  const double beta = 1.5;
  for (int i = 0; i < 60; ++i) {
    double u = 0.01 * std::pow(5.0 / 0.01, i / 59.0);
    double h = 1e-4 * u;
    double d1 = (zrp_rate(u + h, beta) - zrp_rate(u - h, beta)) / (2.0 * h);
    CHECK(std::abs(d1 - zrp_rate_prime(u, beta)) <= 1e-6);
    double d2 =
        (zrp_rate_prime(u + h, beta) - zrp_rate_prime(u - h, beta)) / (2.0 * h);
    CHECK(std::abs(d2 - zrp_rate_second(u, beta)) <= 1e-6);
    CHECK(zrp_rate_second(u, beta) ==
          doctest::Approx(2.0 / (u + 2.0 * u * u)).epsilon(1e-12));
  }
}

TEST_CASE("exact pmf obeys the large deviation decay") {
  const double beta = 1.5;
  const int ell = 400;
  ZrpExact ex(ell, beta);
  double uc = zrp_critical_density(beta);
  for (double u : {uc / 2.0, uc, 2.0 * uc}) {
    int q = static_cast<int>(u * ell);
    REQUIRE(q <= ex.q_max());
    double emp = -ex.log_pmf(q) / ell;
    CHECK(std::abs(emp - zrp_rate(static_cast<double>(q) / ell, beta)) <=
          0.02);
  }
}

TEST_CASE("window simulator preserves the state structure") {
  ZrpSim sim(8, 1.2, 11);
  for (int chunk = 0; chunk < 50; ++chunk) {
    sim.run(2000, 0.0);
    const std::vector<int>& eta = sim.eta();
    REQUIRE(eta.size() == 9);
    int last_pos = -1, first_neg = 9;
    long long plus = 0, minus = 0;
    for (int x = 0; x <= 8; ++x) {
      if (eta[x] > 0) {
        last_pos = x;
        plus += eta[x];
      } else if (eta[x] < 0) {
        if (first_neg > 8) first_neg = x;
        minus -= eta[x];
      }
    }
    CHECK(plus == minus);
    CHECK(plus == sim.q());
    if (plus > 0) CHECK(last_pos < first_neg);
    CHECK(sim.L() == (last_pos < 0 ? 0 : last_pos));
    CHECK(sim.R() == (first_neg > 8 ? 8 : first_neg));
    CHECK(sim.R() - sim.L() >= 2);
  }
}

TEST_CASE("window simulator is deterministic in the seed") {
  ZrpSim a(6, 1.0, 77), b(6, 1.0, 77);
  a.run(50000);
  b.run(50000);
  CHECK(a.p2_estimate() == b.p2_estimate());
  CHECK(a.total_weight() == b.total_weight());
  REQUIRE(a.q_weights().size() == b.q_weights().size());
  for (size_t i = 0; i < a.q_weights().size(); ++i)
    CHECK(a.q_weights()[i] == b.q_weights()[i]);
}

TEST_CASE("window simulator converges to the exact law") {
  const int ell = 10;
  const double beta = 1.5;
  ZrpSim sim(ell, beta, 42);
  sim.run(400000);
  ZrpExact ex(ell, beta);
  CHECK(sim.tv_distance(ex) < 0.05);
  CHECK(std::abs(sim.p2_estimate() - ex.e_p2()) <= 4.0 * sim.p2_stderr());
  CHECK(sim.cap_hits() == 0);
}
