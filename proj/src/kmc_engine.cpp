#include "ckmc/kmc_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ckmc {

Engine::Engine(LatticeCurve init, const EngineConfig& cfg)
    : curve_(std::move(init)), cfg_(cfg), rng_(cfg.seed), t_(cfg.t0) {
  RateCatalog::Params p;
  p.beta = cfg_.beta;
  p.apply_tilt = cfg_.apply_tilt && cfg_.bias != nullptr;
  p.bias = cfg_.bias;
  p.cell_rule = cfg_.cell_rule;
  double psi0 = cfg_.bias ? cfg_.bias->psi(t_) : 1.0;
  catalog_.rebuild(curve_, p, psi0);
  init_tilt_state();
  if (cfg_.guard_r0 > 0.0) {
    for (IV c : curve_.block_cells()) initial_cells_.insert(c);
  }
}

void Engine::init_tilt_state() {
  s_phi_ = 0.0;
  if (cfg_.bias && !cfg_.bias->empty()) {
    double h = 1.0 / curve_.N();
    for (IV c : curve_.block_cells())
      s_phi_ += cfg_.bias->cell_value(c.x * h, c.y * h, h, cfg_.cell_rule);
  }
  h0_ = gamma_h_now();
  hT_ = h0_;
}

double Engine::gamma_h_now() const {
  if (!cfg_.bias) return 0.0;
  return cfg_.bias->psi(t_) * s_phi_;
}

void Engine::advance_interval(double t_to) {
  if (t_to <= t_) return;
  double dt = t_to - t_;
  if (cfg_.track_log_rnd) {
    double n2 = static_cast<double>(curve_.N()) * curve_.N();
    gen_acc_ += dt * n2 * (catalog_.total_tilted() - catalog_.total_base());
    if (cfg_.bias && cfg_.bias->time_dependent())
      dpsi_acc_ += s_phi_ * (cfg_.bias->psi(t_to) - cfg_.bias->psi(t_));
  }
  t_ = t_to;
}

StopReason Engine::run(std::vector<PathIntegral>* integrands,
                       const SampleCb& sample_cb, const EventCb& event_cb) {
  const double T = cfg_.T;
  const double n2 = static_cast<double>(curve_.N()) * curve_.N();
  const bool retilt =
      cfg_.bias && cfg_.bias->time_dependent() && !cfg_.bias->empty();

  // breakpoint grid: bit 1 = sample, bit 2 = tilt refresh
  std::vector<std::pair<double, int>> bps;
  bps.push_back({T, 1});
  if (cfg_.cadence > 0.0) {
    for (int i = 1;; ++i) {
      double t = cfg_.t0 + i * cfg_.cadence;
      if (t >= T) break;
      bps.push_back({t, 1 | 2});
    }
  }
  if (retilt && cfg_.dt_max > 0.0) {
    for (int i = 1;; ++i) {
      double t = cfg_.t0 + i * cfg_.dt_max;
      if (t >= T) break;
      bps.push_back({t, 2});
    }
  }
  if (integrands) {
    for (const auto& ig : *integrands) {
      if (ig.a > cfg_.t0 && ig.a < T) bps.push_back({ig.a, 0});
      if (ig.b > cfg_.t0 && ig.b < T) bps.push_back({ig.b, 0});
    }
  }
  std::sort(bps.begin(), bps.end());
  {
    std::vector<std::pair<double, int>> merged;
    for (auto& bp : bps) {
      if (!merged.empty() && merged.back().first == bp.first)
        merged.back().second |= bp.second;
      else
        merged.push_back(bp);
    }
    bps.swap(merged);
  }

  if (sample_cb) sample_cb(t_, curve_);
  size_t bp_i = 0;
  StopReason reason = StopReason::TimeEnd;
  bool extinct = false;

  while (t_ < T) {
    while (bp_i < bps.size() && bps[bp_i].first <= t_) ++bp_i;
    double bp_t = bp_i < bps.size() ? bps[bp_i].first : T;
    int bp_bits = bp_i < bps.size() ? bps[bp_i].second : 1;

    double lam = catalog_.total_rate();
    double t_ev = std::numeric_limits<double>::infinity();
    if (!extinct) {
      if (lam <= 0.0) {
        extinct = true;
        reason = StopReason::Extinct;
      } else {
        t_ev = t_ + rng_.exponential(n2 * lam);
      }
    }

    // exact integral contributions with the state held on [t_, t_new]
    double t_new = std::min(t_ev, bp_t);
    if (integrands) {
      for (auto& ig : *integrands) {
        double lo = std::max(ig.a, t_);
        double hi = std::min(ig.b, t_new);
        if (hi > lo) ig.acc += ig.f(curve_) * (hi - lo);
      }
    }

    if (t_ev < bp_t) {
      advance_interval(t_ev);
      double u = rng_.u01() * lam;
      int slot = catalog_.sample(u);
      Move m = catalog_.entry(slot).move;
      ApplyDelta d = curve_.apply(m);
      catalog_.after_apply(curve_, d);
      if (cfg_.bias && !cfg_.bias->empty()) {
        double h = 1.0 / curve_.N();
        for (int i = 0; i < d.n_cells; ++i)
          s_phi_ += d.cell_sign * cfg_.bias->cell_value(d.cells[i].x * h,
                                                        d.cells[i].y * h, h,
                                                        cfg_.cell_rule);
      }
      if (retilt) catalog_.set_psi(curve_, cfg_.bias->psi(t_));
      if (!initial_cells_.empty() || cfg_.guard_r0 > 0.0) {
        for (int i = 0; i < d.n_cells; ++i) {
          bool in0 = initial_cells_.count(d.cells[i]) > 0;
          sym_diff_ += (d.cell_sign > 0) == in0 ? -1 : 1;
        }
        if (static_cast<double>(sym_diff_) / n2 > cfg_.guard_r0) {
          if (event_cb) event_cb(t_, m);
          ++n_events_;
          reason = StopReason::Guard;
          break;
        }
      }
      if (event_cb) event_cb(t_, m);
      ++n_events_;
      if ((n_events_ & 0xFFFFF) == 0) catalog_.resum();
    } else {
      advance_interval(bp_t);
      if ((bp_bits & 2) && retilt)
        catalog_.set_psi(curve_, cfg_.bias->psi(t_));
      if ((bp_bits & 1) && sample_cb) sample_cb(t_, curve_);
      ++bp_i;
    }
  }
  hT_ = gamma_h_now();
  return reason;
}

double Engine::log_rnd_per_n() const {
  return (hT_ - h0_) - dpsi_acc_ - gen_acc_ / curve_.N();
}

}  // namespace ckmc
