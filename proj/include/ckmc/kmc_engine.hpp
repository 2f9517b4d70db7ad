#ifndef CKMC_KMC_ENGINE_HPP
#define CKMC_KMC_ENGINE_HPP

#include <functional>
#include <string>
#include <vector>

#include "ckmc/bias_field.hpp"
#include "ckmc/lattice_curve.hpp"
#include "ckmc/rate_catalog.hpp"
#include "ckmc/rng.hpp"

namespace ckmc {

enum class StopReason { TimeEnd, Extinct, Guard };

struct EngineConfig {
  double beta = 2.0;
  double T = 0.05;
  double t0 = 0.0;
  uint64_t seed = 1;
  double cadence = 0.0;  // sampling grid spacing; 0 disables the grid
  double dt_max = 0.0;   // tilt refresh window for time-dependent psi; 0: none
  bool apply_tilt = true;
  bool track_log_rnd = false;
  double guard_r0 = 0.0;  // stop when l1 distance from the start exceeds this
  const BiasField* bias = nullptr;
  BiasField::CellRule cell_rule = BiasField::CellRule::Midpoint;
};

// f is piecewise constant between events; acc accumulates the exact
// integral of f over [a,b] along the trajectory.
struct PathIntegral {
  std::string name;
  std::function<double(const LatticeCurve&)> f;
  double a = 0.0, b = 0.0;
  double acc = 0.0;
  double time_average() const { return acc / (b - a); }
};

class Engine {
 public:
  using EventCb = std::function<void(double, const Move&)>;
  using SampleCb = std::function<void(double, const LatticeCurve&)>;

  Engine(LatticeCurve init, const EngineConfig& cfg);

  // Runs until T, extinction, or the guard trips. Integrands are updated
  // exactly; sample_cb fires on the cadence grid (including t0 and T).
  StopReason run(std::vector<PathIntegral>* integrands = nullptr,
                 const SampleCb& sample_cb = nullptr,
                 const EventCb& event_cb = nullptr);

  const LatticeCurve& curve() const { return curve_; }
  double t() const { return t_; }
  uint64_t n_events() const { return n_events_; }

  // (1/N) log of the Radon-Nikodym derivative of the tilted law against the
  // untilted one along the realized trajectory
  double log_rnd_per_n() const;
  // components, exposed for the rate-functional comparisons
  double boundary_term_initial() const { return h0_; }
  double boundary_term_final() const { return hT_; }
  double dt_pairing() const { return dpsi_acc_; }
  double generator_action_integral() const { return gen_acc_; }

 private:
  void init_tilt_state();
  double gamma_h_now() const;  // <Gamma, H_t> block sum
  void advance_interval(double t_to);

  LatticeCurve curve_;
  EngineConfig cfg_;
  RateCatalog catalog_;
  Rng rng_;
  double t_ = 0.0;
  uint64_t n_events_ = 0;

  // tilt bookkeeping
  double s_phi_ = 0.0;  // sum over blocks of the spatial cell functional
  double h0_ = 0.0, hT_ = 0.0;
  double dpsi_acc_ = 0.0;
  double gen_acc_ = 0.0;

  // guard
  std::unordered_set<IV, IVHash> initial_cells_;
  long long sym_diff_ = 0;
};

}  // namespace ckmc

#endif
