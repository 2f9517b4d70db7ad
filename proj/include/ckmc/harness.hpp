#ifndef CKMC_HARNESS_HPP
#define CKMC_HARNESS_HPP

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "ckmc/kmc_engine.hpp"
#include "ckmc/observables.hpp"

namespace ckmc {

// Complete description of a simulation batch, read from an ini-style file
// with [run], [initial], [bias] and [observables] sections. Unknown
// sections or keys are rejected.
struct RunConfig {
  // [run]
  int n = 64;
  double beta = 2.0;
  double t_end = 0.05;
  double t0 = 0.0;
  uint64_t seed = 1;
  int replicas = 1;
  double cadence = 0.0;
  double dt_max = 0.0;
  double guard = 0.0;

  // [initial]
  std::string shape = "disk";  // disk | square | diamond | ellipse
  double a = 0.4;
  double b = 0.3;
  std::string snapshot;  // when set, load the start curve from this file

  // [bias]
  double amp = 0.0;
  double cx = 0.0, cy = 0.0;
  double plateau = 0.15, support = 0.35;
  std::string profile = "const";  // const | cosine
  double omega = 0.0;
  std::string cell_rule = "midpoint";  // midpoint | gauss3
  bool tilt = false;
  bool track = false;

  // [observables]
  std::vector<std::string> observables;
  double eps = 0.05;
  double eta = 0.05;
  double alpha = 0.05;
  int xi_ell = -1;  // window vertex count; -1 means floor(eps * n)
  double window_t0 = -1.0, window_t1 = -1.0;  // summary window, -1: full span
};

RunConfig parse_config(std::istream& in);
RunConfig parse_config_string(const std::string& text);
RunConfig parse_config_file(const std::string& path);
std::string serialize_config(const RunConfig& c);

BiasField make_field(const RunConfig& c);
LatticeCurve make_initial(const RunConfig& c);

// names of the sampled columns implied by the configuration
std::vector<std::string> observable_columns(const RunConfig& c);

struct ReplicaResult {
  int index = 0;
  StopReason stop = StopReason::TimeEnd;
  double log_rnd = 0.0;
  double boundary_initial = 0.0, boundary_final = 0.0;
  double dt_pairing = 0.0;
  uint64_t events = 0;
  Series series{std::vector<std::string>{}};
  std::string final_snapshot;
};

// Run one replica. When event_log is nonnull every executed move is
// appended as one "t=<time> <move>" line.
ReplicaResult run_replica(const RunConfig& c, int idx,
                          std::ostream* event_log = nullptr);

// Run all replicas on a small worker pool (capped by the CKMC_THREADS
// environment variable). When out_dir is nonempty, per replica event logs,
// snapshots and sampled series are written beneath it.
std::vector<ReplicaResult> run_all(const RunConfig& c,
                                   const std::string& out_dir);

struct SummaryRow {
  std::string name;
  double window_t0 = 0.0, window_t1 = 0.0;
  double mean = 0.0, stderr_ = 0.0;
  int n_replicas = 0;
};

// per column time averages over the summary window, averaged over replicas
std::vector<SummaryRow> summarize(const RunConfig& c,
                                  const std::vector<ReplicaResult>& rs);
void write_summary(std::ostream& os, const std::vector<SummaryRow>& rows);

// Weak form defect of one replica: boundary terms minus the time pairing,
// the transport flux and the pole correction, assembled from the engine
// pairing terms and the sampled flux columns (alpha_flux, pole_l).
double weakform_residual(const RunConfig& c, const ReplicaResult& r);

// Rate functional of one replica at the configured band scale, assembled
// from the transport, mobility and pole_lr columns.
double action_value(const RunConfig& c, const ReplicaResult& r);

// apply an event log to a start curve; throws on any illegal replayed move
LatticeCurve replay_events(LatticeCurve c, std::istream& events);

int thread_budget();

}  // namespace ckmc

#endif
