#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ckmc/continuum.hpp"
#include "ckmc/harness.hpp"
#include "ckmc/pole_zrp.hpp"

using namespace ckmc;

namespace {

std::string g(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void ensure(const std::vector<std::string>& have, RunConfig& c,
            std::initializer_list<const char*> need) {
  for (const char* n : need)
    if (std::find(have.begin(), have.end(), n) == have.end())
      c.observables.push_back(n);
}

int cmd_simulate(const std::string& cfg_path, const std::string& out,
                 int replicas, long long seed) {
  RunConfig c = parse_config_file(cfg_path);
  if (replicas > 0) c.replicas = replicas;
  if (seed >= 0) c.seed = static_cast<uint64_t>(seed);
  auto rs = run_all(c, out);
  std::ostringstream os;
  write_summary(os, summarize(c, rs));
  std::cout << os.str();
  return 0;
}

int cmd_sweep(const std::string& cfg_path, const std::string& out,
              const std::string& param, const std::string& values) {
  RunConfig base = parse_config_file(cfg_path);
  std::istringstream is(values);
  std::string tok;
  while (std::getline(is, tok, ',')) {
    RunConfig c = base;
    if (param == "n") c.n = std::stoi(tok);
    else if (param == "beta") c.beta = std::stod(tok);
    else if (param == "seed") c.seed = std::stoull(tok);
    else if (param == "amp") c.amp = std::stod(tok);
    else if (param == "eps") c.eps = std::stod(tok);
    else throw CurveError("unknown sweep parameter: " + param);
    std::string sub = out.empty() ? "" : out + "/" + param + "_" + tok;
    auto rs = run_all(c, sub);
    std::cout << param << "=" << tok << "\n";
    std::ostringstream os;
    write_summary(os, summarize(c, rs));
    std::cout << os.str();
  }
  return 0;
}

int cmd_zrp_exact(int ell, double beta, int qprint) {
  ZrpExact ex(ell, beta);
  std::cout << "q,pmf\n";
  for (int q = 0; q <= std::min(qprint, ex.q_max()); ++q)
    std::cout << q << "," << g(ex.pmf(q)) << "\n";
  double uc = zrp_critical_density(beta);
  std::cout << "e_p2=" << g(ex.e_p2()) << "\n";
  std::cout << "u_c=" << g(uc) << "\n";
  std::cout << "rate_at_u_c=" << g(zrp_rate(uc, beta)) << "\n";
  return 0;
}

int cmd_zrp_sim(int ell, double beta, long long events, long long seed) {
  ZrpSim sim(ell, beta, static_cast<uint64_t>(seed));
  sim.run(events);
  ZrpExact ex(ell, beta);
  std::cout << "p2_estimate=" << g(sim.p2_estimate()) << "\n";
  std::cout << "p2_stderr=" << g(sim.p2_stderr()) << "\n";
  std::cout << "p2_exact=" << g(ex.e_p2()) << "\n";
  std::cout << "tv_distance=" << g(sim.tv_distance(ex)) << "\n";
  std::cout << "cap_hits=" << sim.cap_hits() << "\n";
  return 0;
}

int cmd_weakform(const std::string& cfg_path) {
  RunConfig c = parse_config_file(cfg_path);
  if (c.amp == 0.0) throw CurveError("weak form check needs a bias field");
  c.tilt = false;
  c.track = true;
  ensure(c.observables, c, {"alpha_flux", "pole_l"});
  if (c.cadence <= 0.0) c.cadence = (c.t_end - c.t0) / 25.0;
  auto rs = run_all(c, "");
  Welford w;
  for (const auto& r : rs) w.add(weakform_residual(c, r));
  std::cout << "residual_mean=" << g(w.mean) << "\n";
  std::cout << "residual_stderr=" << g(w.se()) << "\n";
  std::cout << "n_replicas=" << w.n << "\n";
  return 0;
}

int cmd_rate_eval(const std::string& cfg_path) {
  RunConfig c = parse_config_file(cfg_path);
  if (c.amp == 0.0) throw CurveError("rate evaluation needs a bias field");
  c.tilt = true;
  c.track = true;
  ensure(c.observables, c, {"transport", "mobility", "pole_lr"});
  if (c.cadence <= 0.0) c.cadence = (c.t_end - c.t0) / 25.0;
  auto rs = run_all(c, "");
  std::vector<double> diffs;
  std::cout << "replica,log_rnd,action,abs_diff\n";
  for (const auto& r : rs) {
    double j = action_value(c, r);
    diffs.push_back(std::abs(r.log_rnd - j));
    std::cout << r.index << "," << g(r.log_rnd) << "," << g(j) << ","
              << g(diffs.back()) << "\n";
  }
  std::sort(diffs.begin(), diffs.end());
  size_t n = diffs.size();
  double med = n % 2 ? diffs[n / 2] : 0.5 * (diffs[n / 2 - 1] + diffs[n / 2]);
  std::cout << "median_abs_diff=" << g(med) << "\n";
  return 0;
}

int cmd_martingale(const std::string& cfg_path, const std::string& direction) {
  RunConfig c = parse_config_file(cfg_path);
  if (c.amp == 0.0) throw CurveError("martingale check needs a bias field");
  bool tilted = direction == "tilted";
  if (!tilted && direction != "untilted")
    throw CurveError("direction must be tilted or untilted");
  c.tilt = tilted;
  c.track = true;
  auto rs = run_all(c, "");
  Welford w;
  for (const auto& r : rs)
    w.add(std::exp((tilted ? -1.0 : 1.0) * c.n * r.log_rnd));
  double dev = w.se() > 0 ? std::abs(w.mean - 1.0) / w.se() : 0.0;
  std::cout << "mean=" << g(w.mean) << "\n";
  std::cout << "stderr=" << g(w.se()) << "\n";
  std::cout << "deviation_se=" << g(dev) << "\n";
  return 0;
}

int cmd_replay(const std::string& snap_path, const std::string& events_path,
               const std::string& expect_path) {
  std::ifstream sf(snap_path);
  if (!sf) throw CurveError("cannot open snapshot: " + snap_path);
  double beta = 0.0, t = 0.0;
  LatticeCurve c = LatticeCurve::parse_snapshot(sf, &beta, &t);
  std::ifstream ef(events_path);
  if (!ef) throw CurveError("cannot open event log: " + events_path);
  c = replay_events(std::move(c), ef);
  if (!expect_path.empty()) {
    std::ifstream xf(expect_path, std::ios::binary);
    if (!xf) throw CurveError("cannot open expected snapshot: " + expect_path);
    std::stringstream want;
    want << xf.rdbuf();
    std::istringstream hdr(want.str());
    double beta_x = 0.0, t_x = 0.0;
    LatticeCurve::parse_snapshot(hdr, &beta_x, &t_x);
    std::ostringstream got;
    c.serialize_snapshot(got, beta_x, t_x);
    if (got.str() != want.str())
      throw CurveError("replayed final state differs from expected snapshot");
    std::cout << "replay matches expected snapshot\n";
    return 0;
  }
  std::ostringstream out;
  c.serialize_snapshot(out, beta, t);
  std::cout << out.str();
  return 0;
}

int cmd_validate(const std::string& snap_path) {
  std::ifstream sf(snap_path);
  if (!sf) throw CurveError("cannot open snapshot: " + snap_path);
  LatticeCurve c = LatticeCurve::parse_snapshot(sf, nullptr, nullptr);
  ValidationReport rep = c.validate();
  if (!rep.ok()) {
    std::cerr << rep.str();
    return 2;
  }
  std::cout << "ok: N=" << c.N() << " edges=" << c.n_edges()
            << " area_blocks=" << c.area_blocks() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"event driven simulator for lattice contour dynamics"};
  app.require_subcommand(1);

  std::string cfg, out, param, values, direction = "tilted";
  std::string snap, events, expect;
  int replicas = -1, ell = 20, qprint = 40;
  long long seed = -1, zevents = 1000000;
  double beta = 1.5;

  auto* sim = app.add_subcommand("simulate", "run replicas from a config");
  sim->add_option("--config", cfg)->required();
  sim->add_option("--out", out);
  sim->add_option("--replicas", replicas);
  sim->add_option("--seed", seed);

  auto* sw = app.add_subcommand("sweep", "repeat a run over parameter values");
  sw->add_option("--config", cfg)->required();
  sw->add_option("--out", out);
  sw->add_option("--param", param)->required();
  sw->add_option("--values", values)->required();

  auto* zx = app.add_subcommand("zrp-exact", "exact pole window law");
  zx->add_option("--ell", ell);
  zx->add_option("--beta", beta);
  zx->add_option("--qmax", qprint);

  auto* zs = app.add_subcommand("zrp-sim", "simulate the pole window");
  zs->add_option("--ell", ell);
  zs->add_option("--beta", beta);
  zs->add_option("--events", zevents);
  zs->add_option("--seed", seed);

  auto* wf = app.add_subcommand("verify-weakform", "weak form residual");
  wf->add_option("--config", cfg)->required();

  auto* re = app.add_subcommand("rate-eval",
                                "compare path tilt cost with the action");
  re->add_option("--config", cfg)->required();

  auto* mg = app.add_subcommand("rnd-martingale",
                                "unit mean check of the tilt derivative");
  mg->add_option("--config", cfg)->required();
  mg->add_option("--direction", direction);

  auto* rp = app.add_subcommand("replay", "re-apply an event log");
  rp->add_option("--snapshot", snap)->required();
  rp->add_option("--events", events)->required();
  rp->add_option("--expect", expect);

  auto* va = app.add_subcommand("validate", "check a snapshot invariants");
  va->add_option("--snapshot", snap)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 1;
  }

  try {
    if (sim->parsed()) return cmd_simulate(cfg, out, replicas, seed);
    if (sw->parsed()) return cmd_sweep(cfg, out, param, values);
    if (zx->parsed()) return cmd_zrp_exact(ell, beta, qprint);
    if (zs->parsed())
      return cmd_zrp_sim(ell, beta, zevents, seed < 0 ? 1 : seed);
    if (wf->parsed()) return cmd_weakform(cfg);
    if (re->parsed()) return cmd_rate_eval(cfg);
    if (mg->parsed()) return cmd_martingale(cfg, direction);
    if (rp->parsed()) return cmd_replay(snap, events, expect);
    if (va->parsed()) return cmd_validate(snap);
  } catch (const CurveError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
