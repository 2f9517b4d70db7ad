#include "ckmc/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "ckmc/continuum.hpp"
#include "ckmc/ssep_bridge.hpp"

namespace ckmc {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& v, const std::string& key) {
  const char* p = v.c_str();
  char* end = nullptr;
  double x = std::strtod(p, &end);
  if (end == p || *end != '\0')
    throw CurveError("bad numeric value for " + key + ": " + v);
  return x;
}

int parse_int(const std::string& v, const std::string& key) {
  double x = parse_double(v, key);
  int i = static_cast<int>(x);
  if (i != x) throw CurveError("expected integer for " + key + ": " + v);
  return i;
}

uint64_t parse_u64(const std::string& v, const std::string& key) {
  const char* p = v.c_str();
  char* end = nullptr;
  unsigned long long x = std::strtoull(p, &end, 10);
  if (end == p || *end != '\0')
    throw CurveError("bad unsigned value for " + key + ": " + v);
  return x;
}

bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "1" || v == "true") return true;
  if (v == "0" || v == "false") return false;
  throw CurveError("expected boolean for " + key + ": " + v);
}

std::vector<std::string> parse_list(const std::string& v) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(v);
  while (std::getline(is, cur, ','))
    if (!trim(cur).empty()) out.push_back(trim(cur));
  return out;
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void assign(RunConfig& c, const std::string& sec, const std::string& key,
            const std::string& val) {
  if (sec == "run") {
    if (key == "n") c.n = parse_int(val, key);
    else if (key == "beta") c.beta = parse_double(val, key);
    else if (key == "t_end") c.t_end = parse_double(val, key);
    else if (key == "t0") c.t0 = parse_double(val, key);
    else if (key == "seed") c.seed = parse_u64(val, key);
    else if (key == "replicas") c.replicas = parse_int(val, key);
    else if (key == "cadence") c.cadence = parse_double(val, key);
    else if (key == "dt_max") c.dt_max = parse_double(val, key);
    else if (key == "guard") c.guard = parse_double(val, key);
    else throw CurveError("unknown key in [run]: " + key);
  } else if (sec == "initial") {
    if (key == "shape") c.shape = val;
    else if (key == "a") c.a = parse_double(val, key);
    else if (key == "b") c.b = parse_double(val, key);
    else if (key == "snapshot") c.snapshot = val;
    else throw CurveError("unknown key in [initial]: " + key);
  } else if (sec == "bias") {
    if (key == "amp") c.amp = parse_double(val, key);
    else if (key == "cx") c.cx = parse_double(val, key);
    else if (key == "cy") c.cy = parse_double(val, key);
    else if (key == "plateau") c.plateau = parse_double(val, key);
    else if (key == "support") c.support = parse_double(val, key);
    else if (key == "profile") c.profile = val;
    else if (key == "omega") c.omega = parse_double(val, key);
    else if (key == "cell_rule") c.cell_rule = val;
    else if (key == "tilt") c.tilt = parse_bool(val, key);
    else if (key == "track") c.track = parse_bool(val, key);
    else throw CurveError("unknown key in [bias]: " + key);
  } else if (sec == "observables") {
    if (key == "names") c.observables = parse_list(val);
    else if (key == "eps") c.eps = parse_double(val, key);
    else if (key == "eta") c.eta = parse_double(val, key);
    else if (key == "alpha") c.alpha = parse_double(val, key);
    else if (key == "xi_ell") c.xi_ell = parse_int(val, key);
    else if (key == "window_t0") c.window_t0 = parse_double(val, key);
    else if (key == "window_t1") c.window_t1 = parse_double(val, key);
    else throw CurveError("unknown key in [observables]: " + key);
  } else {
    throw CurveError("key outside any section: " + key);
  }
}

}  // namespace

RunConfig parse_config(std::istream& in) {
  RunConfig c;
  std::string line, sec;
  int ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw CurveError("malformed section header at line " +
                         std::to_string(ln));
      sec = line.substr(1, line.size() - 2);
      if (sec != "run" && sec != "initial" && sec != "bias" &&
          sec != "observables")
        throw CurveError("unknown section [" + sec + "]");
      continue;
    }
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw CurveError("expected key=value at line " + std::to_string(ln));
    assign(c, sec, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  if (c.n < 2) throw CurveError("n must be at least 2");
  if (c.replicas < 1) throw CurveError("replicas must be at least 1");
  if (!(c.t_end > c.t0)) throw CurveError("t_end must exceed t0");
  return c;
}

RunConfig parse_config_string(const std::string& text) {
  std::istringstream is(text);
  return parse_config(is);
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw CurveError("cannot open config file: " + path);
  return parse_config(f);
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream os;
  os << "[run]\n"
     << "n=" << c.n << "\n"
     << "beta=" << fmt(c.beta) << "\n"
     << "t_end=" << fmt(c.t_end) << "\n"
     << "t0=" << fmt(c.t0) << "\n"
     << "seed=" << c.seed << "\n"
     << "replicas=" << c.replicas << "\n"
     << "cadence=" << fmt(c.cadence) << "\n"
     << "dt_max=" << fmt(c.dt_max) << "\n"
     << "guard=" << fmt(c.guard) << "\n";
  os << "[initial]\n"
     << "shape=" << c.shape << "\n"
     << "a=" << fmt(c.a) << "\n"
     << "b=" << fmt(c.b) << "\n";
  if (!c.snapshot.empty()) os << "snapshot=" << c.snapshot << "\n";
  os << "[bias]\n"
     << "amp=" << fmt(c.amp) << "\n"
     << "cx=" << fmt(c.cx) << "\n"
     << "cy=" << fmt(c.cy) << "\n"
     << "plateau=" << fmt(c.plateau) << "\n"
     << "support=" << fmt(c.support) << "\n"
     << "profile=" << c.profile << "\n"
     << "omega=" << fmt(c.omega) << "\n"
     << "cell_rule=" << c.cell_rule << "\n"
     << "tilt=" << (c.tilt ? 1 : 0) << "\n"
     << "track=" << (c.track ? 1 : 0) << "\n";
  os << "[observables]\n";
  if (!c.observables.empty()) {
    os << "names=";
    for (size_t i = 0; i < c.observables.size(); ++i)
      os << (i ? "," : "") << c.observables[i];
    os << "\n";
  }
  os << "eps=" << fmt(c.eps) << "\n"
     << "eta=" << fmt(c.eta) << "\n"
     << "alpha=" << fmt(c.alpha) << "\n"
     << "xi_ell=" << c.xi_ell << "\n"
     << "window_t0=" << fmt(c.window_t0) << "\n"
     << "window_t1=" << fmt(c.window_t1) << "\n";
  return os.str();
}

BiasField make_field(const RunConfig& c) {
  BiasField f;
  if (c.amp != 0.0) {
    f = BiasField::bump(c.amp, c.cx, c.cy, c.plateau, c.support);
    if (c.profile == "const") {
      f.profile = BiasField::Profile::Const;
    } else if (c.profile == "cosine") {
      f.profile = BiasField::Profile::Cosine;
      f.omega = c.omega;
    } else {
      throw CurveError("unknown profile: " + c.profile);
    }
  }
  return f;
}

LatticeCurve make_initial(const RunConfig& c) {
  if (!c.snapshot.empty()) {
    std::ifstream f(c.snapshot);
    if (!f) throw CurveError("cannot open snapshot: " + c.snapshot);
    return LatticeCurve::parse_snapshot(f, nullptr, nullptr);
  }
  ShapeSpec s;
  s.a = c.a;
  s.b = c.b;
  if (c.shape == "disk") s.kind = ShapeKind::Disk;
  else if (c.shape == "square") s.kind = ShapeKind::Square;
  else if (c.shape == "diamond") s.kind = ShapeKind::Diamond;
  else if (c.shape == "ellipse") s.kind = ShapeKind::Ellipse;
  else throw CurveError("unknown shape: " + c.shape);
  return LatticeCurve::discretize(s, c.n);
}

std::vector<std::string> observable_columns(const RunConfig& c) {
  static const char* known[] = {"area",      "perimeter", "p2",
                                "xi",        "capvol",    "gplus",
                                "gminus",    "transport", "mobility",
                                "alpha_flux", "pole_l",   "pole_lr"};
  for (const std::string& o : c.observables) {
    bool ok = false;
    for (const char* k : known) ok = ok || o == k;
    if (!ok) throw CurveError("unknown observable: " + o);
  }
  return c.observables;
}

namespace {

BiasField::CellRule parse_rule(const std::string& s) {
  if (s == "midpoint") return BiasField::CellRule::Midpoint;
  if (s == "gauss3") return BiasField::CellRule::Gauss3;
  throw CurveError("unknown cell_rule: " + s);
}

}  // namespace

ReplicaResult run_replica(const RunConfig& c, int idx,
                          std::ostream* event_log) {
  BiasField field = make_field(c);
  LatticeCurve curve = make_initial(c);

  EngineConfig ec;
  ec.beta = c.beta;
  ec.T = c.t_end;
  ec.t0 = c.t0;
  ec.seed = c.seed ^ Rng::mix(idx + 1);
  ec.cadence = c.cadence;
  ec.dt_max = c.dt_max;
  ec.apply_tilt = c.tilt && !field.empty();
  ec.track_log_rnd = c.track && !field.empty();
  ec.guard_r0 = c.guard;
  ec.bias = field.empty() ? nullptr : &field;
  ec.cell_rule = parse_rule(c.cell_rule);

  std::vector<std::string> cols = observable_columns(c);
  bool want_terms = false;
  for (const auto& o : cols)
    want_terms = want_terms || o == "transport" || o == "mobility" ||
                 o == "alpha_flux" || o == "pole_l" || o == "pole_lr";
  int xi_ell = c.xi_ell >= 0 ? c.xi_ell : static_cast<int>(c.eps * c.n);

  ReplicaResult r;
  r.index = idx;
  r.series = Series(cols);

  Engine eng(std::move(curve), ec);

  Engine::SampleCb sample;
  if (!cols.empty()) {
    sample = [&](double t, const LatticeCurve& cur) {
      FunctionalTerms ft;
      if (want_terms) ft = evaluate_terms(cur, field, t, c.eps);
      std::vector<double> row(cols.size(), 0.0);
      for (size_t j = 0; j < cols.size(); ++j) {
        const std::string& o = cols[j];
        if (o == "area") row[j] = cur.area();
        else if (o == "perimeter") row[j] = cur.length();
        else if (o == "p2") row[j] = pole_p2(cur, 1);
        else if (o == "xi") row[j] = xi_window(cur, 1, xi_ell, +1);
        else if (o == "capvol") row[j] = cap_volume_rows(cur, 1, c.eta);
        else if (o == "gplus") row[j] = width_plus(cur, c.alpha);
        else if (o == "gminus") row[j] = width_minus(cur, c.alpha);
        else if (o == "transport") row[j] = ft.transport;
        else if (o == "mobility") row[j] = ft.mobility;
        else if (o == "alpha_flux") row[j] = ft.alpha_flux;
        else if (o == "pole_l") row[j] = ft.pole_l;
        else if (o == "pole_lr") row[j] = ft.pole_lr;
      }
      r.series.add(t, row);
    };
  }

  Engine::EventCb on_event;
  if (event_log) {
    on_event = [&](double t, const Move& m) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", t);
      *event_log << "t=" << buf << " " << move_to_string(m) << "\n";
    };
  }

  r.stop = eng.run(nullptr, sample, on_event);
  r.log_rnd = ec.track_log_rnd ? eng.log_rnd_per_n() : 0.0;
  r.boundary_initial = eng.boundary_term_initial();
  r.boundary_final = eng.boundary_term_final();
  r.dt_pairing = eng.dt_pairing();
  r.events = eng.n_events();

  std::ostringstream snap;
  eng.curve().serialize_snapshot(snap, c.beta, eng.t());
  r.final_snapshot = snap.str();
  return r;
}

int thread_budget() {
  if (const char* e = std::getenv("CKMC_THREADS")) {
    int v = std::atoi(e);
    if (v >= 1) return v;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc ? static_cast<int>(hc) : 1;
}

std::vector<ReplicaResult> run_all(const RunConfig& c,
                                   const std::string& out_dir) {
  namespace fs = std::filesystem;
  if (!out_dir.empty()) fs::create_directories(out_dir);

  std::vector<ReplicaResult> results(c.replicas);
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::string first_error;
  std::mutex err_mutex;

  auto worker = [&]() {
    for (;;) {
      int i = next.fetch_add(1);
      if (i >= c.replicas || failed.load()) break;
      try {
        if (out_dir.empty()) {
          results[i] = run_replica(c, i, nullptr);
        } else {
          fs::path rd = fs::path(out_dir) / ("replica_" + std::to_string(i));
          fs::create_directories(rd / "snapshots");
          {
            std::ofstream init_snap(rd / "snapshots" / "initial.snap",
                                    std::ios::binary);
            make_initial(c).serialize_snapshot(init_snap, c.beta, c.t0);
          }
          std::ofstream ev(rd / "events.log", std::ios::binary);
          results[i] = run_replica(c, i, &ev);
          std::ofstream fin(rd / "snapshots" / "final.snap",
                            std::ios::binary);
          fin << results[i].final_snapshot;
          std::ofstream obs(rd / "observables.csv", std::ios::binary);
          results[i].series.write_csv(obs);
        }
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> g(err_mutex);
        if (!failed.exchange(true)) first_error = e.what();
      }
    }
  };

  int nt = std::min(thread_budget(), c.replicas);
  if (nt <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (int i = 0; i < nt; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failed.load()) throw std::runtime_error("replica failed: " + first_error);

  if (!out_dir.empty()) {
    std::ofstream sum(fs::path(out_dir) / "summary.csv", std::ios::binary);
    write_summary(sum, summarize(c, results));
  }
  return results;
}

std::vector<SummaryRow> summarize(const RunConfig& c,
                                  const std::vector<ReplicaResult>& rs) {
  double w0 = c.window_t0 >= 0.0 ? c.window_t0 : c.t0;
  double w1 = c.window_t1 >= 0.0 ? c.window_t1 : c.t_end;
  std::vector<SummaryRow> rows;
  std::vector<std::string> cols = observable_columns(c);
  for (size_t j = 0; j < cols.size(); ++j) {
    Welford w;
    for (const ReplicaResult& r : rs) w.add(r.series.time_average(j, w0, w1));
    rows.push_back({cols[j], w0, w1, w.mean, w.se(), static_cast<int>(w.n)});
  }
  if (c.track) {
    Welford w;
    for (const ReplicaResult& r : rs) w.add(r.log_rnd);
    rows.push_back({"log_rnd", c.t0, c.t_end, w.mean, w.se(),
                    static_cast<int>(w.n)});
  }
  return rows;
}

void write_summary(std::ostream& os, const std::vector<SummaryRow>& rows) {
  os << "name,window_t0,window_t1,mean,stderr,n_replicas\n";
  for (const SummaryRow& r : rows)
    os << r.name << "," << fmt(r.window_t0) << "," << fmt(r.window_t1) << ","
       << fmt(r.mean) << "," << fmt(r.stderr_) << "," << r.n_replicas << "\n";
}

namespace {

size_t col_index(const std::vector<std::string>& cols, const char* name) {
  for (size_t j = 0; j < cols.size(); ++j)
    if (cols[j] == name) return j;
  throw CurveError(std::string("missing sampled column: ") + name);
}

}  // namespace

double weakform_residual(const RunConfig& c, const ReplicaResult& r) {
  std::vector<std::string> cols = observable_columns(c);
  size_t af = col_index(cols, "alpha_flux");
  size_t pl = col_index(cols, "pole_l");
  double flux = r.series.integral_trapezoid(af, c.t0, c.t_end);
  double pole = r.series.integral_trapezoid(pl, c.t0, c.t_end);
  double cpol = 0.5 - std::exp(-c.beta);
  return (r.boundary_final - r.boundary_initial) - r.dt_pairing - flux +
         cpol * pole;
}

double action_value(const RunConfig& c, const ReplicaResult& r) {
  std::vector<std::string> cols = observable_columns(c);
  size_t tr = col_index(cols, "transport");
  size_t mo = col_index(cols, "mobility");
  size_t plr = col_index(cols, "pole_lr");
  double transport = r.series.integral_trapezoid(tr, c.t0, c.t_end);
  double mobility = r.series.integral_trapezoid(mo, c.t0, c.t_end);
  double pole = r.series.integral_trapezoid(plr, c.t0, c.t_end);
  double cpol = 0.25 - 0.5 * std::exp(-c.beta);
  return (r.boundary_final - r.boundary_initial) - r.dt_pairing - transport +
         cpol * pole - mobility;
}

LatticeCurve replay_events(LatticeCurve c, std::istream& events) {
  std::string line;
  int ln = 0;
  while (std::getline(events, line)) {
    ++ln;
    line = trim(line);
    if (line.empty()) continue;
    double t = 0.0;
    char kind[8] = {0};
    int a = 0, b = 0, k = 0;
    char sign = 0;
    Move m;
    if (std::sscanf(line.c_str(), "t=%lf FLIP %d %d %c", &t, &a, &b, &sign) ==
        4) {
      m.kind = MoveKind::Flip;
      m.v = {a, b};
      m.eps = sign == '+' ? 1 : -1;
      if (sign != '+' && sign != '-')
        throw CurveError("bad flip sign at line " + std::to_string(ln));
    } else if (std::sscanf(line.c_str(), "t=%lf PDEL %d", &t, &k) == 2) {
      m.kind = MoveKind::PoleDelete;
      m.k = k;
    } else if (std::sscanf(line.c_str(), "t=%lf PGROW %d %d %d", &t, &k, &a,
                           &b) == 4) {
      m.kind = MoveKind::PoleGrow;
      m.k = k;
      m.v = {a, b};
    } else {
      (void)kind;
      throw CurveError("unparseable event at line " + std::to_string(ln));
    }
    std::string why;
    if (!c.is_legal(m, &why))
      throw CurveError("illegal replayed move at line " + std::to_string(ln) +
                       ": " + why);
    c.apply(m);
  }
  return c;
}

}  // namespace ckmc
