#include "ckmc/lattice_curve.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace ckmc {

namespace {

IV min_corner(IV a, IV b) { return {std::min(a.x, b.x), std::min(a.y, b.y)}; }

bool is_origin_cell(IV c) {
  return (c.x == 0 || c.x == -1) && (c.y == 0 || c.y == -1);
}

std::string fmt_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

std::string move_to_string(const Move& m) {
  char buf[64];
  switch (m.kind) {
    case MoveKind::Flip:
      std::snprintf(buf, sizeof buf, "FLIP %d %d %c", m.v.x, m.v.y,
                    m.eps > 0 ? '+' : '-');
      break;
    case MoveKind::PoleDelete:
      std::snprintf(buf, sizeof buf, "PDEL %d", m.k);
      break;
    case MoveKind::PoleGrow:
      std::snprintf(buf, sizeof buf, "PGROW %d %d %d", m.k, m.v.x, m.v.y);
      break;
  }
  return buf;
}

std::string ValidationReport::str() const {
  std::string s;
  for (const auto& v : violations) {
    s += v;
    s += '\n';
  }
  return s;
}

bool ShapeSpec::contains(double x, double y) const {
  switch (kind) {
    case ShapeKind::Square:
      return std::max(std::abs(x), std::abs(y)) <= a / 2;
    case ShapeKind::Disk:
      return x * x + y * y <= a * a;
    case ShapeKind::Diamond:
      return std::abs(x) + std::abs(y) <= a;
    case ShapeKind::Ellipse:
      return (x / a) * (x / a) + (y / b) * (y / b) <= 1.0;
  }
  return false;
}

int LatticeCurve::alloc_node(IV v, Dir d) {
  int id;
  if (!free_.empty()) {
    id = free_.back();
    free_.pop_back();
  } else {
    id = static_cast<int>(nodes_.size());
    nodes_.push_back({});
  }
  nodes_[id].v = v;
  nodes_[id].d = d;
  nodes_[id].prev = nodes_[id].next = -1;
  occ_[v] = id;
  return id;
}

void LatticeCurve::free_node(int id) {
  occ_.erase(nodes_[id].v);
  nodes_[id].prev = nodes_[id].next = -1;
  free_.push_back(id);
}

int LatticeCurve::node_at(IV v) const {
  auto it = occ_.find(v);
  return it == occ_.end() ? -1 : it->second;
}

LatticeCurve LatticeCurve::from_dirs(int N, IV anchor, std::string_view dirs) {
  if (N < 1) throw CurveError("N must be positive");
  if (dirs.size() < 8) throw CurveError("direction string too short");
  LatticeCurve c;
  c.N_ = N;
  c.occ_.reserve(dirs.size() * 2);
  IV v = anchor;
  int first = -1, last = -1;
  for (char ch : dirs) {
    int di = dir_from_char(ch);
    if (di < 0) throw CurveError(std::string("bad direction char '") + ch + "'");
    if (c.occ_.count(v)) throw CurveError("self-intersecting direction string");
    int id = c.alloc_node(v, static_cast<Dir>(di));
    if (first < 0)
      first = id;
    else
      c.link(last, id);
    last = id;
    v = v + dir_step(static_cast<Dir>(di));
  }
  if (v != anchor) throw CurveError("direction string does not close");
  c.link(last, first);
  c.entry_ = first;
  c.recompute_all();
  auto rep = c.validate();
  if (!rep.ok()) throw CurveError("invalid curve: " + rep.violations.front());
  return c;
}

LatticeCurve LatticeCurve::from_cells(int N, const std::vector<IV>& cells) {
  if (cells.empty()) throw CurveError("empty cell set");
  std::unordered_set<IV, IVHash> set(cells.begin(), cells.end());
  // boundary edges oriented with the droplet on the right
  std::unordered_map<IV, std::pair<Dir, bool>, IVHash> succ;
  succ.reserve(set.size() * 2);
  auto add_edge = [&](IV v, Dir d) {
    auto [it, fresh] = succ.try_emplace(v, std::make_pair(d, false));
    if (!fresh) throw CurveError("pinched boundary; increase resolution");
  };
  for (IV c : set) {
    if (!set.count({c.x, c.y - 1})) add_edge({c.x + 1, c.y}, Dir::L);
    if (!set.count({c.x, c.y + 1})) add_edge({c.x, c.y + 1}, Dir::R);
    if (!set.count({c.x - 1, c.y})) add_edge({c.x, c.y}, Dir::U);
    if (!set.count({c.x + 1, c.y})) add_edge({c.x + 1, c.y + 1}, Dir::D);
  }
  LatticeCurve out;
  out.N_ = N;
  out.occ_.reserve(succ.size() * 2);
  IV start = succ.begin()->first;
  // deterministic start regardless of hash order
  for (const auto& [v, e] : succ)
    if (v.y > start.y || (v.y == start.y && v.x < start.x)) start = v;
  IV v = start;
  int first = -1, last = -1;
  size_t steps = 0;
  do {
    auto it = succ.find(v);
    if (it == succ.end() || it->second.second)
      throw CurveError("broken boundary walk");
    it->second.second = true;
    int id = out.alloc_node(v, it->second.first);
    if (first < 0)
      first = id;
    else
      out.link(last, id);
    last = id;
    v = v + dir_step(it->second.first);
    if (++steps > succ.size()) throw CurveError("boundary walk did not close");
  } while (v != start);
  if (steps != succ.size())
    throw CurveError("cell set boundary is not a single loop");
  out.link(last, first);
  out.entry_ = first;
  out.recompute_all();
  return out;
}

LatticeCurve LatticeCurve::rectangle(int N, int width_blocks, int height_blocks,
                                     IV center) {
  if (width_blocks < 2 || height_blocks < 2)
    throw CurveError("rectangle must be at least 2x2 blocks");
  int x0 = center.x - width_blocks / 2;
  int y0 = center.y - height_blocks / 2;
  if (!(x0 < 0 && x0 + width_blocks > 0 && y0 < 0 && y0 + height_blocks > 0))
    throw CurveError("rectangle does not strictly contain the origin");
  std::vector<IV> cells;
  cells.reserve(static_cast<size_t>(width_blocks) * height_blocks);
  for (int i = 0; i < width_blocks; ++i)
    for (int j = 0; j < height_blocks; ++j) cells.push_back({x0 + i, y0 + j});
  LatticeCurve c = from_cells(N, cells);
  auto rep = c.validate();
  if (!rep.ok()) throw CurveError("invalid rectangle: " + rep.violations.front());
  return c;
}

LatticeCurve LatticeCurve::discretize(const ShapeSpec& shape, int N) {
  double ext_x = 0, ext_y = 0;
  switch (shape.kind) {
    case ShapeKind::Square: ext_x = ext_y = shape.a / 2; break;
    case ShapeKind::Disk: ext_x = ext_y = shape.a; break;
    case ShapeKind::Diamond: ext_x = ext_y = shape.a; break;
    case ShapeKind::Ellipse: ext_x = shape.a; ext_y = shape.b; break;
  }
  int bx = static_cast<int>(std::ceil(ext_x * N)) + 1;
  int by = static_cast<int>(std::ceil(ext_y * N)) + 1;
  std::vector<IV> cells;
  for (int i = -bx; i < bx; ++i)
    for (int j = -by; j < by; ++j) {
      double x0 = static_cast<double>(i) / N, x1 = static_cast<double>(i + 1) / N;
      double y0 = static_cast<double>(j) / N, y1 = static_cast<double>(j + 1) / N;
      if (shape.contains(x0, y0) && shape.contains(x1, y0) &&
          shape.contains(x0, y1) && shape.contains(x1, y1))
        cells.push_back({i, j});
    }
  if (cells.empty())
    throw CurveError("shape discretization is empty; increase resolution");
  for (int iter = 0; iter < 8; ++iter) {
    LatticeCurve c = from_cells(N, cells);
    bool padded = false;
    for (int k = 1; k <= 4; ++k) {
      if (c.pole(k).p >= 2) continue;
      // single-cell cap: widen it on the run-start side first
      const PoleInfo& pk = c.pole(k);
      IV cap = min_corner(pk.L, pk.L + dir_step(pole_dir(k)) +
                                    dir_step(pole_inward(k)));
      IV pad = cap - dir_step(pole_dir(k));
      cells.push_back(pad);
      padded = true;
    }
    if (!padded) {
      auto rep = c.validate();
      if (!rep.ok())
        throw CurveError("shape discretization invalid: " +
                         rep.violations.front());
      return c;
    }
  }
  throw CurveError("pole padding did not converge; increase resolution");
}

std::vector<int> LatticeCurve::walk() const {
  std::vector<int> ids;
  ids.reserve(n_edges_);
  int start = node_at(poles_[0].L);
  if (start < 0) start = entry_;
  int cur = start;
  do {
    ids.push_back(cur);
    cur = nodes_[cur].next;
  } while (cur != start && ids.size() <= occ_.size());
  return ids;
}

void LatticeCurve::recompute_all() {
  // walk the cycle from entry_, checking closure and geometric consistency
  int cur = entry_;
  long long shoelace = 0;
  int count = 0;
  const int cap = static_cast<int>(occ_.size());
  do {
    const Node& n = nodes_[cur];
    int nx = n.next;
    if (nx < 0) throw CurveError("broken node chain");
    if (nodes_[nx].v != n.v + dir_step(n.d))
      throw CurveError("node chain is geometrically inconsistent");
    shoelace += static_cast<long long>(n.v.x) * dir_dy(n.d);
    ++count;
    cur = nx;
    if (count > cap) throw CurveError("node chain does not close");
  } while (cur != entry_);
  if (count != cap) throw CurveError("stray nodes outside the cycle");
  n_edges_ = count;
  if (shoelace >= 0) throw CurveError("curve is not clockwise");
  area_blocks_ = -shoelace;
  rebuild_all_poles();
  entry_ = node_at(poles_[0].L);
}

void LatticeCurve::rebuild_all_poles() {
  int z1 = INT32_MIN, z2 = INT32_MIN, z3 = INT32_MAX, z4 = INT32_MAX;
  for (const auto& [v, id] : occ_) {
    z1 = std::max(z1, v.y);
    z2 = std::max(z2, v.x);
    z3 = std::min(z3, v.y);
    z4 = std::min(z4, v.x);
  }
  const int zs[4] = {z1, z2, z3, z4};
  for (int k = 1; k <= 4; ++k) {
    Dir pd = pole_dir(k);
    int start = -1;
    for (const auto& [v, id] : occ_) {
      if (pole_coord(v, k) != zs[k - 1]) continue;
      if (nodes_[id].d == pd && nodes_[nodes_[id].prev].d != pd) {
        start = id;
        break;
      }
    }
    if (start < 0) throw CurveError("extremal run not found");
    PoleInfo& pk = poles_[k - 1];
    pk.z = zs[k - 1];
    pk.L = nodes_[start].v;
    int p = 0;
    int cur = start;
    while (nodes_[cur].d == pd) {
      ++p;
      cur = nodes_[cur].next;
    }
    pk.R = nodes_[cur].v;
    pk.p = p;
  }
}

void LatticeCurve::rebuild_pole_from(int k, IV on_run) {
  Dir pd = pole_dir(k);
  int n = node_at(on_run);
  if (n < 0) throw CurveError("pole rebuild hint not on curve");
  if (nodes_[n].d != pd) {
    if (nodes_[nodes_[n].prev].d != pd)
      throw CurveError("pole rebuild hint not on a run");
    n = nodes_[n].prev;
  }
  while (nodes_[nodes_[n].prev].d == pd) n = nodes_[n].prev;
  PoleInfo& pk = poles_[k - 1];
  pk.L = nodes_[n].v;
  pk.z = pole_coord(pk.L, k);
  int p = 0;
  while (nodes_[n].d == pd) {
    ++p;
    n = nodes_[n].next;
  }
  pk.R = nodes_[n].v;
  pk.p = p;
}

void LatticeCurve::rebuild_pole(int k, const std::vector<IV>& candidates) {
  for (IV c : candidates) {
    int id = node_at(c);
    if (id < 0 || pole_coord(c, k) != poles_[k - 1].z) continue;
    Dir pd = pole_dir(k);
    if (nodes_[id].d != pd && nodes_[nodes_[id].prev].d != pd) continue;
    rebuild_pole_from(k, c);
    return;
  }
  rebuild_all_poles();
}

bool LatticeCurve::flip_at(IV v, Move& m) const {
  int id = node_at(v);
  if (id < 0 || !is_corner(id)) return false;
  m.kind = MoveKind::Flip;
  m.v = v;
  m.k = 0;
  m.eps = dir_cross(in_dir(id), dir(id)) < 0 ? -1 : +1;
  return true;
}

void LatticeCurve::move_cells(const Move& m, std::array<IV, 2>& cells, int& n,
                              int& sign) const {
  switch (m.kind) {
    case MoveKind::Flip: {
      int id = node_at(m.v);
      Dir d1 = in_dir(id), d2 = dir(id);
      IV w = m.v - dir_step(d1);
      IV xt = w + dir_step(d2);
      cells[0] = min_corner(min_corner(w, m.v), min_corner(m.v + dir_step(d2), xt));
      n = 1;
      sign = m.eps;
      break;
    }
    case MoveKind::PoleDelete: {
      const PoleInfo& pk = poles_[m.k - 1];
      IV diag = dir_step(pole_dir(m.k)) + dir_step(pole_inward(m.k));
      cells[0] = min_corner(pk.L, pk.L + diag);
      IV mid = pk.L + dir_step(pole_dir(m.k));
      cells[1] = min_corner(mid, mid + diag);
      n = 2;
      sign = -1;
      break;
    }
    case MoveKind::PoleGrow: {
      Dir pd = pole_dir(m.k);
      IV out = dir_step(dir_opposite(pole_inward(m.k)));
      IV a = m.v - dir_step(pd);
      cells[0] = min_corner(a, a + dir_step(pd) + out);
      cells[1] = min_corner(m.v, m.v + dir_step(pd) + out);
      n = 2;
      sign = +1;
      break;
    }
  }
}

int LatticeCurve::move_edge_delta(const Move& m) {
  switch (m.kind) {
    case MoveKind::Flip: return 0;
    case MoveKind::PoleDelete: return -2;
    case MoveKind::PoleGrow: return +2;
  }
  return 0;
}

bool LatticeCurve::is_legal(const Move& m, std::string* reason) const {
  auto fail = [&](const char* why) {
    if (reason) *reason = why;
    return false;
  };
  switch (m.kind) {
    case MoveKind::Flip: {
      int id = node_at(m.v);
      if (id < 0) return fail("flip vertex not on curve");
      if (!is_corner(id)) return fail("flip vertex is not a corner");
      Dir d1 = in_dir(id), d2 = dir(id);
      int eps = dir_cross(d1, d2) < 0 ? -1 : +1;
      if (m.eps != 0 && m.eps != eps) return fail("flip sign mismatch");
      IV w = m.v - dir_step(d1);
      IV xt = w + dir_step(d2);
      if (occupied(xt)) return fail("flip target vertex occupied");
      if (eps < 0) {
        for (int k = 1; k <= 4; ++k)
          if (pole_coord(m.v, k) == poles_[k - 1].z && poles_[k - 1].p < 3)
            return fail("flip would shrink a pole below size 2");
        IV cell = min_corner(min_corner(w, m.v),
                             min_corner(m.v + dir_step(d2), xt));
        if (is_origin_cell(cell)) {
          int remaining = 0;
          for (IV oc : origin_cells())
            if (oc != cell && cell_in_droplet(oc)) ++remaining;
          if (remaining == 0) return fail("flip would expel the origin");
        }
      }
      return true;
    }
    case MoveKind::PoleDelete: {
      if (m.k < 1 || m.k > 4) return fail("bad pole index");
      const PoleInfo& pk = poles_[m.k - 1];
      if (pk.p != 2) return fail("pole size is not 2");
      IV mp = pk.L + dir_step(pole_dir(m.k)) + dir_step(pole_inward(m.k));
      if (occupied(mp)) return fail("inner midpoint vertex occupied");
      int kp = m.k == 1 ? 4 : m.k - 1;
      int kn = m.k == 4 ? 1 : m.k + 1;
      if (pole_coord(pk.L, kp) == poles_[kp - 1].z && poles_[kp - 1].p < 3)
        return fail("deletion would shrink the preceding pole below size 2");
      if (pole_coord(pk.R, kn) == poles_[kn - 1].z && poles_[kn - 1].p < 3)
        return fail("deletion would shrink the following pole below size 2");
      std::array<IV, 2> cells;
      int n, sign;
      move_cells(m, cells, n, sign);
      if (is_origin_cell(cells[0]) || is_origin_cell(cells[1])) {
        int remaining = 0;
        for (IV oc : origin_cells())
          if (oc != cells[0] && oc != cells[1] && cell_in_droplet(oc))
            ++remaining;
        if (remaining == 0) return fail("deletion would expel the origin");
      }
      return true;
    }
    case MoveKind::PoleGrow: {
      if (m.k < 1 || m.k > 4) return fail("bad pole index");
      int id = node_at(m.v);
      if (id < 0) return fail("growth vertex not on curve");
      Dir pd = pole_dir(m.k);
      if (dir(id) != pd || in_dir(id) != pd)
        return fail("growth vertex is not interior to the pole run");
      if (pole_coord(m.v, m.k) != poles_[m.k - 1].z)
        return fail("growth vertex is not on the extremal run");
      return true;
    }
  }
  return fail("unknown move kind");
}

void LatticeCurve::append_diag(std::vector<IV>& out, IV v) {
  out.push_back({v.x - 1, v.y - 1});
  out.push_back({v.x - 1, v.y + 1});
  out.push_back({v.x + 1, v.y - 1});
  out.push_back({v.x + 1, v.y + 1});
}

ApplyDelta LatticeCurve::apply(const Move& m) {
  std::string reason;
  if (!is_legal(m, &reason)) throw CurveError("illegal move: " + reason);
  ApplyDelta d;
  switch (m.kind) {
    case MoveKind::Flip: d = apply_flip(m); break;
    case MoveKind::PoleDelete: d = apply_pole_delete(m); break;
    case MoveKind::PoleGrow: d = apply_pole_grow(m); break;
  }
  bool touches_origin = false;
  for (int i = 0; i < d.n_cells; ++i)
    if (is_origin_cell(d.cells[i])) touches_origin = true;
  if (touches_origin) {
    d.poles_changed = true;
    for (int x = -1; x <= 1; ++x)
      for (int y = -1; y <= 1; ++y) d.dirty.push_back({x, y});
  }
  return d;
}

ApplyDelta LatticeCurve::apply_flip(const Move& m) {
  int id = node_at(m.v);
  int nw = nodes_[id].prev;
  int nu = nodes_[id].next;
  Dir d1 = in_dir(id), d2 = dir(id);
  IV w = nodes_[nw].v;
  IV u = nodes_[nu].v;
  IV xt = w + dir_step(d2);

  ApplyDelta d;
  move_cells(m, d.cells, d.n_cells, d.cell_sign);
  d.inverse = Move{MoveKind::Flip, xt, 0, -m.eps};

  occ_.erase(m.v);
  nodes_[id].v = xt;
  occ_[xt] = id;
  nodes_[nw].d = d2;
  nodes_[id].d = d1;
  area_blocks_ += m.eps;

  d.dirty = {w, u, m.v, xt};
  append_diag(d.dirty, m.v);
  append_diag(d.dirty, xt);

  bool pole_hit = false;
  for (int k = 1; k <= 4; ++k) {
    const PoleInfo& pk = poles_[k - 1];
    bool on_run = pole_coord(m.v, k) == pk.z || pole_coord(xt, k) == pk.z;
    IV mp = pk.L + dir_step(pole_dir(k)) + dir_step(pole_inward(k));
    bool mp_hit = pk.p == 2 && (m.v == mp || xt == mp);
    if (on_run) {
      for (IV e : {pk.L, pk.R}) d.dirty.push_back(e);
      rebuild_pole(k, {pk.L, pk.R, xt, u, w});
      for (IV e : {poles_[k - 1].L, poles_[k - 1].R}) d.dirty.push_back(e);
      pole_hit = true;
    } else if (mp_hit) {
      pole_hit = true;
    }
  }
  d.poles_changed = pole_hit;
  return d;
}

ApplyDelta LatticeCurve::apply_pole_delete(const Move& m) {
  const PoleInfo pk = poles_[m.k - 1];
  Dir pd = pole_dir(m.k);
  Dir in = pole_inward(m.k);
  int n_L = node_at(pk.L);
  int n_m = nodes_[n_L].next;
  int n_b = nodes_[n_m].next;
  int n_prev = nodes_[n_L].prev;
  int n_next = nodes_[n_b].next;
  IV mid = nodes_[n_m].v;
  IV mp = mid + dir_step(in);

  ApplyDelta d;
  move_cells(m, d.cells, d.n_cells, d.cell_sign);
  d.inverse = Move{MoveKind::PoleGrow, mp, m.k, 0};
  for (int k = 1; k <= 4; ++k)
    for (IV e : {poles_[k - 1].L, poles_[k - 1].R}) d.dirty.push_back(e);
  d.dirty.push_back(pk.L);
  d.dirty.push_back(mid);
  d.dirty.push_back(pk.R);
  d.dirty.push_back(nodes_[n_prev].v);
  d.dirty.push_back(nodes_[n_next].v);
  d.dirty.push_back(mp);
  append_diag(d.dirty, pk.L);
  append_diag(d.dirty, mid);
  append_diag(d.dirty, pk.R);
  append_diag(d.dirty, mp);

  free_node(n_L);
  free_node(n_m);
  free_node(n_b);
  int n_mp = alloc_node(mp, pd);
  nodes_[n_prev].d = pd;
  link(n_prev, n_mp);
  link(n_mp, n_next);
  if (entry_ == n_L || entry_ == n_m || entry_ == n_b) entry_ = n_mp;

  area_blocks_ -= 2;
  n_edges_ -= 2;
  rebuild_all_poles();
  for (int k = 1; k <= 4; ++k)
    for (IV e : {poles_[k - 1].L, poles_[k - 1].R}) d.dirty.push_back(e);
  d.poles_changed = true;
  return d;
}

ApplyDelta LatticeCurve::apply_pole_grow(const Move& m) {
  Dir pd = pole_dir(m.k);
  Dir in = pole_inward(m.k);
  Dir out = dir_opposite(in);
  int n_v = node_at(m.v);
  int n_a = nodes_[n_v].prev;
  int n_b = nodes_[n_v].next;
  IV a = nodes_[n_a].v;
  IV b = nodes_[n_b].v;
  IV ap = a + dir_step(out);
  IV xp = m.v + dir_step(out);
  IV bp = b + dir_step(out);

  ApplyDelta d;
  move_cells(m, d.cells, d.n_cells, d.cell_sign);
  d.inverse = Move{MoveKind::PoleDelete, {}, m.k, 0};
  for (int k = 1; k <= 4; ++k)
    for (IV e : {poles_[k - 1].L, poles_[k - 1].R}) d.dirty.push_back(e);
  d.dirty.push_back(a);
  d.dirty.push_back(b);
  d.dirty.push_back(m.v);
  d.dirty.push_back(ap);
  d.dirty.push_back(xp);
  d.dirty.push_back(bp);
  append_diag(d.dirty, m.v);
  append_diag(d.dirty, ap);
  append_diag(d.dirty, xp);
  append_diag(d.dirty, bp);

  free_node(n_v);
  int n_ap = alloc_node(ap, pd);
  int n_xp = alloc_node(xp, pd);
  int n_bp = alloc_node(bp, in);
  nodes_[n_a].d = out;
  link(n_a, n_ap);
  link(n_ap, n_xp);
  link(n_xp, n_bp);
  link(n_bp, n_b);
  if (entry_ == n_v) entry_ = n_xp;

  area_blocks_ += 2;
  n_edges_ += 2;
  rebuild_all_poles();
  for (int k = 1; k <= 4; ++k)
    for (IV e : {poles_[k - 1].L, poles_[k - 1].R}) d.dirty.push_back(e);
  d.poles_changed = true;
  return d;
}

bool LatticeCurve::cell_in_droplet(IV cell) const {
  // parity of horizontal boundary edges crossed by an upward ray from the
  // cell center
  int crossings = 0;
  for (const auto& [v, id] : occ_) {
    Dir d = nodes_[id].d;
    if (dir_vertical(d)) continue;
    int ex = std::min(v.x, v.x + dir_dx(d));
    if (ex == cell.x && v.y > cell.y) ++crossings;
  }
  return (crossings & 1) != 0;
}

bool LatticeCurve::origin_inside() const {
  for (IV oc : origin_cells())
    if (cell_in_droplet(oc)) return true;
  return false;
}

std::vector<LatticeCurve::RowInterval> LatticeCurve::row_intervals() const {
  std::map<int, std::pair<std::vector<int>, std::vector<int>>> rows;
  for (const auto& [v, id] : occ_) {
    Dir d = nodes_[id].d;
    if (d == Dir::U)
      rows[v.y].first.push_back(v.x);
    else if (d == Dir::D)
      rows[v.y - 1].second.push_back(v.x - 1);
  }
  std::vector<RowInterval> out;
  out.reserve(rows.size());
  for (auto& [y, lr] : rows) {
    if (lr.first.size() != 1 || lr.second.size() != 1)
      throw CurveError("droplet row is not a single interval");
    out.push_back({y, lr.first[0], lr.second[0]});
  }
  return out;
}

bool LatticeCurve::row_interval(int y, int& xl, int& xr) const {
  bool found = false;
  xl = INT32_MAX;
  xr = INT32_MIN;
  for (const auto& [v, id] : occ_) {
    Dir d = nodes_[id].d;
    if (d == Dir::U && v.y == y) {
      xl = std::min(xl, v.x);
      found = true;
    } else if (d == Dir::D && v.y - 1 == y) {
      xr = std::max(xr, v.x - 1);
    }
  }
  return found;
}

std::vector<IV> LatticeCurve::block_cells() const {
  std::vector<IV> cells;
  cells.reserve(static_cast<size_t>(area_blocks_));
  for (const auto& ri : row_intervals())
    for (int x = ri.xl; x <= ri.xr; ++x) cells.push_back({x, ri.y});
  return cells;
}

ValidationReport LatticeCurve::validate() const {
  ValidationReport rep;
  auto bad = [&](const std::string& s) { rep.violations.push_back(s); };
  if (N_ < 1) {
    bad("nonpositive N");
    return rep;
  }
  if (occ_.empty()) {
    bad("empty curve");
    return rep;
  }
  // cycle walk
  std::vector<int> ids;
  std::unordered_set<IV, IVHash> seen;
  int cur = entry_;
  bool closed = true;
  do {
    const Node& n = nodes_[cur];
    if (n.next < 0 || nodes_[n.next].v != n.v + dir_step(n.d)) {
      bad("node chain is geometrically inconsistent");
      return rep;
    }
    if (nodes_[n.next].prev != cur) {
      bad("prev/next links disagree");
      return rep;
    }
    if (!seen.insert(n.v).second) {
      bad("repeated vertex (curve not simple)");
      return rep;
    }
    ids.push_back(cur);
    cur = n.next;
    if (ids.size() > occ_.size() + 1) {
      closed = false;
      break;
    }
  } while (cur != entry_);
  if (!closed || ids.size() != occ_.size()) {
    bad("node cycle does not cover the occupancy set");
    return rep;
  }
  if (static_cast<int>(ids.size()) != n_edges_)
    bad("edge count out of sync");
  for (int id : ids) {
    auto it = occ_.find(nodes_[id].v);
    if (it == occ_.end() || it->second != id) {
      bad("occupancy map out of sync");
      break;
    }
  }
  long long shoelace = 0;
  for (int id : ids)
    shoelace += static_cast<long long>(nodes_[id].v.x) * dir_dy(nodes_[id].d);
  if (shoelace >= 0) {
    bad("curve is not clockwise");
    return rep;
  }
  if (-shoelace != area_blocks_) bad("area out of sync");

  // extremal levels and pole runs
  int zs[4] = {INT32_MIN, INT32_MIN, INT32_MAX, INT32_MAX};
  for (int id : ids) {
    IV v = nodes_[id].v;
    zs[0] = std::max(zs[0], v.y);
    zs[1] = std::max(zs[1], v.x);
    zs[2] = std::min(zs[2], v.y);
    zs[3] = std::min(zs[3], v.x);
  }
  int pole_start_idx[4] = {-1, -1, -1, -1};
  for (int k = 1; k <= 4; ++k) {
    Dir pd = pole_dir(k);
    int runs = 0, p = 0, start = -1;
    for (size_t i = 0; i < ids.size(); ++i) {
      const Node& n = nodes_[ids[i]];
      bool at = pole_coord(n.v, k) == zs[k - 1] &&
                pole_coord(n.v + dir_step(n.d), k) == zs[k - 1];
      if (!at) continue;
      if (n.d != pd) {
        bad("extremal edge runs against the clockwise direction");
        return rep;
      }
      ++p;
      if (nodes_[n.prev].d != pd) {
        ++runs;
        start = static_cast<int>(i);
      }
    }
    if (runs != 1) {
      bad("extremal level does not hold a single run");
      return rep;
    }
    pole_start_idx[k - 1] = start;
    const PoleInfo& pk = poles_[k - 1];
    if (pk.z != zs[k - 1] || pk.p != p || pk.L != nodes_[ids[start]].v)
      bad("pole descriptor out of sync");
    if (p < 2) bad("pole smaller than 2");
  }
  // region alphabets between consecutive poles
  const int E = static_cast<int>(ids.size());
  for (int k = 1; k <= 4; ++k) {
    int kn = k == 4 ? 1 : k + 1;
    int i = pole_start_idx[k - 1];
    // skip over pole k's run
    while (nodes_[ids[i % E]].d == pole_dir(k)) ++i;
    for (; ids[i % E] != ids[pole_start_idx[kn - 1]]; ++i) {
      Dir d = nodes_[ids[i % E]].d;
      if (d != pole_dir(k) && d != pole_dir(kn)) {
        bad("region between poles uses a direction outside its alphabet");
        return rep;
      }
    }
  }
  if (!origin_inside()) bad("closed droplet does not contain the origin");
  return rep;
}

// ---------------------------------------------------------------- snapshots

void LatticeCurve::serialize_snapshot(std::ostream& out, double beta,
                                      double t) const {
  out << "CKMC1 N=" << N_ << " beta=" << fmt_g17(beta) << " t=" << fmt_g17(t)
      << "\n";
  IV a = poles_[0].L;
  out << "anchor " << a.x << " " << a.y << "\n";
  std::string dirs;
  dirs.reserve(n_edges_);
  for (int id : walk()) dirs.push_back(dir_char(nodes_[id].d));
  out << dirs << "\n";
}

LatticeCurve LatticeCurve::parse_snapshot(std::istream& in, double* beta_out,
                                          double* t_out) {
  std::string l1, l2, l3;
  if (!std::getline(in, l1) || !std::getline(in, l2) || !std::getline(in, l3))
    throw CurveError("snapshot truncated");
  int N = 0;
  char bbuf[64], tbuf[64];
  if (std::sscanf(l1.c_str(), "CKMC1 N=%d beta=%63s t=%63s", &N, bbuf, tbuf) !=
      3)
    throw CurveError("bad snapshot header");
  char* end = nullptr;
  double beta = std::strtod(bbuf, &end);
  if (end == bbuf) throw CurveError("bad beta in snapshot header");
  double t = std::strtod(tbuf, &end);
  if (end == tbuf) throw CurveError("bad time in snapshot header");
  IV anchor;
  if (std::sscanf(l2.c_str(), "anchor %d %d", &anchor.x, &anchor.y) != 2)
    throw CurveError("bad snapshot anchor line");
  while (!l3.empty() && (l3.back() == '\r' || l3.back() == ' ')) l3.pop_back();
  LatticeCurve c = from_dirs(N, anchor, l3);
  if (beta_out) *beta_out = beta;
  if (t_out) *t_out = t;
  return c;
}

// ---------------------------------------------------------------- distances

double LatticeCurve::l1_distance(const LatticeCurve& A, const LatticeCurve& B) {
  if (A.N_ != B.N_) throw CurveError("distance requires matching resolution");
  std::unordered_set<IV, IVHash> a;
  for (IV c : A.block_cells()) a.insert(c);
  long long diff = 0;
  for (IV c : B.block_cells()) {
    auto it = a.find(c);
    if (it == a.end())
      ++diff;
    else
      a.erase(it);
  }
  diff += static_cast<long long>(a.size());
  return static_cast<double>(diff) /
         (static_cast<double>(A.N_) * static_cast<double>(A.N_));
}

namespace {

struct QSeg {
  bool horizontal;
  int fixed;   // y for horizontal, x for vertical (quarter units)
  int lo, hi;  // varying coordinate range (quarter units)
};

long long point_seg_linf(int px, int py, const QSeg& s) {
  int u = s.horizontal ? px : py;
  int w = s.horizontal ? py : px;
  long long du = std::max({0, s.lo - u, u - s.hi});
  long long dw = std::abs(static_cast<long long>(w) - s.fixed);
  return std::max(du, dw);
}

std::vector<QSeg> quarter_segments(const LatticeCurve& c) {
  std::vector<QSeg> out;
  out.reserve(c.n_edges());
  for (int id : c.walk()) {
    IV v = c.vertex(id);
    IV u = v + dir_step(c.dir(id));
    if (v.y == u.y)
      out.push_back(
          {true, 4 * v.y, 4 * std::min(v.x, u.x), 4 * std::max(v.x, u.x)});
    else
      out.push_back(
          {false, 4 * v.x, 4 * std::min(v.y, u.y), 4 * std::max(v.y, u.y)});
  }
  return out;
}

long long directed_hausdorff_q(const std::vector<QSeg>& A,
                               const std::vector<QSeg>& B) {
  long long worst = 0;
  for (const QSeg& s : A) {
    for (int i = 0; i <= 4; ++i) {
      int u = s.lo + (s.hi - s.lo) / 4 * i;
      int px = s.horizontal ? u : s.fixed;
      int py = s.horizontal ? s.fixed : u;
      long long best = INT64_MAX;
      for (const QSeg& t : B) best = std::min(best, point_seg_linf(px, py, t));
      worst = std::max(worst, best);
    }
  }
  return worst;
}

}  // namespace

double LatticeCurve::hausdorff_distance(const LatticeCurve& A,
                                        const LatticeCurve& B) {
  if (A.N_ != B.N_) throw CurveError("distance requires matching resolution");
  auto qa = quarter_segments(A);
  auto qb = quarter_segments(B);
  long long d =
      std::max(directed_hausdorff_q(qa, qb), directed_hausdorff_q(qb, qa));
  return static_cast<double>(d) / (4.0 * A.N_);
}

}  // namespace ckmc
