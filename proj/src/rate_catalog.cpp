#include "ckmc/rate_catalog.hpp"

#include <algorithm>
#include <cmath>

namespace ckmc {

void WeightTree::assign(size_t n) {
  size_t cap = 1;
  while (cap < n) cap <<= 1;
  tree_.assign(cap + 1, 0.0);
  vals_.assign(n, 0.0);
}

void WeightTree::grow_to(size_t n) {
  if (n <= vals_.size()) return;
  std::vector<double> old(vals_.begin(), vals_.end());
  assign(std::max(n, vals_.size() * 2));
  vals_.resize(std::max(n, old.size()), 0.0);
  for (size_t i = 0; i < old.size(); ++i)
    if (old[i] != 0.0) set(i, old[i]);
}

void WeightTree::set(size_t i, double w) {
  double delta = w - vals_[i];
  if (delta == 0.0) return;
  vals_[i] = w;
  for (size_t j = i + 1; j < tree_.size(); j += j & (~j + 1)) tree_[j] += delta;
}

double WeightTree::total() const {
  double s = 0.0;
  size_t j = tree_.size() - 1;
  // tree_ capacity is a power of two, so the root holds the full sum
  return tree_.empty() ? s : tree_[j];
}

size_t WeightTree::sample(double u) const {
  size_t pos = 0;
  size_t mask = (tree_.size() - 1) >> 1;
  double rem = u;
  while (mask > 0) {
    size_t nxt = pos + mask;
    if (nxt < tree_.size() && tree_[nxt] <= rem) {
      rem -= tree_[nxt];
      pos = nxt;
    }
    mask >>= 1;
  }
  // pos is the count of slots with cumulative weight <= u
  size_t idx = pos;
  if (idx >= vals_.size()) idx = vals_.size() - 1;
  // guard against landing on a zero-weight slot through roundoff
  while (idx + 1 < vals_.size() && vals_[idx] == 0.0) ++idx;
  while (idx > 0 && vals_[idx] == 0.0) --idx;
  return idx;
}

double RateCatalog::applied(const Entry& e) const {
  if (!params_.apply_tilt || e.sc == 0.0) return e.base;
  return e.base * std::exp(psi_ * e.sc);
}

double RateCatalog::tilt_sc(const LatticeCurve& c, const Move& m) const {
  if (!params_.bias || params_.bias->empty()) return 0.0;
  std::array<IV, 2> cells;
  int n = 0, sign = 0;
  c.move_cells(m, cells, n, sign);
  double h = 1.0 / N_;
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    s += params_.bias->cell_value(cells[i].x * h, cells[i].y * h, h,
                                  params_.cell_rule);
  return sign * s * N_;
}

int RateCatalog::alloc_slot() {
  if (!free_.empty()) {
    int s = free_.back();
    free_.pop_back();
    return s;
  }
  int s = static_cast<int>(entries_.size());
  entries_.push_back({});
  tree_.grow_to(entries_.size());
  return s;
}

void RateCatalog::write_weight(int s) {
  tree_.set(static_cast<size_t>(s), applied(entries_[s]));
}

void RateCatalog::drop_slot(int s) {
  Entry& e = entries_[s];
  if (!e.live) return;
  sum_base_ -= e.base;
  sum_tilted_ -= e.base * std::exp(psi_ * e.sc);
  e.live = false;
  e.base = 0.0;
  e.sc = 0.0;
  tree_.set(static_cast<size_t>(s), 0.0);
  free_.push_back(s);
  --n_live_;
}

void RateCatalog::put(const LatticeCurve& c, const Move& m, double base) {
  int s = -1;
  if (m.kind == MoveKind::Flip) {
    auto it = flip_slot_.find(m.v);
    if (it != flip_slot_.end()) s = it->second;
  } else if (m.kind == MoveKind::PoleDelete) {
    s = pdel_slot_[m.k - 1];
  }
  bool fresh = s < 0;
  if (fresh) s = alloc_slot();
  Entry& e = entries_[s];
  if (e.live) {
    sum_base_ -= e.base;
    sum_tilted_ -= e.base * std::exp(psi_ * e.sc);
  } else {
    e.live = true;
    ++n_live_;
  }
  e.move = m;
  e.base = base;
  e.sc = tilt_sc(c, m);
  sum_base_ += base;
  sum_tilted_ += base * std::exp(psi_ * e.sc);
  write_weight(s);
  if (fresh) {
    if (m.kind == MoveKind::Flip)
      flip_slot_[m.v] = s;
    else if (m.kind == MoveKind::PoleDelete)
      pdel_slot_[m.k - 1] = s;
    else
      grow_slots_[m.k - 1].push_back(s);
  }
}

void RateCatalog::refresh_vertex(const LatticeCurve& c, IV v) {
  Move m;
  bool want = c.flip_at(v, m) && c.is_legal(m);
  auto it = flip_slot_.find(v);
  if (want) {
    put(c, m, 0.5);
  } else if (it != flip_slot_.end()) {
    drop_slot(it->second);
    flip_slot_.erase(it);
  }
}

void RateCatalog::refresh_poles(const LatticeCurve& c) {
  for (int k = 1; k <= 4; ++k) {
    Move del{MoveKind::PoleDelete, {}, k, 0};
    if (c.is_legal(del)) {
      put(c, del, 1.0);
    } else if (pdel_slot_[k - 1] >= 0) {
      drop_slot(pdel_slot_[k - 1]);
      pdel_slot_[k - 1] = -1;
    }
    for (int s : grow_slots_[k - 1]) drop_slot(s);
    grow_slots_[k - 1].clear();
    if (grow_rate_ <= 0.0) continue;
    const PoleInfo& pk = c.pole(k);
    IV v = pk.L;
    for (int i = 1; i < pk.p; ++i) {
      v = v + dir_step(pole_dir(k));
      put(c, Move{MoveKind::PoleGrow, v, k, 0}, grow_rate_);
    }
  }
}

void RateCatalog::rebuild(const LatticeCurve& c, const Params& p, double psi) {
  params_ = p;
  grow_rate_ = std::isinf(p.beta) ? 0.0 : std::exp(-2.0 * p.beta);
  psi_ = psi;
  N_ = c.N();
  entries_.clear();
  free_.clear();
  tree_.assign(0);
  sum_base_ = sum_tilted_ = 0.0;
  n_live_ = 0;
  flip_slot_.clear();
  flip_slot_.reserve(c.n_edges() * 2);
  pdel_slot_ = {-1, -1, -1, -1};
  for (auto& g : grow_slots_) g.clear();
  for (int id : c.walk()) refresh_vertex(c, c.vertex(id));
  refresh_poles(c);
}

void RateCatalog::after_apply(const LatticeCurve& c, const ApplyDelta& d) {
  for (IV v : d.dirty) refresh_vertex(c, v);
  if (d.poles_changed) refresh_poles(c);
}

void RateCatalog::set_psi(const LatticeCurve& c, double psi) {
  (void)c;
  if (psi == psi_) return;
  psi_ = psi;
  sum_base_ = sum_tilted_ = 0.0;
  for (size_t s = 0; s < entries_.size(); ++s) {
    const Entry& e = entries_[s];
    if (!e.live) continue;
    sum_base_ += e.base;
    sum_tilted_ += e.base * std::exp(psi_ * e.sc);
    if (e.sc != 0.0) write_weight(static_cast<int>(s));
  }
}

void RateCatalog::resum() {
  sum_base_ = sum_tilted_ = 0.0;
  for (const Entry& e : entries_) {
    if (!e.live) continue;
    sum_base_ += e.base;
    sum_tilted_ += e.base * std::exp(psi_ * e.sc);
  }
}

std::vector<RateCatalog::Listed> RateCatalog::enumerate() const {
  std::vector<Listed> out;
  out.reserve(n_live_);
  for (const Entry& e : entries_)
    if (e.live) out.push_back({e.move, e.base, applied(e)});
  std::sort(out.begin(), out.end(), [](const Listed& a, const Listed& b) {
    if (a.move.kind != b.move.kind) return a.move.kind < b.move.kind;
    if (a.move.k != b.move.k) return a.move.k < b.move.k;
    if (a.move.v.x != b.move.v.x) return a.move.v.x < b.move.v.x;
    if (a.move.v.y != b.move.v.y) return a.move.v.y < b.move.v.y;
    return a.move.eps < b.move.eps;
  });
  return out;
}

}  // namespace ckmc
