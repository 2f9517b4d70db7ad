#ifndef CKMC_RATE_CATALOG_HPP
#define CKMC_RATE_CATALOG_HPP

#include <array>
#include <cstdint>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ckmc/bias_field.hpp"
#include "ckmc/lattice_curve.hpp"

namespace ckmc {

// Fenwick tree over nonnegative weights with O(log n) update and
// inverse-prefix sampling.
class WeightTree {
 public:
  void assign(size_t n);
  void grow_to(size_t n);
  size_t size() const { return vals_.size(); }
  void set(size_t i, double w);
  double get(size_t i) const { return vals_[i]; }
  double total() const;
  // largest prefix index with cumulative weight <= u; u in [0, total)
  size_t sample(double u) const;

 private:
  std::vector<double> tree_;
  std::vector<double> vals_;
};

// Maintains every legal move of a curve with its untilted rate and the
// spatial tilt exponent. Sampling weights are base * exp(psi * sc) when
// tilting is applied, base otherwise.
class RateCatalog {
 public:
  struct Entry {
    Move move{};
    double base = 0.0;
    double sc = 0.0;  // log tilt per unit psi
    bool live = false;
  };

  struct Params {
    double beta = 2.0;
    bool apply_tilt = true;
    const BiasField* bias = nullptr;  // nullptr: no tilt bookkeeping
    BiasField::CellRule cell_rule = BiasField::CellRule::Midpoint;
  };

  void rebuild(const LatticeCurve& c, const Params& p, double psi);
  void after_apply(const LatticeCurve& c, const ApplyDelta& d);
  void set_psi(const LatticeCurve& c, double psi);

  double total_rate() const { return tree_.total(); }
  double total_base() const { return sum_base_; }
  double total_tilted() const { return sum_tilted_; }
  double psi() const { return psi_; }

  int sample(double u) const { return static_cast<int>(tree_.sample(u)); }
  const Entry& entry(int slot) const { return entries_[slot]; }
  size_t live_entries() const { return n_live_; }

  // canonical (sorted) listing of all moves with base and applied rates
  struct Listed {
    Move move;
    double base;
    double applied;
  };
  std::vector<Listed> enumerate() const;

  // recompute the scalar sums exactly (cheap insurance against drift)
  void resum();

 private:
  int alloc_slot();
  void drop_slot(int s);
  void put(const LatticeCurve& c, const Move& m, double base);
  void refresh_vertex(const LatticeCurve& c, IV v);
  void refresh_poles(const LatticeCurve& c);
  double tilt_sc(const LatticeCurve& c, const Move& m) const;
  double applied(const Entry& e) const;
  void write_weight(int s);

  Params params_;
  double grow_rate_ = 0.0;
  double psi_ = 1.0;
  int N_ = 1;

  std::vector<Entry> entries_;
  std::vector<int> free_;
  WeightTree tree_;
  double sum_base_ = 0.0;
  double sum_tilted_ = 0.0;
  size_t n_live_ = 0;

  std::unordered_map<IV, int, IVHash> flip_slot_;
  std::array<int, 4> pdel_slot_{-1, -1, -1, -1};
  std::array<std::vector<int>, 4> grow_slots_{};
};

}  // namespace ckmc

#endif
