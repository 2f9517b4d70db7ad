#ifndef CKMC_LATTICE_CURVE_HPP
#define CKMC_LATTICE_CURVE_HPP

#include <array>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ckmc/geometry.hpp"

namespace ckmc {

struct CurveError : std::runtime_error {
  explicit CurveError(const std::string& what) : std::runtime_error(what) {}
};

enum class MoveKind : uint8_t { Flip, PoleDelete, PoleGrow };

struct Move {
  MoveKind kind = MoveKind::Flip;
  IV v{};       // Flip: the corner vertex; PoleGrow: the interior pole vertex
  int k = 0;    // pole index 1..4 for pole moves
  int eps = 0;  // Flip: +1 adds a block, -1 removes one

  friend bool operator==(const Move& a, const Move& b) {
    return a.kind == b.kind && a.v == b.v && a.k == b.k && a.eps == b.eps;
  }
};

std::string move_to_string(const Move& m);

// Pole k occupies the extremal run: k=1 top (R-run at max y), k=2 right
// (D-run at max x), k=3 bottom (L-run at min y), k=4 left (U-run at min x).
struct PoleInfo {
  IV L{}, R{};  // first and last vertex of the run in clockwise order
  int p = 0;    // run length in edges
  int z = 0;    // extremal coordinate (y for k=1,3; x for k=2,4)
};

constexpr Dir pole_dir(int k) { return static_cast<Dir>(k - 1); }
// transverse inward step (toward the droplet interior)
constexpr Dir pole_inward(int k) { return static_cast<Dir>(k & 3); }
// extremal coordinate of a vertex for pole k
constexpr int pole_coord(IV v, int k) { return (k == 1 || k == 3) ? v.y : v.x; }

struct ApplyDelta {
  std::array<IV, 2> cells{};  // block cells (min corners) added or removed
  int n_cells = 0;
  int cell_sign = 0;      // +1 added, -1 removed
  std::vector<IV> dirty;  // vertices whose candidate moves need re-examination
  bool poles_changed = false;
  Move inverse{};
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
  std::string str() const;
};

enum class ShapeKind { Square, Disk, Diamond, Ellipse };

struct ShapeSpec {
  ShapeKind kind = ShapeKind::Disk;
  double a = 0.4;  // side for square, radius for disk, half-diagonal for
                   // diamond, x semi-axis for ellipse
  double b = 0.2;  // y semi-axis for ellipse
  bool contains(double x, double y) const;  // closed containment
};

// Simple rectilinear Jordan curve on the lattice (1/N)Z^2, stored in lattice
// integer units, traversed clockwise, with the origin inside the closed
// droplet and all four poles of size >= 2.
class LatticeCurve {
 public:
  LatticeCurve() = default;

  static LatticeCurve from_dirs(int N, IV anchor, std::string_view dirs);
  static LatticeCurve from_cells(int N, const std::vector<IV>& cells);
  static LatticeCurve rectangle(int N, int width_blocks, int height_blocks,
                                IV center = {0, 0});
  static LatticeCurve discretize(const ShapeSpec& shape, int N);

  static LatticeCurve parse_snapshot(std::istream& in, double* beta_out,
                                     double* t_out);
  void serialize_snapshot(std::ostream& out, double beta, double t) const;

  int N() const { return N_; }
  long long area_blocks() const { return area_blocks_; }
  double area() const {
    return static_cast<double>(area_blocks_) / (static_cast<double>(N_) * N_);
  }
  int n_edges() const { return n_edges_; }
  double length() const { return static_cast<double>(n_edges_) / N_; }
  const PoleInfo& pole(int k) const { return poles_[k - 1]; }

  bool occupied(IV v) const { return occ_.find(v) != occ_.end(); }
  int node_at(IV v) const;  // -1 if absent

  int entry_node() const { return entry_; }
  int next(int id) const { return nodes_[id].next; }
  int prev(int id) const { return nodes_[id].prev; }
  IV vertex(int id) const { return nodes_[id].v; }
  Dir dir(int id) const { return nodes_[id].d; }
  Dir in_dir(int id) const { return nodes_[nodes_[id].prev].d; }

  // nodes in clockwise order starting from L_1
  std::vector<int> walk() const;

  bool is_corner(int id) const { return dir_cross(in_dir(id), dir(id)) != 0; }

  // Flip move at a corner vertex; false if v is not a corner.
  bool flip_at(IV v, Move& m) const;

  bool is_legal(const Move& m, std::string* reason = nullptr) const;
  ApplyDelta apply(const Move& m);  // throws CurveError on illegal moves

  // cells the move adds (+1) or removes (-1); requires structural validity
  void move_cells(const Move& m, std::array<IV, 2>& cells, int& n,
                  int& sign) const;
  // change in edge count (0 for flips, -2 delete, +2 grow)
  static int move_edge_delta(const Move& m);

  ValidationReport validate() const;

  bool cell_in_droplet(IV cell) const;  // O(perimeter) ray cast
  // closed droplet contains the origin
  bool origin_inside() const;

  // rows of the droplet as [y] -> [xl, xr] inclusive block columns;
  // throws if some row is not a single interval
  struct RowInterval {
    int y;
    int xl, xr;
  };
  std::vector<RowInterval> row_intervals() const;
  // single-row variant, O(perimeter); row must intersect the droplet
  bool row_interval(int y, int& xl, int& xr) const;
  std::vector<IV> block_cells() const;

  static double l1_distance(const LatticeCurve& A, const LatticeCurve& B);
  static double hausdorff_distance(const LatticeCurve& A,
                                   const LatticeCurve& B);

 private:
  struct Node {
    IV v{};
    Dir d = Dir::R;
    int32_t prev = -1;
    int32_t next = -1;
  };

  int alloc_node(IV v, Dir d);
  void free_node(int id);
  void link(int a, int b) {
    nodes_[a].next = b;
    nodes_[b].prev = a;
  }

  void recompute_all();  // area, edges, poles, entry from the node cycle
  void rebuild_all_poles();
  // rebuild pole k given a vertex known to lie on its extremal run
  void rebuild_pole_from(int k, IV on_run);
  // pick a surviving hint among candidates and rebuild pole k
  void rebuild_pole(int k, const std::vector<IV>& candidates);

  ApplyDelta apply_flip(const Move& m);
  ApplyDelta apply_pole_delete(const Move& m);
  ApplyDelta apply_pole_grow(const Move& m);

  static void append_diag(std::vector<IV>& out, IV v);

  int N_ = 0;
  std::vector<Node> nodes_;
  std::vector<int32_t> free_;
  std::unordered_map<IV, int32_t, IVHash> occ_;
  int32_t entry_ = -1;
  long long area_blocks_ = 0;
  int n_edges_ = 0;
  std::array<PoleInfo, 4> poles_{};
};

inline const std::array<IV, 4>& origin_cells() {
  static const std::array<IV, 4> c = {IV{-1, -1}, IV{-1, 0}, IV{0, -1},
                                      IV{0, 0}};
  return c;
}

}  // namespace ckmc

#endif
