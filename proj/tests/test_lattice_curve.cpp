#include "ckmc/lattice_curve.hpp"

#include <sstream>

#include "ckmc/rng.hpp"
#include "doctest.h"

using namespace ckmc;

namespace {

std::string snap(const LatticeCurve& c, double beta = 1.0, double t = 0.0) {
  std::ostringstream os;
  c.serialize_snapshot(os, beta, t);
  return os.str();
}

std::vector<Move> enumerate_legal(const LatticeCurve& c, bool beta_finite) {
  std::vector<Move> out;
  for (int id : c.walk()) {
    Move m;
    if (c.flip_at(c.vertex(id), m) && c.is_legal(m)) out.push_back(m);
  }
  for (int k = 1; k <= 4; ++k) {
    Move del{MoveKind::PoleDelete, {}, k, 0};
    if (c.is_legal(del)) out.push_back(del);
    if (!beta_finite) continue;
    const PoleInfo& pk = c.pole(k);
    IV v = pk.L;
    for (int i = 1; i < pk.p; ++i) {
      v = v + dir_step(pole_dir(k));
      Move g{MoveKind::PoleGrow, v, k, 0};
      if (c.is_legal(g)) out.push_back(g);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("rectangle construction and bookkeeping") {
  auto c = LatticeCurve::rectangle(8, 6, 4);
  CHECK(c.area_blocks() == 24);
  CHECK(c.n_edges() == 20);
  CHECK(c.area() == doctest::Approx(24.0 / 64.0));
  CHECK(c.length() == doctest::Approx(20.0 / 8.0));
  CHECK(c.pole(1).p == 6);
  CHECK(c.pole(2).p == 4);
  CHECK(c.pole(3).p == 6);
  CHECK(c.pole(4).p == 4);
  CHECK(c.pole(1).z == 2);
  CHECK(c.pole(3).z == -2);
  CHECK(c.pole(2).z == 3);
  CHECK(c.pole(4).z == -3);
  CHECK(c.pole(1).L == IV{-3, 2});
  CHECK(c.pole(1).R == IV{3, 2});
  CHECK(c.validate().ok());
  CHECK(c.origin_inside());
}

TEST_CASE("rectangle must contain the origin strictly") {
  CHECK_THROWS_AS(LatticeCurve::rectangle(4, 4, 4, {8, 0}), CurveError);
  CHECK_THROWS_AS(LatticeCurve::rectangle(4, 4, 4, {2, 0}), CurveError);
  CHECK_NOTHROW(LatticeCurve::rectangle(4, 4, 4, {1, 0}));
}

TEST_CASE("direction string round trip is byte identical") {
  auto c = LatticeCurve::rectangle(8, 4, 4);
  std::string s1 = snap(c, 1.5, 0.25);
  std::istringstream is(s1);
  double beta = 0, t = 0;
  auto c2 = LatticeCurve::parse_snapshot(is, &beta, &t);
  CHECK(beta == 1.5);
  CHECK(t == 0.25);
  CHECK(snap(c2, beta, t) == s1);
}

TEST_CASE("snapshot serializes infinite beta") {
  auto c = LatticeCurve::rectangle(8, 4, 4);
  std::string s = snap(c, std::numeric_limits<double>::infinity(), 0.0);
  CHECK(s.find("beta=inf") != std::string::npos);
  std::istringstream is(s);
  double beta = 0, t = 1;
  auto c2 = LatticeCurve::parse_snapshot(is, &beta, &t);
  CHECK(std::isinf(beta));
}

TEST_CASE("from_dirs rejects malformed input") {
  CHECK_THROWS_AS(LatticeCurve::from_dirs(8, {0, 2}, "RRRR"), CurveError);
  CHECK_THROWS_AS(LatticeCurve::from_dirs(8, {0, 2}, "RRDDLLUX"), CurveError);
  // counterclockwise square
  CHECK_THROWS_AS(
      LatticeCurve::from_dirs(8, {-2, -2}, "RRRRUUUULLLLDDDD"), CurveError);
  // clockwise but origin outside
  CHECK_THROWS_AS(
      LatticeCurve::from_dirs(8, {5, 9}, "RRRRDDDDLLLLUUUU"), CurveError);
}

TEST_CASE("flip mechanics at a rectangle corner") {
  auto c = LatticeCurve::rectangle(8, 4, 4);
  std::string before = snap(c);
  Move m;
  REQUIRE(c.flip_at(c.pole(1).L, m));
  CHECK(m.eps == -1);
  REQUIRE(c.is_legal(m));
  auto d = c.apply(m);
  CHECK(c.area_blocks() == 15);
  CHECK(c.n_edges() == 16);
  CHECK(d.n_cells == 1);
  CHECK(d.cell_sign == -1);
  CHECK(d.cells[0] == IV{-2, 1});
  CHECK(c.validate().ok());
  CHECK(c.pole(1).p == 3);
  CHECK(c.pole(1).L == IV{-1, 2});
  // the flipped-in corner is concave; flipping it back restores the curve
  REQUIRE(c.is_legal(d.inverse));
  c.apply(d.inverse);
  CHECK(snap(c) == before);
  CHECK(c.validate().ok());
}

TEST_CASE("pole grow then delete restores the curve") {
  auto c = LatticeCurve::rectangle(8, 5, 4);
  std::string before = snap(c);
  for (int k = 1; k <= 4; ++k) {
    CAPTURE(k);
    const PoleInfo& pk = c.pole(k);
    IV v = pk.L + dir_step(pole_dir(k));  // first interior vertex
    Move g{MoveKind::PoleGrow, v, k, 0};
    REQUIRE(c.is_legal(g));
    auto d = c.apply(g);
    CHECK(c.validate().ok());
    CHECK(c.area_blocks() == 22);
    CHECK(c.pole(k).p == 2);
    CHECK(d.inverse.kind == MoveKind::PoleDelete);
    REQUIRE(c.is_legal(d.inverse));
    auto d2 = c.apply(d.inverse);
    CHECK(c.validate().ok());
    CHECK(snap(c) == before);
    CHECK(d2.inverse.kind == MoveKind::PoleGrow);
    CHECK(d2.inverse.v == v);
    CHECK(d2.inverse.k == k);
  }
}

TEST_CASE("pole delete legality") {
  // 2x2 block: every pole has size 2 but deletion would shrink neighbors
  auto c = LatticeCurve::rectangle(8, 2, 2);
  for (int k = 1; k <= 4; ++k)
    CHECK_FALSE(c.is_legal(Move{MoveKind::PoleDelete, {}, k, 0}));
  // all flips illegal too: the 2x2 square is frozen except for growth
  auto moves = enumerate_legal(c, false);
  CHECK(moves.empty());
  auto grow = enumerate_legal(c, true);
  CHECK(grow.size() == 4);
  for (const auto& m : grow) CHECK(m.kind == MoveKind::PoleGrow);
}

TEST_CASE("origin cannot be expelled") {
  // cells x in {-1,0}, y in {0,1,2}: the bottom two cells are the only
  // origin cells, so deleting the bottom pole would expel the origin
  auto c = LatticeCurve::from_dirs(8, {-1, 3}, "RRDDDLLUUU");
  CHECK(c.pole(3).p == 2);
  Move del3{MoveKind::PoleDelete, {}, 3, 0};
  CHECK_FALSE(c.is_legal(del3));
  Move del1{MoveKind::PoleDelete, {}, 1, 0};
  CHECK(c.is_legal(del1));
}

TEST_CASE("discretized unit square matches rectangle") {
  ShapeSpec s;
  s.kind = ShapeKind::Square;
  s.a = 1.0;
  auto c = LatticeCurve::discretize(s, 8);
  auto r = LatticeCurve::rectangle(8, 8, 8);
  CHECK(snap(c) == snap(r));
}

TEST_CASE("discretized disk") {
  ShapeSpec s;
  s.kind = ShapeKind::Disk;
  s.a = 0.4;
  auto c = LatticeCurve::discretize(s, 64);
  CHECK(c.validate().ok());
  double target = 3.14159265358979 * 0.16;
  CHECK(c.area() <= target);
  CHECK(c.area() >= target - 8.0 / 64.0);
  for (int k = 1; k <= 4; ++k) CHECK(c.pole(k).p >= 2);
}

TEST_CASE("discretized ellipse and diamond validate") {
  ShapeSpec e;
  e.kind = ShapeKind::Ellipse;
  e.a = 0.45;
  e.b = 0.3;
  CHECK(LatticeCurve::discretize(e, 48).validate().ok());
  ShapeSpec d;
  d.kind = ShapeKind::Diamond;
  d.a = 0.4;
  CHECK(LatticeCurve::discretize(d, 32).validate().ok());
}

TEST_CASE("row intervals cover the droplet") {
  ShapeSpec s;
  s.kind = ShapeKind::Disk;
  s.a = 0.35;
  auto c = LatticeCurve::discretize(s, 24);
  auto rows = c.row_intervals();
  long long total = 0;
  for (const auto& r : rows) {
    total += r.xr - r.xl + 1;
    int xl = 0, xr = 0;
    REQUIRE(c.row_interval(r.y, xl, xr));
    CHECK(xl == r.xl);
    CHECK(xr == r.xr);
  }
  CHECK(total == c.area_blocks());
  for (const auto& r : rows) {
    CHECK(c.cell_in_droplet({r.xl, r.y}));
    CHECK(c.cell_in_droplet({r.xr, r.y}));
    CHECK_FALSE(c.cell_in_droplet({r.xl - 1, r.y}));
    CHECK_FALSE(c.cell_in_droplet({r.xr + 1, r.y}));
  }
}

TEST_CASE("l1 distance counts the symmetric difference") {
  auto a = LatticeCurve::rectangle(8, 4, 4);
  auto b = LatticeCurve::rectangle(8, 6, 6);
  CHECK(LatticeCurve::l1_distance(a, b) == doctest::Approx(20.0 / 64.0));
  CHECK(LatticeCurve::l1_distance(a, a) == 0.0);
}

TEST_CASE("hausdorff distance uses the sup norm") {
  auto a = LatticeCurve::rectangle(8, 4, 4);
  auto b = LatticeCurve::rectangle(8, 6, 6);
  CHECK(LatticeCurve::hausdorff_distance(a, b) == doctest::Approx(1.0 / 8.0));
  // shifting by one block in x: sup-norm displacement 1/8
  auto c = LatticeCurve::rectangle(8, 4, 4, {1, 0});
  CHECK(LatticeCurve::hausdorff_distance(a, c) == doctest::Approx(1.0 / 8.0));
  CHECK(LatticeCurve::hausdorff_distance(a, a) == 0.0);
}

TEST_CASE("random walk keeps every invariant") {
  Rng rng(20260816u);
  auto c = LatticeCurve::discretize({ShapeKind::Disk, 0.4, 0.0}, 16);
  std::string prev = snap(c);
  for (int step = 0; step < 4000; ++step) {
    auto moves = enumerate_legal(c, true);
    REQUIRE_FALSE(moves.empty());
    const Move& m = moves[rng.below(moves.size())];
    auto d = c.apply(m);
    if (step % 200 == 0) {
      auto rep = c.validate();
      CAPTURE(step);
      CAPTURE(rep.str());
      REQUIRE(rep.ok());
    }
    // inverse really is the inverse: undo and redo across a copy
    if (step % 100 == 0) {
      LatticeCurve copy = c;
      REQUIRE(copy.is_legal(d.inverse));
      copy.apply(d.inverse);
      CHECK(snap(copy) == prev);
    }
    prev = snap(c);
  }
  auto rep = c.validate();
  REQUIRE(rep.ok());
}

TEST_CASE("hausdorff triangle inequality on random curves") {
  Rng rng(7u);
  auto base = LatticeCurve::discretize({ShapeKind::Disk, 0.4, 0.0}, 12);
  std::vector<LatticeCurve> curves;
  LatticeCurve c = base;
  for (int i = 0; i < 3; ++i) {
    for (int s = 0; s < 150; ++s) {
      auto moves = enumerate_legal(c, true);
      c.apply(moves[rng.below(moves.size())]);
    }
    curves.push_back(c);
  }
  auto d01 = LatticeCurve::hausdorff_distance(curves[0], curves[1]);
  auto d12 = LatticeCurve::hausdorff_distance(curves[1], curves[2]);
  auto d02 = LatticeCurve::hausdorff_distance(curves[0], curves[2]);
  CHECK(d02 <= d01 + d12 + 1e-12);
  CHECK(d01 >= 0.0);
}
