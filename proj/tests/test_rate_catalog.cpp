#include "ckmc/rate_catalog.hpp"

#include <cmath>
#include <map>

#include "ckmc/rng.hpp"
#include "doctest.h"

using namespace ckmc;

namespace {

std::map<std::string, std::pair<double, double>> listing(const RateCatalog& c) {
  std::map<std::string, std::pair<double, double>> m;
  for (const auto& e : c.enumerate())
    m[move_to_string(e.move)] = {e.base, e.applied};
  return m;
}

}  // namespace

TEST_CASE("weight tree set, total, sample") {
  WeightTree w;
  w.assign(5);
  w.set(0, 0.5);
  w.set(2, 1.5);
  w.set(4, 2.0);
  CHECK(w.total() == doctest::Approx(4.0));
  CHECK(w.sample(0.1) == 0);
  CHECK(w.sample(0.499) == 0);
  CHECK(w.sample(0.6) == 2);
  CHECK(w.sample(1.99) == 2);
  CHECK(w.sample(2.1) == 4);
  CHECK(w.sample(3.99) == 4);
  w.set(2, 0.0);
  CHECK(w.total() == doctest::Approx(2.5));
  CHECK(w.sample(0.7) == 4);
  w.grow_to(40);
  CHECK(w.total() == doctest::Approx(2.5));
  w.set(31, 1.0);
  CHECK(w.total() == doctest::Approx(3.5));
  CHECK(w.sample(3.0) == 31);
}

TEST_CASE("rectangle catalog matches the closed form") {
  const int M = 5, K = 4;
  const double beta = 1.7;
  auto c = LatticeCurve::rectangle(8, M, K);
  RateCatalog cat;
  RateCatalog::Params p;
  p.beta = beta;
  cat.rebuild(c, p, 1.0);
  double expect = 4 * 0.5 + (2 * (M - 1) + 2 * (K - 1)) * std::exp(-2 * beta);
  CHECK(cat.total_rate() == doctest::Approx(expect).epsilon(1e-12));
  CHECK(cat.total_base() == doctest::Approx(expect).epsilon(1e-12));
  int flips = 0, grows = 0, dels = 0;
  for (const auto& e : cat.enumerate()) {
    if (e.move.kind == MoveKind::Flip) ++flips;
    if (e.move.kind == MoveKind::PoleGrow) ++grows;
    if (e.move.kind == MoveKind::PoleDelete) ++dels;
  }
  CHECK(flips == 4);
  CHECK(grows == 2 * (M - 1) + 2 * (K - 1));
  CHECK(dels == 0);
}

TEST_CASE("infinite beta removes growth moves") {
  auto c = LatticeCurve::rectangle(8, 4, 4);
  RateCatalog cat;
  RateCatalog::Params p;
  p.beta = std::numeric_limits<double>::infinity();
  cat.rebuild(c, p, 1.0);
  for (const auto& e : cat.enumerate())
    CHECK(e.move.kind != MoveKind::PoleGrow);
  CHECK(cat.total_rate() == doctest::Approx(2.0));
}

TEST_CASE("incremental catalog equals a rebuild after random events") {
  Rng rng(99u);
  auto c = LatticeCurve::discretize({ShapeKind::Disk, 0.4, 0.0}, 16);
  BiasField bias = BiasField::bump(0.5, 0.1, -0.05, 0.12, 0.3);
  RateCatalog cat;
  RateCatalog::Params p;
  p.beta = 1.5;
  p.bias = &bias;
  cat.rebuild(c, p, 1.0);
  for (int step = 0; step < 3000; ++step) {
    double u = rng.u01() * cat.total_rate();
    int slot = cat.sample(u);
    Move m = cat.entry(slot).move;
    REQUIRE(c.is_legal(m));
    auto d = c.apply(m);
    cat.after_apply(c, d);
    if (step % 250 == 0 || step == 2999) {
      RateCatalog fresh;
      fresh.rebuild(c, p, 1.0);
      auto got = listing(cat);
      auto want = listing(fresh);
      CAPTURE(step);
      REQUIRE(got.size() == want.size());
      for (const auto& [mv, rates] : want) {
        CAPTURE(mv);
        REQUIRE(got.count(mv) == 1);
        CHECK(got[mv].first == rates.first);
        CHECK(got[mv].second == doctest::Approx(rates.second).epsilon(1e-13));
      }
      CHECK(cat.total_base() ==
            doctest::Approx(fresh.total_base()).epsilon(1e-12));
      CHECK(cat.total_rate() ==
            doctest::Approx(fresh.total_rate()).epsilon(1e-12));
    }
  }
  CHECK(c.validate().ok());
}

TEST_CASE("detailed balance against the length energy") {
  Rng rng(4242u);
  const double beta = 1.5;
  auto c = LatticeCurve::discretize({ShapeKind::Disk, 0.35, 0.0}, 12);
  RateCatalog::Params p;
  p.beta = beta;
  for (int round = 0; round < 20; ++round) {
    RateCatalog cat;
    cat.rebuild(c, p, 1.0);
    auto moves = cat.enumerate();
    for (const auto& e : moves) {
      LatticeCurve c2 = c;
      int e_before = c2.n_edges();
      auto d = c2.apply(e.move);
      int delta_edges = c2.n_edges() - e_before;
      RateCatalog back;
      back.rebuild(c2, p, 1.0);
      double r_back = -1;
      for (const auto& b : back.enumerate())
        if (b.move == d.inverse) r_back = b.base;
      CAPTURE(move_to_string(e.move));
      REQUIRE(r_back > 0);
      // rate(g->g') e^{-beta E} = rate(g'->g) e^{-beta E'}
      double lhs = e.base;
      double rhs = r_back * std::exp(-beta * delta_edges);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
    // advance a few random events
    for (int s = 0; s < 40; ++s) {
      RateCatalog cat2;
      cat2.rebuild(c, p, 1.0);
      int slot = cat2.sample(rng.u01() * cat2.total_rate());
      c.apply(cat2.entry(slot).move);
    }
  }
}

TEST_CASE("sampling respects rate proportions") {
  auto c = LatticeCurve::rectangle(8, 4, 4);
  RateCatalog cat;
  RateCatalog::Params p;
  p.beta = 1.0;
  cat.rebuild(c, p, 1.0);
  Rng rng(5u);
  std::map<std::string, int> hits;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    int slot = cat.sample(rng.u01() * cat.total_rate());
    const auto& e = cat.entry(slot);
    REQUIRE(e.live);
    hits[move_to_string(e.move)]++;
  }
  for (const auto& e : cat.enumerate()) {
    double expect = e.applied / cat.total_rate();
    double got = static_cast<double>(hits[move_to_string(e.move)]) / n;
    CHECK(got == doctest::Approx(expect).epsilon(0.08));
  }
}
