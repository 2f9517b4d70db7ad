#ifndef CKMC_GEOMETRY_HPP
#define CKMC_GEOMETRY_HPP

#include <cstdint>
#include <cstdlib>
#include <functional>

namespace ckmc {

// Lattice directions in clockwise order of region alphabets:
// region 1 uses {R,D}, region 2 {D,L}, region 3 {L,U}, region 4 {U,R}.
enum class Dir : uint8_t { R = 0, D = 1, L = 2, U = 3 };

constexpr int dir_dx(Dir d) {
  constexpr int dx[4] = {1, 0, -1, 0};
  return dx[static_cast<int>(d)];
}

constexpr int dir_dy(Dir d) {
  constexpr int dy[4] = {0, -1, 0, 1};
  return dy[static_cast<int>(d)];
}

constexpr Dir dir_opposite(Dir d) {
  return static_cast<Dir>((static_cast<int>(d) + 2) & 3);
}

constexpr bool dir_vertical(Dir d) { return d == Dir::D || d == Dir::U; }

constexpr char dir_char(Dir d) {
  constexpr char c[4] = {'R', 'D', 'L', 'U'};
  return c[static_cast<int>(d)];
}

// -1 unrecognized
inline int dir_from_char(char c) {
  switch (c) {
    case 'R': return 0;
    case 'D': return 1;
    case 'L': return 2;
    case 'U': return 3;
    default: return -1;
  }
}

// z-component of the cross product step(d1) x step(d2).
// On a clockwise curve, -1 is a right (convex) turn, +1 a left (concave) turn.
constexpr int dir_cross(Dir d1, Dir d2) {
  return dir_dx(d1) * dir_dy(d2) - dir_dy(d1) * dir_dx(d2);
}

// Integer lattice vertex (or block cell identified by its min corner).
struct IV {
  int x = 0;
  int y = 0;
  friend constexpr bool operator==(IV a, IV b) { return a.x == b.x && a.y == b.y; }
  friend constexpr bool operator!=(IV a, IV b) { return !(a == b); }
  friend constexpr IV operator+(IV a, IV b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr IV operator-(IV a, IV b) { return {a.x - b.x, a.y - b.y}; }
};

constexpr IV dir_step(Dir d) { return {dir_dx(d), dir_dy(d)}; }

struct IVHash {
  size_t operator()(IV v) const {
    uint64_t z = (static_cast<uint64_t>(static_cast<uint32_t>(v.x)) << 32) |
                 static_cast<uint64_t>(static_cast<uint32_t>(v.y));
    z ^= z >> 33;
    z *= 0xff51afd7ed558ccdULL;
    z ^= z >> 33;
    z *= 0xc4ceb9fe1a85ec53ULL;
    z ^= z >> 33;
    return static_cast<size_t>(z);
  }
};

// Region index 1..4 for an edge direction pair is defined by the curve
// (it depends on pole positions); here only the per-region sign tables.
// sigma1 = +1 on regions 1,4; sigma2 = -1 on regions 1,2.
constexpr int sigma1(int region) { return (region == 1 || region == 4) ? 1 : -1; }
constexpr int sigma2(int region) { return (region == 1 || region == 2) ? -1 : 1; }

// Outward diagonal m = (sigma2, -sigma1).
constexpr IV region_m(int region) { return {sigma2(region), -sigma1(region)}; }

}  // namespace ckmc

#endif
