#include "ckmc/ssep_bridge.hpp"

namespace ckmc {

int site_coord(const IV& v, int k) {
  switch (k) {
    case 1: return v.x - v.y;
    case 2: return -v.x - v.y;
    case 3: return v.y - v.x;
    default: return v.x + v.y;
  }
}

int edge_bit(Dir d, int k) {
  if (d == pole_dir(k)) return 0;
  if (d == pole_dir(k % 4 + 1)) return 1;
  throw CurveError("edge outside region alphabet");
}

Dir bit_edge(int b, int k) { return b ? pole_dir(k % 4 + 1) : pole_dir(k); }

ExclusionWindow to_exclusion(const LatticeCurve& c, int k) {
  ExclusionWindow w;
  w.k = k;
  w.start = c.pole(k).R;
  IV stop = c.pole(k % 4 + 1).L;
  int id = c.node_at(w.start);
  for (int guard = 0; c.vertex(id) != stop; ++guard) {
    if (guard > c.n_edges()) throw CurveError("region arc does not close");
    w.bits.push_back(static_cast<uint8_t>(edge_bit(c.dir(id), k)));
    id = c.next(id);
  }
  return w;
}

std::string from_exclusion(const ExclusionWindow& w) {
  std::string s;
  s.reserve(w.bits.size());
  for (uint8_t b : w.bits) s.push_back(dir_char(bit_edge(b, w.k)));
  return s;
}

}  // namespace ckmc
