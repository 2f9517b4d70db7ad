#ifndef CKMC_SSEP_BRIDGE_HPP
#define CKMC_SSEP_BRIDGE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "ckmc/lattice_curve.hpp"

namespace ckmc {

// Particle configuration read off one monotone region arc of the curve.
// Bit i is the occupation of site i, sites ordered clockwise along the arc
// strictly between the bounding extremal runs.
struct ExclusionWindow {
  int k = 1;                  // region index
  IV start;                   // first vertex of the arc (end of run k)
  std::vector<uint8_t> bits;  // occupations, one per arc edge
};

// Site coordinate that advances by one per clockwise step inside region k.
int site_coord(const IV& v, int k);

// occupation bit of a single edge direction within region k
int edge_bit(Dir d, int k);

// direction of the edge carrying occupation b within region k
Dir bit_edge(int b, int k);

// Extract the occupation word of region arc k (from the vertex after pole
// run k up to the vertex starting pole run k+1).
ExclusionWindow to_exclusion(const LatticeCurve& c, int k);

// Rebuild the arc direction string encoded by an occupation word.
std::string from_exclusion(const ExclusionWindow& w);

}  // namespace ckmc

#endif
