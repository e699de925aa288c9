#pragma once

#include <span>
#include <vector>

#include "sptb/types.hpp"

namespace sptb {

// True when the most significant set bit of `a` is below that of `b`.
inline bool less_msb(Index a, Index b) { return a < b && a < (a ^ b); }

/// Z-curve comparison of nonzeros `x` and `y` over `modes`.
///
/// Equivalent to comparing keys built by interleaving the bits of the
/// zero-extended 32-bit coordinates, with the earlier mode in `modes` taking
/// the higher bit at each level.  Because block and element offsets are the
/// high and low bits of a coordinate, this also orders blocks by the Z-curve
/// of their block coordinates and elements by the Z-curve of their offsets.
inline bool morton_less(const std::vector<std::vector<Index>>& inds, std::span<const Mode> modes,
                        std::size_t x, std::size_t y) {
  Mode lead = modes[0];
  Index diff = inds[lead][x] ^ inds[lead][y];
  for (std::size_t k = 1; k < modes.size(); ++k) {
    const Mode m = modes[k];
    const Index d = inds[m][x] ^ inds[m][y];
    if (less_msb(diff, d)) {
      lead = m;
      diff = d;
    }
  }
  return inds[lead][x] < inds[lead][y];
}

/// Z-curve comparison of two small coordinate tuples of equal length.
inline bool morton_less(std::span<const Index> a, std::span<const Index> b) {
  std::size_t lead = 0;
  Index diff = a[0] ^ b[0];
  for (std::size_t k = 1; k < a.size(); ++k) {
    const Index d = a[k] ^ b[k];
    if (less_msb(diff, d)) {
      lead = k;
      diff = d;
    }
  }
  return a[lead] < b[lead];
}

}  // namespace sptb
