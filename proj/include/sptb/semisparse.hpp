#pragma once

#include <variant>
#include <vector>

#include "sptb/hicoo.hpp"
#include "sptb/types.hpp"

namespace sptb {

/// sCOO fiber index: one coordinate array per sparse mode.
struct CooFiberIndex {
  std::vector<std::vector<Index>> inds;
};

/// Tensor with one or more dense modes (sCOO / sHiCOO).
///
/// Each stored fiber entry carries indices for the sparse modes only and
/// owns a contiguous chunk of `chunk_size()` values laid out row-major over
/// `dense_modes`.  The fiber index is COO-style or HiCOO-style; in the
/// blocked case its mode positions refer to `sparse_modes`, not to tensor
/// modes.
template <typename T>
struct SemiSparseTensor {
  using value_type = T;

  std::vector<Index> dims;
  ModeOrder dense_modes;
  ModeOrder sparse_modes;
  std::variant<CooFiberIndex, BlockedIndex> fibers;
  std::vector<T> vals;

  std::size_t order() const { return dims.size(); }
  bool blocked() const { return std::holds_alternative<BlockedIndex>(fibers); }

  std::size_t chunk_size() const {
    std::size_t c = 1;
    for (Mode m : dense_modes) c *= dims[m];
    return c;
  }

  std::size_t nfibers() const {
    if (const auto* coo = std::get_if<CooFiberIndex>(&fibers)) {
      return coo->inds.empty() ? 0 : coo->inds.front().size();
    }
    return std::get<BlockedIndex>(fibers).size();
  }

  /// Index on sparse mode position `s` of fiber entry `f`.  For the blocked
  /// form `block` must be the block holding `f`.
  Index sparse_index(std::size_t s, std::size_t block, std::size_t f) const {
    if (const auto* coo = std::get_if<CooFiberIndex>(&fibers)) return coo->inds[s][f];
    return std::get<BlockedIndex>(fibers).index(s, block, f);
  }
};

}  // namespace sptb
