#pragma once

#include <utility>
#include <vector>

#include "sptb/coo.hpp"
#include "sptb/hicoo.hpp"

namespace sptb {

/// Mode-n fiber boundaries of a tensor whose order keeps each fiber
/// contiguous: fiber f spans nonzeros [fptr[f], fptr[f+1]).
struct FiberLayout {
  Mode mode = 0;
  std::size_t nfibs = 0;
  std::vector<Offset> fptr{0};
};

/// Sorts `t` with mode n last and records the maximal runs of nonzeros that
/// agree on every other mode.
template <typename T>
std::pair<CooTensor<T>, FiberLayout> build_fiber_layout(const CooTensor<T>& t, Mode n);

/// gHiCOO counterpart.  Mode n must be uncompressed; the tensor is re-blocked
/// only if n is not already last in its tie-break order.  Fibers never span
/// blocks because every compressed coordinate is constant along a fiber.
template <typename T>
std::pair<GHicooTensor<T>, FiberLayout> build_fiber_layout(const GHicooTensor<T>& t, Mode n);

}  // namespace sptb
