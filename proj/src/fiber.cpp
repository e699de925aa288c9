#include "sptb/fiber.hpp"

#include <string>

#include "sptb/error.hpp"

namespace sptb {

template <typename T>
std::pair<CooTensor<T>, FiberLayout> build_fiber_layout(const CooTensor<T>& t, Mode n) {
  if (n >= t.order()) throw ConfigError("mode " + std::to_string(n) + " out of range");
  CooTensor<T> sorted = lex_sort(t, order_with_last(t.order(), n));

  FiberLayout layout;
  layout.mode = n;
  layout.fptr.assign(1, 0);
  for (std::size_t x = 1; x < sorted.nnz(); ++x) {
    for (Mode m = 0; m < sorted.order(); ++m) {
      if (m != n && sorted.inds[m][x] != sorted.inds[m][x - 1]) {
        layout.fptr.push_back(x);
        break;
      }
    }
  }
  if (sorted.nnz() > 0) layout.fptr.push_back(sorted.nnz());
  layout.nfibs = layout.fptr.size() - 1;
  return {std::move(sorted), std::move(layout)};
}

template <typename T>
std::pair<GHicooTensor<T>, FiberLayout> build_fiber_layout(const GHicooTensor<T>& t, Mode n) {
  if (n >= t.order()) throw ConfigError("mode " + std::to_string(n) + " out of range");
  if (t.index.compressed[n]) {
    throw ConfigError("mode " + std::to_string(n) + " is compressed; fibers need it uncompressed");
  }
  GHicooTensor<T> g = (!t.tail_order.empty() && t.tail_order.back() == n)
                          ? t
                          : to_ghicoo(from_hicoo(t), t.index.compressed_modes(),
                                      t.index.block_size, n);

  const BlockedIndex& ix = g.index;
  FiberLayout layout;
  layout.mode = n;
  layout.fptr.assign(1, 0);
  for (std::size_t b = 0; b < ix.nblocks(); ++b) {
    for (Offset x = ix.bptr[b]; x < ix.bptr[b + 1]; ++x) {
      if (x == 0) continue;
      bool boundary = x == ix.bptr[b];
      for (Mode m = 0; m < g.order() && !boundary; ++m) {
        if (m == n) continue;
        boundary = ix.compressed[m] ? ix.einds[m][x] != ix.einds[m][x - 1]
                                    : ix.inds[m][x] != ix.inds[m][x - 1];
      }
      if (boundary) layout.fptr.push_back(x);
    }
  }
  if (g.nnz() > 0) layout.fptr.push_back(g.nnz());
  layout.nfibs = layout.fptr.size() - 1;
  return {std::move(g), std::move(layout)};
}

template std::pair<CooTensor<float>, FiberLayout> build_fiber_layout(const CooTensor<float>&, Mode);
template std::pair<CooTensor<double>, FiberLayout> build_fiber_layout(const CooTensor<double>&,
                                                                      Mode);
template std::pair<GHicooTensor<float>, FiberLayout> build_fiber_layout(const GHicooTensor<float>&,
                                                                        Mode);
template std::pair<GHicooTensor<double>, FiberLayout> build_fiber_layout(
    const GHicooTensor<double>&, Mode);

}  // namespace sptb
