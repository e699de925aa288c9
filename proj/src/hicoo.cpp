#include "sptb/hicoo.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <string>

#include "sptb/error.hpp"
#include "sptb/morton.hpp"

namespace sptb {

void check_block_size(std::uint32_t block) {
  if (block == 0 || !std::has_single_bit(block) || block > kMaxBlockSize) {
    throw ConfigError("block size " + std::to_string(block) +
                      " must be a power of two no larger than " + std::to_string(kMaxBlockSize));
  }
}

unsigned block_bits(std::uint32_t block) {
  check_block_size(block);
  return static_cast<unsigned>(std::countr_zero(block));
}

ModeOrder BlockedIndex::compressed_modes() const {
  ModeOrder out;
  for (Mode m = 0; m < order(); ++m) {
    if (compressed[m]) out.push_back(m);
  }
  return out;
}

ModeOrder BlockedIndex::uncompressed_modes() const {
  ModeOrder out;
  for (Mode m = 0; m < order(); ++m) {
    if (!compressed[m]) out.push_back(m);
  }
  return out;
}

template <typename T>
GHicooTensor<T> to_ghicoo(const CooTensor<T>& t, const ModeOrder& compressed_modes,
                          std::uint32_t block, std::optional<Mode> fiber_mode) {
  const unsigned bits = block_bits(block);
  const std::size_t order = t.order();
  if (compressed_modes.empty()) throw ConfigError("gHiCOO needs at least one compressed mode");

  std::vector<char> compressed(order, 0);
  for (Mode m : compressed_modes) {
    if (m >= order) throw ConfigError("compressed mode " + std::to_string(m) + " out of range");
    if (compressed[m]) throw ConfigError("compressed mode " + std::to_string(m) + " repeated");
    compressed[m] = 1;
  }
  ModeOrder cmodes;
  ModeOrder tail;
  for (Mode m = 0; m < order; ++m) {
    if (compressed[m]) {
      cmodes.push_back(m);
    } else if (!fiber_mode || m != *fiber_mode) {
      tail.push_back(m);
    }
  }
  if (fiber_mode) {
    if (*fiber_mode >= order || compressed[*fiber_mode]) {
      throw ConfigError("fiber mode " + std::to_string(*fiber_mode) + " must be uncompressed");
    }
    tail.push_back(*fiber_mode);
  }

  std::vector<std::size_t> perm(t.nnz());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::stable_sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
    if (morton_less(t.inds, cmodes, a, b)) return true;
    if (morton_less(t.inds, cmodes, b, a)) return false;
    for (Mode m : tail) {
      if (t.inds[m][a] != t.inds[m][b]) return t.inds[m][a] < t.inds[m][b];
    }
    return false;
  });

  GHicooTensor<T> g;
  g.dims = t.dims;
  g.tail_order = tail;
  BlockedIndex& ix = g.index;
  ix.block_size = block;
  ix.compressed = compressed;
  ix.binds.resize(order);
  ix.einds.resize(order);
  ix.inds.resize(order);
  ix.bptr.assign(1, 0);
  for (Mode m = 0; m < order; ++m) {
    if (compressed[m]) {
      ix.einds[m].reserve(t.nnz());
    } else {
      ix.inds[m].reserve(t.nnz());
    }
  }
  g.vals.reserve(t.nnz());

  const Index elem_mask = block - 1;
  for (std::size_t k = 0; k < perm.size(); ++k) {
    const std::size_t x = perm[k];
    bool new_block = k == 0;
    if (!new_block) {
      const std::size_t prev = perm[k - 1];
      for (Mode m : cmodes) {
        if ((t.inds[m][x] >> bits) != (t.inds[m][prev] >> bits)) {
          new_block = true;
          break;
        }
      }
    }
    if (new_block) {
      if (k > 0) ix.bptr.push_back(k);
      for (Mode m : cmodes) ix.binds[m].push_back(t.inds[m][x] >> bits);
    }
    for (Mode m = 0; m < order; ++m) {
      if (compressed[m]) {
        ix.einds[m].push_back(static_cast<ElementIndex>(t.inds[m][x] & elem_mask));
      } else {
        ix.inds[m].push_back(t.inds[m][x]);
      }
    }
    g.vals.push_back(t.vals[x]);
  }
  if (!perm.empty()) ix.bptr.push_back(perm.size());
  return g;
}

template <typename T>
HicooTensor<T> as_hicoo(GHicooTensor<T> g) {
  for (char c : g.index.compressed) {
    if (!c) throw ConfigError("gHiCOO tensor has an uncompressed mode");
  }
  HicooTensor<T> h;
  h.dims = std::move(g.dims);
  h.block_size = g.index.block_size;
  h.bptr = std::move(g.index.bptr);
  h.binds = std::move(g.index.binds);
  h.einds = std::move(g.index.einds);
  h.vals = std::move(g.vals);
  return h;
}

template <typename T>
HicooTensor<T> to_hicoo(const CooTensor<T>& t, std::uint32_t block) {
  return as_hicoo(to_ghicoo(t, natural_order(t.order()), block));
}

template <typename T>
CooTensor<T> from_hicoo(const HicooTensor<T>& h) {
  CooTensor<T> t(h.dims);
  t.reserve(h.nnz());
  for (std::size_t b = 0; b < h.nblocks(); ++b) {
    for (Offset x = h.bptr[b]; x < h.bptr[b + 1]; ++x) {
      for (Mode m = 0; m < h.order(); ++m) t.inds[m].push_back(h.index(m, b, x));
    }
  }
  t.vals = h.vals;
  t.sort_state = SortState::morton(h.block_size);
  return lex_sort(t, natural_order(t.order()));
}

template <typename T>
CooTensor<T> from_hicoo(const GHicooTensor<T>& h) {
  CooTensor<T> t(h.dims);
  t.reserve(h.nnz());
  for (std::size_t b = 0; b < h.nblocks(); ++b) {
    for (Offset x = h.index.bptr[b]; x < h.index.bptr[b + 1]; ++x) {
      for (Mode m = 0; m < h.order(); ++m) t.inds[m].push_back(h.index.index(m, b, x));
    }
  }
  t.vals = h.vals;
  return lex_sort(t, natural_order(t.order()));
}

#define SPTB_INSTANTIATE(T)                                                                  \
  template HicooTensor<T> to_hicoo<T>(const CooTensor<T>&, std::uint32_t);                   \
  template GHicooTensor<T> to_ghicoo<T>(const CooTensor<T>&, const ModeOrder&, std::uint32_t, \
                                        std::optional<Mode>);                                \
  template CooTensor<T> from_hicoo<T>(const HicooTensor<T>&);                                \
  template CooTensor<T> from_hicoo<T>(const GHicooTensor<T>&);                               \
  template HicooTensor<T> as_hicoo<T>(GHicooTensor<T>);

SPTB_INSTANTIATE(float)
SPTB_INSTANTIATE(double)

}  // namespace sptb
