#pragma once

#include <optional>
#include <vector>

#include "sptb/coo.hpp"
#include "sptb/types.hpp"

namespace sptb {

inline constexpr std::uint32_t kMaxBlockSize = 256;

/// Throws ConfigError unless `block` is a power of two no larger than 256.
void check_block_size(std::uint32_t block);

/// log2 of a valid block size.
unsigned block_bits(std::uint32_t block);

/// Hierarchical coordinate tensor: nonzeros grouped into B^N blocks, each
/// block addressed by 32-bit block coordinates and each nonzero by 8-bit
/// offsets inside its block.  Blocks appear in Z-curve order.
template <typename T>
struct HicooTensor {
  using value_type = T;

  std::vector<Index> dims;
  std::uint32_t block_size = 0;
  std::vector<Offset> bptr{0};
  std::vector<std::vector<BlockIndex>> binds;
  std::vector<std::vector<ElementIndex>> einds;
  std::vector<T> vals;

  std::size_t order() const { return dims.size(); }
  std::size_t nnz() const { return vals.size(); }
  std::size_t nblocks() const { return bptr.empty() ? 0 : bptr.size() - 1; }
  Index index(Mode m, std::size_t block, std::size_t x) const {
    return binds[m][block] * block_size + einds[m][x];
  }
};

/// Two-level index where only some modes are blocked.  For a compressed
/// mode m, binds[m] / einds[m] are populated and inds[m] is empty; for an
/// uncompressed mode it is the other way round.  Shared by gHiCOO tensors
/// and by the fiber index of sHiCOO semi-sparse tensors.
struct BlockedIndex {
  std::uint32_t block_size = 0;
  std::vector<char> compressed;
  std::vector<Offset> bptr{0};
  std::vector<std::vector<BlockIndex>> binds;
  std::vector<std::vector<ElementIndex>> einds;
  std::vector<std::vector<Index>> inds;

  std::size_t order() const { return compressed.size(); }
  std::size_t nblocks() const { return bptr.empty() ? 0 : bptr.size() - 1; }
  std::size_t size() const { return bptr.empty() ? 0 : static_cast<std::size_t>(bptr.back()); }
  Index index(Mode m, std::size_t block, std::size_t x) const {
    return compressed[m] ? binds[m][block] * block_size + einds[m][x] : inds[m][x];
  }
  ModeOrder compressed_modes() const;
  ModeOrder uncompressed_modes() const;
};

/// HiCOO with a chosen subset of modes compressed.  Nonzeros are ordered by
/// the Z-curve over compressed modes, ties broken lexicographically over the
/// uncompressed modes in `tail_order`.
template <typename T>
struct GHicooTensor {
  using value_type = T;

  std::vector<Index> dims;
  BlockedIndex index;
  ModeOrder tail_order;
  std::vector<T> vals;

  std::size_t order() const { return dims.size(); }
  std::size_t nnz() const { return vals.size(); }
  std::size_t nblocks() const { return index.nblocks(); }
  std::uint32_t block_size() const { return index.block_size; }
};

template <typename T>
HicooTensor<T> to_hicoo(const CooTensor<T>& t, std::uint32_t block);

/// Blocks the nonzeros over `compressed_modes` only.  When `fiber_mode` is
/// given it must be uncompressed and is placed last in the tie-break order,
/// which makes its fibers contiguous.
template <typename T>
GHicooTensor<T> to_ghicoo(const CooTensor<T>& t, const ModeOrder& compressed_modes,
                          std::uint32_t block, std::optional<Mode> fiber_mode = std::nullopt);

template <typename T>
CooTensor<T> from_hicoo(const HicooTensor<T>& h);

template <typename T>
CooTensor<T> from_hicoo(const GHicooTensor<T>& h);

/// Reinterprets a gHiCOO tensor with every mode compressed as plain HiCOO.
template <typename T>
HicooTensor<T> as_hicoo(GHicooTensor<T> g);

}  // namespace sptb
