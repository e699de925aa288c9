#pragma once

#include <span>
#include <utility>
#include <vector>

#include "sptb/types.hpp"

namespace sptb {

struct SortState {
  enum class Kind { unsorted, lexicographic, morton };

  Kind kind = Kind::unsorted;
  ModeOrder mode_order;         // lexicographic: most significant mode first
  std::uint32_t block_size = 0;  // morton

  static SortState lexicographic(ModeOrder order) {
    return {Kind::lexicographic, std::move(order), 0};
  }
  static SortState morton(std::uint32_t block) { return {Kind::morton, {}, block}; }

  bool operator==(const SortState&) const = default;
};

/// Coordinate-format sparse tensor of arbitrary order.
///
/// One index array per mode plus a value array, all of length nnz.  Fields
/// are public so that conversions and kernels can work on the raw arrays;
/// `validate()` checks the structural invariants of hand-assembled tensors.
template <typename T>
struct CooTensor {
  using value_type = T;

  std::vector<Index> dims;
  std::vector<std::vector<Index>> inds;
  std::vector<T> vals;
  SortState sort_state;

  CooTensor() = default;
  explicit CooTensor(std::vector<Index> d)
      : dims(std::move(d)), inds(dims.size()) {}

  std::size_t order() const { return dims.size(); }
  std::size_t nnz() const { return vals.size(); }

  std::vector<Index> coord(std::size_t x) const {
    std::vector<Index> c(order());
    for (Mode m = 0; m < order(); ++m) c[m] = inds[m][x];
    return c;
  }

  void reserve(std::size_t n) {
    for (auto& a : inds) a.reserve(n);
    vals.reserve(n);
  }

  void push_back(std::span<const Index> c, T v) {
    for (Mode m = 0; m < order(); ++m) inds[m].push_back(c[m]);
    vals.push_back(v);
  }
};

template <typename T>
using Entry = std::pair<std::vector<Index>, T>;

/// Builds a tensor from (coordinate, value) pairs.  The result is sorted in
/// natural mode order; duplicate coordinates are summed and explicit zeros
/// are kept.  Throws BoundsError naming the mode and entry on a bad index.
template <typename T>
CooTensor<T> coo_from_entries(std::span<const Entry<T>> entries, std::vector<Index> dims);

/// Same as coo_from_entries, but takes ownership of per-mode index arrays.
/// Duplicates are summed in input order, so the result is deterministic.
template <typename T>
CooTensor<T> coo_from_arrays(std::vector<Index> dims, std::vector<std::vector<Index>> inds,
                             std::vector<T> vals);

/// Stable sort of the nonzeros by index tuples permuted by `mode_order`.
template <typename T>
CooTensor<T> lex_sort(const CooTensor<T>& t, const ModeOrder& mode_order);

/// Permutation that lists the nonzeros of `t` in lexicographic order of
/// `mode_order`.  Identity when `t` is already sorted that way.
template <typename T>
std::vector<std::size_t> sort_permutation(const CooTensor<T>& t, const ModeOrder& mode_order);

/// Natural order 0, 1, ..., order-1.
ModeOrder natural_order(std::size_t order);

/// All modes except `n` in ascending order, followed by `n`.
ModeOrder order_with_last(std::size_t order, Mode n);

/// Throws ConfigError unless `order` is a permutation of 0..n-1.
void check_permutation(const ModeOrder& order, std::size_t n);

/// Coordinate -> value equality, ignoring nonzero ordering.
template <typename T>
bool same_entries(const CooTensor<T>& a, const CooTensor<T>& b);

}  // namespace sptb
