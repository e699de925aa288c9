#pragma once

#include <cstdint>

#include "sptb/coo.hpp"
#include "sptb/hicoo.hpp"
#include "sptb/semisparse.hpp"

namespace sptb {

// Exact byte counts of the index, pointer and value arrays at their declared
// widths: 32-bit indices, 8-bit element offsets, 64-bit block pointers and
// sizeof(T) values.  An N-th order single-precision COO tensor takes
// 4 (N + 1) nnz bytes.

template <typename T>
std::uint64_t storage_bytes(const CooTensor<T>& t);

template <typename T>
std::uint64_t storage_bytes(const HicooTensor<T>& t);

template <typename T>
std::uint64_t storage_bytes(const GHicooTensor<T>& t);

template <typename T>
std::uint64_t storage_bytes(const SemiSparseTensor<T>& t);

}  // namespace sptb
