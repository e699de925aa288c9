#include "sptb/storage.hpp"

namespace sptb {

namespace {

std::uint64_t blocked_bytes(const BlockedIndex& ix) {
  const std::uint64_t nb = ix.nblocks();
  const std::uint64_t n = ix.size();
  std::uint64_t bytes = sizeof(Offset) * ix.bptr.size();
  for (Mode m = 0; m < ix.order(); ++m) {
    if (ix.compressed[m]) {
      bytes += sizeof(BlockIndex) * nb + sizeof(ElementIndex) * n;
    } else {
      bytes += sizeof(Index) * n;
    }
  }
  return bytes;
}

}  // namespace

template <typename T>
std::uint64_t storage_bytes(const CooTensor<T>& t) {
  return (sizeof(Index) * t.order() + sizeof(T)) * std::uint64_t{t.nnz()};
}

template <typename T>
std::uint64_t storage_bytes(const HicooTensor<T>& t) {
  const std::uint64_t nb = t.nblocks();
  const std::uint64_t nnz = t.nnz();
  return sizeof(Offset) * t.bptr.size() + sizeof(BlockIndex) * t.order() * nb +
         sizeof(ElementIndex) * t.order() * nnz + sizeof(T) * nnz;
}

template <typename T>
std::uint64_t storage_bytes(const GHicooTensor<T>& t) {
  return blocked_bytes(t.index) + sizeof(T) * std::uint64_t{t.nnz()};
}

template <typename T>
std::uint64_t storage_bytes(const SemiSparseTensor<T>& t) {
  std::uint64_t bytes = sizeof(T) * std::uint64_t{t.vals.size()};
  if (const auto* coo = std::get_if<CooFiberIndex>(&t.fibers)) {
    return bytes + sizeof(Index) * coo->inds.size() * std::uint64_t{t.nfibers()};
  }
  return bytes + blocked_bytes(std::get<BlockedIndex>(t.fibers));
}

template std::uint64_t storage_bytes(const CooTensor<float>&);
template std::uint64_t storage_bytes(const CooTensor<double>&);
template std::uint64_t storage_bytes(const HicooTensor<float>&);
template std::uint64_t storage_bytes(const HicooTensor<double>&);
template std::uint64_t storage_bytes(const GHicooTensor<float>&);
template std::uint64_t storage_bytes(const GHicooTensor<double>&);
template std::uint64_t storage_bytes(const SemiSparseTensor<float>&);
template std::uint64_t storage_bytes(const SemiSparseTensor<double>&);

}  // namespace sptb
