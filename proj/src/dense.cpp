#include "sptb/dense.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sptb/error.hpp"

namespace sptb {

DenseTensor::DenseTensor(std::vector<Index> dims, std::size_t cap) : dims_(std::move(dims)) {
  std::size_t n = 1;
  for (Index d : dims_) {
    if (d != 0 && n > cap / d) {
      throw CapacityError("dense tensor would exceed " + std::to_string(cap) + " elements");
    }
    n *= d;
  }
  if (n > cap) throw CapacityError("dense tensor would exceed " + std::to_string(cap) + " elements");
  data_.assign(n, 0.0);
}

std::size_t DenseTensor::offset(std::span<const Index> coord) const {
  std::size_t off = 0;
  for (std::size_t m = 0; m < dims_.size(); ++m) off = off * dims_[m] + coord[m];
  return off;
}

std::vector<Index> DenseTensor::coord(std::size_t offset) const {
  std::vector<Index> c(dims_.size());
  for (std::size_t m = dims_.size(); m-- > 0;) {
    c[m] = static_cast<Index>(offset % dims_[m]);
    offset /= dims_[m];
  }
  return c;
}

template <typename T>
DenseTensor to_dense(const CooTensor<T>& t, std::size_t cap) {
  DenseTensor d(t.dims, cap);
  for (std::size_t x = 0; x < t.nnz(); ++x) d.at(t.coord(x)) += t.vals[x];
  return d;
}

template <typename T>
DenseTensor to_dense(const HicooTensor<T>& t, std::size_t cap) {
  DenseTensor d(t.dims, cap);
  std::vector<Index> c(t.order());
  for (std::size_t b = 0; b < t.nblocks(); ++b) {
    for (Offset x = t.bptr[b]; x < t.bptr[b + 1]; ++x) {
      for (Mode m = 0; m < t.order(); ++m) c[m] = t.index(m, b, x);
      d.at(c) += t.vals[x];
    }
  }
  return d;
}

template <typename T>
DenseTensor to_dense(const GHicooTensor<T>& t, std::size_t cap) {
  DenseTensor d(t.dims, cap);
  std::vector<Index> c(t.order());
  for (std::size_t b = 0; b < t.nblocks(); ++b) {
    for (Offset x = t.index.bptr[b]; x < t.index.bptr[b + 1]; ++x) {
      for (Mode m = 0; m < t.order(); ++m) c[m] = t.index.index(m, b, x);
      d.at(c) += t.vals[x];
    }
  }
  return d;
}

template <typename T>
DenseTensor to_dense(const SemiSparseTensor<T>& t, std::size_t cap) {
  DenseTensor d(t.dims, cap);
  const std::size_t chunk = t.chunk_size();
  std::vector<Index> c(t.order());
  std::vector<Index> dense_dims;
  for (Mode m : t.dense_modes) dense_dims.push_back(t.dims[m]);

  auto place = [&](std::size_t block, std::size_t f) {
    for (std::size_t s = 0; s < t.sparse_modes.size(); ++s) {
      c[t.sparse_modes[s]] = t.sparse_index(s, block, f);
    }
    for (std::size_t k = 0; k < chunk; ++k) {
      std::size_t rem = k;
      for (std::size_t j = dense_dims.size(); j-- > 0;) {
        c[t.dense_modes[j]] = static_cast<Index>(rem % dense_dims[j]);
        rem /= dense_dims[j];
      }
      d.at(c) += t.vals[f * chunk + k];
    }
  };

  if (const auto* ix = std::get_if<BlockedIndex>(&t.fibers)) {
    for (std::size_t b = 0; b < ix->nblocks(); ++b) {
      for (Offset f = ix->bptr[b]; f < ix->bptr[b + 1]; ++f) place(b, f);
    }
  } else {
    for (std::size_t f = 0; f < t.nfibers(); ++f) place(0, f);
  }
  return d;
}

double relative_error(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double diff = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff = std::max(diff, std::abs(a[i] - b[i]));
    scale = std::max(scale, std::abs(b[i]));
  }
  if (diff == 0.0) return 0.0;
  return scale > 0.0 ? diff / scale : std::numeric_limits<double>::infinity();
}

template DenseTensor to_dense(const CooTensor<float>&, std::size_t);
template DenseTensor to_dense(const CooTensor<double>&, std::size_t);
template DenseTensor to_dense(const HicooTensor<float>&, std::size_t);
template DenseTensor to_dense(const HicooTensor<double>&, std::size_t);
template DenseTensor to_dense(const GHicooTensor<float>&, std::size_t);
template DenseTensor to_dense(const GHicooTensor<double>&, std::size_t);
template DenseTensor to_dense(const SemiSparseTensor<float>&, std::size_t);
template DenseTensor to_dense(const SemiSparseTensor<double>&, std::size_t);

}  // namespace sptb
