#pragma once

#include <span>
#include <vector>

#include "sptb/coo.hpp"
#include "sptb/hicoo.hpp"
#include "sptb/semisparse.hpp"
#include "sptb/types.hpp"

namespace sptb {

/// Row-major dense matrix.  Factor matrices use the transposed convention:
/// one row per index of the tensor mode, R columns.
template <typename T>
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  T& operator()(std::size_t i, std::size_t r) { return data_[i * cols_ + r]; }
  const T& operator()(std::size_t i, std::size_t r) const { return data_[i * cols_ + r]; }

  std::span<T> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const T> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  std::vector<T>& values() { return data_; }
  const std::vector<T>& values() const { return data_; }

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
    return m;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

template <typename T>
using DenseVector = std::vector<T>;

inline constexpr std::size_t kDefaultDenseCap = 10'000'000;

/// Fully materialised tensor in 64-bit arithmetic, used as a test oracle.
/// Row-major with the last mode fastest.  Construction fails with
/// CapacityError once the element count passes `cap`.
class DenseTensor {
 public:
  explicit DenseTensor(std::vector<Index> dims, std::size_t cap = kDefaultDenseCap);

  const std::vector<Index>& dims() const { return dims_; }
  std::size_t order() const { return dims_.size(); }
  std::size_t size() const { return data_.size(); }

  std::size_t offset(std::span<const Index> coord) const;
  double& at(std::span<const Index> coord) { return data_[offset(coord)]; }
  double at(std::span<const Index> coord) const { return data_[offset(coord)]; }

  std::vector<double>& values() { return data_; }
  const std::vector<double>& values() const { return data_; }

  /// Inverse of offset().
  std::vector<Index> coord(std::size_t offset) const;

 private:
  std::vector<Index> dims_;
  std::vector<double> data_;
};

template <typename T>
DenseTensor to_dense(const CooTensor<T>& t, std::size_t cap = kDefaultDenseCap);

template <typename T>
DenseTensor to_dense(const HicooTensor<T>& t, std::size_t cap = kDefaultDenseCap);

template <typename T>
DenseTensor to_dense(const GHicooTensor<T>& t, std::size_t cap = kDefaultDenseCap);

template <typename T>
DenseTensor to_dense(const SemiSparseTensor<T>& t, std::size_t cap = kDefaultDenseCap);

/// Largest |a - b| divided by the largest |b|; 0 when both are all zero.
double relative_error(std::span<const double> a, std::span<const double> b);

}  // namespace sptb
