#pragma once

#include <span>
#include <vector>

#include "sptb/dense.hpp"
#include "sptb/kernels.hpp"

// Brute-force evaluation of the kernels over every cell of dense operands,
// in 64-bit arithmetic.  Used as the correctness baseline in tests.

namespace sptb {

/// add/sub/mul combine every cell.  div yields x / y where y is nonzero and
/// 0 where both are zero; a nonzero x over a zero y throws DomainError.
DenseTensor oracle_tew(const DenseTensor& x, const DenseTensor& y, ElementwiseOp op);

/// mul scales every cell; add only touches nonzero cells, matching the
/// sparse semantics where absent entries stay absent.
DenseTensor oracle_ts(const DenseTensor& x, ScalarOp op, double scalar);

DenseTensor oracle_ttv(const DenseTensor& x, std::span<const double> v, Mode n);

/// Mode n of the result has size u.cols().
DenseTensor oracle_ttm(const DenseTensor& x, const DenseMatrix<double>& u, Mode n);

/// `factors` lists the N-1 matrices for modes other than n, in mode order.
DenseMatrix<double> oracle_mttkrp(const DenseTensor& x, std::span<const DenseMatrix<double>> factors,
                                  Mode n);

template <typename T>
DenseMatrix<double> to_double(const DenseMatrix<T>& m);

/// Same layout as oracle_mttkrp output, for comparing with relative_error.
template <typename T>
std::vector<double> values_as_double(const DenseMatrix<T>& m);

}  // namespace sptb
