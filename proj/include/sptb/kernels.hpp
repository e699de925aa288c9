#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sptb/coo.hpp"
#include "sptb/dense.hpp"
#include "sptb/fiber.hpp"
#include "sptb/hicoo.hpp"
#include "sptb/semisparse.hpp"

// The five benchmark kernels.
//
// Every kernel is split into a pre-processing stage (`prepare_*`) that sorts
// the input, finds fibers and allocates the output together with its
// indices, and a compute stage (`run_*`) that only fills output values.
// Benchmarks time the compute stage alone.  The one-call wrappers (`tew`,
// `ttv`, ...) run both stages back to back.
//
// Compute stages return instrumented flop counts: one per output entry for
// TEW and TS, two per nonzero for TTV, 2 R per nonzero for TTM and N R per
// nonzero for an order-N MTTKRP.

namespace sptb {

enum class ElementwiseOp { add, sub, mul, div };
enum class ScalarOp { add, mul };

// How MTTKRP resolves concurrent updates to a shared output row.
enum class MttkrpStrategy {
  atomic,      // atomic adds into the output
  privatized,  // one private output per worker, reduced in worker order
};

struct KernelStats {
  std::uint64_t flops = 0;
};

// ---------------------------------------------------------------------------
// TEW: element-wise combination of two tensors with the same dims.
//
// add/sub produce the union of the two patterns, mul the intersection, div
// the pattern of X (every X coordinate must be stored in Y).  Identical
// patterns take a fused single-loop path.

template <class Tensor>
struct TewPlan {
  Tensor out;
  bool same_pattern = false;
  // Position of each output entry in X / Y values, -1 when absent.
  std::vector<std::int64_t> xpos, ypos;
};

template <typename T>
TewPlan<CooTensor<T>> prepare_tew(const CooTensor<T>& x, const CooTensor<T>& y, ElementwiseOp op);
template <typename T>
TewPlan<HicooTensor<T>> prepare_tew(const HicooTensor<T>& x, const HicooTensor<T>& y,
                                    ElementwiseOp op);
template <typename T>
TewPlan<GHicooTensor<T>> prepare_tew(const GHicooTensor<T>& x, const GHicooTensor<T>& y,
                                     ElementwiseOp op);

template <class Tensor>
KernelStats run_tew(TewPlan<Tensor>& plan, std::span<const typename Tensor::value_type> xvals,
                    std::span<const typename Tensor::value_type> yvals, ElementwiseOp op,
                    int workers);

template <class Tensor>
Tensor tew(const Tensor& x, const Tensor& y, ElementwiseOp op, int workers = 0);

// ---------------------------------------------------------------------------
// TS: each stored value combined with a scalar; the pattern is unchanged.

template <class Tensor>
struct TsPlan {
  Tensor out;
};

template <class Tensor>
TsPlan<Tensor> prepare_ts(const Tensor& x);

template <class Tensor>
KernelStats run_ts(TsPlan<Tensor>& plan, std::span<const typename Tensor::value_type> xvals,
                   ScalarOp op, typename Tensor::value_type scalar, int workers);

template <class Tensor>
Tensor ts(const Tensor& x, ScalarOp op, typename Tensor::value_type scalar, int workers = 0);

// ---------------------------------------------------------------------------
// TTV: contracts mode n with a dense vector.  The output has order N-1 and
// exactly one entry per mode-n fiber of X, allocated up front.

template <class Tensor>
struct TtvPlan {
  Tensor sorted;  // input reordered so mode-n fibers are contiguous
  FiberLayout layout;
  Tensor out;
};

template <typename T>
TtvPlan<CooTensor<T>> prepare_ttv(const CooTensor<T>& x, Mode n);

/// gHiCOO input; mode n must be uncompressed.  The output keeps the input's
/// blocks and compressed modes.
template <typename T>
TtvPlan<GHicooTensor<T>> prepare_ttv(const GHicooTensor<T>& x, Mode n);

template <class Tensor>
KernelStats run_ttv(TtvPlan<Tensor>& plan, std::span<const typename Tensor::value_type> v,
                    int workers);

template <class Tensor>
Tensor ttv(const Tensor& x, std::span<const typename Tensor::value_type> v, Mode n,
           int workers = 0);

// ---------------------------------------------------------------------------
// TTM: n-mode product with U (dims[n] rows, R columns).  The output is
// semi-sparse with dense mode n of size R and one chunk per mode-n fiber:
// sCOO for COO input, sHiCOO for gHiCOO input.

template <class Tensor>
struct TtmPlan {
  Tensor sorted;
  FiberLayout layout;
  SemiSparseTensor<typename Tensor::value_type> out;
};

template <typename T>
TtmPlan<CooTensor<T>> prepare_ttm(const CooTensor<T>& x, Mode n, std::size_t rank);
template <typename T>
TtmPlan<GHicooTensor<T>> prepare_ttm(const GHicooTensor<T>& x, Mode n, std::size_t rank);

template <class Tensor>
KernelStats run_ttm(TtmPlan<Tensor>& plan, const DenseMatrix<typename Tensor::value_type>& u,
                    int workers);

template <class Tensor>
SemiSparseTensor<typename Tensor::value_type> ttm(
    const Tensor& x, const DenseMatrix<typename Tensor::value_type>& u, Mode n, int workers = 0);

// ---------------------------------------------------------------------------
// MTTKRP: out(i_n, r) += val * prod_{m != n} factor_m(i_m, r).
//
// `factors` holds the N-1 matrices for modes other than n, in mode order.
// `out` must be dims[n] x R; it is zeroed inside the compute stage.  COO
// parallelizes over nonzeros, HiCOO over blocks using per-block row bases.

struct MttkrpOptions {
  MttkrpStrategy strategy = MttkrpStrategy::atomic;
  int workers = 0;
};

template <class Tensor>
DenseMatrix<typename Tensor::value_type> prepare_mttkrp(
    const Tensor& x, std::span<const DenseMatrix<typename Tensor::value_type>> factors, Mode n);

template <typename T>
KernelStats run_mttkrp(const CooTensor<T>& x, std::span<const DenseMatrix<T>> factors, Mode n,
                       DenseMatrix<T>& out, MttkrpOptions opt = {});
template <typename T>
KernelStats run_mttkrp(const HicooTensor<T>& x, std::span<const DenseMatrix<T>> factors, Mode n,
                       DenseMatrix<T>& out, MttkrpOptions opt = {});
template <typename T>
KernelStats run_mttkrp(const GHicooTensor<T>& x, std::span<const DenseMatrix<T>> factors, Mode n,
                       DenseMatrix<T>& out, MttkrpOptions opt = {});

template <class Tensor>
DenseMatrix<typename Tensor::value_type> mttkrp(
    const Tensor& x, std::span<const DenseMatrix<typename Tensor::value_type>> factors, Mode n,
    MttkrpOptions opt = {});

}  // namespace sptb
