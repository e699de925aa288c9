#include "sptb/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <string>
#include <type_traits>

#include "sptb/error.hpp"
#include "sptb/morton.hpp"
#include "sptb/parallel.hpp"

namespace sptb {

namespace {

int resolve(int workers) { return workers > 0 ? workers : default_workers(); }

std::string coord_string(std::span<const Index> c) {
  std::string s = "(";
  for (std::size_t m = 0; m < c.size(); ++m) {
    if (m) s += ",";
    s += std::to_string(c[m]);
  }
  return s + ")";
}

void check_same_dims(const std::vector<Index>& a, const std::vector<Index>& b) {
  if (a != b) throw ShapeError("element-wise operands have different dims");
}

// Coordinates of every nonzero, in stored order.
template <typename T>
std::vector<std::vector<Index>> expand(const HicooTensor<T>& h) {
  std::vector<std::vector<Index>> inds(h.order(), std::vector<Index>(h.nnz()));
  for (std::size_t b = 0; b < h.nblocks(); ++b) {
    for (Offset x = h.bptr[b]; x < h.bptr[b + 1]; ++x) {
      for (Mode m = 0; m < h.order(); ++m) inds[m][x] = h.index(m, b, x);
    }
  }
  return inds;
}

template <typename T>
std::vector<std::vector<Index>> expand(const GHicooTensor<T>& h) {
  std::vector<std::vector<Index>> inds(h.order(), std::vector<Index>(h.nnz()));
  for (std::size_t b = 0; b < h.nblocks(); ++b) {
    for (Offset x = h.index.bptr[b]; x < h.index.bptr[b + 1]; ++x) {
      for (Mode m = 0; m < h.order(); ++m) inds[m][x] = h.index.index(m, b, x);
    }
  }
  return inds;
}

std::size_t block_of(const std::vector<Offset>& bptr, std::size_t x) {
  auto it = std::upper_bound(bptr.begin(), bptr.end(), Offset{x});
  return static_cast<std::size_t>(it - bptr.begin()) - 1;
}

template <typename T>
std::vector<Index> entry_coord(const CooTensor<T>& t, std::size_t x) {
  return t.coord(x);
}

template <typename T>
std::vector<Index> entry_coord(const HicooTensor<T>& t, std::size_t x) {
  const std::size_t b = block_of(t.bptr, x);
  std::vector<Index> c(t.order());
  for (Mode m = 0; m < t.order(); ++m) c[m] = t.index(m, b, x);
  return c;
}

template <typename T>
std::vector<Index> entry_coord(const GHicooTensor<T>& t, std::size_t x) {
  const std::size_t b = block_of(t.index.bptr, x);
  std::vector<Index> c(t.order());
  for (Mode m = 0; m < t.order(); ++m) c[m] = t.index.index(m, b, x);
  return c;
}

// Walks two patterns that share one total order.  `cmp(i, j)` compares the
// i-th nonzero of X with the j-th of Y (both in sorted position) and returns
// <0, 0 or >0.  Emits the output pattern as value positions.
template <class Cmp>
void merge_patterns(const std::vector<std::size_t>& px, const std::vector<std::size_t>& py,
                    Cmp cmp, ElementwiseOp op, std::vector<std::int64_t>& xpos,
                    std::vector<std::int64_t>& ypos, std::vector<std::vector<Index>> const& xinds) {
  std::size_t i = 0;
  std::size_t j = 0;
  auto emit = [&](std::int64_t a, std::int64_t b) {
    xpos.push_back(a);
    ypos.push_back(b);
  };
  while (i < px.size() || j < py.size()) {
    int c;
    if (i == px.size()) {
      c = 1;
    } else if (j == py.size()) {
      c = -1;
    } else {
      c = cmp(px[i], py[j]);
    }
    if (c == 0) {
      emit(static_cast<std::int64_t>(px[i]), static_cast<std::int64_t>(py[j]));
      ++i;
      ++j;
      continue;
    }
    if (c < 0) {
      switch (op) {
        case ElementwiseOp::add:
        case ElementwiseOp::sub:
          emit(static_cast<std::int64_t>(px[i]), -1);
          break;
        case ElementwiseOp::mul:
          break;
        case ElementwiseOp::div: {
          std::vector<Index> c0(xinds.size());
          for (Mode m = 0; m < xinds.size(); ++m) c0[m] = xinds[m][px[i]];
          throw DomainError("division by an element absent from the divisor at " +
                            coord_string(c0));
        }
      }
      ++i;
    } else {
      if (op == ElementwiseOp::add || op == ElementwiseOp::sub) {
        emit(-1, static_cast<std::int64_t>(py[j]));
      }
      ++j;
    }
  }
}

// Output index arrays for a merged pattern, coordinates taken from whichever
// operand holds each entry.
std::vector<std::vector<Index>> merged_coords(const std::vector<std::vector<Index>>& xi,
                                              const std::vector<std::vector<Index>>& yi,
                                              const std::vector<std::int64_t>& xpos,
                                              const std::vector<std::int64_t>& ypos) {
  std::vector<std::vector<Index>> out(xi.size(), std::vector<Index>(xpos.size()));
  for (std::size_t k = 0; k < xpos.size(); ++k) {
    for (Mode m = 0; m < xi.size(); ++m) {
      out[m][k] = xpos[k] >= 0 ? xi[m][xpos[k]] : yi[m][ypos[k]];
    }
  }
  return out;
}

template <typename T>
T apply(ElementwiseOp op, T a, T b) {
  switch (op) {
    case ElementwiseOp::add:
      return a + b;
    case ElementwiseOp::sub:
      return a - b;
    case ElementwiseOp::mul:
      return a * b;
    case ElementwiseOp::div:
      return a / b;
  }
  return T{};
}

// Comparison over the gHiCOO order: Z-curve on compressed modes, then
// lexicographic on the tail.
int blocked_compare(const std::vector<std::vector<Index>>& a, std::size_t i,
                    const std::vector<std::vector<Index>>& b, std::size_t j, const ModeOrder& cmodes,
                    const ModeOrder& tail) {
  Mode lead = cmodes[0];
  Index diff = a[lead][i] ^ b[lead][j];
  for (std::size_t k = 1; k < cmodes.size(); ++k) {
    const Index d = a[cmodes[k]][i] ^ b[cmodes[k]][j];
    if (less_msb(diff, d)) {
      lead = cmodes[k];
      diff = d;
    }
  }
  if (diff != 0) return a[lead][i] < b[lead][j] ? -1 : 1;
  for (Mode m : tail) {
    if (a[m][i] != b[m][j]) return a[m][i] < b[m][j] ? -1 : 1;
  }
  return 0;
}

}  // namespace

// ---------------------------------------------------------------------------
// TEW

template <typename T>
TewPlan<CooTensor<T>> prepare_tew(const CooTensor<T>& x, const CooTensor<T>& y, ElementwiseOp op) {
  check_same_dims(x.dims, y.dims);
  TewPlan<CooTensor<T>> plan;
  if (x.inds == y.inds) {
    plan.same_pattern = true;
    plan.out = x;
    return plan;
  }
  const ModeOrder order = x.sort_state.kind == SortState::Kind::lexicographic
                              ? x.sort_state.mode_order
                              : natural_order(x.order());
  const auto px = sort_permutation(x, order);
  const auto py = sort_permutation(y, order);
  auto cmp = [&](std::size_t i, std::size_t j) {
    for (Mode m : order) {
      if (x.inds[m][i] != y.inds[m][j]) return x.inds[m][i] < y.inds[m][j] ? -1 : 1;
    }
    return 0;
  };
  merge_patterns(px, py, cmp, op, plan.xpos, plan.ypos, x.inds);
  plan.out = CooTensor<T>(x.dims);
  plan.out.inds = merged_coords(x.inds, y.inds, plan.xpos, plan.ypos);
  plan.out.vals.assign(plan.xpos.size(), T{});
  plan.out.sort_state = SortState::lexicographic(order);
  return plan;
}

template <typename T>
TewPlan<HicooTensor<T>> prepare_tew(const HicooTensor<T>& x, const HicooTensor<T>& y,
                                    ElementwiseOp op) {
  check_same_dims(x.dims, y.dims);
  if (x.block_size != y.block_size) throw ConfigError("HiCOO operands use different block sizes");
  TewPlan<HicooTensor<T>> plan;
  if (x.bptr == y.bptr && x.binds == y.binds && x.einds == y.einds) {
    plan.same_pattern = true;
    plan.out = x;
    return plan;
  }
  const auto xi = expand(x);
  const auto yi = expand(y);
  std::vector<std::size_t> px(x.nnz()), py(y.nnz());
  for (std::size_t k = 0; k < px.size(); ++k) px[k] = k;
  for (std::size_t k = 0; k < py.size(); ++k) py[k] = k;
  const ModeOrder all = natural_order(x.order());
  const ModeOrder none;
  auto cmp = [&](std::size_t i, std::size_t j) { return blocked_compare(xi, i, yi, j, all, none); };
  merge_patterns(px, py, cmp, op, plan.xpos, plan.ypos, xi);
  CooTensor<T> merged(x.dims);
  merged.inds = merged_coords(xi, yi, plan.xpos, plan.ypos);
  merged.vals.assign(plan.xpos.size(), T{});
  // Already in Z-curve order, so blocking keeps the merged positions.
  plan.out = to_hicoo(merged, x.block_size);
  return plan;
}

template <typename T>
TewPlan<GHicooTensor<T>> prepare_tew(const GHicooTensor<T>& x, const GHicooTensor<T>& y,
                                     ElementwiseOp op) {
  check_same_dims(x.dims, y.dims);
  if (x.index.block_size != y.index.block_size || x.index.compressed != y.index.compressed ||
      x.tail_order != y.tail_order) {
    throw ConfigError("gHiCOO operands use different block sizes or compressed modes");
  }
  TewPlan<GHicooTensor<T>> plan;
  if (x.index.bptr == y.index.bptr && x.index.binds == y.index.binds &&
      x.index.einds == y.index.einds && x.index.inds == y.index.inds) {
    plan.same_pattern = true;
    plan.out = x;
    return plan;
  }
  const auto xi = expand(x);
  const auto yi = expand(y);
  std::vector<std::size_t> px(x.nnz()), py(y.nnz());
  for (std::size_t k = 0; k < px.size(); ++k) px[k] = k;
  for (std::size_t k = 0; k < py.size(); ++k) py[k] = k;
  const ModeOrder cmodes = x.index.compressed_modes();
  auto cmp = [&](std::size_t i, std::size_t j) {
    return blocked_compare(xi, i, yi, j, cmodes, x.tail_order);
  };
  merge_patterns(px, py, cmp, op, plan.xpos, plan.ypos, xi);
  CooTensor<T> merged(x.dims);
  merged.inds = merged_coords(xi, yi, plan.xpos, plan.ypos);
  merged.vals.assign(plan.xpos.size(), T{});
  std::optional<Mode> last;
  if (!x.tail_order.empty()) last = x.tail_order.back();
  plan.out = to_ghicoo(merged, cmodes, x.index.block_size, last);
  return plan;
}

template <class Tensor>
KernelStats run_tew(TewPlan<Tensor>& plan, std::span<const typename Tensor::value_type> xvals,
                    std::span<const typename Tensor::value_type> yvals, ElementwiseOp op,
                    int workers) {
  using T = typename Tensor::value_type;
  const std::int64_t n = static_cast<std::int64_t>(plan.out.vals.size());
  T* out = plan.out.vals.data();
  std::uint64_t flops = 0;
  int zero_div = 0;
  const int w = resolve(workers);

  if (plan.same_pattern) {
    if (xvals.size() != plan.out.vals.size() || yvals.size() != plan.out.vals.size()) {
      throw ShapeError("value arrays do not match the planned pattern");
    }
#pragma omp parallel for num_threads(w) schedule(static) reduction(+ : flops) reduction(|| : zero_div)
    for (std::int64_t i = 0; i < n; ++i) {
      if (op == ElementwiseOp::div && yvals[i] == T{}) zero_div = 1;
      out[i] = apply(op, xvals[i], yvals[i]);
      flops += 1;
    }
  } else {
    const std::int64_t* xp = plan.xpos.data();
    const std::int64_t* yp = plan.ypos.data();
#pragma omp parallel for num_threads(w) schedule(static) reduction(+ : flops) reduction(|| : zero_div)
    for (std::int64_t i = 0; i < n; ++i) {
      const T a = xp[i] >= 0 ? xvals[xp[i]] : T{};
      const T b = yp[i] >= 0 ? yvals[yp[i]] : T{};
      if (op == ElementwiseOp::div && b == T{}) zero_div = 1;
      out[i] = apply(op, a, b);
      flops += 1;
    }
  }

  if (zero_div) {
    for (std::int64_t i = 0; i < n; ++i) {
      const T b = plan.same_pattern ? yvals[i] : (plan.ypos[i] >= 0 ? yvals[plan.ypos[i]] : T{});
      if (b == T{}) {
        throw DomainError("division by zero at " + coord_string(entry_coord(plan.out, i)));
      }
    }
  }
  return {flops};
}

template <class Tensor>
Tensor tew(const Tensor& x, const Tensor& y, ElementwiseOp op, int workers) {
  auto plan = prepare_tew(x, y, op);
  run_tew(plan, std::span(x.vals), std::span(y.vals), op, workers);
  return std::move(plan.out);
}

// ---------------------------------------------------------------------------
// TS

template <class Tensor>
TsPlan<Tensor> prepare_ts(const Tensor& x) {
  return {x};
}

template <class Tensor>
KernelStats run_ts(TsPlan<Tensor>& plan, std::span<const typename Tensor::value_type> xvals,
                   ScalarOp op, typename Tensor::value_type scalar, int workers) {
  using T = typename Tensor::value_type;
  if (xvals.size() != plan.out.vals.size()) throw ShapeError("value array does not match the plan");
  const std::int64_t n = static_cast<std::int64_t>(xvals.size());
  T* out = plan.out.vals.data();
  std::uint64_t flops = 0;
  const int w = resolve(workers);
  if (op == ScalarOp::add) {
#pragma omp parallel for num_threads(w) schedule(static) reduction(+ : flops)
    for (std::int64_t i = 0; i < n; ++i) {
      out[i] = xvals[i] + scalar;
      flops += 1;
    }
  } else {
#pragma omp parallel for num_threads(w) schedule(static) reduction(+ : flops)
    for (std::int64_t i = 0; i < n; ++i) {
      out[i] = xvals[i] * scalar;
      flops += 1;
    }
  }
  return {flops};
}

template <class Tensor>
Tensor ts(const Tensor& x, ScalarOp op, typename Tensor::value_type scalar, int workers) {
  auto plan = prepare_ts(x);
  run_ts(plan, std::span(x.vals), op, scalar, workers);
  return std::move(plan.out);
}

// ---------------------------------------------------------------------------
// Fiber-based kernels (TTV, TTM)

namespace {

void check_fiber_mode(std::size_t order, Mode n) {
  if (order < 2) throw ShapeError("fiber kernels need a tensor of order >= 2");
  if (n >= order) throw ConfigError("mode " + std::to_string(n) + " out of range");
}

std::vector<Index> drop_mode(const std::vector<Index>& dims, Mode n) {
  std::vector<Index> out;
  for (Mode m = 0; m < dims.size(); ++m) {
    if (m != n) out.push_back(dims[m]);
  }
  return out;
}

// One entry per fiber carrying the non-n indices of its first nonzero.
template <typename T>
std::vector<std::vector<Index>> fiber_heads(const CooTensor<T>& sorted, const FiberLayout& layout) {
  std::vector<std::vector<Index>> out;
  for (Mode m = 0; m < sorted.order(); ++m) {
    if (m == layout.mode) continue;
    std::vector<Index> col(layout.nfibs);
    for (std::size_t f = 0; f < layout.nfibs; ++f) col[f] = sorted.inds[m][layout.fptr[f]];
    out.push_back(std::move(col));
  }
  return out;
}

// Blocked index over the non-n modes with one entry per fiber.  Blocks are
// carried over from the input, since a fiber never crosses a block.
template <typename T>
BlockedIndex fiber_heads(const GHicooTensor<T>& sorted, const FiberLayout& layout) {
  const BlockedIndex& in = sorted.index;
  const Mode n = layout.mode;
  BlockedIndex out;
  out.block_size = in.block_size;
  for (Mode m = 0; m < sorted.order(); ++m) {
    if (m != n) out.compressed.push_back(in.compressed[m]);
  }
  const std::size_t order = out.compressed.size();
  out.binds.assign(order, {});
  out.einds.assign(order, {});
  out.inds.assign(order, {});
  out.bptr.assign(1, 0);

  std::size_t f = 0;
  for (std::size_t b = 0; b < in.nblocks(); ++b) {
    for (Mode m = 0, k = 0; m < sorted.order(); ++m) {
      if (m == n) continue;
      if (in.compressed[m]) out.binds[k].push_back(in.binds[m][b]);
      ++k;
    }
    while (f < layout.nfibs && layout.fptr[f] < in.bptr[b + 1]) {
      const Offset head = layout.fptr[f];
      for (Mode m = 0, k = 0; m < sorted.order(); ++m) {
        if (m == n) continue;
        if (in.compressed[m]) {
          out.einds[k].push_back(in.einds[m][head]);
        } else {
          out.inds[k].push_back(in.inds[m][head]);
        }
        ++k;
      }
      ++f;
    }
    out.bptr.push_back(f);
  }
  return out;
}

ModeOrder shift_tail(const ModeOrder& tail, Mode n) {
  ModeOrder out;
  for (Mode m : tail) {
    if (m != n) out.push_back(m < n ? m : m - 1);
  }
  return out;
}

template <typename T>
const std::vector<Index>& product_indices(const CooTensor<T>& sorted, Mode n) {
  return sorted.inds[n];
}

template <typename T>
const std::vector<Index>& product_indices(const GHicooTensor<T>& sorted, Mode n) {
  return sorted.index.inds[n];
}

}  // namespace

template <typename T>
TtvPlan<CooTensor<T>> prepare_ttv(const CooTensor<T>& x, Mode n) {
  check_fiber_mode(x.order(), n);
  auto [sorted, layout] = build_fiber_layout(x, n);
  CooTensor<T> out(drop_mode(x.dims, n));
  out.inds = fiber_heads(sorted, layout);
  out.vals.assign(layout.nfibs, T{});
  out.sort_state = SortState::lexicographic(natural_order(out.order()));
  return {std::move(sorted), std::move(layout), std::move(out)};
}

template <typename T>
TtvPlan<GHicooTensor<T>> prepare_ttv(const GHicooTensor<T>& x, Mode n) {
  check_fiber_mode(x.order(), n);
  auto [sorted, layout] = build_fiber_layout(x, n);
  GHicooTensor<T> out;
  out.dims = drop_mode(x.dims, n);
  out.index = fiber_heads(sorted, layout);
  out.tail_order = shift_tail(sorted.tail_order, n);
  out.vals.assign(layout.nfibs, T{});
  return {std::move(sorted), std::move(layout), std::move(out)};
}

template <class Tensor>
KernelStats run_ttv(TtvPlan<Tensor>& plan, std::span<const typename Tensor::value_type> v,
                    int workers) {
  using T = typename Tensor::value_type;
  const Mode n = plan.layout.mode;
  if (v.size() != plan.sorted.dims[n]) {
    throw ShapeError("vector length " + std::to_string(v.size()) + " != dim " +
                     std::to_string(plan.sorted.dims[n]) + " of mode " + std::to_string(n));
  }
  const Index* k = product_indices(plan.sorted, n).data();
  const T* xv = plan.sorted.vals.data();
  const Offset* fptr = plan.layout.fptr.data();
  T* out = plan.out.vals.data();
  const std::int64_t nf = static_cast<std::int64_t>(plan.layout.nfibs);
  std::uint64_t flops = 0;
  const int w = resolve(workers);
#pragma omp parallel for num_threads(w) schedule(static) reduction(+ : flops)
  for (std::int64_t f = 0; f < nf; ++f) {
    T acc{};
    for (Offset m = fptr[f]; m < fptr[f + 1]; ++m) acc += xv[m] * v[k[m]];
    out[f] = acc;
    flops += 2 * (fptr[f + 1] - fptr[f]);
  }
  return {flops};
}

template <class Tensor>
Tensor ttv(const Tensor& x, std::span<const typename Tensor::value_type> v, Mode n, int workers) {
  auto plan = prepare_ttv(x, n);
  run_ttv(plan, v, workers);
  return std::move(plan.out);
}

namespace {

template <typename T>
SemiSparseTensor<T> semi_sparse_shell(const std::vector<Index>& dims, Mode n, std::size_t rank) {
  if (rank == 0) throw ConfigError("TTM needs at least one column");
  SemiSparseTensor<T> out;
  out.dims = dims;
  out.dims[n] = static_cast<Index>(rank);
  out.dense_modes = {n};
  for (Mode m = 0; m < dims.size(); ++m) {
    if (m != n) out.sparse_modes.push_back(m);
  }
  return out;
}

}  // namespace

template <typename T>
TtmPlan<CooTensor<T>> prepare_ttm(const CooTensor<T>& x, Mode n, std::size_t rank) {
  check_fiber_mode(x.order(), n);
  auto [sorted, layout] = build_fiber_layout(x, n);
  SemiSparseTensor<T> out = semi_sparse_shell<T>(x.dims, n, rank);
  out.fibers = CooFiberIndex{fiber_heads(sorted, layout)};
  out.vals.assign(layout.nfibs * rank, T{});
  return {std::move(sorted), std::move(layout), std::move(out)};
}

template <typename T>
TtmPlan<GHicooTensor<T>> prepare_ttm(const GHicooTensor<T>& x, Mode n, std::size_t rank) {
  check_fiber_mode(x.order(), n);
  auto [sorted, layout] = build_fiber_layout(x, n);
  SemiSparseTensor<T> out = semi_sparse_shell<T>(x.dims, n, rank);
  out.fibers = fiber_heads(sorted, layout);
  out.vals.assign(layout.nfibs * rank, T{});
  return {std::move(sorted), std::move(layout), std::move(out)};
}

template <class Tensor>
KernelStats run_ttm(TtmPlan<Tensor>& plan, const DenseMatrix<typename Tensor::value_type>& u,
                    int workers) {
  using T = typename Tensor::value_type;
  const Mode n = plan.layout.mode;
  const std::size_t rank = plan.out.dims[n];
  if (u.rows() != plan.sorted.dims[n]) {
    throw ShapeError("matrix has " + std::to_string(u.rows()) + " rows, mode " +
                     std::to_string(n) + " has size " + std::to_string(plan.sorted.dims[n]));
  }
  if (u.cols() != rank) {
    throw ShapeError("matrix has " + std::to_string(u.cols()) + " columns, plan expects " +
                     std::to_string(rank));
  }
  const Index* k = product_indices(plan.sorted, n).data();
  const T* xv = plan.sorted.vals.data();
  const T* ud = u.data();
  const Offset* fptr = plan.layout.fptr.data();
  T* out = plan.out.vals.data();
  const std::int64_t nf = static_cast<std::int64_t>(plan.layout.nfibs);
  std::uint64_t flops = 0;
  const int w = resolve(workers);
#pragma omp parallel for num_threads(w) schedule(static) reduction(+ : flops)
  for (std::int64_t f = 0; f < nf; ++f) {
    T* chunk = out + f * rank;
    for (std::size_t r = 0; r < rank; ++r) chunk[r] = T{};
    for (Offset m = fptr[f]; m < fptr[f + 1]; ++m) {
      const T val = xv[m];
      const T* urow = ud + std::size_t{k[m]} * rank;
#pragma omp simd
      for (std::size_t r = 0; r < rank; ++r) chunk[r] += val * urow[r];
    }
    flops += 2 * rank * (fptr[f + 1] - fptr[f]);
  }
  return {flops};
}

template <class Tensor>
SemiSparseTensor<typename Tensor::value_type> ttm(
    const Tensor& x, const DenseMatrix<typename Tensor::value_type>& u, Mode n, int workers) {
  auto plan = prepare_ttm(x, n, u.cols());
  run_ttm(plan, u, workers);
  return std::move(plan.out);
}

// ---------------------------------------------------------------------------
// MTTKRP

namespace {

// Row-pointer table for the factor of every mode, null for mode n.
template <typename T>
std::vector<const T*> factor_table(const std::vector<Index>& dims,
                                   std::span<const DenseMatrix<T>> factors, Mode n,
                                   std::size_t& rank) {
  const std::size_t order = dims.size();
  if (n >= order) throw ConfigError("mode " + std::to_string(n) + " out of range");
  if (factors.size() + 1 != order) {
    throw ShapeError("MTTKRP needs " + std::to_string(order - 1) + " factor matrices, got " +
                     std::to_string(factors.size()));
  }
  std::vector<const T*> table(order, nullptr);
  rank = factors.empty() ? 0 : factors[0].cols();
  for (Mode m = 0, k = 0; m < order; ++m) {
    if (m == n) continue;
    const DenseMatrix<T>& f = factors[k++];
    if (f.rows() != dims[m]) {
      throw ShapeError("factor for mode " + std::to_string(m) + " has " +
                       std::to_string(f.rows()) + " rows, expected " + std::to_string(dims[m]));
    }
    if (f.cols() != rank) throw ShapeError("factor matrices have different column counts");
    table[m] = f.data();
  }
  if (rank == 0) throw ShapeError("factor matrices have no columns");
  return table;
}

template <typename T>
void check_output(const DenseMatrix<T>& out, Index rows, std::size_t rank) {
  if (out.rows() != rows || out.cols() != rank) {
    throw ShapeError("MTTKRP output must be " + std::to_string(rows) + " x " +
                     std::to_string(rank));
  }
}

// Runs `body(unit, out_base, atomic_tag)` for every work unit (a nonzero or
// a block), either straight into `out` with atomic adds or into per-worker
// copies that are summed in worker order afterwards.
template <typename T, class Body>
KernelStats mttkrp_engine(std::size_t units, DenseMatrix<T>& out, MttkrpOptions opt, Body body) {
  const int w = resolve(opt.workers);
  const std::int64_t nu = static_cast<std::int64_t>(units);
  const std::int64_t size = static_cast<std::int64_t>(out.rows() * out.cols());
  T* o = out.data();
  std::uint64_t flops = 0;

  if (opt.strategy == MttkrpStrategy::atomic) {
#pragma omp parallel num_threads(w)
    {
#pragma omp for schedule(static)
      for (std::int64_t i = 0; i < size; ++i) o[i] = T{};
#pragma omp for schedule(static) reduction(+ : flops)
      for (std::int64_t u = 0; u < nu; ++u) flops += body(u, o, std::true_type{});
    }
    return {flops};
  }

  std::vector<std::vector<T>> priv(static_cast<std::size_t>(w));
  int used = 1;
#pragma omp parallel num_threads(w)
  {
    const int tid = omp_get_thread_num();
#pragma omp single
    used = omp_get_num_threads();
    priv[tid].assign(static_cast<std::size_t>(size), T{});
#pragma omp for schedule(static) reduction(+ : flops)
    for (std::int64_t u = 0; u < nu; ++u) flops += body(u, priv[tid].data(), std::false_type{});
  }
#pragma omp parallel for num_threads(w) schedule(static)
  for (std::int64_t i = 0; i < size; ++i) {
    T s{};
    for (int t = 0; t < used; ++t) s += priv[t][i];
    o[i] = s;
  }
  return {flops};
}

template <typename T, class Tag>
inline void accumulate(T* orow, const T* const* rows, std::size_t nrows, T val, std::size_t rank,
                       Tag) {
  for (std::size_t r = 0; r < rank; ++r) {
    T p = val;
    for (std::size_t k = 0; k < nrows; ++k) p *= rows[k][r];
    if constexpr (Tag::value) {
#pragma omp atomic
      orow[r] += p;
    } else {
      orow[r] += p;
    }
  }
}

constexpr std::size_t kMaxOrder = 16;

void check_order(std::size_t order) {
  if (order < 2 || order > kMaxOrder) {
    throw ShapeError("MTTKRP supports orders 2.." + std::to_string(kMaxOrder));
  }
}

}  // namespace

template <class Tensor>
DenseMatrix<typename Tensor::value_type> prepare_mttkrp(
    const Tensor& x, std::span<const DenseMatrix<typename Tensor::value_type>> factors, Mode n) {
  std::size_t rank = 0;
  factor_table(x.dims, factors, n, rank);
  return DenseMatrix<typename Tensor::value_type>(x.dims[n], rank);
}

template <typename T>
KernelStats run_mttkrp(const CooTensor<T>& x, std::span<const DenseMatrix<T>> factors, Mode n,
                       DenseMatrix<T>& out, MttkrpOptions opt) {
  check_order(x.order());
  std::size_t rank = 0;
  const auto table = factor_table(x.dims, factors, n, rank);
  check_output(out, x.dims[n], rank);
  const std::size_t order = x.order();
  const std::uint64_t per_nnz = order * rank;

  auto body = [&](std::int64_t e, T* o, auto tag) -> std::uint64_t {
    const T* rows[kMaxOrder];
    std::size_t nr = 0;
    for (Mode m = 0; m < order; ++m) {
      if (m != n) rows[nr++] = table[m] + std::size_t{x.inds[m][e]} * rank;
    }
    accumulate(o + std::size_t{x.inds[n][e]} * rank, rows, nr, x.vals[e], rank, tag);
    return per_nnz;
  };
  return mttkrp_engine(x.nnz(), out, opt, body);
}

template <typename T>
KernelStats run_mttkrp(const HicooTensor<T>& x, std::span<const DenseMatrix<T>> factors, Mode n,
                       DenseMatrix<T>& out, MttkrpOptions opt) {
  check_order(x.order());
  std::size_t rank = 0;
  const auto table = factor_table(x.dims, factors, n, rank);
  check_output(out, x.dims[n], rank);
  const std::size_t order = x.order();
  const std::size_t stride = std::size_t{x.block_size} * rank;

  auto body = [&](std::int64_t b, T* o, auto tag) -> std::uint64_t {
    // Per-block matrix bases: row binds * B of every operand.
    const T* base[kMaxOrder];
    for (Mode m = 0; m < order; ++m) {
      if (m != n) base[m] = table[m] + std::size_t{x.binds[m][b]} * stride;
    }
    T* obase = o + std::size_t{x.binds[n][b]} * stride;
    const T* rows[kMaxOrder];
    for (Offset e = x.bptr[b]; e < x.bptr[b + 1]; ++e) {
      std::size_t nr = 0;
      for (Mode m = 0; m < order; ++m) {
        if (m != n) rows[nr++] = base[m] + std::size_t{x.einds[m][e]} * rank;
      }
      accumulate(obase + std::size_t{x.einds[n][e]} * rank, rows, nr, x.vals[e], rank, tag);
    }
    return order * rank * (x.bptr[b + 1] - x.bptr[b]);
  };
  return mttkrp_engine(x.nblocks(), out, opt, body);
}

template <typename T>
KernelStats run_mttkrp(const GHicooTensor<T>& x, std::span<const DenseMatrix<T>> factors, Mode n,
                       DenseMatrix<T>& out, MttkrpOptions opt) {
  check_order(x.order());
  std::size_t rank = 0;
  const auto table = factor_table(x.dims, factors, n, rank);
  check_output(out, x.dims[n], rank);
  const std::size_t order = x.order();
  const BlockedIndex& ix = x.index;

  auto body = [&](std::int64_t b, T* o, auto tag) -> std::uint64_t {
    const T* rows[kMaxOrder];
    for (Offset e = ix.bptr[b]; e < ix.bptr[b + 1]; ++e) {
      std::size_t nr = 0;
      for (Mode m = 0; m < order; ++m) {
        if (m != n) rows[nr++] = table[m] + std::size_t{ix.index(m, b, e)} * rank;
      }
      accumulate(o + std::size_t{ix.index(n, b, e)} * rank, rows, nr, x.vals[e], rank, tag);
    }
    return order * rank * (ix.bptr[b + 1] - ix.bptr[b]);
  };
  return mttkrp_engine(x.nblocks(), out, opt, body);
}

template <class Tensor>
DenseMatrix<typename Tensor::value_type> mttkrp(
    const Tensor& x, std::span<const DenseMatrix<typename Tensor::value_type>> factors, Mode n,
    MttkrpOptions opt) {
  auto out = prepare_mttkrp(x, factors, n);
  run_mttkrp(x, factors, n, out, opt);
  return out;
}

// ---------------------------------------------------------------------------

#define SPTB_INSTANTIATE(T)                                                                       \
  template TewPlan<CooTensor<T>> prepare_tew(const CooTensor<T>&, const CooTensor<T>&,            \
                                             ElementwiseOp);                                      \
  template TewPlan<HicooTensor<T>> prepare_tew(const HicooTensor<T>&, const HicooTensor<T>&,      \
                                               ElementwiseOp);                                    \
  template TewPlan<GHicooTensor<T>> prepare_tew(const GHicooTensor<T>&, const GHicooTensor<T>&,   \
                                                ElementwiseOp);                                   \
  template KernelStats run_tew(TewPlan<CooTensor<T>>&, std::span<const T>, std::span<const T>,    \
                               ElementwiseOp, int);                                               \
  template KernelStats run_tew(TewPlan<HicooTensor<T>>&, std::span<const T>, std::span<const T>,  \
                               ElementwiseOp, int);                                               \
  template KernelStats run_tew(TewPlan<GHicooTensor<T>>&, std::span<const T>,                     \
                               std::span<const T>, ElementwiseOp, int);                           \
  template CooTensor<T> tew(const CooTensor<T>&, const CooTensor<T>&, ElementwiseOp, int);        \
  template HicooTensor<T> tew(const HicooTensor<T>&, const HicooTensor<T>&, ElementwiseOp, int);  \
  template GHicooTensor<T> tew(const GHicooTensor<T>&, const GHicooTensor<T>&, ElementwiseOp,     \
                               int);                                                              \
  template TsPlan<CooTensor<T>> prepare_ts(const CooTensor<T>&);                                  \
  template TsPlan<HicooTensor<T>> prepare_ts(const HicooTensor<T>&);                              \
  template TsPlan<GHicooTensor<T>> prepare_ts(const GHicooTensor<T>&);                            \
  template KernelStats run_ts(TsPlan<CooTensor<T>>&, std::span<const T>, ScalarOp, T, int);       \
  template KernelStats run_ts(TsPlan<HicooTensor<T>>&, std::span<const T>, ScalarOp, T, int);     \
  template KernelStats run_ts(TsPlan<GHicooTensor<T>>&, std::span<const T>, ScalarOp, T, int);    \
  template CooTensor<T> ts(const CooTensor<T>&, ScalarOp, T, int);                                \
  template HicooTensor<T> ts(const HicooTensor<T>&, ScalarOp, T, int);                            \
  template GHicooTensor<T> ts(const GHicooTensor<T>&, ScalarOp, T, int);                          \
  template TtvPlan<CooTensor<T>> prepare_ttv(const CooTensor<T>&, Mode);                          \
  template TtvPlan<GHicooTensor<T>> prepare_ttv(const GHicooTensor<T>&, Mode);                    \
  template KernelStats run_ttv(TtvPlan<CooTensor<T>>&, std::span<const T>, int);                  \
  template KernelStats run_ttv(TtvPlan<GHicooTensor<T>>&, std::span<const T>, int);               \
  template CooTensor<T> ttv(const CooTensor<T>&, std::span<const T>, Mode, int);                  \
  template GHicooTensor<T> ttv(const GHicooTensor<T>&, std::span<const T>, Mode, int);            \
  template TtmPlan<CooTensor<T>> prepare_ttm(const CooTensor<T>&, Mode, std::size_t);             \
  template TtmPlan<GHicooTensor<T>> prepare_ttm(const GHicooTensor<T>&, Mode, std::size_t);       \
  template KernelStats run_ttm(TtmPlan<CooTensor<T>>&, const DenseMatrix<T>&, int);               \
  template KernelStats run_ttm(TtmPlan<GHicooTensor<T>>&, const DenseMatrix<T>&, int);            \
  template SemiSparseTensor<T> ttm(const CooTensor<T>&, const DenseMatrix<T>&, Mode, int);        \
  template SemiSparseTensor<T> ttm(const GHicooTensor<T>&, const DenseMatrix<T>&, Mode, int);     \
  template DenseMatrix<T> prepare_mttkrp(const CooTensor<T>&, std::span<const DenseMatrix<T>>,    \
                                         Mode);                                                   \
  template DenseMatrix<T> prepare_mttkrp(const HicooTensor<T>&, std::span<const DenseMatrix<T>>,  \
                                         Mode);                                                   \
  template DenseMatrix<T> prepare_mttkrp(const GHicooTensor<T>&,                                  \
                                         std::span<const DenseMatrix<T>>, Mode);                  \
  template KernelStats run_mttkrp(const CooTensor<T>&, std::span<const DenseMatrix<T>>, Mode,     \
                                  DenseMatrix<T>&, MttkrpOptions);                                \
  template KernelStats run_mttkrp(const HicooTensor<T>&, std::span<const DenseMatrix<T>>, Mode,   \
                                  DenseMatrix<T>&, MttkrpOptions);                                \
  template KernelStats run_mttkrp(const GHicooTensor<T>&, std::span<const DenseMatrix<T>>, Mode,  \
                                  DenseMatrix<T>&, MttkrpOptions);                                \
  template DenseMatrix<T> mttkrp(const CooTensor<T>&, std::span<const DenseMatrix<T>>, Mode,      \
                                 MttkrpOptions);                                                  \
  template DenseMatrix<T> mttkrp(const HicooTensor<T>&, std::span<const DenseMatrix<T>>, Mode,    \
                                 MttkrpOptions);                                                  \
  template DenseMatrix<T> mttkrp(const GHicooTensor<T>&, std::span<const DenseMatrix<T>>, Mode,   \
                                 MttkrpOptions);

SPTB_INSTANTIATE(float)
SPTB_INSTANTIATE(double)

}  // namespace sptb
