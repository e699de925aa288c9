#pragma once

#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "sptb/kernels.hpp"
#include "sptb/oracle.hpp"
#include "test_util.hpp"

// Randomized comparison of every kernel and format path against the dense
// 64-bit oracle.

namespace sptb::test {

struct OracleTally {
  std::size_t cases = 0;
  std::size_t checks = 0;
  double worst = 0;
  std::vector<std::string> failures;
};

struct OracleCase {
  std::size_t order;
  std::vector<Index> dims;
  std::size_t nnz;
  std::size_t rank;
  std::uint32_t block;
  int workers;
};

inline OracleCase random_case(std::mt19937_64& rng) {
  static const std::size_t ranks[] = {1, 2, 4, 16};
  OracleCase c;
  c.order = 3 + rng() % 2;
  c.dims = random_dims(rng, c.order, 8);
  c.nnz = 1 + rng() % 200;
  c.rank = ranks[rng() % 4];
  c.block = 1u << (rng() % 3);
  c.workers = 1 + static_cast<int>(rng() % 3);
  return c;
}

namespace detail {

inline std::string describe(const OracleCase& c) {
  std::ostringstream s;
  s << "order " << c.order << " dims";
  for (Index d : c.dims) s << ' ' << d;
  s << " nnz " << c.nnz << " R " << c.rank << " B " << c.block;
  return s.str();
}

inline void record(OracleTally& t, double err, double tol, const std::string& what,
                   const OracleCase& c) {
  ++t.checks;
  t.worst = std::max(t.worst, err);
  if (!(err <= tol)) t.failures.push_back(what + " err " + std::to_string(err) + " (" + describe(c) + ")");
}

// Y sharing part of X's pattern, plus entries of its own.
template <typename T>
CooTensor<T> overlapping(std::mt19937_64& rng, const CooTensor<T>& x) {
  std::vector<Entry<T>> e;
  std::uniform_real_distribution<double> val(0.5, 1.5);
  for (std::size_t i = 0; i < x.nnz(); ++i) {
    if (rng() % 2) e.emplace_back(x.coord(i), static_cast<T>(val(rng)));
  }
  const auto extra = random_tensor<T>(rng, x.dims, x.nnz() / 2 + 1);
  for (std::size_t i = 0; i < extra.nnz(); ++i) e.emplace_back(extra.coord(i), extra.vals[i]);
  return coo_from_entries(std::span<const Entry<T>>(e), x.dims);
}

// Superset of X's pattern with nonzero values, for division.
template <typename T>
CooTensor<T> divisor(std::mt19937_64& rng, const CooTensor<T>& x) {
  std::vector<Entry<T>> e;
  std::uniform_real_distribution<double> val(0.5, 1.5);
  for (std::size_t i = 0; i < x.nnz(); ++i) e.emplace_back(x.coord(i), static_cast<T>(val(rng)));
  const auto extra = random_tensor<T>(rng, x.dims, 5);
  std::map<std::vector<Index>, bool> have;
  for (auto& [c, v] : e) have[c] = true;
  for (std::size_t i = 0; i < extra.nnz(); ++i) {
    if (!have.count(extra.coord(i))) e.emplace_back(extra.coord(i), extra.vals[i]);
  }
  return coo_from_entries(std::span<const Entry<T>>(e), x.dims);
}

inline ModeOrder random_subset(std::mt19937_64& rng, std::size_t order, std::optional<Mode> skip) {
  ModeOrder m;
  for (Mode k = 0; k < order; ++k) {
    if (skip && k == *skip) continue;
    if (rng() % 2) m.push_back(k);
  }
  if (m.empty()) {
    for (Mode k = 0; k < order; ++k) {
      if (!skip || k != *skip) {
        m.push_back(k);
        break;
      }
    }
  }
  return m;
}

inline ModeOrder all_but(std::size_t order, Mode n) {
  ModeOrder m;
  for (Mode k = 0; k < order; ++k) {
    if (k != n) m.push_back(k);
  }
  return m;
}

}  // namespace detail

// Runs every kernel, format path and mode of one random case.
template <typename T>
void run_oracle_case(std::mt19937_64& rng, const OracleCase& c, double tol, OracleTally& tally) {
  using namespace detail;
  ++tally.cases;
  const auto x = random_tensor<T>(rng, c.dims, c.nnz);
  const auto y = overlapping(rng, x);
  const auto ydiv = divisor(rng, x);
  const DenseTensor dx = to_dense(x);
  const DenseTensor dy = to_dense(y);
  const DenseTensor dydiv = to_dense(ydiv);
  const ModeOrder gmodes = random_subset(rng, c.order, std::nullopt);

  const auto hx = to_hicoo(x, c.block);
  const auto hy = to_hicoo(y, c.block);
  const auto hydiv = to_hicoo(ydiv, c.block);
  const auto gx = to_ghicoo(x, gmodes, c.block);
  const auto gy = to_ghicoo(y, gmodes, c.block);
  const auto gydiv = to_ghicoo(ydiv, gmodes, c.block);

  // TEW, general and identical patterns.
  for (ElementwiseOp op : {ElementwiseOp::add, ElementwiseOp::sub, ElementwiseOp::mul, ElementwiseOp::div}) {
    const bool div = op == ElementwiseOp::div;
    const DenseTensor want = oracle_tew(dx, div ? dydiv : dy, op);
    const std::string name = "tew op " + std::to_string(static_cast<int>(op));
    record(tally, rel_err(to_dense(tew(x, div ? ydiv : y, op, c.workers)), want), tol, name + " coo", c);
    record(tally, rel_err(to_dense(tew(hx, div ? hydiv : hy, op, c.workers)), want), tol, name + " hicoo", c);
    record(tally, rel_err(to_dense(tew(gx, div ? gydiv : gy, op, c.workers)), want), tol, name + " ghicoo", c);
    const DenseTensor same = oracle_tew(dx, dx, op);
    record(tally, rel_err(to_dense(tew(x, x, op, c.workers)), same), tol, name + " coo same", c);
    record(tally, rel_err(to_dense(tew(hx, hx, op, c.workers)), same), tol, name + " hicoo same", c);
    record(tally, rel_err(to_dense(tew(gx, gx, op, c.workers)), same), tol, name + " ghicoo same", c);
  }

  // TS.
  const T s = static_cast<T>(0.75);
  for (ScalarOp op : {ScalarOp::add, ScalarOp::mul}) {
    const DenseTensor want = oracle_ts(dx, op, double(s));
    const std::string name = op == ScalarOp::add ? "ts add" : "ts mul";
    record(tally, rel_err(to_dense(ts(x, op, s, c.workers)), want), tol, name + " coo", c);
    record(tally, rel_err(to_dense(ts(hx, op, s, c.workers)), want), tol, name + " hicoo", c);
    record(tally, rel_err(to_dense(ts(gx, op, s, c.workers)), want), tol, name + " ghicoo", c);
  }

  for (Mode n = 0; n < c.order; ++n) {
    const std::string mode = " mode " + std::to_string(n);
    const auto gfib = to_ghicoo(x, all_but(c.order, n), c.block);
    const auto gsub = to_ghicoo(x, random_subset(rng, c.order, n), c.block);

    // TTV.
    const auto v = random_vector<T>(rng, c.dims[n]);
    const std::vector<double> v64(v.begin(), v.end());
    const DenseTensor wv = oracle_ttv(dx, v64, n);
    const auto tc = ttv(x, std::span<const T>(v), n, c.workers);
    const auto tg = ttv(gfib, std::span<const T>(v), n, c.workers);
    record(tally, rel_err(to_dense(tc), wv), tol, "ttv coo" + mode, c);
    record(tally, rel_err(to_dense(tg), wv), tol, "ttv hicoo" + mode, c);
    record(tally, rel_err(to_dense(ttv(gsub, std::span<const T>(v), n, c.workers)), wv), tol,
           "ttv ghicoo" + mode, c);
    if (tc.nnz() != tg.nnz()) tally.failures.push_back("ttv pattern size differs" + mode);

    // TTM.
    const auto u = random_matrix<T>(rng, c.dims[n], c.rank);
    const DenseTensor wu = oracle_ttm(dx, to_double(u), n);
    record(tally, rel_err(to_dense(ttm(x, u, n, c.workers)), wu), tol, "ttm coo" + mode, c);
    record(tally, rel_err(to_dense(ttm(gfib, u, n, c.workers)), wu), tol, "ttm hicoo" + mode, c);
    record(tally, rel_err(to_dense(ttm(gsub, u, n, c.workers)), wu), tol, "ttm ghicoo" + mode, c);

    // MTTKRP.
    std::vector<DenseMatrix<T>> factors;
    std::vector<DenseMatrix<double>> factors64;
    for (Mode m = 0; m < c.order; ++m) {
      if (m == n) continue;
      factors.push_back(random_matrix<T>(rng, c.dims[m], c.rank));
      factors64.push_back(to_double(factors.back()));
    }
    const auto wm = oracle_mttkrp(dx, factors64, n).values();
    const std::span<const DenseMatrix<T>> fs(factors);
    for (MttkrpStrategy st : {MttkrpStrategy::atomic, MttkrpStrategy::privatized}) {
      const MttkrpOptions opt{st, c.workers};
      const std::string name = st == MttkrpStrategy::atomic ? "mttkrp atomic " : "mttkrp privatized ";
      record(tally, relative_error(values_as_double(mttkrp(x, fs, n, opt)), wm), tol, name + "coo" + mode, c);
      record(tally, relative_error(values_as_double(mttkrp(hx, fs, n, opt)), wm), tol, name + "hicoo" + mode, c);
      record(tally, relative_error(values_as_double(mttkrp(gx, fs, n, opt)), wm), tol, name + "ghicoo" + mode, c);
    }
  }
}

}  // namespace sptb::test
