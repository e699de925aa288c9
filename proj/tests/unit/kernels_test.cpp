#include <gtest/gtest.h>

#include <random>

#include "sptb/error.hpp"
#include "sptb/kernels.hpp"
#include "sptb/oracle.hpp"
#include "test_util.hpp"

using namespace sptb;

namespace {

// {(1,1,1):1, (1,2,2):2, (2,1,2):3} in 1-based coordinates.
CooTensor<float> example() {
  std::vector<Entry<float>> e = {{{0, 0, 0}, 1.0f}, {{0, 1, 1}, 2.0f}, {{1, 0, 1}, 3.0f}};
  return coo_from_entries(std::span<const Entry<float>>(e), {2, 2, 2});
}

CooTensor<float> make(std::vector<Entry<float>> e, std::vector<Index> dims) {
  return coo_from_entries(std::span<const Entry<float>>(e), std::move(dims));
}

}  // namespace

// TEW

TEST(Tew, DoublingSamePattern) {
  const auto x = example();
  auto plan = prepare_tew(x, x, ElementwiseOp::add);
  EXPECT_TRUE(plan.same_pattern);
  run_tew(plan, std::span<const float>(x.vals), std::span<const float>(x.vals), ElementwiseOp::add, 1);
  EXPECT_EQ(plan.out.inds, x.inds);
  EXPECT_EQ(plan.out.vals, (std::vector<float>{2, 4, 6}));
}

TEST(Tew, DisjointMulIsEmpty) {
  const auto x = make({{{0, 0, 0}, 1.0f}}, {2, 2, 2});
  const auto y = make({{{1, 1, 1}, 2.0f}}, {2, 2, 2});
  EXPECT_EQ(tew(x, y, ElementwiseOp::mul).nnz(), 0u);
}

TEST(Tew, DisjointAddIsUnion) {
  const auto x = make({{{0, 0, 0}, 1.0f}}, {2, 2, 2});
  const auto y = make({{{1, 1, 1}, 2.0f}}, {2, 2, 2});
  const auto z = tew(x, y, ElementwiseOp::add);
  EXPECT_EQ(test::entry_map(z), (std::map<std::vector<Index>, float>{{{0, 0, 0}, 1.0f}, {{1, 1, 1}, 2.0f}}));
  const auto d = tew(x, y, ElementwiseOp::sub);
  EXPECT_EQ(test::entry_map(d), (std::map<std::vector<Index>, float>{{{0, 0, 0}, 1.0f}, {{1, 1, 1}, -2.0f}}));
}

TEST(Tew, ShapeMismatch) {
  const auto x = make({{{0, 0, 0}, 1.0f}}, {2, 2, 2});
  const auto y = make({{{0, 0, 0}, 1.0f}}, {2, 2, 3});
  EXPECT_THROW(tew(x, y, ElementwiseOp::add), ShapeError);
}

TEST(Tew, DivisionByAbsentReportsCoordinate) {
  const auto x = make({{{0, 1, 0}, 1.0f}}, {2, 2, 2});
  const auto y = make({{{1, 1, 1}, 2.0f}}, {2, 2, 2});
  try {
    tew(x, y, ElementwiseOp::div);
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("(0,1,0)"), std::string::npos) << e.what();
  }
}

TEST(Tew, DivisionByStoredZero) {
  const auto x = make({{{0, 0, 0}, 1.0f}, {{1, 0, 1}, 2.0f}}, {2, 2, 2});
  const auto y = make({{{0, 0, 0}, 4.0f}, {{1, 0, 1}, 0.0f}}, {2, 2, 2});
  try {
    tew(x, y, ElementwiseOp::div, 2);
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("(1,0,1)"), std::string::npos) << e.what();
  }
}

TEST(Tew, DivisionKeepsXPattern) {
  const auto x = make({{{0, 0, 0}, 1.0f}}, {2, 2, 2});
  const auto y = make({{{0, 0, 0}, 4.0f}, {{1, 1, 1}, 2.0f}}, {2, 2, 2});
  const auto z = tew(x, y, ElementwiseOp::div);
  ASSERT_EQ(z.nnz(), 1u);
  EXPECT_FLOAT_EQ(z.vals[0], 0.25f);
}

TEST(Tew, HicooGeneralPattern) {
  const auto x = make({{{0, 0, 0}, 1.0f}, {{3, 3, 3}, 1.0f}}, {4, 4, 4});
  const auto y = make({{{3, 3, 3}, 2.0f}, {{1, 2, 0}, 5.0f}}, {4, 4, 4});
  const auto z = tew(to_hicoo(x, 2), to_hicoo(y, 2), ElementwiseOp::add);
  EXPECT_EQ(test::entry_map(from_hicoo(z)),
            (std::map<std::vector<Index>, float>{{{0, 0, 0}, 1.0f}, {{1, 2, 0}, 5.0f}, {{3, 3, 3}, 3.0f}}));
  EXPECT_THROW(tew(to_hicoo(x, 2), to_hicoo(y, 4), ElementwiseOp::add), ConfigError);
}

TEST(Tew, FlopsPerOutputEntry) {
  std::mt19937_64 rng(1);
  const auto x = test::random_tensor<float>(rng, {6, 6, 6}, 50);
  auto plan = prepare_tew(x, x, ElementwiseOp::mul);
  EXPECT_EQ(run_tew(plan, std::span<const float>(x.vals), std::span<const float>(x.vals),
                    ElementwiseOp::mul, 2).flops,
            50u);
}

// TS

TEST(Ts, MulIdentity) {
  const auto x = example();
  EXPECT_EQ(ts(x, ScalarOp::mul, 1.0f).vals, x.vals);
}

TEST(Ts, MulTwo) {
  EXPECT_EQ(ts(example(), ScalarOp::mul, 2.0f).vals, (std::vector<float>{2, 4, 6}));
}

TEST(Ts, AddHalf) {
  EXPECT_EQ(ts(example(), ScalarOp::add, 0.5f).vals, (std::vector<float>{1.5f, 2.5f, 3.5f}));
}

TEST(Ts, MulZeroKeepsExplicitZeros) {
  const auto z = ts(example(), ScalarOp::mul, 0.0f);
  EXPECT_EQ(z.nnz(), 3u);
  EXPECT_EQ(z.vals, (std::vector<float>{0, 0, 0}));
}

TEST(Ts, HicooPatternUnchanged) {
  const auto h = to_hicoo(example(), 2);
  const auto z = ts(h, ScalarOp::mul, 3.0f);
  EXPECT_EQ(z.bptr, h.bptr);
  EXPECT_EQ(z.einds, h.einds);
  auto plan = prepare_ts(h);
  EXPECT_EQ(run_ts(plan, std::span<const float>(h.vals), ScalarOp::mul, 3.0f, 1).flops, 3u);
}

// TTV

TEST(Ttv, Example) {
  const std::vector<float> v{1, 1};
  const auto z = ttv(example(), std::span<const float>(v), 2);
  EXPECT_EQ(z.dims, (std::vector<Index>{2, 2}));
  EXPECT_EQ(test::entry_map(z),
            (std::map<std::vector<Index>, float>{{{0, 0}, 1.0f}, {{0, 1}, 2.0f}, {{1, 0}, 3.0f}}));
}

TEST(Ttv, ZeroVectorKeepsPattern) {
  const std::vector<float> v{0, 0};
  const auto z = ttv(example(), std::span<const float>(v), 2);
  EXPECT_EQ(z.nnz(), 3u);
  for (float x : z.vals) EXPECT_EQ(x, 0.0f);
}

TEST(Ttv, SingleFiberSum) {
  const auto x = make({{{0, 0, 0}, 1.0f}, {{0, 0, 1}, 2.0f}}, {2, 2, 2});
  const std::vector<float> v{10, 100};
  const auto z = ttv(x, std::span<const float>(v), 2);
  EXPECT_EQ(test::entry_map(z), (std::map<std::vector<Index>, float>{{{0, 0}, 210.0f}}));
}

TEST(Ttv, Errors) {
  const std::vector<float> v{1, 1, 1};
  EXPECT_THROW(ttv(example(), std::span<const float>(v), 2), ShapeError);
  const auto g = to_ghicoo(example(), {0, 1, 2}, 2);
  const std::vector<float> v2{1, 1};
  EXPECT_THROW(ttv(g, std::span<const float>(v2), 2), ConfigError);
}

TEST(Ttv, GhicooOutputKeepsBlocks) {
  std::mt19937_64 rng(2);
  const auto x = test::random_tensor<float>(rng, {9, 9, 9}, 80);
  const auto g = to_ghicoo(x, {0, 1}, 4);
  const auto v = test::random_vector<float>(rng, 9);
  const auto z = ttv(g, std::span<const float>(v), 2);
  EXPECT_EQ(z.dims, (std::vector<Index>{9, 9}));
  EXPECT_EQ(z.nblocks(), g.nblocks());
  EXPECT_TRUE(z.index.compressed[0] && z.index.compressed[1]);
  const auto c = ttv(x, std::span<const float>(v), 2);
  EXPECT_EQ(z.nnz(), c.nnz());
  EXPECT_LE(test::rel_err(to_dense(z), to_dense(c)), 1e-6);
}

TEST(Ttv, FlopsAndShapeLaw) {
  std::mt19937_64 rng(3);
  const auto x = test::random_tensor<float>(rng, {7, 8, 9}, 100);
  for (Mode n = 0; n < 3; ++n) {
    auto plan = prepare_ttv(x, n);
    const auto v = test::random_vector<float>(rng, x.dims[n]);
    EXPECT_EQ(run_ttv(plan, std::span<const float>(v), 2).flops, 200u);
    EXPECT_EQ(plan.out.nnz(), plan.layout.nfibs);
  }
}

// TTM

TEST(Ttm, IdentityReproducesFibers) {
  std::mt19937_64 rng(4);
  const auto x = test::random_tensor<float>(rng, {4, 5, 6}, 40);
  const auto u = DenseMatrix<float>::identity(6);
  const auto z = ttm(x, u, 2);
  EXPECT_EQ(z.dims, x.dims);
  EXPECT_EQ(test::rel_err(to_dense(z), to_dense(x)), 0.0);
}

TEST(Ttm, OnesExample) {
  const DenseMatrix<float> u(2, 2, 1.0f);
  const auto z = ttm(example(), u, 2);
  ASSERT_EQ(z.nfibers(), 3u);
  EXPECT_EQ(z.dense_modes, (ModeOrder{2}));
  EXPECT_EQ(z.chunk_size(), 2u);
  EXPECT_EQ(z.vals, (std::vector<float>{1, 1, 2, 2, 3, 3}));
  EXPECT_EQ(z.sparse_index(0, 0, 2), 1u);
  EXPECT_EQ(z.sparse_index(1, 0, 2), 0u);
}

TEST(Ttm, FlopCount) {
  const DenseMatrix<float> u(2, 2, 1.0f);
  auto plan = prepare_ttm(example(), 2, 2);
  EXPECT_EQ(run_ttm(plan, u, 1).flops, 12u);
}

TEST(Ttm, Errors) {
  const DenseMatrix<float> u(3, 2, 1.0f);
  EXPECT_THROW(ttm(example(), u, 2), ShapeError);
  auto plan = prepare_ttm(example(), 2, 4);
  const DenseMatrix<float> u2(2, 2, 1.0f);
  EXPECT_THROW(run_ttm(plan, u2, 1), ShapeError);
}

TEST(Ttm, ShicooOutput) {
  std::mt19937_64 rng(5);
  const auto x = test::random_tensor<float>(rng, {9, 9, 9}, 80);
  const auto g = to_ghicoo(x, {1, 2}, 4);
  const auto u = test::random_matrix<float>(rng, 9, 3);
  const auto z = ttm(g, u, 0);
  EXPECT_TRUE(z.blocked());
  EXPECT_EQ(z.dims, (std::vector<Index>{3, 9, 9}));
  const auto c = ttm(x, u, 0);
  EXPECT_FALSE(c.blocked());
  EXPECT_EQ(z.nfibers(), c.nfibers());
  EXPECT_LE(test::rel_err(to_dense(z), to_dense(c)), 1e-6);
}

// MTTKRP

TEST(Mttkrp, OnesExample) {
  const DenseMatrix<float> ones(2, 2, 1.0f);
  const std::vector<DenseMatrix<float>> fs{ones, ones};
  for (MttkrpStrategy st : {MttkrpStrategy::atomic, MttkrpStrategy::privatized}) {
    const auto a = mttkrp(example(), std::span<const DenseMatrix<float>>(fs), 0, {st, 2});
    EXPECT_EQ(a.values(), (std::vector<float>{3, 3, 3, 3}));
    const auto h = mttkrp(to_hicoo(example(), 2), std::span<const DenseMatrix<float>>(fs), 0, {st, 2});
    EXPECT_EQ(h.values(), (std::vector<float>{3, 3, 3, 3}));
  }
}

TEST(Mttkrp, ZeroFactorAnnihilates) {
  std::mt19937_64 rng(6);
  const auto x = test::random_tensor<float>(rng, {5, 5, 5}, 30);
  const std::vector<DenseMatrix<float>> fs{test::random_matrix<float>(rng, 5, 3), DenseMatrix<float>(5, 3)};
  const auto m = mttkrp(x, std::span<const DenseMatrix<float>>(fs), 1);
  for (float v : m.values()) EXPECT_EQ(v, 0.0f);
}

TEST(Mttkrp, Random666PathsAgree) {
  std::mt19937_64 rng(7);
  const auto x = test::random_tensor<float>(rng, {6, 6, 6}, 40);
  const auto h = to_hicoo(x, 2);
  const auto dx = to_dense(x);
  for (Mode n = 0; n < 3; ++n) {
    std::vector<DenseMatrix<float>> fs;
    std::vector<DenseMatrix<double>> fs64;
    for (Mode m = 0; m < 3; ++m) {
      if (m == n) continue;
      fs.push_back(test::random_matrix<float>(rng, 6, 4));
      fs64.push_back(to_double(fs.back()));
    }
    const auto want = oracle_mttkrp(dx, fs64, n).values();
    const std::span<const DenseMatrix<float>> s(fs);
    EXPECT_LE(relative_error(values_as_double(mttkrp(x, s, n)), want), 1e-4);
    EXPECT_LE(relative_error(values_as_double(mttkrp(h, s, n)), want), 1e-4);
  }
}

TEST(Mttkrp, ShapeErrors) {
  const DenseMatrix<float> ones(2, 2, 1.0f);
  const DenseMatrix<float> bad(3, 2, 1.0f);
  const DenseMatrix<float> narrow(2, 1, 1.0f);
  const std::vector<DenseMatrix<float>> wrong_rows{ones, bad};
  const std::vector<DenseMatrix<float>> wrong_cols{ones, narrow};
  const std::vector<DenseMatrix<float>> too_few{ones};
  EXPECT_THROW(mttkrp(example(), std::span<const DenseMatrix<float>>(wrong_rows), 0), ShapeError);
  EXPECT_THROW(mttkrp(example(), std::span<const DenseMatrix<float>>(wrong_cols), 0), ShapeError);
  EXPECT_THROW(mttkrp(example(), std::span<const DenseMatrix<float>>(too_few), 0), ShapeError);
  const std::vector<DenseMatrix<float>> fs{ones, ones};
  DenseMatrix<float> out(3, 2);
  EXPECT_THROW(run_mttkrp(example(), std::span<const DenseMatrix<float>>(fs), 0, out), ShapeError);
}

TEST(Mttkrp, FlopCountThirdOrder) {
  std::mt19937_64 rng(8);
  const auto x = test::random_tensor<float>(rng, {6, 7, 8}, 70);
  const std::size_t r = 5;
  for (Mode n = 0; n < 3; ++n) {
    std::vector<DenseMatrix<float>> fs;
    for (Mode m = 0; m < 3; ++m) {
      if (m != n) fs.push_back(test::random_matrix<float>(rng, x.dims[m], r));
    }
    const std::span<const DenseMatrix<float>> s(fs);
    auto out = prepare_mttkrp(x, s, n);
    EXPECT_EQ(run_mttkrp(x, s, n, out).flops, 3u * 70 * r);
    const auto h = to_hicoo(x, 4);
    EXPECT_EQ(run_mttkrp(h, s, n, out).flops, 3u * 70 * r);
  }
}

// Determinism

TEST(Determinism, FixedWorkersBitwise) {
  std::mt19937_64 rng(9);
  const auto x = test::random_tensor<float>(rng, {8, 8, 8, 8}, 200);
  const auto h = to_hicoo(x, 2);
  const auto v = test::random_vector<float>(rng, 8);
  const auto u = test::random_matrix<float>(rng, 8, 16);
  std::vector<DenseMatrix<float>> fs;
  for (int i = 0; i < 3; ++i) fs.push_back(test::random_matrix<float>(rng, 8, 16));
  const std::span<const DenseMatrix<float>> s(fs);
  for (int w : {1, 3}) {
    EXPECT_EQ(ttv(x, std::span<const float>(v), 1, w).vals, ttv(x, std::span<const float>(v), 1, w).vals);
    EXPECT_EQ(ttm(x, u, 2, w).vals, ttm(x, u, 2, w).vals);
    EXPECT_EQ(tew(x, x, ElementwiseOp::mul, w).vals, tew(x, x, ElementwiseOp::mul, w).vals);
    const MttkrpOptions priv{MttkrpStrategy::privatized, w};
    EXPECT_EQ(mttkrp(x, s, 0, priv).values(), mttkrp(x, s, 0, priv).values());
    EXPECT_EQ(mttkrp(h, s, 3, priv).values(), mttkrp(h, s, 3, priv).values());
  }
  const MttkrpOptions one{MttkrpStrategy::atomic, 1};
  EXPECT_EQ(mttkrp(x, s, 0, one).values(), mttkrp(x, s, 0, one).values());
}

TEST(Determinism, AcrossWorkerCounts) {
  std::mt19937_64 rng(10);
  const auto x = test::random_tensor<float>(rng, {8, 8, 8}, 200);
  std::vector<DenseMatrix<float>> fs{test::random_matrix<float>(rng, 8, 4), test::random_matrix<float>(rng, 8, 4)};
  const std::span<const DenseMatrix<float>> s(fs);
  const auto a = values_as_double(mttkrp(x, s, 2, {MttkrpStrategy::atomic, 1}));
  for (int w : {2, 4}) {
    EXPECT_LE(relative_error(values_as_double(mttkrp(x, s, 2, {MttkrpStrategy::atomic, w})), a), 1e-4);
    EXPECT_LE(relative_error(values_as_double(mttkrp(x, s, 2, {MttkrpStrategy::privatized, w})), a), 1e-4);
  }
}
