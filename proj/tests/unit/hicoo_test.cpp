#include <gtest/gtest.h>

#include <random>

#include "sptb/error.hpp"
#include "sptb/hicoo.hpp"
#include "sptb/morton.hpp"
#include "sptb/validate.hpp"
#include "test_util.hpp"

using namespace sptb;

namespace {

CooTensor<float> diag3() {
  std::vector<Entry<float>> e = {{{0, 0, 0}, 1.0f}, {{1, 1, 1}, 2.0f}, {{2, 2, 2}, 3.0f}};
  return coo_from_entries(std::span<const Entry<float>>(e), {4, 4, 4});
}

// Reference blocking: block = coord / B, element = coord % B.
template <typename T>
void expect_blocking_arithmetic(const HicooTensor<T>& h, const CooTensor<T>& src) {
  std::map<std::vector<Index>, T> seen;
  for (std::size_t b = 0; b < h.nblocks(); ++b) {
    for (Offset x = h.bptr[b]; x < h.bptr[b + 1]; ++x) {
      std::vector<Index> c(h.order());
      for (Mode m = 0; m < h.order(); ++m) {
        EXPECT_LT(h.einds[m][x], h.block_size);
        c[m] = h.binds[m][b] * h.block_size + h.einds[m][x];
        EXPECT_EQ(c[m] / h.block_size, h.binds[m][b]);
      }
      seen[c] = h.vals[x];
    }
  }
  EXPECT_EQ(seen, test::entry_map(src));
}

}  // namespace

TEST(BlockSize, Validation) {
  EXPECT_NO_THROW(check_block_size(1));
  EXPECT_NO_THROW(check_block_size(128));
  EXPECT_NO_THROW(check_block_size(256));
  EXPECT_THROW(check_block_size(0), ConfigError);
  EXPECT_THROW(check_block_size(3), ConfigError);
  EXPECT_THROW(check_block_size(512), ConfigError);
  EXPECT_EQ(block_bits(128), 7u);
}

TEST(ToHicoo, SmallExample) {
  const auto h = to_hicoo(diag3(), 2);
  ASSERT_EQ(h.nblocks(), 2u);
  EXPECT_EQ(h.bptr, (std::vector<Offset>{0, 2, 3}));
  for (Mode m = 0; m < 3; ++m) {
    EXPECT_EQ(h.binds[m][0], 0u);
    EXPECT_EQ(h.binds[m][1], 1u);
    EXPECT_EQ(h.einds[m][0], 0u);
    EXPECT_EQ(h.einds[m][1], 1u);
    EXPECT_EQ(h.einds[m][2], 0u);
  }
  EXPECT_EQ(h.vals, (std::vector<float>{1, 2, 3}));
}

TEST(ToHicoo, Empty) {
  CooTensor<float> t({3, 3});
  const auto h = to_hicoo(t, 2);
  EXPECT_EQ(h.nblocks(), 0u);
  EXPECT_EQ(h.bptr, (std::vector<Offset>{0}));
}

TEST(ToHicoo, BadBlockSize) {
  EXPECT_THROW(to_hicoo(diag3(), 3), ConfigError);
  EXPECT_THROW(to_hicoo(diag3(), 512), ConfigError);
}

TEST(FromHicoo, AffineReconstruction) {
  HicooTensor<float> h;
  h.dims = {4, 4, 4};
  h.block_size = 2;
  h.bptr = {0, 1};
  h.binds = {{1}, {1}, {1}};
  h.einds = {{0}, {0}, {0}};
  h.vals = {5.0f};
  const auto c = from_hicoo(h);
  ASSERT_EQ(c.nnz(), 1u);
  EXPECT_EQ(c.coord(0), (std::vector<Index>{2, 2, 2}));
}

TEST(FromHicoo, EmptyRoundTrip) {
  CooTensor<float> t({5, 5, 5});
  const auto back = from_hicoo(to_hicoo(t, 4));
  EXPECT_EQ(back.nnz(), 0u);
  EXPECT_EQ(back.dims, t.dims);
}

TEST(FromHicoo, Random666RoundTrip) {
  std::mt19937_64 rng(11);
  const auto t = test::random_tensor<float>(rng, {6, 6, 6}, 50);
  const auto h = to_hicoo(t, 2);
  EXPECT_TRUE(validate(h).empty());
  const auto back = from_hicoo(h);
  EXPECT_EQ(test::entry_map(back), test::entry_map(t));
  EXPECT_EQ(back.sort_state, SortState::lexicographic({0, 1, 2}));
}

TEST(ToHicoo, PropertyRoundTripAndBlocking) {
  std::mt19937_64 rng(12);
  for (int iter = 0; iter < 100; ++iter) {
    const std::size_t order = 1 + rng() % 4;
    const auto t = test::random_tensor<double>(rng, test::random_dims(rng, order, 40), rng() % 120);
    const std::uint32_t b = 1u << (rng() % 6);
    const auto h = to_hicoo(t, b);
    EXPECT_TRUE(validate(h).empty());
    expect_blocking_arithmetic(h, t);
    EXPECT_EQ(test::entry_map(from_hicoo(h)), test::entry_map(t));
  }
}

TEST(ToHicoo, ZOrderAcrossAndWithinBlocks) {
  std::mt19937_64 rng(13);
  const auto t = test::random_tensor<float>(rng, {16, 16, 16}, 300);
  const auto h = to_hicoo(t, 4);
  std::vector<std::vector<Index>> coords;
  for (std::size_t b = 0; b < h.nblocks(); ++b) {
    for (Offset x = h.bptr[b]; x < h.bptr[b + 1]; ++x) {
      std::vector<Index> c(3);
      for (Mode m = 0; m < 3; ++m) c[m] = h.index(m, b, x);
      coords.push_back(c);
    }
  }
  // Independent key: interleave bits, mode 0 highest at each bit level.
  auto key = [](const std::vector<Index>& c) {
    std::uint64_t k = 0;
    for (int bit = 3; bit >= 0; --bit) {  // coordinates are below 16
      for (Index v : c) k = (k << 1) | ((v >> bit) & 1u);
    }
    return k;
  };
  for (std::size_t i = 1; i < coords.size(); ++i) {
    EXPECT_LT(key(coords[i - 1]), key(coords[i]));
    EXPECT_TRUE(morton_less(std::span<const Index>(coords[i - 1]), std::span<const Index>(coords[i])));
  }
}

TEST(ToGhicoo, AllModesMatchesHicoo) {
  std::mt19937_64 rng(14);
  const auto t = test::random_tensor<float>(rng, {9, 7, 8}, 60);
  const auto g = to_ghicoo(t, {0, 1, 2}, 4);
  const auto h = to_hicoo(t, 4);
  const auto a = as_hicoo(g);
  EXPECT_EQ(a.bptr, h.bptr);
  EXPECT_EQ(a.binds, h.binds);
  EXPECT_EQ(a.einds, h.einds);
  EXPECT_EQ(a.vals, h.vals);
}

TEST(ToGhicoo, UncompressedModeStaysFlat) {
  std::mt19937_64 rng(15);
  const auto t = test::random_tensor<float>(rng, {20, 20, 300}, 80);
  const auto g = to_ghicoo(t, {0, 1}, 4);
  EXPECT_TRUE(g.index.compressed[0]);
  EXPECT_TRUE(g.index.compressed[1]);
  EXPECT_FALSE(g.index.compressed[2]);
  EXPECT_EQ(g.index.inds[2].size(), t.nnz());
  EXPECT_TRUE(g.index.binds[2].empty());
  EXPECT_TRUE(g.index.einds[2].empty());
  EXPECT_EQ(g.index.binds[0].size(), g.nblocks());
  EXPECT_TRUE(validate(g).empty());
  EXPECT_EQ(test::entry_map(from_hicoo(g)), test::entry_map(t));
  EXPECT_THROW(as_hicoo(g), ConfigError);
}

TEST(ToGhicoo, EmptyModeSetRejected) {
  EXPECT_THROW(to_ghicoo(diag3(), {}, 2), ConfigError);
  EXPECT_THROW(to_ghicoo(diag3(), {0, 0}, 2), ConfigError);
  EXPECT_THROW(to_ghicoo(diag3(), {5}, 2), ConfigError);
}

TEST(ToGhicoo, FiberModeLastInTail) {
  std::mt19937_64 rng(16);
  const auto t = test::random_tensor<float>(rng, {6, 30, 30}, 90);
  const auto g = to_ghicoo(t, {0}, 2, Mode{1});
  EXPECT_EQ(g.tail_order.back(), 1u);
  EXPECT_TRUE(validate(g).empty());
  EXPECT_THROW(to_ghicoo(t, {0}, 2, Mode{0}), ConfigError);
}

TEST(ToGhicoo, PropertyRoundTrip) {
  std::mt19937_64 rng(17);
  for (int iter = 0; iter < 100; ++iter) {
    const std::size_t order = 2 + rng() % 3;
    const auto t = test::random_tensor<double>(rng, test::random_dims(rng, order, 30), rng() % 100);
    ModeOrder modes;
    for (Mode m = 0; m < order; ++m) {
      if (rng() % 2) modes.push_back(m);
    }
    if (modes.empty()) modes.push_back(rng() % order);
    const auto g = to_ghicoo(t, modes, 1u << (rng() % 5));
    EXPECT_TRUE(validate(g).empty());
    EXPECT_EQ(test::entry_map(from_hicoo(g)), test::entry_map(t));
  }
}
