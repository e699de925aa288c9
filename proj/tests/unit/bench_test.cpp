#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <random>
#include <thread>

#include "sptb/bench.hpp"
#include "sptb/error.hpp"
#include "test_util.hpp"

using namespace sptb;

namespace {

BenchConfig small_config(std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  BenchConfig c;
  c.tensors.push_back(TensorSource::memory("small", test::random_tensor<double>(rng, {20, 30, 40}, 500)));
  c.repetitions = 2;
  c.rank = 4;
  c.block_size = 8;
  c.workers = 1;
  return c;
}

}  // namespace

TEST(Bench, CartesianCount) {
  const auto r = bench(small_config());
  EXPECT_EQ(r.reports.size(), 10u);
  EXPECT_TRUE(r.failures.empty());
  std::set<std::pair<Kernel, Format>> seen;
  for (const auto& k : r.reports) seen.insert({k.kernel, k.format});
  EXPECT_EQ(seen.size(), 10u);
}

TEST(Bench, ReportInvariants) {
  auto c = small_config();
  c.formats = {Format::coo, Format::hicoo, Format::ghicoo};
  c.compressed_modes = {0};
  c.modes = {1, 2};
  const auto r = bench(c);
  EXPECT_EQ(r.reports.size(), 15u);
  for (const auto& k : r.reports) {
    EXPECT_NEAR(k.gflops * k.time_s * 1e9, k.flops, 1e-9 * k.flops);
    EXPECT_NEAR(k.oi, k.flops / k.bytes_model, 1e-15 * k.oi);
    EXPECT_NEAR(k.efficiency, k.gflops / k.bound_gflops, 1e-15 * k.efficiency);
    EXPECT_EQ(k.bound_gflops, roofline_bound(c.platform, k.oi));
    EXPECT_GT(k.time_s, 0.0);
    EXPECT_LE(k.time_min_s, k.time_median_s);
    EXPECT_EQ(k.nnz, 500u);
    EXPECT_EQ(k.order, 3u);
  }
}

TEST(Bench, FlopsMatchModel) {
  const auto r = bench(small_config());
  for (const auto& k : r.reports) {
    AnalysisParams p;
    p.nnz = 500;
    p.rank = 4;
    EXPECT_EQ(k.flops, work_flops(k.kernel, p)) << to_string(k.kernel);
  }
}

TEST(Bench, PerModeKernelsAverageOverModes) {
  auto c = small_config();
  c.kernels = {Kernel::ttv, Kernel::tew};
  c.formats = {Format::coo};
  c.repetitions = 5;
  int hooks = 0;
  c.preprocess_hook = [&] { ++hooks; };
  const auto r = bench(c);
  ASSERT_EQ(r.reports.size(), 2u);
  EXPECT_EQ(r.reports[0].modes_run, 3u);
  EXPECT_EQ(r.reports[1].modes_run, 1u);
  // One pre-processing stage per mode plus one for TEW.
  EXPECT_EQ(hooks, 4);
}

TEST(Bench, PreprocessingIsNotTimed) {
  auto c = small_config();
  c.kernels = {Kernel::ts, Kernel::ttm};
  c.formats = {Format::coo, Format::hicoo};
  c.repetitions = 1;
  const auto fast = bench(c);
  c.preprocess_hook = [] { std::this_thread::sleep_for(std::chrono::milliseconds(200)); };
  const auto slow = bench(c);
  ASSERT_EQ(slow.reports.size(), fast.reports.size());
  for (std::size_t i = 0; i < slow.reports.size(); ++i) {
    EXPECT_LT(slow.reports[i].time_s, 0.1);
    EXPECT_LT(slow.reports[i].time_s, fast.reports[i].time_s + 0.05);
  }
}

TEST(Bench, FailuresAreRecordedAndSuiteContinues) {
  auto c = small_config();
  c.formats = {Format::ghicoo};
  c.compressed_modes = {0, 1};
  c.tensors.push_back(TensorSource::file("/nonexistent/x.tns"));
  const auto r = bench(c);
  // TTV and TTM fail on modes 0 and 1, which are compressed.
  EXPECT_EQ(r.reports.size(), 3u);
  std::size_t compressed = 0;
  std::size_t load = 0;
  for (const auto& f : r.failures) {
    if (f.tensor == "small") {
      ++compressed;
      EXPECT_TRUE(f.kernel == Kernel::ttv || f.kernel == Kernel::ttm);
      EXPECT_NE(f.message.find("compressed"), std::string::npos);
    } else {
      ++load;
    }
  }
  EXPECT_EQ(compressed, 2u);
  EXPECT_EQ(load, 5u);
}

TEST(Bench, GeneratedSources) {
  BenchConfig c;
  TensorSource k;
  k.name = "kron";
  k.kronecker = KroneckerSpec{{2, 2, 2}, {0.9, 0.5, 0.5, 0.3, 0.5, 0.3, 0.3, 0.1}, 5, {}, 2000, 3};
  TensorSource p;
  p.name = "plaw";
  p.powerlaw = PowerLawSpec{{500, 500, 8}, {0, 1}, {2}, 3000, 1.5, 4};
  c.tensors = {k, p};
  c.kernels = {Kernel::mttkrp};
  c.repetitions = 1;
  c.rank = 2;
  c.precision = Precision::f64;
  const auto r = bench(c);
  EXPECT_EQ(r.reports.size(), 4u);
  EXPECT_TRUE(r.failures.empty());
  EXPECT_EQ(r.environment.precision, Precision::f64);
}

TEST(Bench, ConfigErrors) {
  auto c = small_config();
  c.repetitions = 0;
  EXPECT_THROW(bench(c), ConfigError);
  c = small_config();
  c.rank = 0;
  EXPECT_THROW(bench(c), ConfigError);
  c = small_config();
  c.block_size = 3;
  EXPECT_THROW(bench(c), ConfigError);
}

TEST(Bench, EnvironmentRecorded) {
  auto c = small_config();
  c.seed = 42;
  c.workers = 2;
  c.kernels = {Kernel::ts};
  const auto r = bench(c);
  EXPECT_EQ(r.environment.seed, 42u);
  EXPECT_EQ(r.environment.workers, 2);
  EXPECT_EQ(r.environment.platform.name, "Bluesky");
  EXPECT_EQ(r.environment.repetitions, 2);
  EXPECT_FALSE(r.environment.timestamp.empty());
}
