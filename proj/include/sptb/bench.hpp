#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sptb/analysis.hpp"
#include "sptb/coo.hpp"
#include "sptb/generators.hpp"
#include "sptb/kernels.hpp"
#include "sptb/types.hpp"

namespace sptb {

/// Where a benchmark tensor comes from: a `.tns` file, a generator spec or
/// an in-memory tensor.  Exactly one of the sources is set.
struct TensorSource {
  std::string name;
  std::string path;
  std::optional<KroneckerSpec> kronecker;
  std::optional<PowerLawSpec> powerlaw;
  std::shared_ptr<const CooTensor<double>> tensor;

  static TensorSource file(std::string path);
  static TensorSource memory(std::string name, CooTensor<double> t);
};

struct BenchConfig {
  std::vector<Kernel> kernels{std::begin(kAllKernels), std::end(kAllKernels)};
  std::vector<Format> formats{Format::coo, Format::hicoo};
  std::vector<TensorSource> tensors;
  std::vector<Mode> modes;  // empty: every mode
  std::size_t rank = 16;
  std::uint32_t block_size = 128;
  int repetitions = 5;
  int workers = 0;  // 0: default_workers()
  RooflinePlatform platform = platform_presets().front();
  Precision precision = Precision::f32;
  ModeOrder compressed_modes;  // gHiCOO; empty: every mode but the last
  MttkrpStrategy mttkrp_strategy = MttkrpStrategy::atomic;
  std::uint64_t seed = 1;
  // Called once per kernel, format, tensor and mode inside the untimed
  // pre-processing stage.
  std::function<void()> preprocess_hook;
};

/// Throws ConfigError on invalid settings.
void check_config(const BenchConfig& c);

struct KernelReport {
  std::string tensor;
  Kernel kernel = Kernel::tew;
  Format format = Format::coo;
  double time_s = 0;  // mean over modes and repetitions
  double time_median_s = 0;
  double time_min_s = 0;
  double flops = 0;
  double bytes_model = 0;  // mean over modes
  double oi = 0;
  double gflops = 0;  // flops / (1e9 time_s)
  double bound_gflops = 0;
  double efficiency = 0;
  double gflops_mode_avg = 0;  // mean of per-mode GFLOPS
  std::uint64_t nnz = 0;
  std::size_t order = 0;
  std::size_t modes_run = 0;
};

struct BenchFailure {
  std::string tensor;
  Kernel kernel = Kernel::tew;
  Format format = Format::coo;
  std::string message;
};

struct BenchEnvironment {
  int workers = 0;
  Precision precision = Precision::f32;
  std::string timestamp;  // UTC, ISO 8601
  std::uint64_t seed = 0;
  RooflinePlatform platform;
  int repetitions = 0;
};

struct BenchSuiteResult {
  std::vector<KernelReport> reports;
  std::vector<BenchFailure> failures;
  BenchEnvironment environment;
};

/// Runs every (tensor, kernel, format) triple in order.  A failing triple
/// (unloadable tensor, unsupported pairing, shape error) is recorded in
/// `failures` and the suite moves on.
BenchSuiteResult bench(const BenchConfig& config);

}  // namespace sptb
