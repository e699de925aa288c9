#include "sptb/bench.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <numeric>
#include <random>

#include "sptb/error.hpp"
#include "sptb/fiber.hpp"
#include "sptb/hicoo.hpp"
#include "sptb/parallel.hpp"
#include "sptb/tns_io.hpp"

namespace sptb {

TensorSource TensorSource::file(std::string path) {
  TensorSource s;
  const auto slash = path.find_last_of('/');
  std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
  if (const auto dot = base.rfind('.'); dot != std::string::npos && dot > 0) base.resize(dot);
  s.name = base;
  s.path = std::move(path);
  return s;
}

TensorSource TensorSource::memory(std::string name, CooTensor<double> t) {
  TensorSource s;
  s.name = std::move(name);
  s.tensor = std::make_shared<const CooTensor<double>>(std::move(t));
  return s;
}

void check_config(const BenchConfig& c) {
  if (c.repetitions < 1) throw ConfigError("repetitions must be at least 1");
  if (c.rank < 1) throw ConfigError("R must be at least 1");
  check_block_size(c.block_size);
  if (c.workers < 0) throw ConfigError("worker count must not be negative");
  if (!(c.platform.peak_gflops > 0) || !(c.platform.dram_bandwidth > 0)) {
    throw ConfigError("platform peak and bandwidth must be positive");
  }
}

namespace {

using Clock = std::chrono::steady_clock;

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

template <typename T>
CooTensor<T> cast(const CooTensor<double>& t) {
  CooTensor<T> out(t.dims);
  out.inds = t.inds;
  out.vals.assign(t.vals.begin(), t.vals.end());
  out.sort_state = t.sort_state;
  return out;
}

template <typename T>
CooTensor<T> load(const TensorSource& s) {
  if (s.tensor) {
    if constexpr (std::is_same_v<T, double>) {
      return *s.tensor;
    } else {
      return cast<T>(*s.tensor);
    }
  }
  if (s.kronecker) return kronecker_generate<T>(*s.kronecker);
  if (s.powerlaw) return powerlaw_generate<T>(*s.powerlaw);
  if (!s.path.empty()) return read_tns<T>(s.path);
  throw ConfigError("tensor source '" + s.name + "' is empty");
}

// Operand values uniform in (0, 1], reproducible from the suite seed, the
// tensor position and a per-use tag.
std::mt19937_64 engine(std::uint64_t seed, std::uint64_t tensor, std::uint64_t tag) {
  std::seed_seq seq{seed, seed >> 32, tensor, tag};
  return std::mt19937_64(seq);
}

template <typename T>
class OperandRng {
 public:
  OperandRng(std::uint64_t seed, std::size_t tensor, std::uint64_t tag)
      : eng_(engine(seed, tensor, tag)) {}
  T next() { return static_cast<T>(1.0 - dist_(eng_)); }
  std::vector<T> vector(std::size_t n) {
    std::vector<T> v(n);
    for (T& x : v) x = next();
    return v;
  }
  DenseMatrix<T> matrix(std::size_t rows, std::size_t cols) {
    DenseMatrix<T> m(rows, cols);
    for (T& x : m.values()) x = next();
    return m;
  }

 private:
  std::mt19937_64 eng_;
  std::uniform_real_distribution<double> dist_{0.0, 1.0};
};

struct ModeRun {
  std::vector<double> times;
  double flops = 0;
  double bytes = 0;
};

template <typename T>
struct Context {
  const BenchConfig& cfg;
  std::size_t tensor_pos;
  std::string name;
  CooTensor<T> coo;
  std::optional<HicooTensor<T>> hicoo;
  std::optional<GHicooTensor<T>> ghicoo;
  int workers;

  void hook() const {
    if (cfg.preprocess_hook) cfg.preprocess_hook();
  }

  ModeOrder ghicoo_modes() const {
    if (!cfg.compressed_modes.empty()) return cfg.compressed_modes;
    ModeOrder m;
    for (Mode k = 0; k + 1 < coo.order(); ++k) m.push_back(k);
    if (m.empty()) throw ConfigError("gHiCOO needs a tensor of order >= 2");
    return m;
  }

  const HicooTensor<T>& as_hicoo() {
    if (!hicoo) hicoo = to_hicoo(coo, cfg.block_size);
    return *hicoo;
  }

  const GHicooTensor<T>& as_ghicoo() {
    if (!ghicoo) ghicoo = to_ghicoo(coo, ghicoo_modes(), cfg.block_size);
    return *ghicoo;
  }

  // gHiCOO layout used for the fiber kernels in mode n.
  GHicooTensor<T> fiber_input(Format f, Mode n) {
    if (f == Format::hicoo) {
      ModeOrder m;
      for (Mode k = 0; k < coo.order(); ++k) {
        if (k != n) m.push_back(k);
      }
      if (m.empty()) throw ConfigError("HiCOO fiber kernels need a tensor of order >= 2");
      return to_ghicoo(coo, m, cfg.block_size, n);
    }
    const ModeOrder m = ghicoo_modes();
    if (std::find(m.begin(), m.end(), n) != m.end()) {
      throw ConfigError("product mode " + std::to_string(n) + " is compressed in gHiCOO");
    }
    return to_ghicoo(coo, m, cfg.block_size, n);
  }
};

template <class F>
void timed_reps(int reps, std::vector<double>& times, std::uint64_t& flops, F run) {
  for (int r = 0; r < reps; ++r) {
    const auto t0 = Clock::now();
    const KernelStats s = run();
    const auto t1 = Clock::now();
    times.push_back(std::chrono::duration<double>(t1 - t0).count());
    flops = s.flops;
  }
}

AnalysisParams base_params(std::uint64_t nnz, std::size_t order, std::size_t rank) {
  AnalysisParams p;
  p.nnz = nnz;
  p.order = order;
  p.rank = rank;
  return p;
}

void check_flops(std::uint64_t counted, double modeled, Kernel k) {
  if (static_cast<double>(counted) != modeled) {
    throw Error("instrumented flops " + std::to_string(counted) + " differ from the model " +
                std::to_string(modeled) + " for " + to_string(k));
  }
}

template <typename T>
ModeRun run_tew_ts(Context<T>& ctx, Kernel k, Format f) {
  ModeRun out;
  std::uint64_t flops = 0;
  OperandRng<T> rng(ctx.cfg.seed, ctx.tensor_pos, static_cast<std::uint64_t>(k));
  const T scalar = rng.next();
  auto go = [&](const auto& x) {
    using Tensor = std::decay_t<decltype(x)>;
    if (k == Kernel::tew) {
      ctx.hook();
      auto plan = prepare_tew(x, x, ElementwiseOp::add);
      timed_reps(ctx.cfg.repetitions, out.times, flops, [&] {
        return run_tew(plan, std::span<const T>(x.vals), std::span<const T>(x.vals),
                       ElementwiseOp::add, ctx.workers);
      });
    } else {
      ctx.hook();
      TsPlan<Tensor> plan = prepare_ts(x);
      timed_reps(ctx.cfg.repetitions, out.times, flops, [&] {
        return run_ts(plan, std::span<const T>(x.vals), ScalarOp::mul, scalar, ctx.workers);
      });
    }
  };
  if (f == Format::coo) {
    go(ctx.coo);
  } else if (f == Format::hicoo) {
    go(ctx.as_hicoo());
  } else {
    go(ctx.as_ghicoo());
  }
  const AnalysisParams p = base_params(ctx.coo.nnz(), ctx.coo.order(), ctx.cfg.rank);
  out.flops = work_flops(k, p);
  check_flops(flops, out.flops, k);
  out.bytes = memory_bytes(k, f, p);
  return out;
}

template <typename T>
ModeRun run_fiber_kernel(Context<T>& ctx, Kernel k, Format f, Mode n) {
  ModeRun out;
  std::uint64_t flops = 0;
  std::size_t nfibs = 0;
  OperandRng<T> rng(ctx.cfg.seed, ctx.tensor_pos, 16 * (n + 1) + static_cast<std::uint64_t>(k));
  const Index dim = ctx.coo.dims.at(n);
  auto go = [&](const auto& x) {
    if (k == Kernel::ttv) {
      const std::vector<T> v = rng.vector(dim);
      ctx.hook();
      auto plan = prepare_ttv(x, n);
      nfibs = plan.layout.nfibs;
      timed_reps(ctx.cfg.repetitions, out.times, flops,
                 [&] { return run_ttv(plan, std::span<const T>(v), ctx.workers); });
    } else {
      const DenseMatrix<T> u = rng.matrix(dim, ctx.cfg.rank);
      ctx.hook();
      auto plan = prepare_ttm(x, n, ctx.cfg.rank);
      nfibs = plan.layout.nfibs;
      timed_reps(ctx.cfg.repetitions, out.times, flops,
                 [&] { return run_ttm(plan, u, ctx.workers); });
    }
  };
  if (f == Format::coo) {
    go(ctx.coo);
  } else {
    go(ctx.fiber_input(f, n));
  }
  AnalysisParams p = base_params(ctx.coo.nnz(), ctx.coo.order(), ctx.cfg.rank);
  p.nfibs = nfibs;
  out.flops = work_flops(k, p);
  check_flops(flops, out.flops, k);
  out.bytes = memory_bytes(k, f, p);
  return out;
}

template <typename T>
ModeRun run_mttkrp_mode(Context<T>& ctx, Format f, Mode n) {
  ModeRun out;
  std::uint64_t flops = 0;
  std::size_t nblocks = 0;
  OperandRng<T> rng(ctx.cfg.seed, ctx.tensor_pos, 16 * (n + 1) + 4);
  std::vector<DenseMatrix<T>> factors;
  for (Mode m = 0; m < ctx.coo.order(); ++m) {
    if (m != n) factors.push_back(rng.matrix(ctx.coo.dims[m], ctx.cfg.rank));
  }
  const MttkrpOptions opt{ctx.cfg.mttkrp_strategy, ctx.workers};
  auto go = [&](const auto& x) {
    ctx.hook();
    auto result = prepare_mttkrp(x, std::span<const DenseMatrix<T>>(factors), n);
    timed_reps(ctx.cfg.repetitions, out.times, flops, [&] {
      return run_mttkrp(x, std::span<const DenseMatrix<T>>(factors), n, result, opt);
    });
  };
  if (f == Format::coo) {
    go(ctx.coo);
  } else if (f == Format::hicoo) {
    go(ctx.as_hicoo());
    nblocks = ctx.hicoo->nblocks();
  } else {
    go(ctx.as_ghicoo());
    nblocks = ctx.ghicoo->nblocks();
  }
  AnalysisParams p = base_params(ctx.coo.nnz(), ctx.coo.order(), ctx.cfg.rank);
  p.nblocks = nblocks;
  out.flops = work_flops(Kernel::mttkrp, p);
  check_flops(flops, out.flops, Kernel::mttkrp);
  out.bytes = memory_bytes(Kernel::mttkrp, f, p);
  return out;
}

double mean(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

template <typename T>
KernelReport run_triple(Context<T>& ctx, Kernel k, Format f) {
  std::vector<ModeRun> runs;
  if (k == Kernel::tew || k == Kernel::ts) {
    runs.push_back(run_tew_ts(ctx, k, f));
  } else {
    std::vector<Mode> modes = ctx.cfg.modes;
    if (modes.empty()) modes = natural_order(ctx.coo.order());
    for (Mode n : modes) {
      if (n >= ctx.coo.order()) {
        throw ConfigError("mode " + std::to_string(n) + " out of range for an order-" +
                          std::to_string(ctx.coo.order()) + " tensor");
      }
      runs.push_back(k == Kernel::mttkrp ? run_mttkrp_mode(ctx, f, n)
                                         : run_fiber_kernel(ctx, k, f, n));
    }
  }

  KernelReport r;
  r.tensor = ctx.name;
  r.kernel = k;
  r.format = f;
  r.nnz = ctx.coo.nnz();
  r.order = ctx.coo.order();
  r.modes_run = runs.size();
  std::vector<double> all;
  std::vector<double> bytes;
  double mode_gflops = 0;
  for (const auto& m : runs) {
    all.insert(all.end(), m.times.begin(), m.times.end());
    bytes.push_back(m.bytes);
    mode_gflops += m.flops / (1e9 * mean(m.times));
  }
  r.time_s = mean(all);
  r.time_median_s = median(all);
  r.time_min_s = *std::min_element(all.begin(), all.end());
  r.flops = runs.front().flops;
  r.bytes_model = mean(bytes);
  r.oi = r.flops / r.bytes_model;
  r.gflops = r.flops / (1e9 * r.time_s);
  r.bound_gflops = roofline_bound(ctx.cfg.platform, r.oi);
  r.efficiency = efficiency(r.gflops, r.bound_gflops);
  r.gflops_mode_avg = mode_gflops / double(runs.size());
  return r;
}

template <typename T>
void run_suite(const BenchConfig& cfg, BenchSuiteResult& result) {
  const int workers = result.environment.workers;
  for (std::size_t ti = 0; ti < cfg.tensors.size(); ++ti) {
    const TensorSource& src = cfg.tensors[ti];
    std::optional<Context<T>> ctx;
    try {
      ctx.emplace(Context<T>{cfg, ti, src.name, load<T>(src), std::nullopt, std::nullopt, workers});
    } catch (const std::exception& e) {
      for (Kernel k : cfg.kernels) {
        for (Format f : cfg.formats) result.failures.push_back({src.name, k, f, e.what()});
      }
      continue;
    }
    for (Kernel k : cfg.kernels) {
      for (Format f : cfg.formats) {
        try {
          result.reports.push_back(run_triple(*ctx, k, f));
        } catch (const std::exception& e) {
          result.failures.push_back({src.name, k, f, e.what()});
        }
      }
    }
  }
}

}  // namespace

BenchSuiteResult bench(const BenchConfig& config) {
  check_config(config);
  BenchSuiteResult result;
  result.environment.workers = config.workers > 0 ? config.workers : default_workers();
  result.environment.precision = config.precision;
  result.environment.timestamp = utc_timestamp();
  result.environment.seed = config.seed;
  result.environment.platform = config.platform;
  result.environment.repetitions = config.repetitions;
  if (config.precision == Precision::f64) {
    run_suite<double>(config, result);
  } else {
    run_suite<float>(config, result);
  }
  return result;
}

}  // namespace sptb
