// sptbench: command-line front end for the sparse tensor benchmark suite.
//
// Mode numbers on the command line are 1-based, like the indices in .tns
// files.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "sptb/analysis.hpp"
#include "sptb/bench.hpp"
#include "sptb/error.hpp"
#include "sptb/fiber.hpp"
#include "sptb/generators.hpp"
#include "sptb/hicoo.hpp"
#include "sptb/report.hpp"
#include "sptb/storage.hpp"
#include "sptb/tns_io.hpp"
#include "sptb/validate.hpp"

using namespace sptb;

namespace {

ModeOrder to_zero_based(const std::vector<std::size_t>& modes) {
  ModeOrder out;
  for (std::size_t m : modes) {
    if (m == 0) throw ConfigError("modes are 1-based");
    out.push_back(m - 1);
  }
  return out;
}

std::vector<Index> to_dims(const std::vector<std::uint64_t>& v) {
  std::vector<Index> out;
  for (auto d : v) {
    if (d == 0 || d > 0xffffffffULL) throw ConfigError("dimension out of range");
    out.push_back(static_cast<Index>(d));
  }
  return out;
}

std::string join(const std::vector<Index>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
  return s;
}

// Text layout for blocked tensors: a header of `#` lines, then per block a
// `block` line with the block coordinates of the compressed modes followed
// by one line per nonzero holding the element offsets of the compressed
// modes, the 1-based indices of the uncompressed modes and the value.
template <typename T>
void write_blocked(const GHicooTensor<T>& g, std::ostream& out, const char* tag) {
  const ModeOrder cm = g.index.compressed_modes();
  const ModeOrder um = g.index.uncompressed_modes();
  out << "# format: " << tag << "\n# dims: " << join(g.dims) << "\n# block_size: "
      << g.block_size() << "\n# compressed_modes:";
  for (Mode m : cm) out << ' ' << m + 1;
  out << "\n# blocks: " << g.nblocks() << "\n# nnz: " << g.nnz() << "\n";
  char num[40];
  for (std::size_t b = 0; b < g.nblocks(); ++b) {
    out << "block";
    for (Mode m : cm) out << ' ' << g.index.binds[m][b];
    out << "\n";
    for (Offset x = g.index.bptr[b]; x < g.index.bptr[b + 1]; ++x) {
      for (Mode m : cm) out << unsigned{g.index.einds[m][x]} << ' ';
      for (Mode m : um) out << std::uint64_t{g.index.inds[m][x]} + 1 << ' ';
      std::snprintf(num, sizeof num, "%.9g", static_cast<double>(g.vals[x]));
      out << num << "\n";
    }
  }
}

template <typename T>
int run_convert(const std::string& input, const std::string& output, const std::string& format,
                std::uint32_t block, const std::vector<std::size_t>& cmodes) {
  const CooTensor<T> t = read_tns<T>(input);
  std::ofstream out(output);
  if (!out) throw Error("cannot write " + output);
  const Format f = parse_format(format);
  std::uint64_t bytes = 0;
  if (f == Format::coo) {
    write_tns(t, out);
    bytes = storage_bytes(t);
  } else if (f == Format::hicoo) {
    const auto g = to_ghicoo(t, natural_order(t.order()), block);
    write_blocked(g, out, "hicoo");
    bytes = storage_bytes(as_hicoo(g));
  } else {
    ModeOrder modes = to_zero_based(cmodes);
    if (modes.empty()) {
      for (Mode m = 0; m + 1 < t.order(); ++m) modes.push_back(m);
    }
    const auto g = to_ghicoo(t, modes, block);
    write_blocked(g, out, "ghicoo");
    bytes = storage_bytes(g);
  }
  out.flush();
  if (!out) throw Error("write failed for " + output);
  std::cerr << "order " << t.order() << ", nnz " << t.nnz() << ", " << to_string(f) << " storage "
            << bytes << " bytes\n";
  return 0;
}

template <typename T>
int run_validate(const std::string& input, std::uint32_t block) {
  const CooTensor<T> t = read_tns<T>(input);
  auto report = [](const char* what, const std::vector<Violation>& vs) {
    std::cout << what << ": " << (vs.empty() ? "ok" : std::to_string(vs.size()) + " violations")
              << "\n";
    for (const auto& v : vs) std::cout << "  " << to_string(v) << "\n";
    return vs.empty();
  };
  bool ok = report("coo", validate(t));
  ok = report("hicoo", validate(to_hicoo(t, block))) && ok;
  std::cout << "order " << t.order() << ", dims " << join(t.dims) << ", nnz " << t.nnz() << "\n";
  return ok ? 0 : 1;
}

template <typename T>
AnalysisParams params_from_tensor(const std::string& path, std::uint32_t block) {
  const CooTensor<T> t = read_tns<T>(path);
  AnalysisParams p;
  p.nnz = t.nnz();
  p.order = t.order();
  if (t.order() >= 2) {
    std::uint64_t fibs = 0;
    for (Mode n = 0; n < t.order(); ++n) fibs += build_fiber_layout(t, n).second.nfibs;
    p.nfibs = (fibs + t.order() / 2) / t.order();
  }
  p.nblocks = to_hicoo(t, block).nblocks();
  p.block_size = block;
  return p;
}

RooflinePlatform pick_platform(const std::string& name, const std::string& file) {
  if (!file.empty()) return find_platform(name, load_platforms(file));
  return find_platform(name);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse tensor kernel benchmark suite"};
  app.require_subcommand(1);
  std::string precision = "f32";
  app.add_option("--precision", precision, "Value precision")
      ->check(CLI::IsMember({"f32", "f64"}))
      ->capture_default_str();

  // convert
  auto* convert = app.add_subcommand("convert", "Convert a .tns tensor to another format");
  std::string c_in, c_out, c_format = "coo";
  std::uint32_t c_block = 128;
  std::vector<std::size_t> c_modes;
  convert->add_option("--input", c_in, "Input .tns file")->required();
  convert->add_option("--output", c_out, "Output file")->required();
  convert->add_option("--format", c_format, "coo, hicoo or ghicoo")
      ->check(CLI::IsMember({"coo", "hicoo", "ghicoo"}))
      ->capture_default_str();
  convert->add_option("--block-size", c_block, "HiCOO block size")->capture_default_str();
  convert->add_option("--compressed-modes", c_modes,
                      "gHiCOO compressed modes, 1-based (default: all but the last)")
      ->delimiter(',');

  // generate
  auto* generate = app.add_subcommand("generate", "Generate a synthetic tensor");
  generate->require_subcommand(1);
  std::uint64_t g_seed = 1;
  std::string g_out;
  generate->add_option("--seed", g_seed, "Random seed")->capture_default_str();
  generate->add_option("--output", g_out, "Output .tns file")->required();

  auto* kron = generate->add_subcommand("kron", "Stochastic Kronecker generator");
  std::vector<double> k_init;
  std::vector<std::uint64_t> k_init_dims, k_dims;
  unsigned k_iter = 1;
  std::uint64_t k_samples = 0;
  kron->add_option("--initiator", k_init, "Initiator cell probabilities, row-major")
      ->required()
      ->delimiter(',');
  kron->add_option("--initiator-dims", k_init_dims, "Initiator shape (default 2 per mode)")
      ->delimiter(',');
  kron->add_option("--iterations", k_iter, "Kronecker power")->required();
  kron->add_option("--dims", k_dims, "Target dims (default: full space)")->delimiter(',');
  kron->add_option("--samples", k_samples, "Number of coordinate draws")->required();

  auto* plaw = generate->add_subcommand("powerlaw", "Power-law stream generator");
  std::vector<std::uint64_t> p_dims;
  std::vector<std::size_t> p_dense;
  std::uint64_t p_nnz = 0;
  double p_alpha = 1.5;
  plaw->add_option("--dims", p_dims, "Tensor dims")->required()->delimiter(',');
  plaw->add_option("--dense-modes", p_dense, "Dense modes, 1-based")->delimiter(',');
  plaw->add_option("--nnz", p_nnz, "Number of coordinate draws")->required();
  plaw->add_option("--alpha", p_alpha, "Power-law exponent")->capture_default_str();

  // bench
  auto* benchcmd = app.add_subcommand("bench", "Benchmark kernels on tensors");
  std::vector<std::string> b_tensors, b_kernels{"tew", "ts", "ttv", "ttm", "mttkrp"},
      b_formats{"coo", "hicoo"};
  std::vector<std::size_t> b_modes, b_cmodes;
  std::size_t b_rank = 16;
  std::uint32_t b_block = 128;
  int b_reps = 5, b_workers = 0;
  std::string b_platform = "Bluesky", b_platform_file, b_csv, b_svg, b_strategy = "atomic";
  std::uint64_t b_seed = 1;
  benchcmd->add_option("--tensors", b_tensors, ".tns files")->required()->delimiter(',');
  benchcmd->add_option("--kernels", b_kernels, "Kernels")->delimiter(',')->capture_default_str();
  benchcmd->add_option("--formats", b_formats, "Formats")->delimiter(',')->capture_default_str();
  benchcmd->add_option("--modes", b_modes, "Modes, 1-based (default: all)")->delimiter(',');
  benchcmd->add_option("-R,--rank", b_rank, "Matrix columns")->capture_default_str();
  benchcmd->add_option("--block-size", b_block, "HiCOO block size")->capture_default_str();
  benchcmd->add_option("--reps", b_reps, "Timed repetitions")->capture_default_str();
  benchcmd->add_option("--workers", b_workers, "Worker count (default: $SPTB_WORKERS or all cores)");
  benchcmd->add_option("--platform", b_platform, "Roofline platform")->capture_default_str();
  benchcmd->add_option("--platforms-file", b_platform_file, "Platform presets file");
  benchcmd->add_option("--compressed-modes", b_cmodes, "gHiCOO compressed modes, 1-based")
      ->delimiter(',');
  benchcmd->add_option("--strategy", b_strategy, "MTTKRP update strategy")
      ->check(CLI::IsMember({"atomic", "privatized"}))
      ->capture_default_str();
  benchcmd->add_option("--seed", b_seed, "Operand seed")->capture_default_str();
  benchcmd->add_option("--csv", b_csv, "CSV report path");
  benchcmd->add_option("--svg", b_svg, "SVG report path");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Model work, traffic, OI and Roofline bound");
  std::vector<std::string> a_kernels{"tew", "ts", "ttv", "ttm", "mttkrp"}, a_formats{"coo", "hicoo"};
  std::uint64_t a_nnz = 0, a_order = 3;
  std::optional<std::uint64_t> a_nfibs, a_nblocks, a_nnzb;
  std::uint64_t a_rank = 16;
  std::uint32_t a_block = 128;
  std::string a_platform = "Bluesky", a_platform_file, a_input;
  analyze->add_option("--kernels", a_kernels, "Kernels")->delimiter(',')->capture_default_str();
  analyze->add_option("--formats", a_formats, "Formats")->delimiter(',')->capture_default_str();
  analyze->add_option("--input", a_input, "Take nnz, nfibs and n_b from a .tns file");
  analyze->add_option("--nnz", a_nnz, "Nonzeros");
  analyze->add_option("--nfibs", a_nfibs, "Fibers");
  analyze->add_option("-R,--rank", a_rank, "Matrix columns")->capture_default_str();
  analyze->add_option("--nblocks", a_nblocks, "HiCOO blocks");
  analyze->add_option("--nnz-per-block", a_nnzb, "Average nonzeros per block");
  analyze->add_option("--order", a_order, "Tensor order")->capture_default_str();
  analyze->add_option("--block-size", a_block, "Block size used with --input")->capture_default_str();
  analyze->add_option("--platform", a_platform, "Roofline platform")->capture_default_str();
  analyze->add_option("--platforms-file", a_platform_file, "Platform presets file");

  // validate
  auto* validatecmd = app.add_subcommand("validate", "Check a .tns tensor's invariants");
  std::string v_in;
  std::uint32_t v_block = 128;
  validatecmd->add_option("--input", v_in, "Input .tns file")->required();
  validatecmd->add_option("--block-size", v_block, "HiCOO block size")->capture_default_str();

  CLI11_PARSE(app, argc, argv);
  const bool f64 = precision == "f64";

  try {
    if (*convert) {
      return f64 ? run_convert<double>(c_in, c_out, c_format, c_block, c_modes)
                 : run_convert<float>(c_in, c_out, c_format, c_block, c_modes);
    }

    if (*generate) {
      if (*kron) {
        KroneckerSpec s;
        const std::size_t order = k_init_dims.empty() ? 0 : k_init_dims.size();
        if (order == 0) {
          // Default shape: 2 per mode, order inferred from the cell count.
          std::size_t n = 0;
          for (std::size_t c = 1; c < k_init.size(); c *= 2) ++n;
          if ((std::size_t{1} << n) != k_init.size() || n == 0) {
            throw ConfigError("pass --initiator-dims for a non-2^N initiator");
          }
          s.initiator_dims.assign(n, 2);
        } else {
          s.initiator_dims = to_dims(k_init_dims);
        }
        s.initiator = k_init;
        s.iterations = k_iter;
        s.sample_count = k_samples;
        s.seed = g_seed;
        s.target_dims = k_dims.empty() ? kronecker_space(s) : to_dims(k_dims);
        if (f64) {
          write_tns(kronecker_generate<double>(s), g_out);
        } else {
          write_tns(kronecker_generate<float>(s), g_out);
        }
      } else {
        PowerLawSpec s;
        s.dims = to_dims(p_dims);
        s.dense_modes = to_zero_based(p_dense);
        for (Mode m = 0; m < s.dims.size(); ++m) {
          if (std::find(s.dense_modes.begin(), s.dense_modes.end(), m) == s.dense_modes.end()) {
            s.sparse_modes.push_back(m);
          }
        }
        s.nnz_target = p_nnz;
        s.alpha = p_alpha;
        s.seed = g_seed;
        if (f64) {
          write_tns(powerlaw_generate<double>(s), g_out);
        } else {
          write_tns(powerlaw_generate<float>(s), g_out);
        }
      }
      return 0;
    }

    if (*benchcmd) {
      BenchConfig cfg;
      cfg.kernels.clear();
      for (const auto& k : b_kernels) cfg.kernels.push_back(parse_kernel(k));
      cfg.formats.clear();
      for (const auto& f : b_formats) cfg.formats.push_back(parse_format(f));
      for (const auto& t : b_tensors) cfg.tensors.push_back(TensorSource::file(t));
      cfg.modes = to_zero_based(b_modes);
      cfg.rank = b_rank;
      cfg.block_size = b_block;
      cfg.repetitions = b_reps;
      cfg.workers = b_workers;
      cfg.platform = pick_platform(b_platform, b_platform_file);
      cfg.precision = f64 ? Precision::f64 : Precision::f32;
      cfg.compressed_modes = to_zero_based(b_cmodes);
      cfg.mttkrp_strategy =
          b_strategy == "privatized" ? MttkrpStrategy::privatized : MttkrpStrategy::atomic;
      cfg.seed = b_seed;
      const BenchSuiteResult result = bench(cfg);

      std::printf("%-16s %-7s %-7s %12s %10s %10s %10s %8s\n", "tensor", "kernel", "format",
                  "time_s", "gflops", "oi", "bound", "eff");
      for (const auto& r : result.reports) {
        std::printf("%-16s %-7s %-7s %12.6g %10.4g %10.4g %10.4g %8.3f\n", r.tensor.c_str(),
                    to_string(r.kernel).c_str(), to_string(r.format).c_str(), r.time_s, r.gflops,
                    r.oi, r.bound_gflops, r.efficiency);
      }
      for (const auto& f : result.failures) {
        std::cerr << "failed: " << f.tensor << ' ' << to_string(f.kernel) << ' '
                  << to_string(f.format) << ": " << f.message << "\n";
      }
      if (!b_csv.empty()) emit_report(result, ReportFormat::csv, b_csv);
      if (!b_svg.empty()) emit_report(result, ReportFormat::svg, b_svg);
      return result.reports.empty() ? 1 : 0;
    }

    if (*analyze) {
      AnalysisParams p;
      if (!a_input.empty()) {
        p = f64 ? params_from_tensor<double>(a_input, a_block)
                : params_from_tensor<float>(a_input, a_block);
      } else {
        p.nnz = a_nnz;
        p.order = a_order;
        p.nfibs = a_nfibs;
        p.nblocks = a_nblocks;
        p.nnz_per_block = a_nnzb;
      }
      p.rank = a_rank;
      const RooflinePlatform plat = pick_platform(a_platform, a_platform_file);
      std::printf("platform %s: peak %g GFLOPS, bandwidth %g GB/s\n", plat.name.c_str(),
                  plat.peak_gflops, plat.dram_bandwidth);
      std::printf("%-7s %-7s %14s %14s %10s %12s\n", "kernel", "format", "flops", "bytes", "oi",
                  "bound_gflops");
      for (const auto& ks : a_kernels) {
        for (const auto& fs : a_formats) {
          const Kernel k = parse_kernel(ks);
          const Format f = parse_format(fs);
          try {
            const double oi = operational_intensity(k, f, p);
            std::printf("%-7s %-7s %14.6g %14.6g %10.6f %12.6g\n", ks.c_str(), fs.c_str(),
                        work_flops(k, p), memory_bytes(k, f, p), oi, roofline_bound(plat, oi));
          } catch (const Error& e) {
            std::printf("%-7s %-7s %s\n", ks.c_str(), fs.c_str(), e.what());
          }
        }
      }
      return 0;
    }

    if (*validatecmd) {
      return f64 ? run_validate<double>(v_in, v_block) : run_validate<float>(v_in, v_block);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
