#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

// Analytical model of each kernel: work, memory traffic, operational
// intensity and the Roofline bound.

namespace sptb {

enum class Kernel { tew, ts, ttv, ttm, mttkrp };
enum class Format { coo, hicoo, ghicoo };

std::string to_string(Kernel k);
std::string to_string(Format f);
Kernel parse_kernel(const std::string& s);
Format parse_format(const std::string& s);

inline constexpr Kernel kAllKernels[] = {Kernel::tew, Kernel::ts, Kernel::ttv, Kernel::ttm,
                                         Kernel::mttkrp};

struct AnalysisParams {
  std::uint64_t nnz = 0;
  std::optional<std::uint64_t> nfibs;
  std::optional<std::uint64_t> rank;
  std::optional<std::uint64_t> nblocks;
  std::optional<std::uint64_t> nnz_per_block;  // defaults to round(nnz / nblocks)
  std::optional<std::uint64_t> block_size;
  std::uint64_t order = 3;  // MTTKRP does (order) R flops per nonzero
};

/// round(nnz / n_b), 0 when there are no blocks.
std::uint64_t nnz_per_block(std::uint64_t nnz, std::uint64_t nblocks);

/// TEW, TS: nnz.  TTV: 2 nnz.  TTM: 2 nnz R.  MTTKRP: order nnz R.
/// Throws ConfigError when R is needed and missing.
double work_flops(Kernel k, const AnalysisParams& p);

/// Modeled DRAM traffic.  Only MTTKRP distinguishes HiCOO from COO; gHiCOO
/// counts as HiCOO.
double memory_bytes(Kernel k, Format f, const AnalysisParams& p);

/// work_flops / memory_bytes.  Throws DomainError on zero bytes.
double operational_intensity(Kernel k, Format f, const AnalysisParams& p);

struct RooflinePlatform {
  std::string name;
  double peak_gflops = 0;
  double dram_bandwidth = 0;  // GB/s
};

/// min(peak, bandwidth * oi).
double roofline_bound(const RooflinePlatform& platform, double oi);

/// measured / bound, not clamped.
double efficiency(double measured_gflops, double bound_gflops);

/// Bluesky, Wingtip, DGX-1P, DGX-1V.
const std::vector<RooflinePlatform>& platform_presets();

/// Case-insensitive lookup in the built-in presets.  Throws ConfigError.
RooflinePlatform find_platform(const std::string& name);
RooflinePlatform find_platform(const std::string& name,
                               const std::vector<RooflinePlatform>& platforms);

/// Key-value text: `name`, `peak_gflops` and `mem_bw_gbs` lines of the form
/// `key = value`, one block per platform, blocks separated by blank lines.
/// `#` starts a comment.  Throws ParseError.
std::vector<RooflinePlatform> parse_platforms(std::istream& in);
std::vector<RooflinePlatform> load_platforms(const std::string& path);

}  // namespace sptb
