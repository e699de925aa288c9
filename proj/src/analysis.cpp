#include "sptb/analysis.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>

#include "sptb/error.hpp"

namespace sptb {

namespace {

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double need(const std::optional<std::uint64_t>& v, const char* what, Kernel k) {
  if (!v) throw ConfigError(std::string(what) + " is required for " + to_string(k));
  return static_cast<double>(*v);
}

}  // namespace

std::string to_string(Kernel k) {
  switch (k) {
    case Kernel::tew:
      return "tew";
    case Kernel::ts:
      return "ts";
    case Kernel::ttv:
      return "ttv";
    case Kernel::ttm:
      return "ttm";
    case Kernel::mttkrp:
      return "mttkrp";
  }
  return "?";
}

std::string to_string(Format f) {
  switch (f) {
    case Format::coo:
      return "coo";
    case Format::hicoo:
      return "hicoo";
    case Format::ghicoo:
      return "ghicoo";
  }
  return "?";
}

Kernel parse_kernel(const std::string& s) {
  const std::string l = lower(s);
  for (Kernel k : kAllKernels) {
    if (to_string(k) == l) return k;
  }
  throw ConfigError("unknown kernel '" + s + "'");
}

Format parse_format(const std::string& s) {
  const std::string l = lower(s);
  for (Format f : {Format::coo, Format::hicoo, Format::ghicoo}) {
    if (to_string(f) == l) return f;
  }
  throw ConfigError("unknown format '" + s + "'");
}

std::uint64_t nnz_per_block(std::uint64_t nnz, std::uint64_t nblocks) {
  if (nblocks == 0) return 0;
  return (nnz + nblocks / 2) / nblocks;
}

double work_flops(Kernel k, const AnalysisParams& p) {
  const double nnz = static_cast<double>(p.nnz);
  switch (k) {
    case Kernel::tew:
    case Kernel::ts:
      return nnz;
    case Kernel::ttv:
      return 2 * nnz;
    case Kernel::ttm:
      return 2 * nnz * need(p.rank, "R", k);
    case Kernel::mttkrp:
      return static_cast<double>(p.order) * nnz * need(p.rank, "R", k);
  }
  return 0;
}

double memory_bytes(Kernel k, Format f, const AnalysisParams& p) {
  const double nnz = static_cast<double>(p.nnz);
  switch (k) {
    case Kernel::tew:
      return 12 * nnz;
    case Kernel::ts:
      return 8 * nnz;
    case Kernel::ttv:
      return 12 * nnz + 12 * need(p.nfibs, "nfibs", k);
    case Kernel::ttm: {
      const double r = need(p.rank, "R", k);
      const double nf = need(p.nfibs, "nfibs", k);
      return 4 * nnz * r + 4 * nf * r + 8 * nnz + 8 * nf;
    }
    case Kernel::mttkrp: {
      const double r = need(p.rank, "R", k);
      if (f == Format::coo) return 12 * nnz * r + 16 * nnz;
      const double nb = need(p.nblocks, "n_b", k);
      const double nnzb = p.nnz_per_block ? static_cast<double>(*p.nnz_per_block)
                                          : static_cast<double>(nnz_per_block(p.nnz, *p.nblocks));
      return 12 * r * std::min(nb * nnzb, nnz) + 7 * nnz + 20 * nb;
    }
  }
  return 0;
}

double operational_intensity(Kernel k, Format f, const AnalysisParams& p) {
  const double bytes = memory_bytes(k, f, p);
  if (bytes == 0) throw DomainError("operational intensity undefined for zero bytes");
  return work_flops(k, p) / bytes;
}

double roofline_bound(const RooflinePlatform& platform, double oi) {
  return std::min(platform.peak_gflops, platform.dram_bandwidth * oi);
}

double efficiency(double measured_gflops, double bound_gflops) {
  return measured_gflops / bound_gflops;
}

const std::vector<RooflinePlatform>& platform_presets() {
  static const std::vector<RooflinePlatform> presets = {
      {"Bluesky", 1000, 256},
      {"Wingtip", 2000, 273},
      {"DGX-1P", 10600, 732},
      {"DGX-1V", 14900, 900},
  };
  return presets;
}

RooflinePlatform find_platform(const std::string& name,
                               const std::vector<RooflinePlatform>& platforms) {
  for (const auto& p : platforms) {
    if (lower(p.name) == lower(name)) return p;
  }
  throw ConfigError("unknown platform '" + name + "'");
}

RooflinePlatform find_platform(const std::string& name) {
  return find_platform(name, platform_presets());
}

std::vector<RooflinePlatform> parse_platforms(std::istream& in) {
  std::vector<RooflinePlatform> out;
  RooflinePlatform cur;
  bool open = false;
  std::size_t block_line = 0;
  auto close = [&]() {
    if (!open) return;
    if (cur.name.empty()) throw ParseError(block_line, "platform block has no name");
    if (!(cur.peak_gflops > 0) || !(cur.dram_bandwidth > 0)) {
      throw ParseError(block_line, "platform '" + cur.name + "' needs positive peak_gflops and mem_bw_gbs");
    }
    out.push_back(cur);
    cur = {};
    open = false;
  };

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) {
      close();
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(lineno, "expected key = value");
    const std::string key = lower(trim(line.substr(0, eq)));
    const std::string value = trim(line.substr(eq + 1));
    if (!open) {
      open = true;
      block_line = lineno;
    }
    if (key == "name") {
      cur.name = value;
      continue;
    }
    double v = 0;
    try {
      std::size_t used = 0;
      v = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
    } catch (const std::exception&) {
      throw ParseError(lineno, "bad number '" + value + "'");
    }
    if (key == "peak_gflops") {
      cur.peak_gflops = v;
    } else if (key == "mem_bw_gbs") {
      cur.dram_bandwidth = v;
    } else {
      throw ParseError(lineno, "unknown key '" + key + "'");
    }
  }
  close();
  return out;
}

std::vector<RooflinePlatform> load_platforms(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return parse_platforms(in);
}

}  // namespace sptb
