#include "sptb/generators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sptb/error.hpp"
#include "sptb/parallel.hpp"

namespace sptb {

namespace {

// Counter-based streams: sample s of a run with seed k draws from an
// engine seeded by mixing (k, s), so any worker can produce any sample.
std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class SampleRng {
 public:
  SampleRng(std::uint64_t seed, std::uint64_t sample) : state_(mix(seed) ^ mix(~sample)) {}

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  // Uniform in (0, 1].
  double uniform_open_zero() { return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53; }
  std::uint64_t below(std::uint64_t n) { return next() % n; }

 private:
  std::uint64_t state_;
};

int resolve(int workers) { return workers > 0 ? workers : default_workers(); }

std::vector<double> cumulative(const std::vector<double>& w) {
  std::vector<double> c(w.size());
  double s = 0;
  for (std::size_t i = 0; i < w.size(); ++i) c[i] = (s += w[i]);
  return c;
}

std::size_t pick(const std::vector<double>& cdf, double u) {
  const double target = u * cdf.back();
  auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
  if (it == cdf.end()) --it;
  return static_cast<std::size_t>(it - cdf.begin());
}

void check_partition(const PowerLawSpec& s) {
  std::vector<int> seen(s.dims.size(), 0);
  for (Mode m : s.sparse_modes) {
    if (m >= s.dims.size()) throw ConfigError("sparse mode out of range");
    ++seen[m];
  }
  for (Mode m : s.dense_modes) {
    if (m >= s.dims.size()) throw ConfigError("dense mode out of range");
    ++seen[m];
  }
  for (int c : seen) {
    if (c != 1) throw ConfigError("sparse and dense modes must partition the tensor modes");
  }
}

}  // namespace

void check_spec(const KroneckerSpec& spec) {
  const std::size_t order = spec.initiator_dims.size();
  if (order == 0) throw ConfigError("initiator has no modes");
  std::size_t cells = 1;
  for (Index d : spec.initiator_dims) {
    if (d < 1) throw ConfigError("initiator dims must be positive");
    cells *= d;
  }
  if (spec.initiator.size() != cells) {
    throw ConfigError("initiator has " + std::to_string(spec.initiator.size()) +
                      " cells, expected " + std::to_string(cells));
  }
  bool any = false;
  for (double p : spec.initiator) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("initiator probabilities must lie in [0,1]");
    any = any || p > 0.0;
  }
  if (!any) throw ConfigError("initiator is all zero");
  if (spec.iterations < 1) throw ConfigError("iterations must be at least 1");
  if (spec.target_dims.empty()) return;
  if (spec.target_dims.size() != order) throw ConfigError("target dims and initiator order differ");
  const auto space = kronecker_space(spec);
  for (Mode m = 0; m < order; ++m) {
    if (spec.target_dims[m] < 1 || spec.target_dims[m] > space[m]) {
      throw ConfigError("target dim of mode " + std::to_string(m) + " must lie in [1, " +
                        std::to_string(space[m]) + "]");
    }
  }
}

void check_spec(const PowerLawSpec& spec) {
  if (spec.dims.empty()) throw ConfigError("power-law spec has no modes");
  for (Index d : spec.dims) {
    if (d < 1) throw ConfigError("dims must be positive");
  }
  check_partition(spec);
  if (spec.sparse_modes.size() < 2) throw ConfigError("power-law spec needs two sparse modes");
  for (Mode m : spec.dense_modes) {
    if (spec.dims[m] > kMaxDenseModeSize) {
      throw ConfigError("dense mode " + std::to_string(m) + " is larger than " +
                        std::to_string(kMaxDenseModeSize));
    }
  }
  if (!(spec.alpha > 1.0)) throw ConfigError("alpha must exceed 1");
  for (Mode m : spec.dense_modes) {
    if (spec.nnz_target < spec.dims[m]) {
      throw ConfigError("nnz target " + std::to_string(spec.nnz_target) +
                        " cannot cover dense mode " + std::to_string(m) + " of size " +
                        std::to_string(spec.dims[m]));
    }
  }
}

std::vector<Index> kronecker_space(const KroneckerSpec& spec) {
  std::vector<Index> space;
  for (Index d : spec.initiator_dims) {
    std::uint64_t s = 1;
    for (unsigned i = 0; i < spec.iterations; ++i) {
      s *= d;
      if (s > 0xffffffffULL) throw ConfigError("Kronecker space exceeds 32-bit indices");
    }
    space.push_back(static_cast<Index>(s));
  }
  return space;
}

namespace {

std::vector<Index> target_of(const KroneckerSpec& spec) {
  return spec.target_dims.empty() ? kronecker_space(spec) : spec.target_dims;
}

}  // namespace

template <typename T>
CooTensor<T> kronecker_generate(const KroneckerSpec& spec, int workers) {
  check_spec(spec);
  const std::size_t order = spec.initiator_dims.size();
  const auto target = target_of(spec);
  const auto cdf = cumulative(spec.initiator);
  // Offset of every initiator cell along each mode.
  std::vector<std::vector<Index>> cell(spec.initiator.size(), std::vector<Index>(order));
  for (std::size_t c = 0; c < spec.initiator.size(); ++c) {
    std::size_t rest = c;
    for (Mode m = order; m-- > 0;) {
      cell[c][m] = static_cast<Index>(rest % spec.initiator_dims[m]);
      rest /= spec.initiator_dims[m];
    }
  }

  const std::int64_t n = static_cast<std::int64_t>(spec.sample_count);
  std::vector<std::vector<Index>> inds(order, std::vector<Index>(spec.sample_count));
  std::vector<T> vals(spec.sample_count);
  std::vector<char> keep(spec.sample_count);
#pragma omp parallel for num_threads(resolve(workers)) schedule(static)
  for (std::int64_t s = 0; s < n; ++s) {
    SampleRng rng(spec.seed, static_cast<std::uint64_t>(s));
    std::vector<Index> c(order, 0);
    for (unsigned level = 0; level < spec.iterations; ++level) {
      const auto& off = cell[pick(cdf, rng.uniform())];
      for (Mode m = 0; m < order; ++m) c[m] = c[m] * spec.initiator_dims[m] + off[m];
    }
    bool inside = true;
    for (Mode m = 0; m < order; ++m) {
      inds[m][s] = c[m];
      inside = inside && c[m] < target[m];
    }
    keep[s] = inside;
    vals[s] = static_cast<T>(rng.uniform_open_zero());
  }

  std::size_t out = 0;
  for (std::size_t s = 0; s < spec.sample_count; ++s) {
    if (!keep[s]) continue;
    for (Mode m = 0; m < order; ++m) inds[m][out] = inds[m][s];
    vals[out++] = vals[s];
  }
  for (auto& a : inds) a.resize(out);
  vals.resize(out);
  return coo_from_arrays(target, std::move(inds), std::move(vals));
}

std::vector<double> kronecker_cell_probabilities(const KroneckerSpec& spec, std::size_t cap) {
  check_spec(spec);
  std::vector<double> p{1.0};
  std::vector<Index> shape(spec.initiator_dims.size(), 1);
  const std::size_t order = shape.size();
  for (unsigned level = 0; level < spec.iterations; ++level) {
    std::size_t total = 1;
    std::vector<Index> next_shape(order);
    for (Mode m = 0; m < order; ++m) {
      next_shape[m] = shape[m] * spec.initiator_dims[m];
      total *= next_shape[m];
    }
    if (total > cap) {
      throw CapacityError("Kronecker product has more than " + std::to_string(cap) + " cells");
    }
    std::vector<double> next(total);
    std::vector<Index> c(order);
    for (std::size_t off = 0; off < total; ++off) {
      std::size_t rest = off;
      for (Mode m = order; m-- > 0;) {
        c[m] = static_cast<Index>(rest % next_shape[m]);
        rest /= next_shape[m];
      }
      std::size_t outer = 0;
      std::size_t inner = 0;
      for (Mode m = 0; m < order; ++m) {
        outer = outer * shape[m] + c[m] / spec.initiator_dims[m];
        inner = inner * spec.initiator_dims[m] + c[m] % spec.initiator_dims[m];
      }
      next[off] = p[outer] * spec.initiator[inner];
    }
    p.swap(next);
    shape.swap(next_shape);
  }
  return p;
}

template <typename T>
CooTensor<T> kronecker_bernoulli(const KroneckerSpec& spec, std::size_t cap) {
  const auto p = kronecker_cell_probabilities(spec, cap);
  const auto space = kronecker_space(spec);
  const std::size_t order = space.size();
  const auto target = target_of(spec);
  CooTensor<T> t(target);
  std::vector<Index> c(order);
  for (std::size_t off = 0; off < p.size(); ++off) {
    SampleRng rng(spec.seed, off);
    if (!(rng.uniform() < p[off])) continue;
    std::size_t rest = off;
    bool inside = true;
    for (Mode m = order; m-- > 0;) {
      c[m] = static_cast<Index>(rest % space[m]);
      rest /= space[m];
      inside = inside && c[m] < target[m];
    }
    if (inside) t.push_back(c, static_cast<T>(rng.uniform_open_zero()));
  }
  t.sort_state = SortState::lexicographic(natural_order(order));
  return t;
}

template <typename T>
CooTensor<T> powerlaw_generate(const PowerLawSpec& spec, int workers) {
  check_spec(spec);
  const std::size_t order = spec.dims.size();
  const std::uint64_t total = spec.nnz_target;

  std::vector<std::vector<double>> cdf(order);
  for (Mode m : spec.sparse_modes) {
    std::vector<double> w(spec.dims[m]);
    for (Index i = 0; i < spec.dims[m]; ++i) w[i] = std::pow(double(i) + 1.0, -spec.alpha);
    cdf[m] = cumulative(w);
  }

  std::vector<std::vector<Index>> inds(order, std::vector<Index>(total));
  std::vector<T> vals(total);
  const std::int64_t n = static_cast<std::int64_t>(total);
#pragma omp parallel for num_threads(resolve(workers)) schedule(static)
  for (std::int64_t s = 0; s < n; ++s) {
    SampleRng rng(spec.seed, static_cast<std::uint64_t>(s));
    for (Mode m : spec.sparse_modes) inds[m][s] = static_cast<Index>(pick(cdf[m], rng.uniform()));
    for (Mode m : spec.dense_modes) inds[m][s] = static_cast<Index>(rng.below(spec.dims[m]));
    vals[s] = static_cast<T>(rng.uniform_open_zero());
  }

  // Sequential pass that enforces dense-mode coverage inside the draw budget.
  for (Mode m : spec.dense_modes) {
    const Index size = spec.dims[m];
    std::vector<char> seen(size, 0);
    std::size_t missing = size;
    std::uint64_t redraws = 0;
    const std::uint64_t redraw_cap = 100ULL * size;
    SampleRng rng(spec.seed ^ 0x5bd1e995ULL, m);
    std::size_t next_unseen = 0;
    for (std::uint64_t s = 0; s < total; ++s) {
      Index& idx = inds[m][s];
      if (missing > 0 && total - s <= missing && seen[idx]) {
        while (seen[idx] && redraws < redraw_cap) {
          idx = static_cast<Index>(rng.below(size));
          ++redraws;
        }
        if (seen[idx]) {
          while (seen[next_unseen]) ++next_unseen;
          idx = static_cast<Index>(next_unseen);
        }
      }
      if (!seen[idx]) {
        seen[idx] = 1;
        --missing;
      }
    }
  }
  return coo_from_arrays(spec.dims, std::move(inds), std::move(vals));
}

template <typename T>
DegreeHistogram mode_degree_histogram(const CooTensor<T>& t, Mode mode) {
  if (mode >= t.order()) throw ConfigError("mode " + std::to_string(mode) + " out of range");
  std::vector<std::uint64_t> degree(t.dims[mode], 0);
  for (Index i : t.inds[mode]) ++degree[i];
  DegreeHistogram h;
  h.mode = mode;
  for (std::uint64_t d : degree) {
    if (d > 0) ++h.counts[d];
  }
  return h;
}

PowerLawFit powerlaw_fit(const DegreeHistogram& h) {
  if (h.counts.size() < 3) {
    throw DomainError("power-law fit needs at least 3 distinct degrees, got " +
                      std::to_string(h.counts.size()));
  }
  std::vector<double> xs;
  std::vector<double> ys;
  auto it = h.counts.begin();
  for (; it != h.counts.end() && it->second >= kFitMinFrequency; ++it) {
    xs.push_back(std::log(double(it->first)));
    ys.push_back(std::log(double(it->second)));
  }
  if (it != h.counts.end()) {
    std::uint64_t lo = it->first;
    while (it != h.counts.end()) {
      const std::uint64_t hi = lo * 2;
      std::uint64_t count = 0;
      for (; it != h.counts.end() && it->first < hi; ++it) count += it->second;
      if (count > 0) {
        xs.push_back(0.5 * (std::log(double(lo)) + std::log(double(hi - 1))));
        ys.push_back(std::log(double(count) / double(hi - lo)));
      }
      lo = hi;
    }
  }

  PowerLawFit fit;
  fit.points = xs.size();
  const double n = double(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0) throw DomainError("power-law fit has a single abscissa");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ss_res += e * e;
  }
  fit.r2 = syy > 0 ? 1.0 - ss_res / syy : 0.0;
  return fit;
}

#define SPTB_INSTANTIATE(T)                                                  \
  template CooTensor<T> kronecker_generate<T>(const KroneckerSpec&, int);    \
  template CooTensor<T> kronecker_bernoulli<T>(const KroneckerSpec&, std::size_t); \
  template CooTensor<T> powerlaw_generate<T>(const PowerLawSpec&, int);      \
  template DegreeHistogram mode_degree_histogram<T>(const CooTensor<T>&, Mode);

SPTB_INSTANTIATE(float)
SPTB_INSTANTIATE(double)

}  // namespace sptb
