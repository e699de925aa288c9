#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "sptb/coo.hpp"

namespace sptb {

/// Stochastic Kronecker model.  `initiator` holds cell probabilities of a
/// small tensor of shape `initiator_dims`, row-major with the last mode
/// fastest.  The candidate space has initiator_dims[m]^iterations indices
/// per mode; coordinates outside `target_dims` (empty: the full space) are
/// dropped.
struct KroneckerSpec {
  std::vector<Index> initiator_dims;
  std::vector<double> initiator;
  unsigned iterations = 1;
  std::vector<Index> target_dims;
  std::uint64_t sample_count = 0;
  std::uint64_t seed = 0;
};

/// Power-law stream model.  Sparse-mode indices follow P(i) ~ (i+1)^-alpha
/// over [0, dim); dense-mode indices are uniform and every dense index value
/// occurs at least once.
struct PowerLawSpec {
  std::vector<Index> dims;
  ModeOrder sparse_modes;
  ModeOrder dense_modes;
  std::uint64_t nnz_target = 0;
  double alpha = 1.5;
  std::uint64_t seed = 0;
};

inline constexpr Index kMaxDenseModeSize = 1024;

/// Throws ConfigError if the spec breaks its invariants.
void check_spec(const KroneckerSpec& spec);
void check_spec(const PowerLawSpec& spec);

/// Candidate space size per mode: initiator_dims[m]^iterations.
std::vector<Index> kronecker_space(const KroneckerSpec& spec);

/// Draws `sample_count` coordinates by recursive descent through the
/// initiator.  Values are uniform in (0, 1]; duplicates are summed.  The
/// result depends only on the spec, not on the worker count.
template <typename T>
CooTensor<T> kronecker_generate(const KroneckerSpec& spec, int workers = 0);

/// Probability of every cell of the full Kronecker product, row-major over
/// kronecker_space().  Throws CapacityError beyond `cap` cells.
std::vector<double> kronecker_cell_probabilities(const KroneckerSpec& spec,
                                                 std::size_t cap = 100'000);

/// Exact Bernoulli realization: every cell of the product kept independently
/// with its probability (clamped to 1).  Only feasible on small spaces.
template <typename T>
CooTensor<T> kronecker_bernoulli(const KroneckerSpec& spec, std::size_t cap = 100'000);

/// Emits nnz_target coordinate draws.  Once the draws left equal the number
/// of dense index values not yet seen, dense indices are re-drawn (at most
/// 100 times the dense mode size in total) until an unseen value comes up,
/// then assigned directly.
template <typename T>
CooTensor<T> powerlaw_generate(const PowerLawSpec& spec, int workers = 0);

struct DegreeHistogram {
  Mode mode = 0;
  std::map<std::uint64_t, std::uint64_t> counts;  // degree -> number of indices
};

/// Degree of index value i = number of nonzeros with that index on `mode`.
/// Index values with degree 0 are not counted.
template <typename T>
DegreeHistogram mode_degree_histogram(const CooTensor<T>& t, Mode mode);

struct PowerLawFit {
  double slope = 0;
  double intercept = 0;
  double r2 = 0;
  std::size_t points = 0;
  bool power_law() const { return slope < 0 && r2 >= 0.8; }
};

/// Least-squares line through log(degree), log(frequency).  Degrees seen at
/// least kFitMinFrequency times are used as they are; the sparse tail past
/// the first rarer degree is pooled into power-of-two bins whose counts are
/// divided by the bin width.  Throws DomainError with fewer than 3 distinct
/// degrees.
inline constexpr std::uint64_t kFitMinFrequency = 8;
PowerLawFit powerlaw_fit(const DegreeHistogram& h);

}  // namespace sptb
