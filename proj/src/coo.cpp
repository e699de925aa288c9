#include "sptb/coo.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "sptb/error.hpp"

namespace sptb {

namespace {

template <typename T>
void apply_permutation(CooTensor<T>& t, const std::vector<std::size_t>& perm) {
  std::vector<Index> tmp(perm.size());
  for (auto& arr : t.inds) {
    for (std::size_t x = 0; x < perm.size(); ++x) tmp[x] = arr[perm[x]];
    arr.swap(tmp);
  }
  std::vector<T> v(perm.size());
  for (std::size_t x = 0; x < perm.size(); ++x) v[x] = t.vals[perm[x]];
  t.vals.swap(v);
}

std::vector<std::size_t> lex_permutation(const std::vector<std::vector<Index>>& inds,
                                         std::size_t nnz, const ModeOrder& order) {
  std::vector<std::size_t> perm(nnz);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::stable_sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
    for (Mode m : order) {
      if (inds[m][a] != inds[m][b]) return inds[m][a] < inds[m][b];
    }
    return false;
  });
  return perm;
}

}  // namespace

ModeOrder natural_order(std::size_t order) {
  ModeOrder o(order);
  std::iota(o.begin(), o.end(), Mode{0});
  return o;
}

ModeOrder order_with_last(std::size_t order, Mode n) {
  ModeOrder o;
  o.reserve(order);
  for (Mode m = 0; m < order; ++m) {
    if (m != n) o.push_back(m);
  }
  o.push_back(n);
  return o;
}

void check_permutation(const ModeOrder& order, std::size_t n) {
  if (order.size() != n) {
    throw ConfigError("mode order has " + std::to_string(order.size()) +
                      " entries, tensor has " + std::to_string(n) + " modes");
  }
  std::vector<bool> seen(n, false);
  for (Mode m : order) {
    if (m >= n || seen[m]) throw ConfigError("mode order is not a permutation");
    seen[m] = true;
  }
}

template <typename T>
CooTensor<T> coo_from_arrays(std::vector<Index> dims, std::vector<std::vector<Index>> inds,
                             std::vector<T> vals) {
  const std::size_t order = dims.size();
  if (inds.size() != order) {
    throw ShapeError("expected " + std::to_string(order) + " index arrays, got " +
                     std::to_string(inds.size()));
  }
  for (Mode m = 0; m < order; ++m) {
    if (dims[m] == 0) throw ShapeError("dimension of mode " + std::to_string(m) + " is zero");
    if (inds[m].size() != vals.size()) {
      throw ShapeError("index array of mode " + std::to_string(m) + " has length " +
                       std::to_string(inds[m].size()) + ", expected " +
                       std::to_string(vals.size()));
    }
    for (std::size_t x = 0; x < vals.size(); ++x) {
      if (inds[m][x] >= dims[m]) {
        throw BoundsError("entry " + std::to_string(x) + ": index " +
                          std::to_string(inds[m][x]) + " out of bounds for mode " +
                          std::to_string(m) + " (dim " + std::to_string(dims[m]) + ")");
      }
    }
  }

  CooTensor<T> t(std::move(dims));
  t.inds = std::move(inds);
  t.vals = std::move(vals);
  const ModeOrder order_n = natural_order(order);
  apply_permutation(t, lex_permutation(t.inds, t.nnz(), order_n));

  // Merge runs of equal coordinates in place.
  std::size_t out = 0;
  for (std::size_t x = 0; x < t.nnz(); ++x) {
    bool dup = out > 0;
    if (dup) {
      for (Mode m = 0; m < order; ++m) {
        if (t.inds[m][x] != t.inds[m][out - 1]) {
          dup = false;
          break;
        }
      }
    }
    if (dup) {
      t.vals[out - 1] += t.vals[x];
    } else {
      for (Mode m = 0; m < order; ++m) t.inds[m][out] = t.inds[m][x];
      t.vals[out] = t.vals[x];
      ++out;
    }
  }
  for (auto& a : t.inds) a.resize(out);
  t.vals.resize(out);
  t.sort_state = SortState::lexicographic(order_n);
  return t;
}

template <typename T>
CooTensor<T> coo_from_entries(std::span<const Entry<T>> entries, std::vector<Index> dims) {
  const std::size_t order = dims.size();
  std::vector<std::vector<Index>> inds(order);
  std::vector<T> vals;
  vals.reserve(entries.size());
  for (auto& a : inds) a.reserve(entries.size());
  for (std::size_t e = 0; e < entries.size(); ++e) {
    const auto& [coord, value] = entries[e];
    if (coord.size() != order) {
      throw ShapeError("entry " + std::to_string(e) + " has " + std::to_string(coord.size()) +
                       " coordinates, expected " + std::to_string(order));
    }
    for (Mode m = 0; m < order; ++m) inds[m].push_back(coord[m]);
    vals.push_back(value);
  }
  return coo_from_arrays(std::move(dims), std::move(inds), std::move(vals));
}

template <typename T>
CooTensor<T> lex_sort(const CooTensor<T>& t, const ModeOrder& mode_order) {
  check_permutation(mode_order, t.order());
  CooTensor<T> out = t;
  if (t.sort_state.kind == SortState::Kind::lexicographic && t.sort_state.mode_order == mode_order) {
    return out;
  }
  apply_permutation(out, lex_permutation(out.inds, out.nnz(), mode_order));
  out.sort_state = SortState::lexicographic(mode_order);
  return out;
}

template <typename T>
std::vector<std::size_t> sort_permutation(const CooTensor<T>& t, const ModeOrder& mode_order) {
  check_permutation(mode_order, t.order());
  if (t.sort_state.kind == SortState::Kind::lexicographic && t.sort_state.mode_order == mode_order) {
    std::vector<std::size_t> perm(t.nnz());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    return perm;
  }
  return lex_permutation(t.inds, t.nnz(), mode_order);
}

template <typename T>
bool same_entries(const CooTensor<T>& a, const CooTensor<T>& b) {
  if (a.dims != b.dims || a.nnz() != b.nnz()) return false;
  const ModeOrder o = natural_order(a.order());
  CooTensor<T> sa = lex_sort(a, o);
  CooTensor<T> sb = lex_sort(b, o);
  return sa.inds == sb.inds && sa.vals == sb.vals;
}

#define SPTB_INSTANTIATE(T)                                                                  \
  template CooTensor<T> coo_from_entries<T>(std::span<const Entry<T>>, std::vector<Index>);  \
  template CooTensor<T> coo_from_arrays<T>(std::vector<Index>, std::vector<std::vector<Index>>, \
                                           std::vector<T>);                                  \
  template CooTensor<T> lex_sort<T>(const CooTensor<T>&, const ModeOrder&);                  \
  template bool same_entries<T>(const CooTensor<T>&, const CooTensor<T>&);                 \
  template std::vector<std::size_t> sort_permutation<T>(const CooTensor<T>&, const ModeOrder&);

SPTB_INSTANTIATE(float)
SPTB_INSTANTIATE(double)

}  // namespace sptb
