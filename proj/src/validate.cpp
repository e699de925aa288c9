#include "sptb/validate.hpp"

#include <algorithm>
#include <bit>
#include <numeric>

#include "sptb/morton.hpp"

namespace sptb {

std::string to_string(const Violation& v) {
  return v.invariant + " at " + std::to_string(v.position) + ": " + v.detail;
}

namespace {

using Violations = std::vector<Violation>;

void check_coords(const std::vector<Index>& dims, const std::vector<std::vector<Index>>& inds,
                  std::size_t nnz, const SortState& sort, Violations& out) {
  const std::size_t order = dims.size();
  for (Mode m = 0; m < order; ++m) {
    if (dims[m] == 0) out.push_back({"dims.positive", m, "mode " + std::to_string(m) + " has size 0"});
  }
  bool lengths_ok = inds.size() == order;
  if (!lengths_ok) {
    out.push_back({"arrays.length", 0,
                   std::to_string(inds.size()) + " index arrays for order " + std::to_string(order)});
    return;
  }
  for (Mode m = 0; m < order; ++m) {
    if (inds[m].size() != nnz) {
      out.push_back({"arrays.length", m,
                     "mode " + std::to_string(m) + " index array has length " +
                         std::to_string(inds[m].size()) + ", expected " + std::to_string(nnz)});
      lengths_ok = false;
    }
  }
  if (!lengths_ok) return;

  for (std::size_t x = 0; x < nnz; ++x) {
    for (Mode m = 0; m < order; ++m) {
      if (inds[m][x] >= dims[m]) {
        out.push_back({"index.bounds", x,
                       "mode " + std::to_string(m) + " index " + std::to_string(inds[m][x]) +
                           " >= dim " + std::to_string(dims[m])});
      }
    }
  }

  std::vector<std::size_t> perm(nnz);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  auto lex_less = [&](std::size_t a, std::size_t b) {
    for (Mode m = 0; m < order; ++m) {
      if (inds[m][a] != inds[m][b]) return inds[m][a] < inds[m][b];
    }
    return false;
  };
  std::sort(perm.begin(), perm.end(), lex_less);
  for (std::size_t k = 1; k < nnz; ++k) {
    if (!lex_less(perm[k - 1], perm[k])) {
      out.push_back({"coords.unique", perm[k], "duplicate of nonzero " + std::to_string(perm[k - 1])});
    }
  }

  if (sort.kind == SortState::Kind::lexicographic) {
    if (sort.mode_order.size() != order) {
      out.push_back({"sort.order", 0, "lexicographic mode order has wrong length"});
      return;
    }
    for (std::size_t x = 1; x < nnz; ++x) {
      for (Mode m : sort.mode_order) {
        if (inds[m][x - 1] < inds[m][x]) break;
        if (inds[m][x - 1] > inds[m][x]) {
          out.push_back({"sort.order", x, "nonzero precedes its predecessor in the declared order"});
          break;
        }
      }
    }
  } else if (sort.kind == SortState::Kind::morton) {
    const ModeOrder all = natural_order(order);
    for (std::size_t x = 1; x < nnz; ++x) {
      if (morton_less(inds, all, x, x - 1)) {
        out.push_back({"sort.order", x, "nonzero breaks Z-curve order"});
      }
    }
  }
}

// Shared checks for HiCOO-style blocked storage.  `compressed[m]` selects
// between (binds, einds) and a flat inds array for mode m.
void check_blocked(const std::vector<Index>& dims, std::uint32_t block,
                   const std::vector<Offset>& bptr, const std::vector<std::vector<BlockIndex>>& binds,
                   const std::vector<std::vector<ElementIndex>>& einds,
                   const std::vector<std::vector<Index>>* inds, const std::vector<char>& compressed,
                   std::size_t nnz, Violations& out) {
  const std::size_t order = dims.size();
  for (Mode m = 0; m < order; ++m) {
    if (dims[m] == 0) out.push_back({"dims.positive", m, "mode " + std::to_string(m) + " has size 0"});
  }
  if (block == 0 || !std::has_single_bit(block) || block > 256) {
    out.push_back({"block.size", 0, "block size " + std::to_string(block) + " invalid"});
    return;
  }
  if (bptr.empty()) {
    out.push_back({"bptr.bounds", 0, "empty block pointer array"});
    return;
  }
  const std::size_t nb = bptr.size() - 1;

  bool structure_ok = true;
  if (bptr.front() != 0) {
    out.push_back({"bptr.bounds", 0, "bptr[0] = " + std::to_string(bptr.front())});
    structure_ok = false;
  }
  if (bptr.back() != nnz) {
    out.push_back({"bptr.bounds", nb,
                   "bptr[n_b] = " + std::to_string(bptr.back()) + ", nnz = " + std::to_string(nnz)});
    structure_ok = false;
  }
  for (std::size_t b = 1; b <= nb; ++b) {
    if (bptr[b] <= bptr[b - 1]) {
      out.push_back({"bptr.monotone", b,
                     "bptr[" + std::to_string(b) + "] = " + std::to_string(bptr[b]) +
                         " does not exceed bptr[" + std::to_string(b - 1) + "]"});
      structure_ok = false;
    }
  }
  if (compressed.size() != order || binds.size() != order || einds.size() != order) {
    out.push_back({"arrays.length", 0, "per-mode arrays do not match the order"});
    return;
  }
  for (Mode m = 0; m < order; ++m) {
    if (compressed[m]) {
      if (binds[m].size() != nb || einds[m].size() != nnz) {
        out.push_back({"arrays.length", m, "mode " + std::to_string(m) + " block/element arrays"});
        structure_ok = false;
      }
    } else if (!inds || (*inds)[m].size() != nnz) {
      out.push_back({"arrays.length", m, "mode " + std::to_string(m) + " index array"});
      structure_ok = false;
    }
  }
  // Element-to-block membership is only meaningful with a sound bptr.
  if (!structure_ok) return;

  for (std::size_t b = 0; b < nb; ++b) {
    for (Offset x = bptr[b]; x < bptr[b + 1]; ++x) {
      for (Mode m = 0; m < order; ++m) {
        if (compressed[m]) {
          const ElementIndex e = einds[m][x];
          if (e >= block) {
            out.push_back({"element.bounds", x,
                           "mode " + std::to_string(m) + " element offset " + std::to_string(e) +
                               " >= block size"});
          } else if (std::uint64_t{binds[m][b]} * block + e >= dims[m]) {
            out.push_back({"index.bounds", x,
                           "mode " + std::to_string(m) + " reconstructed index >= dim " +
                               std::to_string(dims[m])});
          }
        } else if ((*inds)[m][x] >= dims[m]) {
          out.push_back({"index.bounds", x,
                         "mode " + std::to_string(m) + " index " + std::to_string((*inds)[m][x]) +
                             " >= dim " + std::to_string(dims[m])});
        }
      }
    }
  }

  ModeOrder cmodes;
  for (Mode m = 0; m < order; ++m) {
    if (compressed[m]) cmodes.push_back(m);
  }
  std::vector<Index> prev(cmodes.size()), cur(cmodes.size());
  for (std::size_t b = 1; b < nb; ++b) {
    for (std::size_t k = 0; k < cmodes.size(); ++k) {
      prev[k] = binds[cmodes[k]][b - 1];
      cur[k] = binds[cmodes[k]][b];
    }
    if (!morton_less(prev, cur)) {
      out.push_back({"blocks.morton", b, "block coordinates not strictly increasing on the Z-curve"});
    }
  }
}

}  // namespace

template <typename T>
std::vector<Violation> validate(const CooTensor<T>& t) {
  Violations out;
  check_coords(t.dims, t.inds, t.nnz(), t.sort_state, out);
  return out;
}

template <typename T>
std::vector<Violation> validate(const HicooTensor<T>& t) {
  Violations out;
  std::vector<char> all(t.order(), 1);
  check_blocked(t.dims, t.block_size, t.bptr, t.binds, t.einds, nullptr, all, t.nnz(), out);
  return out;
}

template <typename T>
std::vector<Violation> validate(const GHicooTensor<T>& t) {
  Violations out;
  const BlockedIndex& ix = t.index;
  if (ix.inds.size() != t.order()) {
    out.push_back({"arrays.length", 0, "per-mode index arrays do not match the order"});
    return out;
  }
  bool any = false;
  for (char c : ix.compressed) any = any || c;
  if (!any) out.push_back({"modes.compressed", 0, "no compressed mode"});
  check_blocked(t.dims, ix.block_size, ix.bptr, ix.binds, ix.einds, &ix.inds, ix.compressed,
                t.nnz(), out);
  return out;
}

template <typename T>
std::vector<Violation> validate(const SemiSparseTensor<T>& t) {
  Violations out;
  const std::size_t order = t.order();
  if (t.dense_modes.empty()) out.push_back({"modes.dense", 0, "no dense mode"});
  std::vector<int> seen(order, 0);
  for (Mode m : t.dense_modes) {
    if (m < order) ++seen[m];
  }
  for (Mode m : t.sparse_modes) {
    if (m < order) ++seen[m];
  }
  for (Mode m = 0; m < order; ++m) {
    if (seen[m] != 1) {
      out.push_back({"modes.partition", m, "mode " + std::to_string(m) + " not covered exactly once"});
    }
  }
  if (!out.empty()) return out;

  const std::size_t nf = t.nfibers();
  if (nf * t.chunk_size() != t.vals.size()) {
    out.push_back({"vals.length", 0,
                   std::to_string(nf) + " fibers x chunk " + std::to_string(t.chunk_size()) +
                       " != " + std::to_string(t.vals.size()) + " values"});
  }
  std::vector<Index> sdims;
  for (Mode m : t.sparse_modes) sdims.push_back(t.dims[m]);
  if (const auto* coo = std::get_if<CooFiberIndex>(&t.fibers)) {
    check_coords(sdims, coo->inds, nf, SortState{}, out);
  } else {
    const BlockedIndex& ix = std::get<BlockedIndex>(t.fibers);
    check_blocked(sdims, ix.block_size, ix.bptr, ix.binds, ix.einds, &ix.inds, ix.compressed, nf,
                  out);
  }
  return out;
}

template std::vector<Violation> validate(const CooTensor<float>&);
template std::vector<Violation> validate(const CooTensor<double>&);
template std::vector<Violation> validate(const HicooTensor<float>&);
template std::vector<Violation> validate(const HicooTensor<double>&);
template std::vector<Violation> validate(const GHicooTensor<float>&);
template std::vector<Violation> validate(const GHicooTensor<double>&);
template std::vector<Violation> validate(const SemiSparseTensor<float>&);
template std::vector<Violation> validate(const SemiSparseTensor<double>&);

}  // namespace sptb
