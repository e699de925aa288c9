#pragma once

#include <string>
#include <vector>

#include "sptb/coo.hpp"
#include "sptb/hicoo.hpp"
#include "sptb/semisparse.hpp"

namespace sptb {

struct Violation {
  std::string invariant;  // short dotted tag, e.g. "index.bounds"
  std::size_t position;   // offending nonzero, block or pointer slot
  std::string detail;
};

std::string to_string(const Violation& v);

// Each returns an empty list iff all structural invariants hold.

template <typename T>
std::vector<Violation> validate(const CooTensor<T>& t);

template <typename T>
std::vector<Violation> validate(const HicooTensor<T>& t);

template <typename T>
std::vector<Violation> validate(const GHicooTensor<T>& t);

template <typename T>
std::vector<Violation> validate(const SemiSparseTensor<T>& t);

}  // namespace sptb
