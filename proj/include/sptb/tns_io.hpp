#pragma once

#include <iosfwd>
#include <string>

#include "sptb/coo.hpp"

// FROSTT-style `.tns` files: one nonzero per line, 1-based indices followed
// by the value.  Lines starting with `#` are comments, except an optional
// `# dims: I1 ... IN` header that fixes the dims.  Without it the dims are
// the per-mode maximum indices.

namespace sptb {

/// Throws ParseError (with the line number) on malformed lines, inconsistent
/// arity or indices below 1; BoundsError if an index exceeds a header dim.
template <typename T>
CooTensor<T> read_tns(std::istream& in);
template <typename T>
CooTensor<T> read_tns(const std::string& path);

/// Writes the dims header and the nonzeros in lexicographic order, values
/// with 9 significant digits.
template <typename T>
void write_tns(const CooTensor<T>& t, std::ostream& out);
template <typename T>
void write_tns(const CooTensor<T>& t, const std::string& path);

}  // namespace sptb
