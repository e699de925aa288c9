#include "sptb/tns_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

#include "sptb/error.hpp"

namespace sptb {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

// Splits on blanks and tabs.
std::vector<std::string_view> tokens(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    const std::size_t b = i;
    while (i < s.size() && !is_space(s[i])) ++i;
    if (i > b) out.push_back(s.substr(b, i - b));
  }
  return out;
}

template <typename V>
bool parse(std::string_view tok, V& v) {
  const char* end = tok.data() + tok.size();
  const char* begin = tok.data();
  if constexpr (std::is_floating_point_v<V>) {
    if (begin != end && *begin == '+') ++begin;
  }
  auto [p, ec] = std::from_chars(begin, end, v);
  return ec == std::errc() && p == end;
}

}  // namespace

template <typename T>
CooTensor<T> read_tns(std::istream& in) {
  std::vector<Index> header_dims;
  bool have_header = false;
  std::vector<std::vector<Index>> inds;
  std::vector<T> vals;
  std::vector<Index> max_index;
  std::size_t order = 0;

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view s(line);
    const auto toks = tokens(s);
    if (toks.empty()) continue;
    if (toks[0].front() == '#') {
      std::string_view rest = s.substr(s.find('#') + 1);
      const auto rt = tokens(rest);
      if (!rt.empty() && rt[0] == "dims:") {
        if (have_header) throw ParseError(lineno, "repeated dims header");
        for (std::size_t k = 1; k < rt.size(); ++k) {
          std::uint64_t d = 0;
          if (!parse(rt[k], d) || d == 0 || d > 0xffffffffULL) {
            throw ParseError(lineno, "bad dimension '" + std::string(rt[k]) + "'");
          }
          header_dims.push_back(static_cast<Index>(d));
        }
        if (header_dims.empty()) throw ParseError(lineno, "dims header lists no sizes");
        if (order != 0 && order != header_dims.size()) {
          throw ParseError(lineno, "dims header has a different order than the entries");
        }
        have_header = true;
      }
      continue;
    }
    if (toks.size() < 2) throw ParseError(lineno, "expected indices followed by a value");
    const std::size_t n = toks.size() - 1;
    if (order == 0) {
      if (have_header && header_dims.size() != n) {
        throw ParseError(lineno, "entry has " + std::to_string(n) + " indices, dims header has " +
                                     std::to_string(header_dims.size()));
      }
      order = n;
      inds.assign(order, {});
      max_index.assign(order, 0);
    } else if (n != order) {
      throw ParseError(lineno, "entry has " + std::to_string(n) + " indices, expected " +
                                   std::to_string(order));
    }
    for (Mode m = 0; m < order; ++m) {
      std::int64_t idx = 0;
      if (!parse(toks[m], idx)) {
        throw ParseError(lineno, "bad index '" + std::string(toks[m]) + "'");
      }
      if (idx <= 0) throw ParseError(lineno, "index " + std::to_string(idx) + " is not positive");
      if (idx > 0xffffffffLL) throw ParseError(lineno, "index exceeds 32 bits");
      const Index i = static_cast<Index>(idx - 1);
      inds[m].push_back(i);
      max_index[m] = std::max(max_index[m], i + 1);
    }
    T v{};
    if (!parse(toks[order], v)) {
      throw ParseError(lineno, "bad value '" + std::string(toks[order]) + "'");
    }
    vals.push_back(v);
  }

  if (have_header) {
    if (order == 0) inds.assign(header_dims.size(), {});
    return coo_from_arrays(header_dims, std::move(inds), std::move(vals));
  }
  if (order == 0) throw ParseError(lineno, "no entries and no dims header");
  return coo_from_arrays(max_index, std::move(inds), std::move(vals));
}

template <typename T>
CooTensor<T> read_tns(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return read_tns<T>(in);
}

template <typename T>
void write_tns(const CooTensor<T>& t, std::ostream& out) {
  const CooTensor<T> s = lex_sort(t, natural_order(t.order()));
  std::string buf = "# dims:";
  for (Index d : s.dims) buf += " " + std::to_string(d);
  buf += "\n";
  out << buf;
  char num[64];
  for (std::size_t x = 0; x < s.nnz(); ++x) {
    buf.clear();
    for (Mode m = 0; m < s.order(); ++m) {
      buf += std::to_string(std::uint64_t{s.inds[m][x]} + 1);
      buf += ' ';
    }
    std::snprintf(num, sizeof num, "%.9g", static_cast<double>(s.vals[x]));
    buf += num;
    buf += '\n';
    out << buf;
  }
}

template <typename T>
void write_tns(const CooTensor<T>& t, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  write_tns(t, out);
  out.flush();
  if (!out) throw Error("write failed for " + path);
}

#define SPTB_INSTANTIATE(T)                                            \
  template CooTensor<T> read_tns<T>(std::istream&);                    \
  template CooTensor<T> read_tns<T>(const std::string&);               \
  template void write_tns<T>(const CooTensor<T>&, std::ostream&);      \
  template void write_tns<T>(const CooTensor<T>&, const std::string&);

SPTB_INSTANTIATE(float)
SPTB_INSTANTIATE(double)

}  // namespace sptb
