#include "sptb/oracle.hpp"

#include <string>

#include "sptb/error.hpp"

namespace sptb {

namespace {

std::vector<Index> replace_dim(std::vector<Index> dims, Mode n, std::size_t size) {
  dims[n] = static_cast<Index>(size);
  return dims;
}

std::vector<Index> drop_dim(const std::vector<Index>& dims, Mode n) {
  std::vector<Index> out;
  for (Mode m = 0; m < dims.size(); ++m) {
    if (m != n) out.push_back(dims[m]);
  }
  return out;
}

void check_mode(const DenseTensor& x, Mode n) {
  if (n >= x.order()) throw ConfigError("mode " + std::to_string(n) + " out of range");
}

}  // namespace

DenseTensor oracle_tew(const DenseTensor& x, const DenseTensor& y, ElementwiseOp op) {
  if (x.dims() != y.dims()) throw ShapeError("element-wise operands have different dims");
  DenseTensor out(x.dims(), x.size());
  const auto& a = x.values();
  const auto& b = y.values();
  auto& o = out.values();
  for (std::size_t i = 0; i < o.size(); ++i) {
    switch (op) {
      case ElementwiseOp::add:
        o[i] = a[i] + b[i];
        break;
      case ElementwiseOp::sub:
        o[i] = a[i] - b[i];
        break;
      case ElementwiseOp::mul:
        o[i] = a[i] * b[i];
        break;
      case ElementwiseOp::div:
        if (b[i] != 0.0) {
          o[i] = a[i] / b[i];
        } else if (a[i] != 0.0) {
          throw DomainError("division by zero in dense oracle");
        }
        break;
    }
  }
  return out;
}

DenseTensor oracle_ts(const DenseTensor& x, ScalarOp op, double scalar) {
  DenseTensor out = x;
  for (double& v : out.values()) {
    if (op == ScalarOp::mul) {
      v *= scalar;
    } else if (v != 0.0) {
      v += scalar;
    }
  }
  return out;
}

DenseTensor oracle_ttv(const DenseTensor& x, std::span<const double> v, Mode n) {
  check_mode(x, n);
  if (v.size() != x.dims()[n]) throw ShapeError("vector length does not match mode size");
  DenseTensor out(drop_dim(x.dims(), n), x.size());
  for (std::size_t off = 0; off < x.size(); ++off) {
    const auto c = x.coord(off);
    std::vector<Index> oc;
    for (Mode m = 0; m < c.size(); ++m) {
      if (m != n) oc.push_back(c[m]);
    }
    out.at(oc) += x.values()[off] * v[c[n]];
  }
  return out;
}

DenseTensor oracle_ttm(const DenseTensor& x, const DenseMatrix<double>& u, Mode n) {
  check_mode(x, n);
  if (u.rows() != x.dims()[n]) throw ShapeError("matrix rows do not match mode size");
  DenseTensor out(replace_dim(x.dims(), n, u.cols()), x.size() / x.dims()[n] * u.cols() + 1);
  for (std::size_t off = 0; off < x.size(); ++off) {
    auto c = x.coord(off);
    const Index k = c[n];
    for (std::size_t r = 0; r < u.cols(); ++r) {
      c[n] = static_cast<Index>(r);
      out.at(c) += x.values()[off] * u(k, r);
    }
  }
  return out;
}

DenseMatrix<double> oracle_mttkrp(const DenseTensor& x, std::span<const DenseMatrix<double>> factors,
                                  Mode n) {
  check_mode(x, n);
  if (factors.size() + 1 != x.order()) throw ShapeError("wrong number of factor matrices");
  const std::size_t rank = factors.empty() ? 0 : factors[0].cols();
  std::vector<const DenseMatrix<double>*> byMode(x.order(), nullptr);
  for (Mode m = 0, k = 0; m < x.order(); ++m) {
    if (m == n) continue;
    byMode[m] = &factors[k++];
    if (byMode[m]->rows() != x.dims()[m] || byMode[m]->cols() != rank) {
      throw ShapeError("factor matrix shape mismatch for mode " + std::to_string(m));
    }
  }
  DenseMatrix<double> out(x.dims()[n], rank);
  for (std::size_t off = 0; off < x.size(); ++off) {
    const double val = x.values()[off];
    if (val == 0.0) continue;
    const auto c = x.coord(off);
    for (std::size_t r = 0; r < rank; ++r) {
      double p = val;
      for (Mode m = 0; m < x.order(); ++m) {
        if (m != n) p *= (*byMode[m])(c[m], r);
      }
      out(c[n], r) += p;
    }
  }
  return out;
}

template <typename T>
DenseMatrix<double> to_double(const DenseMatrix<T>& m) {
  DenseMatrix<double> out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.values().size(); ++i) out.values()[i] = m.values()[i];
  return out;
}

template <typename T>
std::vector<double> values_as_double(const DenseMatrix<T>& m) {
  return {m.values().begin(), m.values().end()};
}

template DenseMatrix<double> to_double(const DenseMatrix<float>&);
template DenseMatrix<double> to_double(const DenseMatrix<double>&);
template std::vector<double> values_as_double(const DenseMatrix<float>&);
template std::vector<double> values_as_double(const DenseMatrix<double>&);

}  // namespace sptb
