#include "ieppa/tensor.hpp"

#include <cmath>
#include <string>

#include "ieppa/error.hpp"

namespace ieppa {

namespace {

void RequirePositiveDims(const Dims& d) {
  if (d.n1 == 0 || d.n2 == 0 || d.n3 == 0) {
    Fail(ErrorKind::kInvalidArgument, "tensor dims must be positive");
  }
}

std::string DimsText(const Dims& d) {
  return "(" + std::to_string(d.n1) + "," + std::to_string(d.n2) + "," +
         std::to_string(d.n3) + ")";
}

}  // namespace

Tensor3::Tensor3(Dims dims, double fill) : dims_(dims) {
  RequirePositiveDims(dims);
  data_.assign(dims.size(), fill);
}

Tensor3::Tensor3(Dims dims, std::vector<double> data)
    : dims_(dims), data_(std::move(data)) {
  RequirePositiveDims(dims);
  if (data_.size() != dims.size()) {
    Fail(ErrorKind::kDimensionMismatch,
         "tensor data length " + std::to_string(data_.size()) +
             " does not match dims " + DimsText(dims));
  }
}

Tensor3 Tensor3::Outer(std::span<const double> u1, std::span<const double> u2,
                       std::span<const double> u3) {
  Tensor3 out(Dims{u1.size(), u2.size(), u3.size()});
  std::size_t e = 0;
  for (double a : u1) {
    for (double b : u2) {
      const double ab = a * b;
      for (double c : u3) out.data_[e++] = ab * c;
    }
  }
  return out;
}

void RequireSameDims(const Tensor3& x, const Tensor3& y, const char* what) {
  if (x.dims() != y.dims()) {
    Fail(ErrorKind::kDimensionMismatch, std::string(what) + ": dims " +
                                            DimsText(x.dims()) + " vs " +
                                            DimsText(y.dims()));
  }
}

double InnerProduct(const Tensor3& x, const Tensor3& y) {
  RequireSameDims(x, y, "inner_product");
  return Dot(x.values(), y.values());
}

double Sum(const Tensor3& x) {
  double s = 0.0;
  for (double v : x.values()) s += v;
  return s;
}

double FrobeniusNorm(const Tensor3& x) { return Norm2(x.values()); }

double MaxAbsDiff(const Tensor3& x, const Tensor3& y) {
  RequireSameDims(x, y, "max_abs_diff");
  double m = 0.0;
  for (std::size_t e = 0; e < x.size(); ++e) {
    m = std::max(m, std::abs(x[e] - y[e]));
  }
  return m;
}

Tensor3 ElementwiseCombine(Combine kind, const Tensor3& x, const Tensor3& y) {
  RequireSameDims(x, y, "elementwise_combine");
  Tensor3 out(x.dims());
  for (std::size_t e = 0; e < x.size(); ++e) {
    switch (kind) {
      case Combine::kProduct:
        out[e] = x[e] * y[e];
        break;
      case Combine::kQuotient:
        if (y[e] == 0.0) {
          Fail(ErrorKind::kDomain,
               "elementwise quotient: zero divisor at entry " + std::to_string(e));
        }
        out[e] = x[e] / y[e];
        break;
      case Combine::kMin:
        out[e] = std::min(x[e], y[e]);
        break;
    }
  }
  return out;
}

Tensor3 ElementwiseMap(const EntryMap& map, const Tensor3& x) {
  if ((map.kind == MapKind::kExpScaled || map.kind == MapKind::kLogScaled) &&
      !(map.param > 0.0)) {
    Fail(ErrorKind::kInvalidArgument, "elementwise_map: epsilon must be positive");
  }
  Tensor3 out(x.dims());
  for (std::size_t e = 0; e < x.size(); ++e) {
    const double v = x[e];
    switch (map.kind) {
      case MapKind::kExpScaled:
        out[e] = std::exp(v / map.param);
        break;
      case MapKind::kLogScaled:
        if (!(v > 0.0)) {
          Fail(ErrorKind::kDomain,
               "log_scaled: nonpositive entry at " + std::to_string(e));
        }
        out[e] = std::isinf(v) ? kInf : map.param * std::log(v);
        break;
      case MapKind::kMinScalar:
        out[e] = std::min(v, map.param);
        break;
      case MapKind::kClampNonneg:
        out[e] = std::max(v, 0.0);
        break;
    }
  }
  return out;
}

Tensor3 Axpby(double a, const Tensor3& x, double b, const Tensor3& y) {
  RequireSameDims(x, y, "axpby");
  Tensor3 out(x.dims());
  for (std::size_t e = 0; e < x.size(); ++e) out[e] = a * x[e] + b * y[e];
  return out;
}

double Dot(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    Fail(ErrorKind::kDimensionMismatch, "dot: length mismatch");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double Norm2(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

}  // namespace ieppa
