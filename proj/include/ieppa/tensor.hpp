#pragma once

#include <array>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace ieppa {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Dims {
  std::size_t n1 = 1;
  std::size_t n2 = 1;
  std::size_t n3 = 1;

  std::size_t size() const { return n1 * n2 * n3; }
  std::size_t extent(int axis) const { return axis == 0 ? n1 : axis == 1 ? n2 : n3; }
  std::size_t flat(std::size_t r, std::size_t s, std::size_t t) const {
    return (r * n2 + s) * n3 + t;
  }
  std::array<std::size_t, 3> coords(std::size_t flat_index) const {
    return {flat_index / (n2 * n3), (flat_index / n3) % n2, flat_index % n3};
  }
  friend bool operator==(const Dims&, const Dims&) = default;
};

// Dense third-order array, row-major: index of (r,s,t) is ((r*n2)+s)*n3+t.
// Two-marginal and image data use n3 == 1.
class Tensor3 {
 public:
  Tensor3() = default;
  explicit Tensor3(Dims dims, double fill = 0.0);
  Tensor3(Dims dims, std::vector<double> data);

  static Tensor3 Zeros(Dims dims) { return Tensor3(dims, 0.0); }
  static Tensor3 Ones(Dims dims) { return Tensor3(dims, 1.0); }
  // u1 (x) u2 (x) u3; pass {1.0} for a trailing unit axis.
  static Tensor3 Outer(std::span<const double> u1, std::span<const double> u2,
                       std::span<const double> u3);

  const Dims& dims() const { return dims_; }
  std::size_t size() const { return data_.size(); }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }
  double& operator()(std::size_t r, std::size_t s, std::size_t t) {
    return data_[dims_.flat(r, s, t)];
  }
  double operator()(std::size_t r, std::size_t s, std::size_t t) const {
    return data_[dims_.flat(r, s, t)];
  }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  const std::vector<double>& vector() const { return data_; }

  friend bool operator==(const Tensor3&, const Tensor3&) = default;

 private:
  Dims dims_{};
  std::vector<double> data_;
};

enum class Combine { kProduct, kQuotient, kMin };

// Scalar maps applied entrywise. kExpScaled: exp(x/eps); kLogScaled: eps*log(x)
// (+inf maps to +inf); kMinScalar: min(x, c); kClampNonneg: max(x, 0).
enum class MapKind { kExpScaled, kLogScaled, kMinScalar, kClampNonneg };

struct EntryMap {
  MapKind kind;
  double param = 0.0;  // eps for exp/log, c for min_scalar

  static EntryMap ExpScaled(double eps) { return {MapKind::kExpScaled, eps}; }
  static EntryMap LogScaled(double eps) { return {MapKind::kLogScaled, eps}; }
  static EntryMap MinScalar(double c) { return {MapKind::kMinScalar, c}; }
  static EntryMap ClampNonneg() { return {MapKind::kClampNonneg, 0.0}; }
};

void RequireSameDims(const Tensor3& x, const Tensor3& y, const char* what);

// Sum of x_e * y_e in ascending flat-index order.
double InnerProduct(const Tensor3& x, const Tensor3& y);
double Sum(const Tensor3& x);
double FrobeniusNorm(const Tensor3& x);
double MaxAbsDiff(const Tensor3& x, const Tensor3& y);

Tensor3 ElementwiseCombine(Combine kind, const Tensor3& x, const Tensor3& y);
Tensor3 ElementwiseMap(const EntryMap& map, const Tensor3& x);

// a*x + b*y
Tensor3 Axpby(double a, const Tensor3& x, double b, const Tensor3& y);

double Dot(std::span<const double> x, std::span<const double> y);
double Norm2(std::span<const double> x);

}  // namespace ieppa
