#include "ieppa/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <omp.h>

#include "ieppa/constraints.hpp"
#include "ieppa/tensor.hpp"

namespace ieppa::kernels {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Entries of `axis`-slice i in ascending flat order call f(e, c1, c2) where
// c1 < c2 are the two remaining coordinates.
template <class F>
inline void ForSlice(const Dims& d, int axis, std::size_t i, F&& f) {
  switch (axis) {
    case 0:
      for (std::size_t s = 0; s < d.n2; ++s)
        for (std::size_t t = 0; t < d.n3; ++t) f(d.flat(i, s, t), s, t);
      break;
    case 1:
      for (std::size_t r = 0; r < d.n1; ++r)
        for (std::size_t t = 0; t < d.n3; ++t) f(d.flat(r, i, t), r, t);
      break;
    default:
      for (std::size_t r = 0; r < d.n1; ++r)
        for (std::size_t s = 0; s < d.n2; ++s) f(d.flat(r, s, i), r, s);
      break;
  }
}

inline double LseFinish(double mx, double sum, double eps) {
  if (mx == kNegInf) return kNegInf;
  return mx + eps * std::log(sum);
}

}  // namespace

int MaxThreads() { return omp_get_max_threads(); }
void SetThreads(int n) { omp_set_num_threads(std::max(n, 1)); }

// ---------------------------------------------------------------------------
namespace serial {

void BlockSum(const PartitionBlock& block, std::span<const double> x,
              std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t e = 0; e < x.size(); ++e) {
    const auto j = block.label(e);
    if (j >= 0) out[static_cast<std::size_t>(j)] += x[e];
  }
}

void ScaleRows(const PartitionBlock& block, std::span<const double> v,
               std::span<double> x) {
  for (std::size_t e = 0; e < x.size(); ++e) {
    const auto j = block.label(e);
    if (j >= 0) x[e] *= v[static_cast<std::size_t>(j)];
  }
}

void DivideRows(const PartitionBlock& block, std::span<const double> v,
                std::span<double> x) {
  for (std::size_t e = 0; e < x.size(); ++e) {
    const auto j = block.label(e);
    if (j >= 0) x[e] /= v[static_cast<std::size_t>(j)];
  }
}

void AddRows(const PartitionBlock& block, std::span<const double> v, double sign,
             std::span<double> x) {
  for (std::size_t e = 0; e < x.size(); ++e) {
    const auto j = block.label(e);
    if (j >= 0) x[e] += sign * v[static_cast<std::size_t>(j)];
  }
}

void RowLogSumExp(const PartitionBlock& block, std::span<const double> z,
                  double eps, std::span<double> out) {
  std::vector<double> mx(block.m(), kNegInf);
  for (std::size_t e = 0; e < z.size(); ++e) {
    const auto j = block.label(e);
    if (j >= 0) mx[j] = std::max(mx[j], z[e]);
  }
  std::vector<double> sum(block.m(), 0.0);
  for (std::size_t e = 0; e < z.size(); ++e) {
    const auto j = block.label(e);
    if (j >= 0 && mx[j] != kNegInf) sum[j] += std::exp((z[e] - mx[j]) / eps);
  }
  for (std::size_t j = 0; j < block.m(); ++j) out[j] = LseFinish(mx[j], sum[j], eps);
}

void Multiply(std::span<const double> y, std::span<double> x) {
  for (std::size_t e = 0; e < x.size(); ++e) x[e] *= y[e];
}

void Divide(std::span<const double> y, std::span<double> x) {
  for (std::size_t e = 0; e < x.size(); ++e) x[e] /= y[e];
}

void ExpScaled(std::span<const double> z, double eps, std::span<double> out) {
  for (std::size_t e = 0; e < z.size(); ++e) out[e] = std::exp(z[e] / eps);
}

void CapacityRatio(std::span<const double> u, std::span<const double> m,
                   std::span<double> gamma) {
  for (std::size_t e = 0; e < u.size(); ++e) {
    gamma[e] = std::isinf(u[e]) ? 1.0 : std::min(u[e] / m[e], 1.0);
  }
}

void LogCapacityUpdate(std::span<const double> log_u, std::span<double> w,
                       std::span<double> z) {
  for (std::size_t e = 0; e < z.size(); ++e) {
    const double base = z[e] - w[e];
    w[e] = std::isinf(log_u[e]) ? 0.0 : std::min(log_u[e] - base, 0.0);
    z[e] = base + w[e];
  }
}

void CapacityRatioOuter(const Dims& dims, std::span<const double> u,
                        std::span<const double> m, std::span<const double> f,
                        std::span<const double> g, std::span<const double> h,
                        std::span<double> gamma) {
  for (std::size_t r = 0; r < dims.n1; ++r) {
    for (std::size_t s = 0; s < dims.n2; ++s) {
      for (std::size_t t = 0; t < dims.n3; ++t) {
        const std::size_t e = dims.flat(r, s, t);
        gamma[e] = std::isinf(u[e]) ? 1.0 : std::min((u[e] / m[e]) / (f[r] * g[s] * h[t]), 1.0);
      }
    }
  }
}

void MarginalReduce(const Dims& dims, int axis, std::span<const double> k,
                    std::span<const double> w1, std::span<const double> w2,
                    std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t e = 0; e < k.size(); ++e) {
    const auto c = dims.coords(e);
    std::size_t i, c1, c2;
    if (axis == 0) {
      i = c[0], c1 = c[1], c2 = c[2];
    } else if (axis == 1) {
      i = c[1], c1 = c[0], c2 = c[2];
    } else {
      i = c[2], c1 = c[0], c2 = c[1];
    }
    out[i] += (k[e] * w1[c1]) * w2[c2];
  }
}

}  // namespace serial

// ---------------------------------------------------------------------------
namespace parallel {

void BlockSum(const PartitionBlock& block, std::span<const double> x,
              std::span<double> out) {
  const auto m = static_cast<std::int64_t>(block.m());
#pragma omp parallel for schedule(static) if (x.size() > kParallelThreshold)
  for (std::int64_t j = 0; j < m; ++j) {
    double s = 0.0;
    for (auto e : block.row(static_cast<std::size_t>(j))) s += x[e];
    out[j] = s;
  }
}

void ScaleRows(const PartitionBlock& block, std::span<const double> v,
               std::span<double> x) {
  const auto n = static_cast<std::int64_t>(x.size());
#pragma omp parallel for schedule(static) if (x.size() > kParallelThreshold)
  for (std::int64_t e = 0; e < n; ++e) {
    const auto j = block.label(e);
    if (j >= 0) x[e] *= v[static_cast<std::size_t>(j)];
  }
}

void DivideRows(const PartitionBlock& block, std::span<const double> v,
                std::span<double> x) {
  const auto n = static_cast<std::int64_t>(x.size());
#pragma omp parallel for schedule(static) if (x.size() > kParallelThreshold)
  for (std::int64_t e = 0; e < n; ++e) {
    const auto j = block.label(e);
    if (j >= 0) x[e] /= v[static_cast<std::size_t>(j)];
  }
}

void AddRows(const PartitionBlock& block, std::span<const double> v, double sign,
             std::span<double> x) {
  const auto n = static_cast<std::int64_t>(x.size());
#pragma omp parallel for schedule(static) if (x.size() > kParallelThreshold)
  for (std::int64_t e = 0; e < n; ++e) {
    const auto j = block.label(e);
    if (j >= 0) x[e] += sign * v[static_cast<std::size_t>(j)];
  }
}

void RowLogSumExp(const PartitionBlock& block, std::span<const double> z,
                  double eps, std::span<double> out) {
  const auto m = static_cast<std::int64_t>(block.m());
#pragma omp parallel for schedule(static) if (z.size() > kParallelThreshold)
  for (std::int64_t j = 0; j < m; ++j) {
    const auto row = block.row(static_cast<std::size_t>(j));
    double mx = kNegInf;
    for (auto e : row) mx = std::max(mx, z[e]);
    double s = 0.0;
    if (mx != kNegInf) {
      for (auto e : row) s += std::exp((z[e] - mx) / eps);
    }
    out[j] = LseFinish(mx, s, eps);
  }
}

void Multiply(std::span<const double> y, std::span<double> x) {
  const auto n = static_cast<std::int64_t>(x.size());
#pragma omp parallel for schedule(static) if (x.size() > kParallelThreshold)
  for (std::int64_t e = 0; e < n; ++e) x[e] *= y[e];
}

void Divide(std::span<const double> y, std::span<double> x) {
  const auto n = static_cast<std::int64_t>(x.size());
#pragma omp parallel for schedule(static) if (x.size() > kParallelThreshold)
  for (std::int64_t e = 0; e < n; ++e) x[e] /= y[e];
}

void ExpScaled(std::span<const double> z, double eps, std::span<double> out) {
  const auto n = static_cast<std::int64_t>(z.size());
#pragma omp parallel for schedule(static) if (z.size() > kParallelThreshold)
  for (std::int64_t e = 0; e < n; ++e) out[e] = std::exp(z[e] / eps);
}

void CapacityRatio(std::span<const double> u, std::span<const double> m,
                   std::span<double> gamma) {
  const auto n = static_cast<std::int64_t>(u.size());
#pragma omp parallel for schedule(static) if (u.size() > kParallelThreshold)
  for (std::int64_t e = 0; e < n; ++e) {
    gamma[e] = std::isinf(u[e]) ? 1.0 : std::min(u[e] / m[e], 1.0);
  }
}

void LogCapacityUpdate(std::span<const double> log_u, std::span<double> w,
                       std::span<double> z) {
  const auto n = static_cast<std::int64_t>(z.size());
#pragma omp parallel for schedule(static) if (z.size() > kParallelThreshold)
  for (std::int64_t e = 0; e < n; ++e) {
    const double base = z[e] - w[e];
    w[e] = std::isinf(log_u[e]) ? 0.0 : std::min(log_u[e] - base, 0.0);
    z[e] = base + w[e];
  }
}

void CapacityRatioOuter(const Dims& dims, std::span<const double> u,
                        std::span<const double> m, std::span<const double> f,
                        std::span<const double> g, std::span<const double> h,
                        std::span<double> gamma) {
  const auto n1 = static_cast<std::int64_t>(dims.n1);
#pragma omp parallel for schedule(static) if (u.size() > kParallelThreshold)
  for (std::int64_t r = 0; r < n1; ++r) {
    for (std::size_t s = 0; s < dims.n2; ++s) {
      for (std::size_t t = 0; t < dims.n3; ++t) {
        const std::size_t e = dims.flat(r, s, t);
        gamma[e] = std::isinf(u[e]) ? 1.0 : std::min((u[e] / m[e]) / (f[r] * g[s] * h[t]), 1.0);
      }
    }
  }
}

void MarginalReduce(const Dims& dims, int axis, std::span<const double> k,
                    std::span<const double> w1, std::span<const double> w2,
                    std::span<double> out) {
  const auto n = static_cast<std::int64_t>(dims.extent(axis));
#pragma omp parallel for schedule(static) if (k.size() > kParallelThreshold)
  for (std::int64_t i = 0; i < n; ++i) {
    double s = 0.0;
    ForSlice(dims, axis, static_cast<std::size_t>(i),
             [&](std::size_t e, std::size_t c1, std::size_t c2) {
               s += (k[e] * w1[c1]) * w2[c2];
             });
    out[i] = s;
  }
}

}  // namespace parallel

}  // namespace ieppa::kernels
