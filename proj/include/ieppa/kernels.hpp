#pragma once

// Data-parallel inner loops of the BCD sweeps and the DyKL projections.
//
// Every kernel exists twice with identical signatures: `serial` is the plain
// reference loop, `parallel` is the OpenMP version. The parallel versions are
// written so each output element is produced by exactly one thread, summing
// its terms in ascending flat-index order, so both namespaces return
// bit-identical results for any thread count. tests/test_kernels.cpp holds
// them to that.

#include <cstddef>
#include <cstdint>
#include <span>

namespace ieppa {
class PartitionBlock;
struct Dims;
}  // namespace ieppa

namespace ieppa::kernels {

// Below this many entries the parallel kernels run single-threaded.
inline constexpr std::size_t kParallelThreshold = std::size_t{1} << 14;

#define IEPPA_KERNEL_DECLS                                                     \
  /* out[j] = sum of x_e over entries labelled j. */                            \
  void BlockSum(const PartitionBlock& block, std::span<const double> x,         \
                std::span<double> out);                                        \
  /* x_e *= v[label(e)] on covered entries. */                                 \
  void ScaleRows(const PartitionBlock& block, std::span<const double> v,       \
                 std::span<double> x);                                         \
  /* x_e /= v[label(e)] on covered entries. */                                 \
  void DivideRows(const PartitionBlock& block, std::span<const double> v,      \
                  std::span<double> x);                                        \
  /* x_e += v[label(e)] on covered entries (sign=-1 subtracts). */             \
  void AddRows(const PartitionBlock& block, std::span<const double> v,         \
               double sign, std::span<double> x);                              \
  /* out[j] = eps * log(sum_{label(e)=j} exp(z_e / eps)), max-shifted. */      \
  void RowLogSumExp(const PartitionBlock& block, std::span<const double> z,    \
                    double eps, std::span<double> out);                        \
  /* x_e *= y_e */                                                             \
  void Multiply(std::span<const double> y, std::span<double> x);               \
  /* x_e /= y_e */                                                             \
  void Divide(std::span<const double> y, std::span<double> x);                 \
  /* out_e = exp(z_e / eps) */                                                 \
  void ExpScaled(std::span<const double> z, double eps, std::span<double> out);\
  /* gamma_e = min(u_e / m_e, 1); +inf u gives 1. */                           \
  void CapacityRatio(std::span<const double> u, std::span<const double> m,     \
                     std::span<double> gamma);                                 \
  /* gamma_(r,s,t) = min((u / m) / (f_r * g_s * h_t), 1); +inf u gives 1. */    \
  void CapacityRatioOuter(const Dims& dims, std::span<const double> u,         \
                          std::span<const double> m, std::span<const double> f,\
                          std::span<const double> g, std::span<const double> h,\
                          std::span<double> gamma);                            \
  /* Log-domain capacity step: z -= w; w = min(log_u - z, 0) (0 where       \
     log_u is +inf); z += w. */                                                \
  void LogCapacityUpdate(std::span<const double> log_u, std::span<double> w,   \
                         std::span<double> z);                                 \
  /* Axis reduction for the three-marginal sweep: out[i] = sum over entries   \
     with coordinate `axis` equal to i of k_e * w1[c1] * w2[c2], where c1 < c2 \
     are the two remaining coordinates. */                                     \
  void MarginalReduce(const Dims& dims, int axis, std::span<const double> k,   \
                      std::span<const double> w1, std::span<const double> w2,  \
                      std::span<double> out);

namespace serial {
IEPPA_KERNEL_DECLS
}  // namespace serial

namespace parallel {
IEPPA_KERNEL_DECLS
}  // namespace parallel

#undef IEPPA_KERNEL_DECLS

// Number of OpenMP threads the parallel kernels will use (1 without OpenMP).
int MaxThreads();
void SetThreads(int n);

}  // namespace ieppa::kernels
