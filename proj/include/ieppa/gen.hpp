#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "ieppa/constraints.hpp"
#include "ieppa/tensor.hpp"

namespace ieppa {

// SplitMix64: state advances by 0x9E3779B97F4A7C15 per draw and the output
// is the usual xor-shift-multiply finalizer of the new state.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t Next();
  // ((x >> 11) + 0.5) * 2^-53, strictly inside (0, 1).
  double Uniform();
  // Box-Muller, cosine branch only: consumes two uniforms per normal.
  double Normal();

 private:
  std::uint64_t state_;
};

struct MixtureComponent {
  std::array<double, 3> mean;
  double scale = 1.0;
};

std::vector<MixtureComponent> DefaultMixture();

struct GenSpec {
  int marginal_count = 2;  // 2 or 3
  std::size_t n1 = 10;
  std::size_t n2 = 10;
  std::size_t n3 = 10;  // ignored for 2 marginals
  std::uint64_t seed = 0;
  std::vector<MixtureComponent> mixture = DefaultMixture();
  double capacity_factor = 2.0;

  void Validate() const;
};

struct GeneratedInstance {
  Instance instance;
  Tensor3 x_ri;  // outer product of the marginals
};

// Marginals uniform(0,1) normalized to sum 1, support points from the
// Gaussian mixture, squared-distance cost scaled so its max is 1,
// U = capacity_factor * outer product of the marginals.
GeneratedInstance GenCmot(const GenSpec& spec);

}  // namespace ieppa
