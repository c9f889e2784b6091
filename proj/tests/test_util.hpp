#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ieppa/constraints.hpp"
#include "ieppa/error.hpp"
#include "ieppa/gen.hpp"
#include "ieppa/tensor.hpp"

namespace ieppa::test {

inline Tensor3 Random(Dims d, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
  SplitMix64 rng(seed);
  Tensor3 t(d);
  for (double& v : t.values()) v = lo + (hi - lo) * rng.Uniform();
  return t;
}

inline Instance Cmot(int marginals, std::size_t n, std::uint64_t seed) {
  GenSpec s;
  s.marginal_count = marginals;
  s.n1 = s.n2 = s.n3 = n;
  s.seed = seed;
  return GenCmot(s).instance;
}

// 2x2 transport with C = [[0,1],[1,0]] and a = b = (0.5, 0.5).
inline Instance TwoByTwo(std::optional<double> cap) {
  Instance inst;
  inst.dims = Dims{2, 2, 1};
  inst.cost = Tensor3(inst.dims, {0.0, 1.0, 1.0, 0.0});
  inst.blocks = CmotMarginalBlocks(inst.dims);
  inst.rhs = {{0.5, 0.5}, {0.5, 0.5}};
  if (cap) inst.upper = Tensor3(inst.dims, *cap);
  return inst;
}

inline double RelErr(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

template <class F>
ErrorKind KindOf(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  throw std::logic_error("expected an ieppa::Error");
}

}  // namespace ieppa::test
