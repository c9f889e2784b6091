#include "ieppa/gen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ieppa/error.hpp"

namespace ieppa {

std::uint64_t SplitMix64::Next() {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double SplitMix64::Uniform() {
  return (static_cast<double>(Next() >> 11) + 0.5) * 0x1.0p-53;
}

double SplitMix64::Normal() {
  const double u1 = Uniform();
  const double u2 = Uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<MixtureComponent> DefaultMixture() {
  return {{{-2.0, 0.0, 0.0}, 1.0}, {{0.0, 2.0, 0.0}, 1.0}, {{2.0, 0.0, 2.0}, 1.0}};
}

void GenSpec::Validate() const {
  if (marginal_count != 2 && marginal_count != 3) {
    Fail(ErrorKind::kInvalidArgument, "marginal count must be 2 or 3");
  }
  if (n1 == 0 || n2 == 0 || (marginal_count == 3 && n3 == 0)) {
    Fail(ErrorKind::kInvalidArgument, "sizes must be >= 1");
  }
  if (!(capacity_factor > 1.0)) {
    Fail(ErrorKind::kInvalidArgument, "capacity factor must be > 1");
  }
  if (mixture.empty()) Fail(ErrorKind::kInvalidArgument, "mixture needs a component");
  for (const auto& c : mixture) {
    if (!(c.scale > 0.0)) Fail(ErrorKind::kInvalidArgument, "mixture scales must be > 0");
  }
}

namespace {

std::vector<double> DrawMarginal(SplitMix64& rng, std::size_t n) {
  std::vector<double> v(n);
  double s = 0.0;
  for (auto& x : v) {
    x = rng.Uniform();
    s += x;
  }
  for (auto& x : v) x /= s;
  return v;
}

using Point = std::array<double, 3>;

std::vector<Point> DrawPoints(SplitMix64& rng, std::size_t n,
                              const std::vector<MixtureComponent>& mix) {
  std::vector<Point> pts(n);
  for (auto& p : pts) {
    const auto k = std::min(static_cast<std::size_t>(rng.Uniform() * mix.size()),
                            mix.size() - 1);
    for (int d = 0; d < 3; ++d) p[d] = mix[k].mean[d] + mix[k].scale * rng.Normal();
  }
  return pts;
}

double Dist2(const Point& p, const Point& q) {
  double s = 0.0;
  for (int d = 0; d < 3; ++d) s += (p[d] - q[d]) * (p[d] - q[d]);
  return s;
}

}  // namespace

GeneratedInstance GenCmot(const GenSpec& spec) {
  spec.Validate();
  const bool three = spec.marginal_count == 3;
  const Dims dims{spec.n1, spec.n2, three ? spec.n3 : 1};
  SplitMix64 rng(spec.seed);

  std::vector<std::vector<double>> marg;
  marg.push_back(DrawMarginal(rng, dims.n1));
  marg.push_back(DrawMarginal(rng, dims.n2));
  if (three) marg.push_back(DrawMarginal(rng, dims.n3));

  const auto p = DrawPoints(rng, dims.n1, spec.mixture);
  const auto q = DrawPoints(rng, dims.n2, spec.mixture);
  const auto r = three ? DrawPoints(rng, dims.n3, spec.mixture) : std::vector<Point>{};

  Tensor3 cost(dims);
  for (std::size_t a = 0; a < dims.n1; ++a) {
    for (std::size_t b = 0; b < dims.n2; ++b) {
      for (std::size_t c = 0; c < dims.n3; ++c) {
        cost(a, b, c) = three ? Dist2(p[a], q[b]) + Dist2(p[a], r[c]) + Dist2(q[b], r[c])
                              : Dist2(p[a], q[b]);
      }
    }
  }
  const double cmax = *std::max_element(cost.values().begin(), cost.values().end());
  if (cmax > 0.0) {
    for (double& v : cost.values()) v /= cmax;
  }

  const std::vector<double> unit{1.0};
  Tensor3 outer = Tensor3::Outer(marg[0], marg[1], three ? marg[2] : unit);
  Tensor3 upper = outer;
  for (double& v : upper.values()) v *= spec.capacity_factor;

  GeneratedInstance g;
  g.instance.dims = dims;
  g.instance.cost = std::move(cost);
  g.instance.blocks = CmotMarginalBlocks(dims);
  g.instance.rhs = std::move(marg);
  g.instance.upper = std::move(upper);
  g.x_ri = std::move(outer);
  g.instance.Validate(true);
  return g;
}

}  // namespace ieppa
