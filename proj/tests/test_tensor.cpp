#include <doctest.h>

#include <cmath>

#include "ieppa/error.hpp"
#include "ieppa/tensor.hpp"
#include "test_util.hpp"

using namespace ieppa;
using ieppa::test::KindOf;
using ieppa::test::Random;

TEST_CASE("flat index is row-major") {
  const Dims d{2, 3, 4};
  CHECK(d.size() == 24);
  CHECK(d.flat(1, 2, 3) == 23);
  CHECK(d.flat(0, 1, 0) == 4);
  const auto c = d.coords(17);
  CHECK(d.flat(c[0], c[1], c[2]) == 17);
  CHECK(d.extent(0) == 2);
  CHECK(d.extent(2) == 4);
}

TEST_CASE("construction checks") {
  CHECK(KindOf([] { Tensor3(Dims{0, 1, 1}); }) == ErrorKind::kInvalidArgument);
  CHECK(KindOf([] { Tensor3(Dims{2, 2, 1}, std::vector<double>{1, 2, 3}); }) ==
        ErrorKind::kDimensionMismatch);
}

TEST_CASE("inner product examples") {
  const Dims d{2, 2, 1};
  CHECK(InnerProduct(Tensor3::Ones(d), Tensor3::Ones(d)) == 4.0);
  CHECK(InnerProduct(Random(d, 1), Tensor3::Zeros(d)) == 0.0);
  const Tensor3 x(d, {1, 2, 3, 4});
  CHECK(InnerProduct(x, x) == 30.0);
  CHECK(KindOf([&] { InnerProduct(x, Tensor3::Ones(Dims{4, 1, 1})); }) ==
        ErrorKind::kDimensionMismatch);
}

TEST_CASE("inner product is bilinear") {
  const Dims d{3, 2, 2};
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Tensor3 x = Random(d, 3 * s), y = Random(d, 3 * s + 1), z = Random(d, 3 * s + 2);
    const double a = 1.7, b = -0.3;
    const double lhs = InnerProduct(Axpby(a, x, b, y), z);
    const double rhs = a * InnerProduct(x, z) + b * InnerProduct(y, z);
    CHECK(test::RelErr(lhs, rhs) <= 1e-12);
  }
}

TEST_CASE("elementwise combine") {
  const Dims d{2, 3, 1};
  const Tensor3 x = Random(d, 5, 0.1, 2.0);
  CHECK(ElementwiseCombine(Combine::kProduct, x, Tensor3::Ones(d)) == x);
  CHECK(ElementwiseCombine(Combine::kQuotient, x, x) == Tensor3::Ones(d));
  CHECK(ElementwiseCombine(Combine::kMin, x, Tensor3::Zeros(d)) == Tensor3::Zeros(d));
  CHECK(KindOf([&] { ElementwiseCombine(Combine::kQuotient, x, Tensor3::Zeros(d)); }) ==
        ErrorKind::kDomain);
}

TEST_CASE("elementwise map") {
  const Dims d{2, 2, 2};
  CHECK(ElementwiseMap(EntryMap::ExpScaled(0.05), Tensor3::Zeros(d)) == Tensor3::Ones(d));

  Tensor3 neg = Random(d, 9, -1.0, 0.0);
  CHECK(ElementwiseMap(EntryMap::MinScalar(0.0), neg) == neg);
  const Tensor3 clamped = ElementwiseMap(EntryMap::ClampNonneg(), neg);
  for (double v : clamped.values()) CHECK(v == 0.0);

  CHECK(KindOf([&] { ElementwiseMap(EntryMap::LogScaled(0.05), neg); }) == ErrorKind::kDomain);
  Tensor3 u(d, 2.0);
  u[3] = kInf;
  const Tensor3 lu = ElementwiseMap(EntryMap::LogScaled(0.5), u);
  CHECK(lu[3] == kInf);
  CHECK(lu[0] == doctest::Approx(0.5 * std::log(2.0)));
}

TEST_CASE("log and exp round trip") {
  const double eps = 0.05;
  const Tensor3 x = Random(Dims{4, 3, 2}, 11, -50 * eps, 50 * eps);
  const Tensor3 back =
      ElementwiseMap(EntryMap::LogScaled(eps), ElementwiseMap(EntryMap::ExpScaled(eps), x));
  for (std::size_t e = 0; e < x.size(); ++e) {
    CHECK(std::abs(back[e] - x[e]) <= 1e-12 * std::max(1.0, std::abs(x[e])));
  }
}

TEST_CASE("outer product and reductions") {
  const std::vector<double> a{1, 2}, b{3, 4, 5}, c{1};
  const Tensor3 t = Tensor3::Outer(a, b, c);
  CHECK(t.dims() == Dims{2, 3, 1});
  CHECK(t(1, 2, 0) == 10.0);
  CHECK(Sum(t) == 36.0);
  CHECK(FrobeniusNorm(Tensor3(Dims{2, 1, 1}, {3, 4})) == 5.0);
  CHECK(MaxAbsDiff(t, Tensor3::Zeros(t.dims())) == 10.0);
  CHECK(Dot(a, a) == 5.0);
  CHECK(Norm2(std::vector<double>{3, 4}) == 5.0);
}

TEST_CASE("repeated evaluation is bit-identical") {
  const Tensor3 x = Random(Dims{7, 5, 3}, 21), y = Random(Dims{7, 5, 3}, 22);
  const double first = InnerProduct(x, y);
  for (int i = 0; i < 5; ++i) CHECK(InnerProduct(x, y) == first);
}
