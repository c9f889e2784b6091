#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <numeric>

#include <Eigen/Dense>

#include "ieppa/oracle.hpp"
#include "test_util.hpp"

using namespace ieppa;
using test::KindOf;

namespace {

// Brute-force LP optimum over all basic solutions. Only for a handful of
// variables: every column subset of size rank(A) is tried with each
// nonbasic variable at 0 or at its finite upper bound.
std::optional<double> VertexEnumeration(const StandardLp& lp) {
  const auto m = static_cast<Eigen::Index>(lp.rows);
  const auto n = static_cast<Eigen::Index>(lp.cols);
  Eigen::MatrixXd a(m, n);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = lp.at(i, j);
  }
  const Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(lp.b.data(), m);

  std::vector<Eigen::Index> rows;
  Eigen::MatrixXd ar(0, n);
  for (Eigen::Index i = 0; i < m; ++i) {
    Eigen::MatrixXd t(ar.rows() + 1, n);
    t << ar, a.row(i);
    if (Eigen::FullPivLU<Eigen::MatrixXd>(t).rank() == t.rows()) {
      ar = t;
      rows.push_back(i);
    }
  }
  const Eigen::Index r = ar.rows();
  Eigen::VectorXd br(r);
  for (Eigen::Index k = 0; k < r; ++k) br(k) = b(rows[static_cast<std::size_t>(k)]);

  std::optional<double> best;
  std::vector<bool> pick(static_cast<std::size_t>(n), false);
  std::fill(pick.begin(), pick.begin() + r, true);
  do {
    std::vector<Eigen::Index> basic, nonbasic;
    for (Eigen::Index j = 0; j < n; ++j) {
      (pick[static_cast<std::size_t>(j)] ? basic : nonbasic).push_back(j);
    }
    Eigen::MatrixXd mb(r, r);
    for (Eigen::Index k = 0; k < r; ++k) mb.col(k) = ar.col(basic[static_cast<std::size_t>(k)]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(mb);
    if (lu.rank() < r) continue;
    std::vector<Eigen::Index> bounded;
    for (Eigen::Index j : nonbasic) {
      if (std::isfinite(lp.ub[static_cast<std::size_t>(j)])) bounded.push_back(j);
    }
    for (unsigned mask = 0; mask < (1u << bounded.size()); ++mask) {
      Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
      for (std::size_t q = 0; q < bounded.size(); ++q) {
        if (mask & (1u << q)) x(bounded[q]) = lp.ub[static_cast<std::size_t>(bounded[q])];
      }
      const Eigen::VectorXd xb = lu.solve(br - ar * x);
      for (Eigen::Index k = 0; k < r; ++k) x(basic[static_cast<std::size_t>(k)]) = xb(k);
      bool ok = (a * x - b).cwiseAbs().maxCoeff() <= 1e-9;
      for (Eigen::Index j = 0; ok && j < n; ++j) {
        ok = x(j) >= -1e-9 && x(j) <= lp.ub[static_cast<std::size_t>(j)] + 1e-9;
      }
      if (!ok) continue;
      const double obj = Eigen::Map<const Eigen::VectorXd>(lp.c.data(), n).dot(x);
      if (!best || obj < *best) best = obj;
    }
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return best;
}

Instance TomoInstance(std::size_t n, std::uint64_t seed, bool capped) {
  const Tensor3 img = test::Random(Dims{n, n, 1}, seed, 0.1, 1.0);
  Instance inst;
  inst.dims = img.dims();
  inst.cost = test::Random(inst.dims, seed + 1);
  inst.blocks = {TomoBlock(n, Direction{1, 0}), TomoBlock(n, Direction{0, 1})};
  for (const auto& b : inst.blocks) inst.rhs.push_back(ApplyBlock(b, img));
  if (capped) inst.upper = Tensor3(inst.dims, 1.0);
  return inst;
}

void CheckVertex(const Instance& inst, const LpResult& r) {
  const StandardLp lp = Flatten(inst);
  for (std::size_t i = 0; i < lp.rows; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < lp.cols; ++j) s += lp.at(i, j) * r.x[j];
    CHECK(std::abs(s - lp.b[i]) <= 1e-10);
  }
  std::vector<bool> is_basic(lp.cols, false);
  for (std::size_t j : r.basis) is_basic[j] = true;
  CHECK(r.basis.size() <= lp.rows);
  for (std::size_t j = 0; j < lp.cols; ++j) {
    CHECK(r.x[j] >= -1e-10);
    CHECK(r.x[j] <= lp.ub[j] + 1e-10);
    if (!is_basic[j]) {
      CHECK((std::abs(r.x[j]) <= 1e-10 || std::abs(r.x[j] - lp.ub[j]) <= 1e-10));
    }
  }
}

}  // namespace

TEST_CASE("flatten layout") {
  const StandardLp lp = Flatten(test::TwoByTwo(std::nullopt));
  CHECK(lp.rows == 4);
  CHECK(lp.cols == 4);
  const std::vector<double> want{1, 1, 0, 0, 0, 0, 1, 1, 1, 0, 1, 0, 0, 1, 0, 1};
  CHECK(lp.a == want);
  for (double u : lp.ub) CHECK(u == kInf);

  const StandardLp tomo = Flatten(TomoInstance(3, 1, false));
  CHECK(tomo.cols == 9);
  CHECK(tomo.rows == 6);

  const StandardLp three = Flatten(test::Cmot(3, 3, 2));
  for (std::size_t j = 0; j < three.cols; ++j) {
    double ones = 0.0;
    for (std::size_t i = 0; i < three.rows; ++i) ones += three.at(i, j);
    CHECK(ones == 3.0);
  }
}

TEST_CASE("two by two examples") {
  const auto free = SolveOracle(test::TwoByTwo(std::nullopt));
  CHECK(free.objective == doctest::Approx(0.0));
  CHECK(MaxAbsDiff(free.x, Tensor3(Dims{2, 2, 1}, {0.5, 0, 0, 0.5})) <= 1e-12);

  const auto capped = SolveOracle(test::TwoByTwo(0.3));
  CHECK(capped.objective == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(MaxAbsDiff(capped.x, Tensor3(Dims{2, 2, 1}, {0.3, 0.2, 0.2, 0.3})) <= 1e-12);

  Instance bad = test::TwoByTwo(std::nullopt);
  bad.rhs[1] = {0.5, 0.6};
  CHECK(KindOf([&] { SolveOracle(bad); }) == ErrorKind::kInfeasible);
  CHECK(SolveLpExact(Flatten(bad)).status == LpStatus::kInfeasible);

  Instance tight = test::TwoByTwo(0.2);
  CHECK(KindOf([&] { SolveOracle(tight); }) == ErrorKind::kInfeasible);
}

TEST_CASE("simplex agrees with vertex enumeration") {
  int checked = 0;
  for (std::uint64_t s = 0; s < 12; ++s) {
    std::vector<Instance> cases;
    GenSpec two;
    two.n1 = 3;
    two.n2 = 4;
    two.seed = 100 + s;
    cases.push_back(GenCmot(two).instance);
    GenSpec three;
    three.marginal_count = 3;
    three.n1 = 2;
    three.n2 = 3;
    three.n3 = 2;
    three.seed = 200 + s;
    cases.push_back(GenCmot(three).instance);
    cases.push_back(TomoInstance(3, 300 + s, s % 2 == 0));
    if (s % 3 == 0) {
      for (auto& c : cases) c.upper.reset();
    }
    for (const auto& inst : cases) {
      const StandardLp lp = Flatten(inst);
      REQUIRE(lp.cols <= 12);
      const LpResult r = SolveLpExact(lp);
      const auto brute = VertexEnumeration(lp);
      REQUIRE(brute);
      REQUIRE(r.status == LpStatus::kOptimal);
      CHECK(std::abs(r.objective - *brute) <= 1e-9 * (1 + std::abs(*brute)));
      CheckVertex(inst, r);
      ++checked;
    }
  }
  CHECK(checked == 36);
}

TEST_CASE("column permutation keeps the objective") {
  const Instance inst = test::Cmot(2, 6, 17);
  const StandardLp lp = Flatten(inst);
  const double base = SolveLpExact(lp).objective;
  std::vector<std::size_t> perm(lp.cols);
  std::iota(perm.begin(), perm.end(), 0);
  SplitMix64 rng(3);
  for (std::size_t i = perm.size() - 1; i > 0; --i) {
    std::swap(perm[i], perm[static_cast<std::size_t>(rng.Uniform() * (i + 1))]);
  }
  StandardLp q = lp;
  for (std::size_t j = 0; j < lp.cols; ++j) {
    for (std::size_t i = 0; i < lp.rows; ++i) q.a[i * q.cols + j] = lp.at(i, perm[j]);
    q.c[j] = lp.c[perm[j]];
    q.ub[j] = lp.ub[perm[j]];
  }
  CHECK(std::abs(SolveLpExact(q).objective - base) <= 1e-10);
}

TEST_CASE("size guard") {
  ::setenv("IEPPA_ORACLE_MAX_VARS", "8", 1);
  CHECK(OracleMaxVars() == 8);
  CHECK(KindOf([] { SolveOracle(test::Cmot(2, 3, 1)); }) == ErrorKind::kSizeGuard);
  ::unsetenv("IEPPA_ORACLE_MAX_VARS");
  CHECK(OracleMaxVars() == kOracleMaxVars);
  CHECK_NOTHROW(SolveOracle(test::Cmot(2, 3, 1)));
}

TEST_CASE("lp input checks") {
  StandardLp lp = Flatten(test::TwoByTwo(std::nullopt));
  lp.b.pop_back();
  CHECK(KindOf([&] { SolveLpExact(lp); }) == ErrorKind::kDimensionMismatch);
  CHECK(std::string(LpStatusName(LpStatus::kInfeasible)) == "infeasible");
}
