#pragma once

#include <cstddef>
#include <vector>

#include "ieppa/constraints.hpp"
#include "ieppa/tensor.hpp"

namespace ieppa {

// min c'x  s.t.  A x = b,  0 <= x <= ub  (ub may be +inf). A is dense,
// row-major, rows x cols.
struct StandardLp {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> a;
  std::vector<double> b;
  std::vector<double> c;
  std::vector<double> ub;

  double at(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
};

// Default limit on n1*n2*n3; IEPPA_ORACLE_MAX_VARS overrides it.
inline constexpr std::size_t kOracleMaxVars = 10000;
std::size_t OracleMaxVars();

// One column per tensor entry in flat order, rows block by block.
StandardLp Flatten(const Instance& inst);

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };
const char* LpStatusName(LpStatus s);

struct LpResult {
  LpStatus status = LpStatus::kOptimal;
  std::vector<double> x;
  double objective = 0.0;
  std::vector<std::size_t> basis;  // basic structural columns at the optimum
  long pivots = 0;
};

// Bounded-variable primal simplex with Bland's rule; two phases with
// artificial variables, then the basic solution is recomputed from an LU
// factorization of the final basis.
LpResult SolveLpExact(const StandardLp& lp);

struct OracleResult {
  Tensor3 x;
  double objective = 0.0;
  long pivots = 0;
};

// Throws kInfeasible / kUnbounded / kSizeGuard.
OracleResult SolveOracle(const Instance& inst);

}  // namespace ieppa
