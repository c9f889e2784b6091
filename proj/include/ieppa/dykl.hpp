#pragma once

#include <span>
#include <string>
#include <vector>

#include "ieppa/constraints.hpp"
#include "ieppa/eppa.hpp"
#include "ieppa/tensor.hpp"

namespace ieppa {

inline constexpr const char* kFlagStabilized = "stabilized";

// Dykstra iterations with KL projections for the 2-marginal capacity
// problem. In plain form x and q1..q3 hold the matrices themselves; in
// stabilized form they hold eps*log of them.
struct DyklState {
  Tensor3 x;
  Tensor3 q1, q2, q3;
  double epsilon = 0.0;
  bool stabilized = false;

  // Plain: X = exp(-C/eps), Q = 1. Stabilized: X~ = -C, Q~ = 0.
  static DyklState Init(const Tensor3& cost, double eps, bool stabilized);
  // exp(X~/eps) in stabilized form, X otherwise.
  Tensor3 Primal() const;
};

// Row scaling to a, column scaling to b (right diagonal), min with U, each
// followed by its correction update. Throws kUnderflow on zero or nonfinite
// entries.
void DyklSweep(DyklState& st, const Instance& inst);
// Same recursion in the log domain; needs eps*log of a, b, U.
void DyklSweepStabilized(DyklState& st, const Instance& inst,
                         std::span<const double> a_log, std::span<const double> b_log,
                         const Tensor3* u_log);

enum class DyklMode { kAuto, kPlain, kStabilized };
DyklMode ParseDyklMode(const std::string& s);

struct DyklParams {
  double epsilon = 1e-2;
  double tol = 1e-5;
  long max_iter = 20000;
  DyklMode mode = DyklMode::kAuto;
};

struct DyklResult {
  Tensor3 x;
  SolveReport report;  // dual residuals left empty
};

// Auto mode uses the plain form for eps >= 1e-2 and restarts in the
// stabilized form if the plain form leaves the double range.
DyklResult SolveDykl(const Instance& inst, const DyklParams& params);

}  // namespace ieppa
