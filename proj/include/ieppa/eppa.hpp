#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ieppa/bcd.hpp"
#include "ieppa/constraints.hpp"
#include "ieppa/tensor.hpp"

namespace ieppa {

inline constexpr const char* kFlagGuaranteeWaived = "theoretical-guarantee-waived";
inline constexpr const char* kFlagLogDomain = "log-domain-used";

// Relative KKT residuals of the LP. Entries are empty when the method has no
// dual certificate for them.
struct KktResiduals {
  std::array<std::optional<double>, 7> d{};
  double kkt = 0.0;  // max over the present entries

  double at(int i) const { return d[static_cast<std::size_t>(i - 1)].value_or(0.0); }
  void Finish();
};

// Without U, Delta4..Delta6 are 0. Norms of U run over its finite entries.
// `w` may be null when the instance has no U.
KktResiduals ComputeKkt(const Instance& inst, const Tensor3& x,
                        const std::vector<std::vector<double>>& y, const Tensor3* w);
// Only the primal parts Delta1, Delta3, Delta4 (and Delta_kkt over them).
KktResiduals PrimalResiduals(const Instance& inst, const Tensor3& x);

// Normalized outer product of the marginals (divided by total^(N-1)). Empty
// when the blocks are not marginal, the totals disagree, or it does not lie
// strictly below U.
std::optional<Tensor3> DefaultInteriorPoint(const Instance& inst);

// Rounds a box-feasible X onto the feasible set of a marginal-structured
// instance: per-marginal scaling down, a rank-one fill of the deficits, then
// a pullback toward x_ri when U is exceeded.
Tensor3 RoundToFeasible(const Instance& inst, const Tensor3& x,
                        const std::optional<Tensor3>& x_ri);

struct GateOutcome {
  bool accepted = false;
  std::optional<Tensor3> x_tilde;
  double delta1 = 0.0;
  double bregman = 0.0;
};

// X > 0. Delta1(X) > mutilde short-circuits without touching G.
GateOutcome InexactGateCheck(const InexactGate& gate, const Instance& inst, const Tensor3& x);

double DefaultMu(int k);
double DefaultMuTilde(int k);

struct OuterEvent {
  int k = 0;
  const Tensor3* x = nullptr;
  // eps * log X^{k+1}; finite even where X itself underflows.
  const Tensor3* scaled_log_x = nullptr;
  const Tensor3* x_tilde = nullptr;  // null when no feasibility map
  double objective = 0.0;            // <C, X^{k+1}>
  double objective_tilde = 0.0;      // <C, Xtilde^{k+1}> or NaN
  double mu = 0.0;
  double mutilde = 0.0;
  long sweeps = 0;
  double kkt = 0.0;
};

struct EppaParams {
  double epsilon = 0.05;
  double tol_kkt = 1e-5;
  int max_outer = 500;
  std::function<double(int)> mu = DefaultMu;
  std::function<double(int)> mutilde = DefaultMuTilde;
  InnerSettings inner;
  // Interior point for the capacity pullback; defaults to DefaultInteriorPoint.
  std::optional<Tensor3> x_ri;
  // Starting point; defaults to the interior point or min(1, U/2).
  std::optional<Tensor3> x0;
  std::function<void(const OuterEvent&)> on_outer;

  void Validate() const;
};

enum class SolveStatus { kConverged, kMaxOuterReached, kInnerCapExceeded };
const char* StatusName(SolveStatus s);

struct SolveReport {
  double objective = 0.0;
  KktResiduals delta;
  int outer_iters = 0;
  long inner_sweeps = 0;
  double wall_time_ms = 0.0;
  SolveStatus status = SolveStatus::kConverged;
  std::vector<std::string> flags;

  bool HasFlag(const std::string& f) const;
};

nlohmann::json ReportToJson(const SolveReport& r);

struct IeppaResult {
  Tensor3 x;
  std::optional<Tensor3> x_tilde;
  DualState dual;
  SolveReport report;
};

IeppaResult SolveIeppa(const Instance& inst, const EppaParams& params = {});

}  // namespace ieppa
