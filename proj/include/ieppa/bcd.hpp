#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ieppa/constraints.hpp"
#include "ieppa/tensor.hpp"

namespace ieppa {

// The entropic proximal subproblem
//   min <C,X> + eps * KL(X, S)  s.t.  A_i(X) = b_i,  0 <= X <= U
// held through M = C - eps log S and Mtilde = exp(-M/eps).
class ProxSubproblem {
 public:
  // S > 0 entrywise.
  static ProxSubproblem FromCenter(const Instance& inst, const Tensor3& s, double eps);
  // Takes M directly, so centers whose entries underflow in double stay usable.
  static ProxSubproblem FromLogCenter(const Instance& inst, Tensor3 m, double eps);

  const Instance& instance() const { return *inst_; }
  double epsilon() const { return eps_; }
  const Tensor3& m() const { return m_; }
  const Tensor3& mtilde() const { return mtilde_; }
  // eps * log U, +inf where U is +inf. Empty when the instance has no U.
  const Tensor3& log_upper() const { return log_upper_; }
  bool has_upper() const { return inst_->has_upper(); }
  bool marginal_structured() const { return marginal_; }
  // False when some Mtilde entry underflowed to 0 or overflowed.
  bool mtilde_usable() const { return mtilde_usable_; }

 private:
  ProxSubproblem(const Instance& inst, Tensor3 m, double eps);

  const Instance* inst_ = nullptr;
  double eps_ = 0.0;
  Tensor3 m_;
  Tensor3 mtilde_;
  Tensor3 log_upper_;
  bool marginal_ = false;
  bool mtilde_usable_ = true;
};

// Dual variables y_i, W and their exponential twins xi_i = exp(y_i/eps),
// Gamma = exp(W/eps). Sweeps update one representation; the other is
// rebuilt on demand. hat_m caches Mtilde o prod_i bullet(xi_i) o Gamma
// between multiplicative sweeps.
struct DualState {
  std::vector<std::vector<double>> y;
  std::vector<std::vector<double>> xi;
  Tensor3 w;
  Tensor3 gamma;
  Tensor3 hat_m;
  bool log_fresh = true;
  bool exp_fresh = true;
  bool hat_m_fresh = false;

  // y = 0, W = 0.
  static DualState Cold(const Instance& inst);

  void SyncLog(double eps);
  void SyncExp(double eps);
  void InvalidateCache() { hat_m_fresh = false; }
};

enum class Scheme { kMultiplicative, kLogDomain, kAuto };

const char* SchemeName(Scheme s);
Scheme ParseScheme(const std::string& name);

// R = eps <Mtilde, exp((W + sum A*y)/eps)> - sum <y_i, b_i> - <W, U>,
// with 0 * inf = 0. Evaluated in log form.
double DualObjective(const ProxSubproblem& sub, DualState& st);

// One cyclic pass over the N blocks and then W, in the multiplicative form
// with the single cached working tensor. Throws kUnderflow when a zero or
// nonfinite value shows up; the state is then unusable.
void SweepMultiplicative(const ProxSubproblem& sub, DualState& st);
// Same pass on y and W with row-wise log-sum-exp.
void SweepLogDomain(const ProxSubproblem& sub, DualState& st);
// Multiplicative pass for marginal blocks using axis reductions (f, g, h).
void Cmot3Sweep(const ProxSubproblem& sub, DualState& st);

// X = exp((sum A*y + W - M)/eps).
Tensor3 RecoverPrimal(const ProxSubproblem& sub, DualState& st);
// -M + sum A*y + W, i.e. eps log X, without leaving the log domain.
Tensor3 ScaledLogPrimal(const ProxSubproblem& sub, DualState& st);

// Acceptance test of an inner iterate: Delta1(X) <= mutilde, then
// Bregman(G(X), X) <= mu. Without a feasibility map only the first part runs.
struct InexactGate {
  int k = 0;
  double mu = 1.0;
  double mutilde = 1e-4;
  std::function<Tensor3(const Tensor3&)> feasibility_map;
};

struct SweepEvent {
  int outer = 0;
  long sweep = 0;
  double r_before = 0.0;
  double r_after = 0.0;
};

struct InnerSettings {
  Scheme scheme = Scheme::kAuto;
  long cap = 50000;
  // Use Cmot3Sweep for marginal instances in the multiplicative scheme.
  bool use_cmot3 = true;
  // Evaluate R around every sweep and report it through on_sweep.
  bool track_dual_objective = false;
  std::function<void(const SweepEvent&)> on_sweep;
};

struct SubproblemResult {
  Tensor3 x;
  std::optional<Tensor3> x_tilde;
  DualState state;
  long sweeps = 0;
  double delta1 = 0.0;
  double bregman = 0.0;  // NaN when not evaluated
  bool used_log_domain = false;
};

// Sweeps until the gate accepts. Throws kInnerCapExceeded after settings.cap
// sweeps.
SubproblemResult SolveSubproblem(const ProxSubproblem& sub, const InexactGate& gate,
                                 std::optional<DualState> warm,
                                 const InnerSettings& settings);

}  // namespace ieppa
