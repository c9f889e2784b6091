#include "ieppa/dykl.hpp"

#include <chrono>
#include <cmath>

#include "ieppa/error.hpp"
#include "ieppa/kernels.hpp"

namespace ieppa {

namespace k = kernels::parallel;

namespace {

void RequireTwoMarginal(const Instance& inst) {
  if (inst.dims.n3 != 1 || !inst.IsMarginalStructured()) {
    Fail(ErrorKind::kInvalidArgument,
         "DyKL needs a 2-marginal instance (n3 = 1, row and column blocks)");
  }
}

void CheckPlain(const Tensor3& t, const char* what) {
  for (double v : t.values()) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      Fail(ErrorKind::kUnderflow, std::string("DyKL plain form: ") + what +
                                      " left the double range");
    }
  }
}

}  // namespace

DyklState DyklState::Init(const Tensor3& cost, double eps, bool stabilized) {
  if (!(eps > 0.0)) Fail(ErrorKind::kInvalidArgument, "epsilon must be positive");
  DyklState st;
  st.epsilon = eps;
  st.stabilized = stabilized;
  if (stabilized) {
    st.x = cost;
    for (double& v : st.x.values()) v = -v;
    st.q1 = st.q2 = st.q3 = Tensor3::Zeros(cost.dims());
  } else {
    st.x = Tensor3(cost.dims());
    for (std::size_t e = 0; e < cost.size(); ++e) st.x[e] = std::exp(-cost[e] / eps);
    st.q1 = st.q2 = st.q3 = Tensor3::Ones(cost.dims());
  }
  return st;
}

Tensor3 DyklState::Primal() const {
  if (!stabilized) return x;
  Tensor3 out(x.dims());
  k::ExpScaled(x.values(), epsilon, out.values());
  return out;
}

void DyklSweep(DyklState& st, const Instance& inst) {
  RequireTwoMarginal(inst);
  if (st.stabilized) Fail(ErrorKind::kInvalidArgument, "state is in stabilized form");
  const PartitionBlock& rows = inst.blocks[0];
  const PartitionBlock& cols = inst.blocks[1];
  std::vector<double> s;

  // Pi_1 = Diag(a ./ (P0 o Q1) 1) (P0 o Q1)
  Tensor3 pi0 = st.x;
  Tensor3 pi1 = ElementwiseCombine(Combine::kProduct, pi0, st.q1);
  s.resize(rows.m());
  k::BlockSum(rows, pi1.values(), s);
  for (std::size_t j = 0; j < s.size(); ++j) s[j] = inst.rhs[0][j] / s[j];
  k::ScaleRows(rows, s, pi1.values());
  CheckPlain(pi1, "Pi_1");
  k::Multiply(pi0.values(), st.q1.values());
  k::Divide(pi1.values(), st.q1.values());

  // Pi_2 = (Pi_1 o Q2) Diag(b ./ (Pi_1 o Q2)' 1)
  Tensor3 pi2 = ElementwiseCombine(Combine::kProduct, pi1, st.q2);
  s.resize(cols.m());
  k::BlockSum(cols, pi2.values(), s);
  for (std::size_t j = 0; j < s.size(); ++j) s[j] = inst.rhs[1][j] / s[j];
  k::ScaleRows(cols, s, pi2.values());
  CheckPlain(pi2, "Pi_2");
  k::Multiply(pi1.values(), st.q2.values());
  k::Divide(pi2.values(), st.q2.values());

  // Pi_3 = min(Pi_2 o Q3, U)
  Tensor3 pi3 = ElementwiseCombine(Combine::kProduct, pi2, st.q3);
  if (inst.upper) pi3 = ElementwiseCombine(Combine::kMin, pi3, *inst.upper);
  CheckPlain(pi3, "Pi_3");
  k::Multiply(pi2.values(), st.q3.values());
  k::Divide(pi3.values(), st.q3.values());

  st.x = std::move(pi3);
  CheckPlain(st.q1, "Q_1");
  CheckPlain(st.q2, "Q_2");
  CheckPlain(st.q3, "Q_3");
}

void DyklSweepStabilized(DyklState& st, const Instance& inst,
                         std::span<const double> a_log, std::span<const double> b_log,
                         const Tensor3* u_log) {
  RequireTwoMarginal(inst);
  if (!st.stabilized) Fail(ErrorKind::kInvalidArgument, "state is in plain form");
  const double eps = st.epsilon;
  const PartitionBlock& rows = inst.blocks[0];
  const PartitionBlock& cols = inst.blocks[1];
  std::vector<double> lse;

  auto project = [&](const PartitionBlock& blk, std::span<const double> target,
                     const Tensor3& prev, Tensor3& q) {
    Tensor3 t = Axpby(1.0, prev, 1.0, q);
    lse.resize(blk.m());
    k::RowLogSumExp(blk, t.values(), eps, lse);
    for (std::size_t j = 0; j < lse.size(); ++j) lse[j] = target[j] - lse[j];
    k::AddRows(blk, lse, 1.0, t.values());
    for (std::size_t e = 0; e < q.size(); ++e) q[e] = q[e] + prev[e] - t[e];
    return t;
  };

  const Tensor3 pi0 = st.x;
  const Tensor3 pi1 = project(rows, a_log, pi0, st.q1);
  const Tensor3 pi2 = project(cols, b_log, pi1, st.q2);
  Tensor3 pi3 = Axpby(1.0, pi2, 1.0, st.q3);
  if (u_log) pi3 = ElementwiseCombine(Combine::kMin, pi3, *u_log);
  for (std::size_t e = 0; e < pi3.size(); ++e) st.q3[e] = st.q3[e] + pi2[e] - pi3[e];
  for (double v : pi3.values()) {
    if (!std::isfinite(v)) Fail(ErrorKind::kDomain, "stabilized DyKL produced a nonfinite entry");
  }
  st.x = std::move(pi3);
}

DyklMode ParseDyklMode(const std::string& s) {
  if (s == "auto") return DyklMode::kAuto;
  if (s == "plain") return DyklMode::kPlain;
  if (s == "stabilized") return DyklMode::kStabilized;
  Fail(ErrorKind::kInvalidArgument, "unknown DyKL mode '" + s + "' (auto, plain, stabilized)");
}

DyklResult SolveDykl(const Instance& inst, const DyklParams& params) {
  const auto t0 = std::chrono::steady_clock::now();
  inst.Validate(true);
  RequireTwoMarginal(inst);
  if (!(params.epsilon > 0.0)) Fail(ErrorKind::kInvalidArgument, "epsilon must be positive");
  if (params.max_iter < 1) Fail(ErrorKind::kInvalidArgument, "max_iter must be >= 1");
  const double eps = params.epsilon;

  std::vector<double> a_log, b_log;
  for (double v : inst.rhs[0]) a_log.push_back(eps * std::log(v));
  for (double v : inst.rhs[1]) b_log.push_back(eps * std::log(v));
  std::optional<Tensor3> u_log;
  if (inst.upper) u_log = ElementwiseMap(EntryMap::LogScaled(eps), *inst.upper);

  bool stabilized = params.mode == DyklMode::kStabilized ||
                    (params.mode == DyklMode::kAuto && eps < 1e-2);

  DyklResult out;
  SolveReport& rep = out.report;
  for (;;) {
    DyklState st = DyklState::Init(inst.cost, eps, stabilized);
    bool restart = false;
    rep.status = SolveStatus::kMaxOuterReached;
    long it = 0;
    try {
      if (!stabilized) CheckPlain(st.x, "kernel");
      while (it < params.max_iter) {
        if (stabilized) {
          DyklSweepStabilized(st, inst, a_log, b_log, u_log ? &*u_log : nullptr);
        } else {
          DyklSweep(st, inst);
        }
        ++it;
        if (RelativeFeasibility(inst, st.Primal()) < params.tol) {
          rep.status = SolveStatus::kConverged;
          break;
        }
      }
    } catch (const Error& ex) {
      if (ex.kind() != ErrorKind::kUnderflow || params.mode != DyklMode::kAuto || stabilized) {
        throw;
      }
      restart = true;
    }
    if (restart) {
      stabilized = true;
      continue;
    }
    out.x = st.Primal();
    rep.outer_iters = static_cast<int>(it);
    rep.inner_sweeps = it;
    break;
  }
  rep.delta = PrimalResiduals(inst, out.x);
  rep.objective = InnerProduct(inst.cost, out.x);
  if (stabilized) rep.flags.push_back(kFlagStabilized);
  rep.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace ieppa
