#include "ieppa/eppa.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "ieppa/entropy.hpp"
#include "ieppa/error.hpp"
#include "ieppa/kernels.hpp"

namespace ieppa {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double FiniteNorm(const Tensor3& u) {
  double s = 0.0;
  for (double v : u.values()) {
    if (std::isfinite(v)) s += v * v;
  }
  return std::sqrt(s);
}

double Total(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

void RequireEqualTotals(const Instance& inst) {
  const double t0 = Total(inst.rhs[0]);
  for (std::size_t i = 1; i < inst.rhs.size(); ++i) {
    const double ti = Total(inst.rhs[i]);
    if (std::abs(ti - t0) > 1e-10 * std::max({1.0, std::abs(t0), std::abs(ti)})) {
      Fail(ErrorKind::kInfeasible, "marginal totals differ: " + std::to_string(t0) +
                                       " vs " + std::to_string(ti));
    }
  }
}

}  // namespace

void KktResiduals::Finish() {
  kkt = 0.0;
  for (const auto& v : d) {
    if (v) kkt = std::max(kkt, *v);
  }
}

KktResiduals PrimalResiduals(const Instance& inst, const Tensor3& x) {
  RequireSameDims(inst.cost, x, "kkt");
  KktResiduals r;
  r.d[0] = RelativeFeasibility(inst, x);
  double neg = 0.0;
  for (double v : x.values()) {
    if (v < 0.0) neg += v * v;
  }
  r.d[2] = std::sqrt(neg) / (1.0 + FrobeniusNorm(x));
  if (inst.upper) {
    const Tensor3& u = *inst.upper;
    double over = 0.0;
    for (std::size_t e = 0; e < u.size(); ++e) {
      const double gap = u[e] - x[e];
      if (gap < 0.0) over += gap * gap;
    }
    r.d[3] = std::sqrt(over) / (1.0 + FiniteNorm(u));
  } else {
    r.d[3] = 0.0;
  }
  r.Finish();
  return r;
}

KktResiduals ComputeKkt(const Instance& inst, const Tensor3& x,
                        const std::vector<std::vector<double>>& y, const Tensor3* w) {
  KktResiduals r = PrimalResiduals(inst, x);
  if (y.size() != inst.blocks.size()) Fail(ErrorKind::kDimensionMismatch, "kkt: y count");
  if (w) RequireSameDims(inst.cost, *w, "kkt: W");

  // S = sum A*y + W - C
  Tensor3 s = inst.cost;
  for (double& v : s.values()) v = -v;
  for (std::size_t i = 0; i < inst.blocks.size(); ++i) {
    if (y[i].size() != inst.blocks[i].m()) Fail(ErrorKind::kDimensionMismatch, "kkt: y length");
    kernels::parallel::AddRows(inst.blocks[i], y[i], 1.0, s.values());
  }
  if (w) {
    for (std::size_t e = 0; e < s.size(); ++e) s[e] += (*w)[e];
  }
  const double c_norm = FrobeniusNorm(inst.cost);
  double pos = 0.0;
  for (double v : s.values()) {
    if (v > 0.0) pos += v * v;
  }
  r.d[1] = std::sqrt(pos) / (1.0 + c_norm);
  r.d[6] = std::abs(InnerProduct(x, s)) / (1.0 + c_norm);

  if (inst.upper && w) {
    const Tensor3& u = *inst.upper;
    const double u_norm = FiniteNorm(u);
    double wpos = 0.0;
    double comp = 0.0;
    for (std::size_t e = 0; e < u.size(); ++e) {
      const double we = (*w)[e];
      if (we > 0.0) wpos += we * we;
      if (we == 0.0) continue;
      comp += std::isinf(u[e]) ? kInf * std::abs(we) : we * (u[e] - x[e]);
    }
    r.d[4] = std::sqrt(wpos) / (1.0 + FrobeniusNorm(*w));
    r.d[5] = std::abs(comp) / (1.0 + u_norm);
  } else {
    r.d[4] = 0.0;
    r.d[5] = 0.0;
  }
  r.Finish();
  return r;
}

std::optional<Tensor3> DefaultInteriorPoint(const Instance& inst) {
  if (!inst.IsMarginalStructured()) return std::nullopt;
  const double t = Total(inst.rhs[0]);
  for (const auto& b : inst.rhs) {
    const double ti = Total(b);
    if (std::abs(ti - t) > 1e-10 * std::max(1.0, std::abs(t))) return std::nullopt;
  }
  const bool three = inst.rhs.size() == 3;
  const std::vector<double> unit{1.0};
  Tensor3 p = Tensor3::Outer(inst.rhs[0], inst.rhs[1], three ? inst.rhs[2] : unit);
  const double scale = three ? t * t : t;
  for (double& v : p.values()) v /= scale;
  for (std::size_t e = 0; e < p.size(); ++e) {
    if (!(p[e] > 0.0)) return std::nullopt;
    if (inst.upper && !(p[e] < (*inst.upper)[e])) return std::nullopt;
  }
  return p;
}

Tensor3 RoundToFeasible(const Instance& inst, const Tensor3& x,
                        const std::optional<Tensor3>& x_ri) {
  if (!inst.IsMarginalStructured()) {
    Fail(ErrorKind::kInvalidArgument, "rounding needs marginal-structured blocks");
  }
  RequireSameDims(inst.cost, x, "round_to_feasible");
  RequireEqualTotals(inst);
  const std::size_t n_blocks = inst.blocks.size();

  Tensor3 z = x;
  for (double v : z.values()) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      Fail(ErrorKind::kDomain, "round_to_feasible: input must be finite and nonnegative");
    }
  }
  std::vector<double> scale;
  for (std::size_t i = 0; i < n_blocks; ++i) {
    const auto r = ApplyBlock(inst.blocks[i], z);
    scale.resize(r.size());
    for (std::size_t j = 0; j < r.size(); ++j) {
      scale[j] = r[j] > 0.0 ? std::min(inst.rhs[i][j] / r[j], 1.0) : 1.0;
    }
    kernels::parallel::ScaleRows(inst.blocks[i], scale, z.values());
  }
  std::vector<std::vector<double>> err(n_blocks);
  for (std::size_t i = 0; i < n_blocks; ++i) {
    const auto r = ApplyBlock(inst.blocks[i], z);
    err[i].resize(r.size());
    for (std::size_t j = 0; j < r.size(); ++j) {
      err[i][j] = std::max(inst.rhs[i][j] - r[j], 0.0);
    }
  }
  const double e1 = Total(err[0]);
  if (e1 > 0.0) {
    const std::vector<double> unit{1.0};
    const Tensor3 fill =
        Tensor3::Outer(err[0], err[1], n_blocks == 3 ? std::span<const double>(err[2])
                                                     : std::span<const double>(unit));
    const double denom = n_blocks == 3 ? e1 * e1 : e1;
    for (std::size_t e = 0; e < z.size(); ++e) z[e] += fill[e] / denom;
  }

  if (!inst.upper) return z;
  const Tensor3& u = *inst.upper;
  bool violated = false;
  for (std::size_t e = 0; e < z.size(); ++e) violated = violated || z[e] > u[e];
  if (violated) {
    if (!x_ri) {
      Fail(ErrorKind::kInvalidArgument,
           "capacity pullback needs a relative interior point (x_ri)");
    }
    const Tensor3& p = *x_ri;
    RequireSameDims(z, p, "x_ri");
    for (std::size_t e = 0; e < p.size(); ++e) {
      if (!(p[e] > 0.0) || !(p[e] < u[e])) {
        Fail(ErrorKind::kInvalidArgument, "x_ri is not strictly inside 0 < x < U");
      }
    }
    if (RelativeFeasibility(inst, p) > 1e-10) {
      Fail(ErrorKind::kInvalidArgument, "x_ri does not satisfy the equality constraints");
    }
    double lambda = 0.0;
    for (std::size_t e = 0; e < z.size(); ++e) {
      if (z[e] > u[e]) lambda = std::max(lambda, (z[e] - u[e]) / (z[e] - p[e]));
    }
    lambda = std::clamp(lambda, 0.0, 1.0);
    for (std::size_t e = 0; e < z.size(); ++e) z[e] = z[e] + lambda * (p[e] - z[e]);
  }
  for (std::size_t e = 0; e < z.size(); ++e) z[e] = std::max(std::min(z[e], u[e]), 0.0);
  return z;
}

GateOutcome InexactGateCheck(const InexactGate& gate, const Instance& inst, const Tensor3& x) {
  GateOutcome out;
  out.delta1 = RelativeFeasibility(inst, x);
  out.bregman = kNaN;
  if (out.delta1 > gate.mutilde) return out;
  if (!gate.feasibility_map) {
    out.accepted = true;
    return out;
  }
  Tensor3 log_x(x.dims());
  for (std::size_t e = 0; e < x.size(); ++e) {
    if (!(x[e] > 0.0)) Fail(ErrorKind::kDomain, "gate: X must be strictly positive");
    log_x[e] = std::log(x[e]);
  }
  out.x_tilde = gate.feasibility_map(x);
  out.bregman = BregmanLog(*out.x_tilde, log_x);
  out.accepted = out.bregman <= gate.mu;
  return out;
}

double DefaultMu(int k) { return std::max(std::pow(k + 1.0, -1.1), 1e-6); }

double DefaultMuTilde(int k) { return std::max(1e-4 * std::pow(2.0 / 3.0, k), 1e-6); }

void EppaParams::Validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    Fail(ErrorKind::kInvalidArgument, "epsilon must be positive");
  }
  if (!(tol_kkt > 0.0)) Fail(ErrorKind::kInvalidArgument, "tol must be positive");
  if (max_outer < 1) Fail(ErrorKind::kInvalidArgument, "max_outer must be >= 1");
  if (!mu || !mutilde) Fail(ErrorKind::kInvalidArgument, "schedules must be set");
  if (inner.cap < 1) Fail(ErrorKind::kInvalidArgument, "inner cap must be >= 1");
}

const char* StatusName(SolveStatus s) {
  switch (s) {
    case SolveStatus::kConverged:
      return "converged";
    case SolveStatus::kMaxOuterReached:
      return "max_outer_reached";
    case SolveStatus::kInnerCapExceeded:
      return "inner_cap_exceeded";
  }
  return "?";
}

bool SolveReport::HasFlag(const std::string& f) const {
  return std::find(flags.begin(), flags.end(), f) != flags.end();
}

nlohmann::json ReportToJson(const SolveReport& r) {
  nlohmann::json delta = nlohmann::json::object();
  for (int i = 0; i < 7; ++i) {
    const auto& v = r.delta.d[static_cast<std::size_t>(i)];
    delta["d" + std::to_string(i + 1)] = v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  }
  delta["kkt"] = r.delta.kkt;
  nlohmann::json j = nlohmann::json::object();
  j["objective"] = r.objective;
  j["delta"] = std::move(delta);
  j["outer_iters"] = r.outer_iters;
  j["inner_sweeps"] = r.inner_sweeps;
  j["wall_time_ms"] = r.wall_time_ms;
  j["status"] = StatusName(r.status);
  j["flags"] = r.flags;
  return j;
}

IeppaResult SolveIeppa(const Instance& inst, const EppaParams& params) {
  const auto t0 = std::chrono::steady_clock::now();
  params.Validate();
  inst.Validate(true);
  const double eps = params.epsilon;

  const bool marginal = inst.IsMarginalStructured();
  std::optional<Tensor3> interior = DefaultInteriorPoint(inst);
  std::optional<Tensor3> x_ri = params.x_ri ? params.x_ri : interior;

  Tensor3 x0;
  if (params.x0) {
    x0 = *params.x0;
  } else if (interior) {
    x0 = *interior;
  } else {
    x0 = Tensor3::Ones(inst.dims);
    if (inst.upper) {
      for (std::size_t e = 0; e < x0.size(); ++e) {
        x0[e] = std::min(1.0, (*inst.upper)[e] / 2.0);
      }
    }
  }
  Tensor3 m = ProxSubproblem::FromCenter(inst, x0, eps).m();

  IeppaResult out;
  out.x = x0;
  out.dual = DualState::Cold(inst);
  SolveReport& rep = out.report;
  if (!marginal) rep.flags.push_back(kFlagGuaranteeWaived);

  std::function<Tensor3(const Tensor3&)> map;
  if (marginal) {
    map = [&inst, &x_ri](const Tensor3& x) { return RoundToFeasible(inst, x, x_ri); };
  }

  std::optional<DualState> warm;
  bool any_log = false;
  bool have_iterate = false;
  rep.status = SolveStatus::kMaxOuterReached;
  for (int k = 0; k < params.max_outer; ++k) {
    const ProxSubproblem sub = ProxSubproblem::FromLogCenter(inst, m, eps);
    InexactGate gate{k, params.mu(k), params.mutilde(k), map};
    SubproblemResult res;
    try {
      res = SolveSubproblem(sub, gate, std::move(warm), params.inner);
    } catch (const Error& ex) {
      if (ex.kind() != ErrorKind::kInnerCapExceeded) throw;
      rep.inner_sweeps += params.inner.cap;
      rep.status = SolveStatus::kInnerCapExceeded;
      break;
    }
    any_log = any_log || res.used_log_domain;
    rep.inner_sweeps += res.sweeps;
    rep.outer_iters = k + 1;

    Tensor3 z = ScaledLogPrimal(sub, res.state);
    for (std::size_t e = 0; e < m.size(); ++e) m[e] = inst.cost[e] - z[e];

    const Tensor3* w = inst.upper ? &res.state.w : nullptr;
    rep.delta = ComputeKkt(inst, res.x, res.state.y, w);
    have_iterate = true;

    if (params.on_outer) {
      OuterEvent ev;
      ev.k = k;
      ev.x = &res.x;
      ev.scaled_log_x = &z;
      ev.x_tilde = res.x_tilde ? &*res.x_tilde : nullptr;
      ev.objective = InnerProduct(inst.cost, res.x);
      ev.objective_tilde = res.x_tilde ? InnerProduct(inst.cost, *res.x_tilde) : kNaN;
      ev.mu = gate.mu;
      ev.mutilde = gate.mutilde;
      ev.sweeps = res.sweeps;
      ev.kkt = rep.delta.kkt;
      params.on_outer(ev);
    }

    out.x = std::move(res.x);
    out.x_tilde = std::move(res.x_tilde);
    out.dual = res.state;
    warm = std::move(res.state);
    if (rep.delta.kkt < params.tol_kkt) {
      rep.status = SolveStatus::kConverged;
      break;
    }
  }
  if (!have_iterate) {
    out.dual.SyncLog(eps);
    rep.delta = ComputeKkt(inst, out.x, out.dual.y, inst.upper ? &out.dual.w : nullptr);
  }
  if (any_log) rep.flags.push_back(kFlagLogDomain);
  rep.objective = InnerProduct(inst.cost, out.x);
  rep.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace ieppa
