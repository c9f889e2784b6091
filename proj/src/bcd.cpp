#include "ieppa/bcd.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "ieppa/entropy.hpp"
#include "ieppa/error.hpp"
#include "ieppa/kernels.hpp"

namespace ieppa {

namespace k = kernels::parallel;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool AllPositiveFinite(std::span<const double> v) {
  for (double x : v) {
    if (!(x > 0.0) || !std::isfinite(x)) return false;
  }
  return true;
}

[[noreturn]] void Underflow(const std::string& where) {
  Fail(ErrorKind::kUnderflow, where + ": multiplicative scheme left the double range");
}

}  // namespace

// --- ProxSubproblem --------------------------------------------------------

ProxSubproblem::ProxSubproblem(const Instance& inst, Tensor3 m, double eps)
    : inst_(&inst), eps_(eps), m_(std::move(m)) {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    Fail(ErrorKind::kInvalidArgument, "epsilon must be positive and finite");
  }
  inst.Validate(true);
  if (m_.dims() != inst.dims) Fail(ErrorKind::kDimensionMismatch, "prox center dims");
  mtilde_ = Tensor3(m_.dims());
  for (std::size_t e = 0; e < m_.size(); ++e) {
    if (!std::isfinite(m_[e])) Fail(ErrorKind::kDomain, "prox center M must be finite");
    mtilde_[e] = std::exp(-m_[e] / eps);
    if (!(mtilde_[e] > 0.0) || !std::isfinite(mtilde_[e])) mtilde_usable_ = false;
  }
  if (inst.upper) {
    log_upper_ = ElementwiseMap(EntryMap::LogScaled(eps), *inst.upper);
  }
  marginal_ = inst.IsMarginalStructured();
}

ProxSubproblem ProxSubproblem::FromCenter(const Instance& inst, const Tensor3& s,
                                          double eps) {
  RequireSameDims(inst.cost, s, "prox center");
  Tensor3 m(s.dims());
  for (std::size_t e = 0; e < s.size(); ++e) {
    if (!(s[e] > 0.0) || !std::isfinite(s[e])) {
      Fail(ErrorKind::kDomain, "prox center must be strictly positive and finite");
    }
    m[e] = inst.cost[e] - eps * std::log(s[e]);
  }
  return ProxSubproblem(inst, std::move(m), eps);
}

ProxSubproblem ProxSubproblem::FromLogCenter(const Instance& inst, Tensor3 m, double eps) {
  return ProxSubproblem(inst, std::move(m), eps);
}

// --- DualState -------------------------------------------------------------

DualState DualState::Cold(const Instance& inst) {
  DualState st;
  for (const auto& b : inst.blocks) {
    st.y.emplace_back(b.m(), 0.0);
    st.xi.emplace_back(b.m(), 1.0);
  }
  st.w = Tensor3::Zeros(inst.dims);
  st.gamma = Tensor3::Ones(inst.dims);
  st.log_fresh = true;
  st.exp_fresh = true;
  st.hat_m_fresh = false;
  return st;
}

void DualState::SyncLog(double eps) {
  if (log_fresh) return;
  for (std::size_t i = 0; i < xi.size(); ++i) {
    for (std::size_t j = 0; j < xi[i].size(); ++j) y[i][j] = eps * std::log(xi[i][j]);
  }
  for (std::size_t e = 0; e < gamma.size(); ++e) w[e] = eps * std::log(gamma[e]);
  log_fresh = true;
}

void DualState::SyncExp(double eps) {
  if (exp_fresh) return;
  for (std::size_t i = 0; i < y.size(); ++i) {
    k::ExpScaled(y[i], eps, xi[i]);
  }
  k::ExpScaled(w.values(), eps, gamma.values());
  exp_fresh = true;
  hat_m_fresh = false;
}

const char* SchemeName(Scheme s) {
  switch (s) {
    case Scheme::kMultiplicative:
      return "multiplicative";
    case Scheme::kLogDomain:
      return "logdomain";
    case Scheme::kAuto:
      return "auto";
  }
  return "?";
}

Scheme ParseScheme(const std::string& name) {
  if (name == "multiplicative") return Scheme::kMultiplicative;
  if (name == "logdomain") return Scheme::kLogDomain;
  if (name == "auto") return Scheme::kAuto;
  Fail(ErrorKind::kInvalidArgument,
       "unknown scheme '" + name + "' (multiplicative, logdomain, auto)");
}

// --- dual objective and primal recovery -------------------------------------

Tensor3 ScaledLogPrimal(const ProxSubproblem& sub, DualState& st) {
  const Instance& inst = sub.instance();
  st.SyncLog(sub.epsilon());
  Tensor3 z = sub.m();
  for (double& v : z.values()) v = -v;
  for (std::size_t i = 0; i < inst.blocks.size(); ++i) {
    k::AddRows(inst.blocks[i], st.y[i], 1.0, z.values());
  }
  if (sub.has_upper()) {
    for (std::size_t e = 0; e < z.size(); ++e) z[e] += st.w[e];
  }
  return z;
}

double DualObjective(const ProxSubproblem& sub, DualState& st) {
  const Instance& inst = sub.instance();
  const double eps = sub.epsilon();
  const Tensor3 z = ScaledLogPrimal(sub, st);
  double mass = 0.0;
  for (double v : z.values()) mass += std::exp(v / eps);
  double yb = 0.0;
  for (std::size_t i = 0; i < inst.blocks.size(); ++i) yb += Dot(st.y[i], inst.rhs[i]);
  double wu = 0.0;
  if (sub.has_upper()) {
    const Tensor3& u = *inst.upper;
    for (std::size_t e = 0; e < u.size(); ++e) {
      if (st.w[e] > 0.0) Fail(ErrorKind::kDomain, "dual objective: W has a positive entry");
      if (st.w[e] != 0.0) wu += st.w[e] * u[e];
    }
  }
  return eps * mass - yb - wu;
}

Tensor3 RecoverPrimal(const ProxSubproblem& sub, DualState& st) {
  const Instance& inst = sub.instance();
  Tensor3 x;
  if (st.exp_fresh && st.hat_m_fresh) {
    x = st.hat_m;
  } else if (st.exp_fresh) {
    x = sub.mtilde();
    for (std::size_t i = 0; i < inst.blocks.size(); ++i) {
      k::ScaleRows(inst.blocks[i], st.xi[i], x.values());
    }
    if (sub.has_upper()) k::Multiply(st.gamma.values(), x.values());
  } else {
    x = ScaledLogPrimal(sub, st);
    k::ExpScaled(x.values(), sub.epsilon(), x.values());
  }
  for (double v : x.values()) {
    if (!std::isfinite(v)) Fail(ErrorKind::kDomain, "recovered primal has a nonfinite entry");
  }
  return x;
}

// --- sweeps -----------------------------------------------------------------

void SweepMultiplicative(const ProxSubproblem& sub, DualState& st) {
  const Instance& inst = sub.instance();
  if (!sub.mtilde_usable()) Underflow("Mtilde");
  st.SyncExp(sub.epsilon());
  Tensor3& hat = st.hat_m;
  if (!st.hat_m_fresh) {
    hat = sub.mtilde();
    for (std::size_t i = 0; i < inst.blocks.size(); ++i) {
      k::ScaleRows(inst.blocks[i], st.xi[i], hat.values());
    }
    if (sub.has_upper()) k::Multiply(st.gamma.values(), hat.values());
  }
  st.hat_m_fresh = false;
  st.log_fresh = false;
  std::vector<double> r;
  for (std::size_t i = 0; i < inst.blocks.size(); ++i) {
    const PartitionBlock& b = inst.blocks[i];
    auto& xi = st.xi[i];
    k::DivideRows(b, xi, hat.values());
    r.resize(b.m());
    k::BlockSum(b, hat.values(), r);
    if (!AllPositiveFinite(r)) Underflow("block sum");
    for (std::size_t j = 0; j < r.size(); ++j) xi[j] = inst.rhs[i][j] / r[j];
    if (!AllPositiveFinite(xi)) Underflow("multiplier");
    k::ScaleRows(b, xi, hat.values());
  }
  if (sub.has_upper()) {
    k::Divide(st.gamma.values(), hat.values());
    k::CapacityRatio(inst.upper->values(), hat.values(), st.gamma.values());
    k::Multiply(st.gamma.values(), hat.values());
  }
  if (!AllPositiveFinite(hat.values())) Underflow("working tensor");
  st.exp_fresh = true;
  st.hat_m_fresh = true;
}

void SweepLogDomain(const ProxSubproblem& sub, DualState& st) {
  const Instance& inst = sub.instance();
  const double eps = sub.epsilon();
  Tensor3 z = ScaledLogPrimal(sub, st);
  std::vector<double> lse;
  for (std::size_t i = 0; i < inst.blocks.size(); ++i) {
    const PartitionBlock& b = inst.blocks[i];
    auto& y = st.y[i];
    k::AddRows(b, y, -1.0, z.values());
    lse.resize(b.m());
    k::RowLogSumExp(b, z.values(), eps, lse);
    for (std::size_t j = 0; j < y.size(); ++j) {
      y[j] = eps * std::log(inst.rhs[i][j]) - lse[j];
      if (!std::isfinite(y[j])) {
        Fail(ErrorKind::kDomain, "log-domain sweep produced a nonfinite multiplier");
      }
    }
    k::AddRows(b, y, 1.0, z.values());
  }
  if (sub.has_upper()) {
    k::LogCapacityUpdate(sub.log_upper().values(), st.w.values(), z.values());
  }
  st.log_fresh = true;
  st.exp_fresh = false;
  st.hat_m_fresh = false;
}

void Cmot3Sweep(const ProxSubproblem& sub, DualState& st) {
  const Instance& inst = sub.instance();
  if (!sub.marginal_structured()) {
    Fail(ErrorKind::kInvalidArgument, "cmot3 sweep needs marginal blocks");
  }
  if (!sub.mtilde_usable()) Underflow("Mtilde");
  st.SyncExp(sub.epsilon());
  st.log_fresh = false;
  st.hat_m_fresh = false;
  const Dims& d = inst.dims;
  Tensor3 kt = sub.mtilde();
  if (sub.has_upper()) k::Multiply(st.gamma.values(), kt.values());

  const bool three = inst.blocks.size() == 3;
  std::vector<double> unit{1.0};
  auto& f = st.xi[0];
  auto& g = st.xi[1];
  std::span<double> h = three ? std::span<double>(st.xi[2]) : std::span<double>(unit);
  std::vector<double> red;

  auto update = [&](int axis, std::span<double> out, std::span<const double> w1,
                    std::span<const double> w2) {
    red.resize(out.size());
    k::MarginalReduce(d, axis, kt.values(), w1, w2, red);
    if (!AllPositiveFinite(red)) Underflow("axis reduction");
    const auto& b = inst.rhs[axis];
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = b[j] / red[j];
    if (!AllPositiveFinite(out)) Underflow("multiplier");
  };
  update(0, f, g, h);
  update(1, g, f, h);
  if (three) update(2, h, f, g);

  if (sub.has_upper()) {
    k::CapacityRatioOuter(d, inst.upper->values(), sub.mtilde().values(), f, g, h,
                          st.gamma.values());
    if (!AllPositiveFinite(st.gamma.values())) Underflow("capacity multiplier");
  }
  st.exp_fresh = true;
}

// --- inner solve -------------------------------------------------------------

SubproblemResult SolveSubproblem(const ProxSubproblem& sub, const InexactGate& gate,
                                 std::optional<DualState> warm,
                                 const InnerSettings& settings) {
  const Instance& inst = sub.instance();
  const double eps = sub.epsilon();
  SubproblemResult res;
  res.state = warm ? std::move(*warm) : DualState::Cold(inst);
  DualState& st = res.state;
  st.InvalidateCache();
  if (st.y.size() != inst.blocks.size()) {
    Fail(ErrorKind::kDimensionMismatch, "warm start has the wrong number of blocks");
  }

  bool use_log = settings.scheme == Scheme::kLogDomain ||
                 (settings.scheme == Scheme::kAuto && !sub.mtilde_usable());
  const bool cmot3 = settings.use_cmot3 && sub.marginal_structured();

  for (long l = 1;; ++l) {
    if (l > settings.cap) {
      Fail(ErrorKind::kInnerCapExceeded,
           "inner solver hit the cap of " + std::to_string(settings.cap) +
               " sweeps at outer iteration " + std::to_string(gate.k));
    }
    const double r_before = settings.track_dual_objective ? DualObjective(sub, st) : kNaN;
    if (use_log) {
      SweepLogDomain(sub, st);
    } else {
      std::vector<std::vector<double>> xi_saved;
      Tensor3 gamma_saved;
      const bool auto_mode = settings.scheme == Scheme::kAuto;
      const bool log_was_fresh = st.log_fresh;
      if (auto_mode) {
        st.SyncExp(eps);
        xi_saved = st.xi;
        gamma_saved = st.gamma;
      }
      try {
        if (cmot3) {
          Cmot3Sweep(sub, st);
        } else {
          SweepMultiplicative(sub, st);
        }
      } catch (const Error& ex) {
        if (!auto_mode || ex.kind() != ErrorKind::kUnderflow) throw;
        st.xi = std::move(xi_saved);
        st.gamma = std::move(gamma_saved);
        st.exp_fresh = true;
        st.log_fresh = log_was_fresh;
        st.hat_m_fresh = false;
        use_log = true;
        SweepLogDomain(sub, st);
      }
    }
    res.sweeps = l;
    if (settings.track_dual_objective && settings.on_sweep) {
      settings.on_sweep(SweepEvent{gate.k, l, r_before, DualObjective(sub, st)});
    }

    Tensor3 x = RecoverPrimal(sub, st);
    const double d1 = RelativeFeasibility(inst, x);
    if (d1 > gate.mutilde) continue;
    if (!gate.feasibility_map) {
      res.x = std::move(x);
      res.delta1 = d1;
      res.bregman = kNaN;
      break;
    }
    Tensor3 xt = gate.feasibility_map(x);
    Tensor3 log_x = ScaledLogPrimal(sub, st);
    for (double& v : log_x.values()) v /= eps;
    const double breg = BregmanLog(xt, log_x);
    if (breg <= gate.mu) {
      res.x = std::move(x);
      res.x_tilde = std::move(xt);
      res.delta1 = d1;
      res.bregman = breg;
      break;
    }
  }
  res.used_log_domain = use_log;
  return res;
}

}  // namespace ieppa
