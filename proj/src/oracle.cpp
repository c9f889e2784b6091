#include "ieppa/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "ieppa/error.hpp"

namespace ieppa {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-10;
constexpr double kFeasTol = 1e-9;

// Dense tableau over structural and artificial columns.
class Simplex {
 public:
  explicit Simplex(const StandardLp& lp)
      : lp_(lp), m_(lp.rows), n_(lp.cols), total_(lp.cols + lp.rows) {
    t_.assign(m_ * total_, 0.0);
    lo_.assign(total_, 0.0);
    hi_.assign(total_, kInf);
    x_.assign(total_, 0.0);
    at_upper_.assign(total_, false);
    basic_row_.assign(total_, -1);
    basis_.resize(m_);
    for (std::size_t j = 0; j < n_; ++j) hi_[j] = lp.ub[j];
    for (std::size_t i = 0; i < m_; ++i) {
      const double sign = lp.b[i] < 0.0 ? -1.0 : 1.0;
      sign_.push_back(sign);
      for (std::size_t j = 0; j < n_; ++j) t_[i * total_ + j] = sign * lp.at(i, j);
      t_[i * total_ + n_ + i] = 1.0;
      basis_[i] = n_ + i;
      basic_row_[n_ + i] = static_cast<long>(i);
      x_[n_ + i] = sign * lp.b[i];
    }
  }

  LpResult Run() {
    LpResult res;
    // Phase 1: minimize the artificial sum.
    std::vector<double> c1(total_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) c1[n_ + i] = 1.0;
    if (!Optimize(c1, total_)) {
      Fail(ErrorKind::kUnbounded, "phase 1 reported unbounded (internal error)");
    }
    double infeas = 0.0;
    for (std::size_t i = 0; i < m_; ++i) infeas += x_[n_ + i];
    double scale = 1.0;
    for (double v : lp_.b) scale = std::max(scale, std::abs(v));
    if (infeas > kFeasTol * scale) {
      res.status = LpStatus::kInfeasible;
      res.pivots = pivots_;
      return res;
    }
    for (std::size_t i = 0; i < m_; ++i) hi_[n_ + i] = 0.0;
    // Phase 2: artificials never re-enter.
    std::vector<double> c2(total_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) c2[j] = lp_.c[j];
    if (!Optimize(c2, n_)) {
      res.status = LpStatus::kUnbounded;
      res.pivots = pivots_;
      return res;
    }
    Refine();
    res.status = LpStatus::kOptimal;
    res.x.assign(x_.begin(), x_.begin() + static_cast<long>(n_));
    for (std::size_t j = 0; j < n_; ++j) {
      res.x[j] = std::clamp(res.x[j], 0.0, hi_[j]);
      res.objective += lp_.c[j] * res.x[j];
    }
    for (auto j : basis_) {
      if (j < n_) res.basis.push_back(j);
    }
    std::sort(res.basis.begin(), res.basis.end());
    res.pivots = pivots_;
    return res;
  }

 private:
  double& T(std::size_t i, std::size_t j) { return t_[i * total_ + j]; }

  std::vector<double> ReducedCosts(const std::vector<double>& c) {
    std::vector<double> d = c;
    for (std::size_t i = 0; i < m_; ++i) {
      const double cb = c[basis_[i]];
      if (cb == 0.0) continue;
      const double* row = &t_[i * total_];
      for (std::size_t j = 0; j < total_; ++j) d[j] -= cb * row[j];
    }
    return d;
  }

  // Returns false when unbounded. Columns >= enter_limit never enter.
  bool Optimize(const std::vector<double>& c, std::size_t enter_limit) {
    std::vector<double> d = ReducedCosts(c);
    for (;;) {
      // Bland: lowest-index improving column.
      long q = -1;
      for (std::size_t j = 0; j < enter_limit; ++j) {
        if (basic_row_[j] >= 0) continue;
        if (hi_[j] - lo_[j] <= 0.0) continue;
        if ((!at_upper_[j] && d[j] < -kCostTol) || (at_upper_[j] && d[j] > kCostTol)) {
          q = static_cast<long>(j);
          break;
        }
      }
      if (q < 0) return true;
      const std::size_t qj = static_cast<std::size_t>(q);
      const double dir = at_upper_[qj] ? -1.0 : 1.0;

      // Ratio test; ties go to the lowest variable index.
      double best = hi_[qj] - lo_[qj];
      long leave = -1;
      std::size_t leave_var = total_;
      for (std::size_t i = 0; i < m_; ++i) {
        const double alpha = dir * T(i, qj);
        const std::size_t bv = basis_[i];
        double limit;
        if (alpha > kPivotTol) {
          limit = (x_[bv] - lo_[bv]) / alpha;
        } else if (alpha < -kPivotTol && std::isfinite(hi_[bv])) {
          limit = (hi_[bv] - x_[bv]) / -alpha;
        } else {
          continue;
        }
        limit = std::max(limit, 0.0);
        if (limit < best || (limit == best && leave >= 0 && bv < leave_var)) {
          best = limit;
          leave = static_cast<long>(i);
          leave_var = bv;
        }
      }
      if (!std::isfinite(best)) return false;

      for (std::size_t i = 0; i < m_; ++i) x_[basis_[i]] -= best * dir * T(i, qj);
      x_[qj] += best * dir;
      ++pivots_;
      if (leave < 0) {
        at_upper_[qj] = !at_upper_[qj];
        x_[qj] = at_upper_[qj] ? hi_[qj] : lo_[qj];
        continue;
      }
      const std::size_t r = static_cast<std::size_t>(leave);
      const std::size_t out = basis_[r];
      const double alpha_out = dir * T(r, qj);
      // The leaving variable sits at the bound it was heading for.
      at_upper_[out] = alpha_out < 0.0;
      x_[out] = at_upper_[out] ? hi_[out] : lo_[out];
      Pivot(r, qj, d);
    }
  }

  void Pivot(std::size_t r, std::size_t q, std::vector<double>& d) {
    double* prow = &t_[r * total_];
    const double piv = prow[q];
    for (std::size_t j = 0; j < total_; ++j) prow[j] /= piv;
    prow[q] = 1.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      double* row = &t_[i * total_];
      const double f = row[q];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < total_; ++j) row[j] -= f * prow[j];
      row[q] = 0.0;
    }
    const double fd = d[q];
    if (fd != 0.0) {
      for (std::size_t j = 0; j < total_; ++j) d[j] -= fd * prow[j];
      d[q] = 0.0;
    }
    basic_row_[basis_[r]] = -1;
    basis_[r] = q;
    basic_row_[q] = static_cast<long>(r);
    at_upper_[q] = false;
  }

  // Recompute the basic values from the original data: B x_B = b - N x_N.
  void Refine() {
    if (m_ == 0) return;
    Eigen::MatrixXd bm(m_, m_);
    Eigen::VectorXd rhs(m_);
    for (std::size_t i = 0; i < m_; ++i) rhs(i) = sign_[i] * lp_.b[i];
    for (std::size_t j = 0; j < total_; ++j) {
      if (basic_row_[j] >= 0 || x_[j] == 0.0) continue;
      for (std::size_t i = 0; i < m_; ++i) rhs(i) -= Column(i, j) * x_[j];
    }
    for (std::size_t k = 0; k < m_; ++k) {
      for (std::size_t i = 0; i < m_; ++i) bm(i, k) = Column(i, basis_[k]);
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(bm);
    const Eigen::VectorXd xb = lu.solve(rhs);
    for (std::size_t k = 0; k < m_; ++k) {
      if (std::isfinite(xb(k))) x_[basis_[k]] = xb(k);
    }
  }

  // Column j of the sign-adjusted original matrix [A | I].
  double Column(std::size_t i, std::size_t j) const {
    if (j < n_) return sign_[i] * lp_.at(i, j);
    return j - n_ == i ? 1.0 : 0.0;
  }

  const StandardLp& lp_;
  std::size_t m_, n_, total_;
  std::vector<double> t_, lo_, hi_, x_, sign_;
  std::vector<bool> at_upper_;
  std::vector<long> basic_row_;
  std::vector<std::size_t> basis_;
  long pivots_ = 0;
};

}  // namespace

std::size_t OracleMaxVars() {
  if (const char* env = std::getenv("IEPPA_ORACLE_MAX_VARS")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return kOracleMaxVars;
}

StandardLp Flatten(const Instance& inst) {
  inst.Validate(false);
  const std::size_t n = inst.dims.size();
  const std::size_t limit = OracleMaxVars();
  if (n > limit) {
    Fail(ErrorKind::kSizeGuard, "oracle refuses " + std::to_string(n) + " variables (limit " +
                                    std::to_string(limit) + ", set IEPPA_ORACLE_MAX_VARS)");
  }
  StandardLp lp;
  lp.cols = n;
  for (const auto& b : inst.blocks) lp.rows += b.m();
  lp.a.assign(lp.rows * n, 0.0);
  std::size_t row0 = 0;
  for (std::size_t i = 0; i < inst.blocks.size(); ++i) {
    const auto& blk = inst.blocks[i];
    for (std::size_t e = 0; e < n; ++e) {
      const auto l = blk.label(e);
      if (l >= 0) lp.a[(row0 + static_cast<std::size_t>(l)) * n + e] = 1.0;
    }
    lp.b.insert(lp.b.end(), inst.rhs[i].begin(), inst.rhs[i].end());
    row0 += blk.m();
  }
  lp.c.assign(inst.cost.values().begin(), inst.cost.values().end());
  if (inst.upper) {
    lp.ub.assign(inst.upper->values().begin(), inst.upper->values().end());
  } else {
    lp.ub.assign(n, kInf);
  }
  return lp;
}

const char* LpStatusName(LpStatus s) {
  switch (s) {
    case LpStatus::kOptimal:
      return "optimal";
    case LpStatus::kInfeasible:
      return "infeasible";
    case LpStatus::kUnbounded:
      return "unbounded";
  }
  return "?";
}

LpResult SolveLpExact(const StandardLp& lp) {
  if (lp.a.size() != lp.rows * lp.cols || lp.b.size() != lp.rows || lp.c.size() != lp.cols ||
      lp.ub.size() != lp.cols) {
    Fail(ErrorKind::kDimensionMismatch, "standard LP arrays are inconsistent");
  }
  for (double u : lp.ub) {
    if (!(u >= 0.0)) Fail(ErrorKind::kInvalidArgument, "upper bounds must be >= 0");
  }
  return Simplex(lp).Run();
}

OracleResult SolveOracle(const Instance& inst) {
  const StandardLp lp = Flatten(inst);
  const LpResult r = SolveLpExact(lp);
  if (r.status == LpStatus::kInfeasible) Fail(ErrorKind::kInfeasible, "LP is infeasible");
  if (r.status == LpStatus::kUnbounded) Fail(ErrorKind::kUnbounded, "LP is unbounded");
  OracleResult out;
  out.x = Tensor3(inst.dims, r.x);
  out.objective = r.objective;
  out.pivots = r.pivots;
  return out;
}

}  // namespace ieppa
