// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "ieppa/bcd.hpp"
#include "ieppa/constraints.hpp"
#include "ieppa/dykl.hpp"
#include "ieppa/entropy.hpp"
#include "ieppa/eppa.hpp"
#include "ieppa/gen.hpp"
#include "ieppa/oracle.hpp"
#include "ieppa/tomo.hpp"

#ifndef IEPPA_TEST_DATA_DIR
#define IEPPA_TEST_DATA_DIR "tests/data"
#endif

using namespace ieppa;

namespace {

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double NormalizedObj(double f, double fg) { return std::abs(f - fg) / (1.0 + std::abs(fg)); }

// Worst dual-objective increase seen over every tracked sweep, relative to
// 1e-12 (1 + |R|). <= 1 means monotone.
struct MonotoneTracker {
  long sweeps = 0;
  double worst = 0.0;

  void Attach(EppaParams& p) {
    p.inner.track_dual_objective = true;
    p.inner.on_sweep = [this](const SweepEvent& ev) {
      ++sweeps;
      const double slack = 1e-12 * (1.0 + std::abs(ev.r_before));
      worst = std::max(worst, (ev.r_after - ev.r_before) / slack);
    };
  }
};

MonotoneTracker g_monotone;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int g_failures = 0;

void Report(int id, const char* name, const Outcome& o) {
  std::printf("criterion %2d  %-4s  %s: %s\n", id, o.pass ? "PASS" : "FAIL", name,
              o.detail.c_str());
  std::fflush(stdout);
  if (!o.pass) ++g_failures;
}

std::string Fmt(const char* fmt, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, fmt, a, b, c, d);
  return buf;
}

Instance Generate(int marginals, std::size_t n, std::uint64_t seed) {
  GenSpec s;
  s.marginal_count = marginals;
  s.n1 = s.n2 = s.n3 = n;
  s.seed = seed;
  return GenCmot(s).instance;
}

struct FamilyStats {
  int runs = 0;
  int converged = 0;
  double worst_kkt = 0.0;
  double worst_nobj = 0.0;
  int worst_outer = 0;
  int worst_outer_n20 = 0;
  double seconds = 0.0;
};

FamilyStats RunFamily(int marginals, const std::vector<std::size_t>& sizes, int count) {
  FamilyStats st;
  for (int i = 0; i < count; ++i) {
    const std::size_t n = sizes[static_cast<std::size_t>(i) % sizes.size()];
    const Instance inst = Generate(marginals, n, 1000 + static_cast<std::uint64_t>(i));
    const double fg = SolveOracle(inst).objective;
    const auto t0 = Clock::now();
    const IeppaResult r = SolveIeppa(inst);
    st.seconds += Seconds(t0);
    // Same solve again with the dual objective tracked, outside the timing.
    EppaParams tracked;
    g_monotone.Attach(tracked);
    SolveIeppa(inst, tracked);
    ++st.runs;
    if (r.report.status == SolveStatus::kConverged) ++st.converged;
    st.worst_kkt = std::max(st.worst_kkt, r.report.delta.kkt);
    st.worst_nobj = std::max(st.worst_nobj, NormalizedObj(r.report.objective, fg));
    st.worst_outer = std::max(st.worst_outer, r.report.outer_iters);
    if (n == 20) st.worst_outer_n20 = std::max(st.worst_outer_n20, r.report.outer_iters);
  }
  return st;
}

Outcome FamilyOutcome(const FamilyStats& st, double time_limit) {
  Outcome o;
  o.pass = st.converged == st.runs && st.worst_kkt < 1e-5 && st.worst_nobj <= 2e-4 &&
           st.seconds < time_limit;
  o.detail = Fmt("%.0f/%.0f converged, max kkt %.2e, max normalized obj %.2e, ", st.converged,
                 st.runs, st.worst_kkt, st.worst_nobj) +
             Fmt("solver time %.2f s (limit %.0f s)", st.seconds, time_limit);
  return o;
}

// --- criteria 5-8: property suites ---------------------------------------------

Outcome SchemeEquivalence() {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Instance inst = Generate(3, 5, 2000 + seed);
    SplitMix64 rng(seed);
    Tensor3 center(inst.dims);
    for (double& v : center.values()) v = 0.5 + rng.Uniform();
    const ProxSubproblem sub = ProxSubproblem::FromCenter(inst, center, 0.05);
    DualState a = DualState::Cold(inst);
    DualState b = DualState::Cold(inst);
    for (int s = 0; s < 100; ++s) {
      SweepMultiplicative(sub, a);
      SweepLogDomain(sub, b);
      worst = std::max(worst, MaxAbsDiff(RecoverPrimal(sub, a), RecoverPrimal(sub, b)));
    }
  }
  return {worst <= 1e-8, Fmt("max |X_mult - X_log| = %.2e over 5 x 100 sweeps", worst)};
}

Outcome BulletIdentity() {
  SplitMix64 rng(42);
  double worst = 0.0;
  int partial = 0;
  const std::vector<Direction> dirs = CanonicalDirections(9);
  for (int trial = 0; trial < 100; ++trial) {
    PartitionBlock block = [&]() {
      if (trial % 2 == 0) {
        const std::size_t n = 3 + static_cast<std::size_t>(trial % 5);
        const auto blocks = CmotMarginalBlocks(Dims{n, n + 1, 2});
        return blocks[static_cast<std::size_t>(trial / 2) % 3];
      }
      // Tomography block with some lines dropped.
      const std::size_t n = 4 + static_cast<std::size_t>(trial % 7);
      const PartitionBlock full = TomoBlock(n, dirs[static_cast<std::size_t>(trial) % 9]);
      std::vector<bool> keep(full.m());
      bool any = false;
      for (std::size_t j = 0; j < keep.size(); ++j) {
        keep[j] = rng.Uniform() < 0.7;
        any = any || keep[j];
      }
      if (!any) keep[0] = true;
      return full.RestrictRows(keep);
    }();
    if (block.covered_count() < block.dims().size()) ++partial;
    Tensor3 m(block.dims());
    for (double& v : m.values()) v = rng.Uniform() * 2.0;
    std::vector<double> y(block.m());
    for (double& v : y) v = 0.05 * (rng.Uniform() * 4.0 - 2.0);
    const double eps = 0.05;
    std::vector<double> ey(y.size());
    for (std::size_t j = 0; j < y.size(); ++j) ey[j] = std::exp(y[j] / eps);
    const Tensor3 lhs_t = ElementwiseMap(EntryMap::ExpScaled(eps), AdjointBlock(block, y));
    const double lhs = InnerProduct(m, lhs_t);
    const std::vector<double> am = ApplyBlock(block, m);
    double rhs = Dot(am, ey);
    for (std::size_t e = 0; e < m.size(); ++e) {
      if (block.label(e) < 0) rhs += m[e];
    }
    worst = std::max(worst, std::abs(lhs - rhs) / std::max(std::abs(lhs), 1e-300));
  }
  return {worst <= 1e-10 && partial > 0,
          Fmt("max relative gap %.2e on 100 triples (%.0f partially covering)", worst, partial)};
}

Outcome EntropySuite() {
  SplitMix64 rng(7);
  double worst_three = 0.0, worst_kl = 0.0, min_breg = kInf;
  for (int trial = 0; trial < 100; ++trial) {
    const Dims d{2 + static_cast<std::size_t>(trial % 4), 3, 2};
    Tensor3 x(d), y(d), z(d);
    for (std::size_t e = 0; e < d.size(); ++e) {
      x[e] = 0.01 + rng.Uniform() * 3.0;
      y[e] = 0.01 + rng.Uniform() * 3.0;
      z[e] = 0.01 + rng.Uniform() * 3.0;
    }
    // <grad phi(Y) - grad phi(Z), X - Y> with grad phi = log.
    double lhs = 0.0;
    for (std::size_t e = 0; e < d.size(); ++e) {
      lhs += (std::log(y[e]) - std::log(z[e])) * (x[e] - y[e]);
    }
    const double bxz = Bregman(x, z), bxy = Bregman(x, y), byz = Bregman(y, z);
    const double rhs = bxz - bxy - byz;
    const double scale = std::max({std::abs(lhs), bxz, bxy, byz});
    worst_three = std::max(worst_three, std::abs(lhs - rhs) / scale);
    worst_kl = std::max(worst_kl, std::abs(bxy - Kl(x, y)) / std::max(1.0, bxy));
    min_breg = std::min({min_breg, bxy, bxz, byz, Bregman(x, x)});
  }
  return {worst_three <= 1e-10 && worst_kl <= 1e-12 && min_breg >= 0.0,
          Fmt("three-points %.2e, |D - KL| %.2e, min D %.2e", worst_three, worst_kl, min_breg)};
}

Outcome RoundingMap() {
  SplitMix64 rng(99);
  double worst_marg = 0.0, worst_l1_ratio = 0.0;
  bool box_ok = true;
  for (int trial = 0; trial < 100; ++trial) {
    const int marginals = trial % 2 == 0 ? 2 : 3;
    const std::size_t n = 3 + static_cast<std::size_t>(trial % 5);
    GenSpec s;
    s.marginal_count = marginals;
    s.n1 = n;
    s.n2 = n + 1;
    s.n3 = n + 2;
    s.seed = 3000 + static_cast<std::uint64_t>(trial);
    GeneratedInstance g = GenCmot(s);
    const bool with_u = trial % 4 < 2;
    if (!with_u) g.instance.upper.reset();
    Tensor3 x = g.x_ri;
    for (double& v : x.values()) v *= 1.0 + 0.3 * (rng.Uniform() * 2.0 - 1.0);
    if (with_u) x = ElementwiseCombine(Combine::kMin, x, *g.instance.upper);
    const Tensor3 gx = RoundToFeasible(g.instance, x, g.x_ri);
    const Instance& inst = g.instance;
    double resid_l1 = 0.0;
    for (std::size_t i = 0; i < inst.blocks.size(); ++i) {
      const std::vector<double> r = ApplyBlock(inst.blocks[i], gx);
      const std::vector<double> r0 = ApplyBlock(inst.blocks[i], x);
      for (std::size_t j = 0; j < r.size(); ++j) {
        const double b = inst.rhs[i][j];
        worst_marg = std::max(worst_marg, std::abs(r[j] - b) / std::max(b, 1e-300));
        resid_l1 += std::abs(r0[j] - b);
      }
    }
    for (std::size_t e = 0; e < gx.size(); ++e) {
      if (gx[e] < 0.0 || (inst.upper && gx[e] > (*inst.upper)[e])) box_ok = false;
    }
    if (!with_u) {
      double moved = 0.0;
      for (std::size_t e = 0; e < gx.size(); ++e) moved += std::abs(gx[e] - x[e]);
      worst_l1_ratio = std::max(worst_l1_ratio, moved / (2.0 * resid_l1));
    }
  }
  return {worst_marg <= 1e-12 && box_ok && worst_l1_ratio <= 1.0,
          Fmt("max marginal rel err %.2e, ", worst_marg) + (box_ok ? "box ok" : "box VIOLATED") +
              Fmt(", max |G(X)-X|_1 / (2 sum|res|_1) = %.3f", worst_l1_ratio)};
}

// --- criterion 9 -------------------------------------------------------------------

Outcome DyklBaseline() {
  int wins = 0;
  double worst_ratio = kInf;
  std::string ratios;
  for (std::uint64_t i = 0; i < 10; ++i) {
    const Instance inst = Generate(2, 10, 4000 + i);
    const double fg = SolveOracle(inst).objective;
    EppaParams p;
    g_monotone.Attach(p);
    const double e_ieppa = NormalizedObj(SolveIeppa(inst, p).report.objective, fg);
    DyklParams dp;
    dp.epsilon = 1e-2;
    dp.tol = 1e-5;
    const double e_dykl = NormalizedObj(SolveDykl(inst, dp).report.objective, fg);
    const double ratio = e_dykl / std::max(e_ieppa, 1e-300);
    if (ratio >= 2.0) ++wins;
    worst_ratio = std::min(worst_ratio, ratio);
  }
  double agree = 0.0;
  for (std::uint64_t i = 0; i < 10; ++i) {
    const Instance inst = Generate(2, 10, 4000 + i);
    DyklParams dp;
    dp.epsilon = 0.1;
    dp.mode = DyklMode::kPlain;
    const Tensor3 xp = SolveDykl(inst, dp).x;
    dp.mode = DyklMode::kStabilized;
    const Tensor3 xs = SolveDykl(inst, dp).x;
    agree = std::max(agree, MaxAbsDiff(xp, xs));
  }
  return {wins >= 8 && agree <= 1e-6,
          Fmt("DyKL >= 2x worse on %.0f/10 seeds (min ratio %.1f), plain vs stabilized %.2e",
              wins, worst_ratio, agree)};
}

// --- criterion 10 ------------------------------------------------------------------

Outcome Tomography() {
  const auto t0 = Clock::now();
  const GrayImage truth = ReadPgm(std::string(IEPPA_TEST_DATA_DIR) + "/phantom16.pgm");
  double psnr[2];
  double worst_d1 = 0.0;
  bool converged = true;
  const std::size_t counts[2] = {3, 9};
  for (int i = 0; i < 2; ++i) {
    const TomoProblem prob = ProjectImage(truth, CanonicalDirections(counts[i]));
    EppaParams p;
    g_monotone.Attach(p);
    const TomoReconstruction rec = Reconstruct(prob, p);
    psnr[i] = Psnr(rec.image, truth);
    converged = converged && rec.result.report.status == SolveStatus::kConverged;
    if (counts[i] == 9) worst_d1 = rec.result.report.delta.at(1);
  }

  // 2x2 image pinned down by rows, columns and diagonals.
  Tensor3 small(Dims{2, 2, 1}, {0.9, 0.3, 0.6, 0.2});
  const GrayImage img2 = GrayImage::FromTensor(small);
  const TomoProblem prob2 = ProjectImage(img2, CanonicalDirections(3));
  const ReducedTomo red = ReduceTomo(prob2);
  const Tensor3 x_lo = SolveOracle(red.instance).x;
  Instance flipped = red.instance;
  for (double& v : flipped.cost.values()) v = 1.0 - v;
  const Tensor3 x_hi = SolveOracle(flipped).x;
  const bool unique = MaxAbsDiff(x_lo, x_hi) <= 1e-10;
  // Exact recovery needs the inner feasibility floor below the 1e-6 target.
  EppaParams p;
  p.tol_kkt = 1e-10;
  p.mutilde = [](int k) { return std::max(1e-4 * std::pow(2.0 / 3.0, k), 1e-12); };
  g_monotone.Attach(p);
  const TomoReconstruction rec2 = Reconstruct(prob2, p);
  Tensor3 oracle_img(Dims{2, 2, 1});
  for (std::size_t e = 0; e < 4; ++e) {
    if (red.free_index[e] >= 0) oracle_img[e] = x_lo[red.free_index[e]];
  }
  const double err2 = MaxAbsDiff(rec2.image.pixels, oracle_img);
  const double secs = Seconds(t0);

  Outcome o;
  o.pass = converged && worst_d1 < 1e-5 && psnr[1] >= psnr[0] && unique && err2 <= 1e-6 &&
           secs < 30.0;
  o.detail = Fmt("PSNR 3 dirs %.2f dB, 9 dirs %.2f dB, Delta1(9) %.2e, ", psnr[0], psnr[1],
                 worst_d1) +
             Fmt("n=2 unique %.0f, max err %.2e, %.2f s", unique ? 1.0 : 0.0, err2, secs);
  return o;
}

// --- criterion 11 ------------------------------------------------------------------

Outcome FlagHonesty() {
  const GrayImage truth = ReadPgm(std::string(IEPPA_TEST_DATA_DIR) + "/phantom16.pgm");
  EppaParams p;
  p.max_outer = 3;
  const TomoReconstruction rec = Reconstruct(ProjectImage(truth, CanonicalDirections(2)), p);
  const bool tomo_flag = rec.result.report.HasFlag(kFlagGuaranteeWaived);
  bool marg_clean = true;
  for (int m : {2, 3}) {
    const IeppaResult r = SolveIeppa(Generate(m, 5, 5000 + static_cast<std::uint64_t>(m)));
    marg_clean = marg_clean && !r.report.HasFlag(kFlagGuaranteeWaived);
  }
  return {tomo_flag && marg_clean,
          std::string("tomography run ") + (tomo_flag ? "flagged" : "NOT flagged") +
              ", marginal runs " + (marg_clean ? "unflagged" : "FLAGGED")};
}

}  // namespace

int main() {
  struct Entry {
    const char* name;
    Outcome outcome;
  };
  std::vector<Entry> out(12);
  const FamilyStats two = RunFamily(2, {5, 10, 20}, 20);
  out[1] = {"oracle equivalence, 2 marginals", FamilyOutcome(two, 5.0)};
  const FamilyStats three = RunFamily(3, {4, 6, 8}, 10);
  out[2] = {"oracle equivalence, 3 marginals", FamilyOutcome(three, 10.0)};
  out[3] = {"outer iterations on n=20",
            {two.worst_outer_n20 > 0 && two.worst_outer_n20 <= 40,
             Fmt("max outer iterations %.0f (limit 40)", two.worst_outer_n20)}};
  out[5] = {"scheme equivalence", SchemeEquivalence()};
  out[6] = {"bullet identity", BulletIdentity()};
  out[7] = {"entropy suite", EntropySuite()};
  out[8] = {"rounding map", RoundingMap()};
  out[9] = {"DyKL baseline", DyklBaseline()};
  out[10] = {"tomography", Tomography()};
  out[11] = {"guarantee flag honesty", FlagHonesty()};
  // Covers the sweeps of every iEPPA run above.
  out[4] = {"dual monotonicity",
            {g_monotone.sweeps > 0 && g_monotone.worst <= 1.0,
             Fmt("%.0f sweeps, worst increase %.2f x 1e-12(1+|R|)",
                 static_cast<double>(g_monotone.sweeps), g_monotone.worst)}};
  for (int id = 1; id <= 11; ++id) Report(id, out[static_cast<std::size_t>(id)].name,
                                          out[static_cast<std::size_t>(id)].outcome);
  std::printf("%s: %d of 11 criteria failed\n", g_failures ? "FAIL" : "PASS", g_failures);
  return g_failures ? 1 : 0;
}
