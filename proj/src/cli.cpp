#include "ieppa/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ieppa/dykl.hpp"
#include "ieppa/eppa.hpp"
#include "ieppa/gen.hpp"
#include "ieppa/instance_io.hpp"
#include "ieppa/kernels.hpp"
#include "ieppa/oracle.hpp"
#include "ieppa/tomo.hpp"

namespace ieppa::cli {

int ExitCodeFor(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kIo:
      return kExitIo;
    case ErrorKind::kParse:
      return kExitParse;
    case ErrorKind::kInfeasible:
      return kExitInfeasible;
    case ErrorKind::kSizeGuard:
      return kExitSizeGuard;
    case ErrorKind::kDimensionMismatch:
    case ErrorKind::kInvalidArgument:
    case ErrorKind::kAssumptionViolated:
    case ErrorKind::kZeroRhs:
      return kExitInvalidData;
    case ErrorKind::kDomain:
    case ErrorKind::kUnderflow:
    case ErrorKind::kInnerCapExceeded:
    case ErrorKind::kUnbounded:
      return kExitSolver;
  }
  return kExitSolver;
}

namespace {

struct SolverOptions {
  std::string method = "ieppa";
  std::optional<double> epsilon;
  double tol = 1e-5;
  int max_outer = 500;
  long max_iter = 20000;
  std::string scheme = "auto";
  std::string dykl_mode = "auto";
  bool deterministic = false;
};

void AddSolverOptions(CLI::App* app, SolverOptions& o, bool with_method) {
  if (with_method) {
    app->add_option("--method", o.method, "Solver")
        ->check(CLI::IsMember({"ieppa", "dykl", "oracle"}))
        ->capture_default_str();
  }
  app->add_option("--epsilon", o.epsilon, "Proximal / entropic parameter (ieppa 0.05, dykl 1e-2)")
      ->check(CLI::PositiveNumber);
  app->add_option("--tol", o.tol, "Stopping tolerance")->check(CLI::PositiveNumber)
      ->capture_default_str();
  app->add_option("--max-outer", o.max_outer, "iEPPA outer iteration limit")
      ->check(CLI::PositiveNumber)->capture_default_str();
  app->add_option("--max-iter", o.max_iter, "DyKL iteration limit")
      ->check(CLI::PositiveNumber)->capture_default_str();
  app->add_option("--scheme", o.scheme, "iEPPA inner sweep scheme")
      ->check(CLI::IsMember({"auto", "multiplicative", "log"}))->capture_default_str();
  app->add_option("--dykl-mode", o.dykl_mode, "DyKL form")
      ->check(CLI::IsMember({"auto", "plain", "stabilized"}))->capture_default_str();
  app->add_flag("--deterministic", o.deterministic, "Report wall time as 0");
}

EppaParams MakeEppaParams(const SolverOptions& o) {
  EppaParams p;
  p.epsilon = o.epsilon.value_or(0.05);
  p.tol_kkt = o.tol;
  p.max_outer = o.max_outer;
  p.inner.scheme = ParseScheme(o.scheme == "log" ? "logdomain" : o.scheme);
  return p;
}

DyklParams MakeDyklParams(const SolverOptions& o) {
  DyklParams p;
  p.epsilon = o.epsilon.value_or(1e-2);
  p.tol = o.tol;
  p.max_iter = o.max_iter;
  p.mode = ParseDyklMode(o.dykl_mode);
  return p;
}

void WriteOrPrint(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    WriteTextFile(path, text);
  }
}

std::string Num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

double Feasibility(const KktResiduals& d) {
  return std::max({d.at(1), d.at(3), d.at(4)});
}

struct MethodRun {
  Tensor3 x;
  SolveReport report;
  long pivots = -1;  // oracle only
};

MethodRun RunMethod(const Instance& inst, const SolverOptions& o) {
  MethodRun run;
  if (o.method == "ieppa") {
    IeppaResult r = SolveIeppa(inst, MakeEppaParams(o));
    run.x = std::move(r.x);
    run.report = std::move(r.report);
  } else if (o.method == "dykl") {
    DyklResult r = SolveDykl(inst, MakeDyklParams(o));
    run.x = std::move(r.x);
    run.report = std::move(r.report);
  } else {
    const auto t0 = std::chrono::steady_clock::now();
    OracleResult r = SolveOracle(inst);
    run.report.wall_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    run.report.objective = r.objective;
    run.report.delta = PrimalResiduals(inst, r.x);
    run.pivots = r.pivots;
    run.x = std::move(r.x);
  }
  if (o.deterministic) run.report.wall_time_ms = 0.0;
  return run;
}

nlohmann::json RunToJson(const MethodRun& run, const SolverOptions& o) {
  nlohmann::json j = ReportToJson(run.report);
  j["method"] = o.method;
  if (run.pivots >= 0) {
    j["status"] = "optimal";
    j["pivots"] = run.pivots;
  }
  return j;
}

// --- subcommands ------------------------------------------------------------------

struct GenerateCmd {
  int marginals = 2;
  std::size_t n = 10;
  std::optional<std::size_t> n1, n2, n3;
  std::uint64_t seed = 0;
  double capacity_factor = 2.0;
  bool no_capacity = false;
  std::string output;

  void Add(CLI::App* app) {
    app->add_option("--marginals", marginals, "Number of marginals")
        ->check(CLI::IsMember({2, 3}))->capture_default_str();
    app->add_option("--n", n, "Size of every marginal")->check(CLI::PositiveNumber)
        ->capture_default_str();
    app->add_option("--n1", n1, "Override n1")->check(CLI::PositiveNumber);
    app->add_option("--n2", n2, "Override n2")->check(CLI::PositiveNumber);
    app->add_option("--n3", n3, "Override n3")->check(CLI::PositiveNumber);
    app->add_option("--seed", seed, "PRNG seed")->capture_default_str();
    app->add_option("--capacity-factor", capacity_factor,
                    "U = factor * outer product of the marginals (> 1)")
        ->capture_default_str();
    app->add_flag("--no-capacity", no_capacity, "Drop the upper bound U");
    app->add_option("-o,--output", output, "Instance JSON path (stdout when absent)");
  }

  GenSpec Spec() const {
    GenSpec s;
    s.marginal_count = marginals;
    s.n1 = n1.value_or(n);
    s.n2 = n2.value_or(n);
    s.n3 = n3.value_or(n);
    s.seed = seed;
    s.capacity_factor = capacity_factor;
    return s;
  }

  int Run(std::ostream& out) const {
    GeneratedInstance g = GenCmot(Spec());
    if (no_capacity) g.instance.upper.reset();
    WriteOrPrint(output, InstanceToJson(g.instance).dump() + "\n", out);
    return kExitOk;
  }
};

struct SolveCmd {
  std::string instance;
  std::string output;
  std::string primal;
  SolverOptions opts;

  void Add(CLI::App* app) {
    app->add_option("instance", instance, "Instance JSON")->required();
    AddSolverOptions(app, opts, true);
    app->add_option("-o,--output", output, "Report JSON path (stdout when absent)");
    app->add_option("--primal", primal, "Write the primal tensor as JSON");
  }

  int Run(std::ostream& out) const {
    const Instance inst = InstanceFromJson(ReadJsonFile(instance));
    const MethodRun run = RunMethod(inst, opts);
    WriteOrPrint(output, RunToJson(run, opts).dump(2) + "\n", out);
    if (!primal.empty()) {
      const Dims d = run.x.dims();
      nlohmann::json j = {{"dims", {d.n1, d.n2, d.n3}}, {"values", TensorToJson(run.x)}};
      WriteTextFile(primal, j.dump() + "\n");
    }
    return run.report.status == SolveStatus::kInnerCapExceeded ? kExitSolver : kExitOk;
  }
};

struct TomoProjectCmd {
  std::string image;
  std::string directions;
  std::size_t num_directions = 0;
  std::string output;

  void Add(CLI::App* app) {
    app->add_option("image", image, "PGM image (square)")->required();
    auto* d = app->add_option("--directions", directions, "Directions \"v1,v2;v1,v2;...\"");
    app->add_option("--num-directions", num_directions,
                    "Use the first N canonical directions")
        ->check(CLI::PositiveNumber)->excludes(d);
    app->add_option("-o,--output", output, "Instance JSON path (stdout when absent)");
  }

  int Run(std::ostream& out) const {
    const GrayImage img = ReadPgm(image);
    std::vector<Direction> dirs;
    if (!directions.empty()) {
      dirs = ParseDirections(directions);
    } else {
      dirs = CanonicalDirections(num_directions ? num_directions : 3);
    }
    const TomoProblem prob = ProjectImage(img, dirs);
    WriteOrPrint(output, TomoToJson(prob).dump() + "\n", out);
    return kExitOk;
  }
};

struct TomoReconstructCmd {
  std::string instance;
  std::string output;
  std::string truth;
  std::string report;
  SolverOptions opts;

  void Add(CLI::App* app) {
    app->add_option("instance", instance, "Instance JSON from `tomo project`")->required();
    app->add_option("-o,--output", output, "Reconstructed PGM")->required();
    app->add_option("--truth", truth, "Ground-truth PGM for PSNR");
    app->add_option("--report", report, "Report JSON path (stdout when absent)");
    AddSolverOptions(app, opts, false);
  }

  int Run(std::ostream& out) const {
    const TomoProblem prob = TomoFromJson(ReadJsonFile(instance));
    TomoReconstruction rec = Reconstruct(prob, MakeEppaParams(opts));
    if (opts.deterministic) rec.result.report.wall_time_ms = 0.0;
    WritePgm(output, rec.image);
    nlohmann::json j = ReportToJson(rec.result.report);
    j["method"] = "ieppa";
    if (!truth.empty()) {
      const double p = Psnr(rec.image, ReadPgm(truth));
      j["psnr"] = std::isinf(p) ? nlohmann::json("inf") : nlohmann::json(p);
    }
    WriteOrPrint(report, j.dump(2) + "\n", out);
    return rec.result.report.status == SolveStatus::kInnerCapExceeded ? kExitSolver : kExitOk;
  }
};

struct BenchCmd {
  GenerateCmd gen;
  int count = 5;
  std::string methods = "ieppa,dykl,oracle";
  double epsilon = 0.05;
  double dykl_epsilon = 1e-2;
  SolverOptions opts;
  std::string output;

  void Add(CLI::App* app) {
    app->add_option("--marginals", gen.marginals, "Number of marginals")
        ->check(CLI::IsMember({2, 3}))->capture_default_str();
    app->add_option("--n", gen.n, "Size of every marginal")->check(CLI::PositiveNumber)
        ->capture_default_str();
    app->add_option("--seed", gen.seed, "First seed")->capture_default_str();
    app->add_option("--count", count, "Number of consecutive seeds")
        ->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--methods", methods, "Comma-separated subset of ieppa,dykl,oracle")
        ->capture_default_str();
    app->add_option("--epsilon", epsilon, "iEPPA epsilon")->check(CLI::PositiveNumber)
        ->capture_default_str();
    app->add_option("--dykl-epsilon", dykl_epsilon, "DyKL epsilon")->check(CLI::PositiveNumber)
        ->capture_default_str();
    app->add_option("--tol", opts.tol, "Stopping tolerance")->check(CLI::PositiveNumber)
        ->capture_default_str();
    app->add_flag("--deterministic", opts.deterministic, "Report time as 0");
    app->add_option("-o,--output", output, "CSV path (stdout when absent)");
  }

  int Run(std::ostream& out, std::ostream& err) const {
    std::vector<std::string> list;
    std::stringstream ss(methods);
    for (std::string m; std::getline(ss, m, ',');) {
      if (m != "ieppa" && m != "dykl" && m != "oracle") {
        Fail(ErrorKind::kInvalidArgument, "unknown method '" + m + "'");
      }
      list.push_back(m);
    }
    std::ostringstream csv;
    csv << kBenchHeader << '\n';
    for (int i = 0; i < count; ++i) {
      GenerateCmd g = gen;
      g.seed = gen.seed + static_cast<std::uint64_t>(i);
      const GenSpec spec = g.Spec();
      const Instance inst = GenCmot(spec).instance;
      const std::size_t n3 = spec.marginal_count == 3 ? spec.n3 : 1;

      // The oracle objective is the reference for every row.
      std::optional<double> ref;
      try {
        ref = SolveOracle(inst).objective;
      } catch (const Error& ex) {
        err << "ieppa bench: seed " << g.seed << ": no oracle reference (" << ex.what() << ")\n";
      }
      for (const std::string& m : list) {
        SolverOptions o = opts;
        o.method = m;
        o.epsilon = m == "dykl" ? dykl_epsilon : epsilon;
        csv << spec.n1 << ',' << spec.n2 << ',' << n3 << ',' << g.seed << ',' << m << ','
            << (m == "oracle" ? std::string("nan") : Num(*o.epsilon)) << ',';
        try {
          const MethodRun run = RunMethod(inst, o);
          const double nobj = ref ? std::abs(run.report.objective - *ref) / (1.0 + std::abs(*ref))
                                  : std::numeric_limits<double>::quiet_NaN();
          const bool oracle = run.pivots >= 0;
          csv << Num(nobj) << ',' << Num(Feasibility(run.report.delta)) << ','
              << (oracle ? run.pivots : run.report.outer_iters) << ','
              << (oracle ? 0 : run.report.inner_sweeps) << ','
              << Num(run.report.wall_time_ms / 1000.0) << ','
              << (oracle ? "optimal" : StatusName(run.report.status)) << '\n';
        } catch (const Error& ex) {
          err << "ieppa bench: seed " << g.seed << " " << m << ": " << ex.what() << '\n';
          csv << "nan,nan,0,0,nan," << ErrorKindName(ex.kind()) << '\n';
        }
      }
    }
    WriteOrPrint(output, csv.str(), out);
    return kExitOk;
  }
};

}  // namespace

int Run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Entropic proximal point LP solver for capacity-constrained transport and "
               "discrete tomography"};
  app.name("ieppa");
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "OpenMP threads (0 keeps the default)")
      ->check(CLI::NonNegativeNumber);

  GenerateCmd gen_cmd;
  SolveCmd solve_cmd;
  TomoProjectCmd project_cmd;
  TomoReconstructCmd recon_cmd;
  BenchCmd bench_cmd;

  CLI::App* gen = app.add_subcommand("generate", "Write a seeded CMOT instance as JSON");
  gen_cmd.Add(gen);
  CLI::App* solve = app.add_subcommand("solve", "Solve an instance and write a report");
  solve_cmd.Add(solve);
  CLI::App* tomo = app.add_subcommand("tomo", "Discrete tomography");
  tomo->require_subcommand(1);
  CLI::App* project = tomo->add_subcommand("project", "PGM image to projection instance");
  project_cmd.Add(project);
  CLI::App* recon = tomo->add_subcommand("reconstruct", "Projection instance to PGM image");
  recon_cmd.Add(recon);
  CLI::App* bench = app.add_subcommand("bench", "Solve a seeded family and write a CSV table");
  bench_cmd.Add(bench);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (threads > 0) kernels::SetThreads(threads);
    if (*gen) return gen_cmd.Run(out);
    if (*solve) return solve_cmd.Run(out);
    if (*project) return project_cmd.Run(out);
    if (*recon) return recon_cmd.Run(out);
    if (*bench) return bench_cmd.Run(out, err);
  } catch (const Error& ex) {
    err << "ieppa: " << ErrorKindName(ex.kind()) << ": " << ex.what() << '\n';
    return ExitCodeFor(ex.kind());
  } catch (const nlohmann::json::exception& ex) {
    err << "ieppa: parse: " << ex.what() << '\n';
    return kExitParse;
  } catch (const std::exception& ex) {
    err << "ieppa: " << ex.what() << '\n';
    return kExitSolver;
  }
  return kExitUsage;
}

}  // namespace ieppa::cli
