#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sasadmm/data_io.hpp"
#include "sasadmm/harness.hpp"
#include "sasadmm/solvers.hpp"
#include "sasadmm/stepsize.hpp"

using namespace sasadmm;
namespace fs = std::filesystem;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitCertify = 3;
constexpr int kExitIo = 4;

struct CertifyFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// solve

struct SolveOptions {
  std::string problem = "fused-lasso";
  std::string data;
  std::string normalize = "rows";
  long samples = 1000;
  long features = 50;
  std::uint64_t data_seed = 1;
  double mu = 1e-5;
  double graph_threshold = 0.5;
  long n1 = 1, n2 = 1, n = 1, components = 4;

  double beta = std::numeric_limits<double>::quiet_NaN();
  double tau = 0.9;
  double s = 1.09;
  std::string estimator = "svrg";
  std::string mk_mode = "strict";
  long budget_iters = 1000;
  double budget_sec = 0.0;
  double budget_inner = 0.0;
  double budget_grads = 0.0;
  double ergodic_frac = 1.0 / 3.0;
  std::uint64_t seed = 1;
  long report_every = 1;
  bool geometric = false;
  double tol = 0.0;
  double ref_beta = std::numeric_limits<double>::quiet_NaN();
  std::string out;
};

void add_solve_options(CLI::App& app, SolveOptions& o) {
  app.add_option("--problem", o.problem, "Problem kind")
      ->check(CLI::IsMember({"fused-lasso", "quadratic", "alm"}));
  app.add_option("--data", o.data, "LIBSVM file for fused-lasso; empty generates synthetic data");
  app.add_option("--normalize", o.normalize, "Feature scaling applied to --data")
      ->check(CLI::IsMember({"none", "rows", "columns"}));
  app.add_option("--samples", o.samples, "Synthetic samples N")->check(CLI::PositiveNumber);
  app.add_option("--features", o.features, "Synthetic features l")->check(CLI::PositiveNumber);
  app.add_option("--data-seed", o.data_seed, "Seed of the synthetic instance");
  app.add_option("--mu", o.mu, "l1 weight")->check(CLI::NonNegativeNumber);
  app.add_option("--graph-threshold", o.graph_threshold, "Correlation threshold for the feature graph");
  app.add_option("--n1", o.n1, "quadratic/alm: x dimension")->check(CLI::PositiveNumber);
  app.add_option("--n2", o.n2, "quadratic: y dimension")->check(CLI::PositiveNumber);
  app.add_option("--n", o.n, "quadratic/alm: constraint count")->check(CLI::PositiveNumber);
  app.add_option("--components", o.components, "quadratic/alm: summands N")->check(CLI::PositiveNumber);

  app.add_option("--beta", o.beta, "Penalty parameter")->default_str("0.001 for fused-lasso, 1 otherwise");
  app.add_option("--tau", o.tau, "First dual stepsize (0 gives the asymmetric baseline)");
  app.add_option("--s", o.s, "Second dual stepsize");
  app.add_option("--estimator", o.estimator, "Gradient estimator")
      ->check(CLI::IsMember({"plain", "svrg", "full"}));
  app.add_option("--mk-mode", o.mk_mode, "Proximal matrix M_k rule")->check(CLI::IsMember({"strict", "adaptive"}));
  auto* it = app.add_option("--budget-iters", o.budget_iters, "Outer iteration budget");
  auto* sec = app.add_option("--budget-sec", o.budget_sec, "Wall-clock budget in seconds (replaces --budget-iters)");
  auto* inner = app.add_option("--budget-inner", o.budget_inner, "Inner gradient-step budget (replaces --budget-iters)");
  auto* grads = app.add_option("--budget-grads", o.budget_grads, "Component-gradient budget (replaces --budget-iters)");
  sec->excludes(it)->excludes(inner)->excludes(grads);
  inner->excludes(it)->excludes(grads);
  grads->excludes(it);
  app.add_option("--ergodic-frac", o.ergodic_frac, "Fraction of the budget before ergodic reporting starts");
  app.add_option("--seed", o.seed, "Solver RNG seed");
  app.add_option("--report-every", o.report_every, "Row cadence in outer iterations");
  app.add_flag("--geometric", o.geometric, "Report at iterations 1, 2, 4, ... instead");
  app.add_option("--tol", o.tol, "Stop once a reported opt_err is at or below this; 0 disables");
  app.add_option("--ref-beta", o.ref_beta, "Penalty of the reference run")->default_str("--beta");
  app.add_option("--out", o.out, "CSV output path; empty prints only the summary");
}

struct Instance {
  ProblemSpec spec;
  std::optional<QuadraticInstance> quad;
};

Instance build_instance(const SolveOptions& o) {
  Instance inst;
  if (o.problem == "fused-lasso" && !o.data.empty()) {
    Dataset d = read_libsvm(o.data);
    for (const auto& w : d.warnings) std::cerr << "warning: " << w << '\n';
    if (o.normalize == "rows") normalize(d, NormalizeMode::Rows);
    if (o.normalize == "columns") normalize(d, NormalizeMode::Columns);
    const FeatureGraph g = build_graph_matrix(d.features, o.graph_threshold);
    inst.spec = make_fused_lasso(d.features, d.labels, g.G, o.mu);
    return inst;
  }
  SyntheticOptions so;
  so.seed = o.data_seed;
  so.samples = o.samples;
  so.features = o.features;
  so.mu = o.mu;
  so.graph_threshold = o.graph_threshold;
  so.n1 = o.n1;
  so.n2 = o.n2;
  so.n = o.n;
  so.components = o.components;
  so.kind = o.problem == "quadratic" ? SyntheticKind::Quadratic
            : o.problem == "alm"     ? SyntheticKind::Alm
                                     : SyntheticKind::FusedLasso;
  SyntheticProblem sp = gen_synthetic(so);
  inst.spec = std::move(sp.spec);
  inst.quad = std::move(sp.quad);
  if (inst.quad) inst.quad->spec = inst.spec;
  return inst;
}

SolverConfig solver_config(const SolveOptions& o) {
  SolverConfig c;
  const bool alm = o.problem == "alm";
  c.method = alm ? Method::AsAlm : Method::SasAdmm;
  c.beta = std::isnan(o.beta) ? (o.problem == "fused-lasso" ? 1e-3 : 1.0) : o.beta;
  c.pair = {alm ? 0.0 : o.tau, o.s};
  c.estimator = o.estimator == "plain" ? EstimatorMode::Plain
                : o.estimator == "full" ? EstimatorMode::Full
                                        : EstimatorMode::Svrg;
  c.mk_mode = o.mk_mode == "adaptive" ? MkMode::Adaptive : MkMode::Strict;
  if (o.budget_sec > 0) c.budget = Budget::seconds(o.budget_sec);
  else if (o.budget_inner > 0) c.budget = Budget::inner_steps(o.budget_inner);
  else if (o.budget_grads > 0) c.budget = Budget::gradient_evals(o.budget_grads);
  else c.budget = Budget::iterations(o.budget_iters);
  c.ergodic_start_fraction = o.ergodic_frac;
  c.seed = o.seed;
  c.report_every = o.report_every;
  c.report_geometric = o.geometric;
  c.stop_opt_err = o.tol;
  return c;
}

// Problem-side settings that determine F*.
std::string instance_key(const SolveOptions& o, double ref_beta) {
  std::ostringstream k;
  k << o.problem << '|' << o.data << '|' << o.normalize << '|' << o.samples << '|' << o.features << '|' << o.data_seed
    << '|' << format_real(o.mu) << '|' << format_real(o.graph_threshold) << '|' << o.n1 << '|' << o.n2 << '|' << o.n
    << '|' << o.components << '|' << format_real(ref_beta);
  return k.str();
}

double reference_value(const Instance& inst, double ref_beta) {
  if (inst.quad) return reference_solution(*inst.quad).F_star;
  std::cerr << "computing reference F* (deterministic run, beta " << format_real(ref_beta) << ")\n";
  ReferenceOptions ro;
  ro.beta = ref_beta;
  return reference_solution(inst.spec, ro).F_star;
}

RunRecord run_solve(const SolveOptions& o, std::map<std::string, double>* fstar_cache = nullptr) {
  const Instance inst = build_instance(o);
  const SolverConfig cfg = solver_config(o);
  const double ref_beta = std::isnan(o.ref_beta) ? cfg.beta : o.ref_beta;
  // Validate the solver settings before paying for the reference run.
  (void)make_context(inst.spec, cfg);

  double F_star = 0.0;
  const std::string key = instance_key(o, ref_beta);
  if (fstar_cache && fstar_cache->count(key)) {
    F_star = fstar_cache->at(key);
  } else {
    F_star = reference_value(inst, ref_beta);
    if (fstar_cache) (*fstar_cache)[key] = F_star;
  }

  RunRecord rec = solve(inst.spec, cfg, F_star);
  rec.config_echo.insert(rec.config_echo.begin(), {{"problem", o.problem}, {"F_star", format_real(F_star)}});
  if (!o.data.empty()) rec.config_echo.insert(rec.config_echo.begin() + 1, {"data", o.data});
  if (!o.out.empty()) emit_csv(rec, o.out);
  return rec;
}

void print_summary(const RunRecord& rec, const std::string& out) {
  const MetricRow& last = rec.rows.back();
  std::printf("iterations %ld  inner_steps %llu  grad_evals %llu\n", rec.iterations,
              static_cast<unsigned long long>(rec.inner_steps), static_cast<unsigned long long>(rec.gradient_evals));
  std::printf("final %s row: obj %s  obj_err %s  equ_err %s  opt_err %s\n", to_string(last.mode),
              format_real(last.obj).c_str(), format_real(last.obj_err).c_str(), format_real(last.equ_err).c_str(),
              format_real(last.opt_err).c_str());
  if (rec.heuristic_mk) std::printf("note: adaptive M_k carries no convergence guarantee\n");
  if (!out.empty()) std::printf("wrote %s\n", out.c_str());
}

// ---------------------------------------------------------------------------
// certify

struct CertifyOptions {
  double tau = 0.9;
  double s = 1.09;
  double beta = 1.0;
  std::string dim_b = "3x4";
  long n1 = 2;
  long trials = 100;
  std::uint64_t seed = 1;
};

std::pair<Index, Index> parse_dims(const std::string& text) {
  const auto x = text.find_first_of("xX");
  try {
    std::size_t used = 0;
    if (x == std::string::npos) {
      const long k = std::stol(text, &used);
      if (used == text.size() && k > 0) return {k, k};
    } else {
      const std::string a = text.substr(0, x), b = text.substr(x + 1);
      std::size_t ua = 0, ub = 0;
      const long r = std::stol(a, &ua), c = std::stol(b, &ub);
      if (ua == a.size() && ub == b.size() && r > 0 && c > 0) return {r, c};
    }
  } catch (const std::logic_error&) {
  }
  throw ConfigError("--dim-b must be RxC or a single size k, got '" + text + "'");
}

int run_certify(const CertifyOptions& o) {
  const auto [rows, cols] = parse_dims(o.dim_b);
  if (o.trials < 1) throw ConfigError("--trials must be >= 1");
  if (o.n1 < 1) throw ConfigError("--n1 must be >= 1");
  if (!(o.beta > 0)) throw ConfigError("--beta must be > 0");
  const StepsizePair p{o.tau, o.s};
  const double poly = region_polynomial(p);
  const bool member = in_region(p, Region::Delta);
  std::printf("(tau, s) = (%s, %s), beta %s\n", format_real(o.tau).c_str(), format_real(o.s).c_str(),
              format_real(o.beta).c_str());
  std::printf("region: tau + s = %s, polynomial = %s, %s\n", format_real(o.tau + o.s).c_str(),
              format_real(poly).c_str(), member ? "inside" : "outside");
  if (!member) {
    std::string why;
    if (!(o.tau + o.s > 0)) why = "tau + s must be > 0";
    else if (o.tau > 1) why = "tau must be <= 1";
    else why = "the polynomial -tau^2 - s^2 - tau*s + tau + s + 1 = " + format_real(poly) + " is negative";
    throw CertifyFailure("(tau, s) lies outside the convergence region: " + why);
  }

  Rng rng(o.seed);
  auto gauss = [&](Index r, Index c) {
    DenseMatrix M(r, c);
    for (Index i = 0; i < r; ++i)
      for (Index j = 0; j < c; ++j) M(i, j) = rng.normal();
    return M;
  };
  double worst_identity = 0.0, worst_factor = 0.0;
  long psd_ok = 0, omega_ok = 0;
  OmegaCoeffs omegas;
  for (long t = 0; t < o.trials; ++t) {
    const DenseMatrix B = gauss(rows, cols);
    const DenseMatrix R = gauss(o.n1, o.n1);
    const DenseMatrix Dk = R * R.transpose();
    const DenseMatrix L = rng.uniform(0.0, 5.0) * DenseMatrix::Identity(cols, cols);
    const CertReport r = certify(p, o.beta, Dk, L, B);
    worst_identity = std::max(worst_identity, r.identity_residual / std::max(1.0, r.identity_scale));
    worst_factor = std::max(worst_factor, r.factor_residual / std::max(1.0, r.identity_scale));
    psd_ok += r.qtilde_psd;
    const bool nonneg = r.omegas_defined && r.omegas.omega0 >= -1e-15 && r.omegas.omega1 >= 0 && r.omegas.omega2 >= 0;
    omega_ok += nonneg;
    omegas = r.omegas;
  }
  std::printf("identity: max relative residual %s over %ld trials (B %ldx%ld)\n", format_real(worst_identity).c_str(),
              o.trials, static_cast<long>(rows), static_cast<long>(cols));
  std::printf("factorization: max relative residual %s\n", format_real(worst_factor).c_str());
  std::printf("Q~ PSD: %ld/%ld\n", psd_ok, o.trials);
  std::printf("omegas: %s %s %s (nonnegative in %ld/%ld)\n", format_real(omegas.omega0).c_str(),
              format_real(omegas.omega1).c_str(), format_real(omegas.omega2).c_str(), omega_ok, o.trials);
  if (worst_identity > 1e-9) throw CertifyFailure("matrix identity residual exceeds 1e-9");
  if (worst_factor > 1e-9) throw CertifyFailure("factorization residual exceeds 1e-9");
  if (psd_ok != o.trials) throw CertifyFailure("Q~ failed the PSD certificate");
  if (omega_ok != o.trials) throw CertifyFailure("negative omega coefficient");
  std::printf("all certifications passed\n");
  return 0;
}

// ---------------------------------------------------------------------------
// bench

struct BenchOptions {
  std::string sweep;
  std::string out_dir = "bench_out";
};

// Flat `key = value` lines; comma-separated values become sweep axes.
std::vector<std::pair<std::string, std::vector<std::string>>> read_sweep(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::pair<std::string, std::vector<std::string>>> axes;
  std::string line;
  long lineno = 0;
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r"), b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(lineno, line, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    std::vector<std::string> values;
    std::stringstream vs(line.substr(eq + 1));
    for (std::string v; std::getline(vs, v, ',');) values.push_back(trim(v));
    if (key.empty() || values.empty()) throw ParseError(lineno, line, "expected key = value");
    for (const auto& v : values)
      if (v.empty()) throw ParseError(lineno, line, "empty value");
    axes.emplace_back(key, std::move(values));
  }
  return axes;
}

int run_bench(const BenchOptions& o) {
  const auto axes = read_sweep(o.sweep);
  for (const auto& [k, v] : axes)
    if (k == "out" || k == "config") throw ConfigError("sweep key '" + k + "' is not allowed");
  std::size_t cells = 1;
  for (const auto& a : axes) cells *= a.second.size();

  fs::create_directories(o.out_dir);
  std::map<std::string, double> fstar;
  for (std::size_t cell = 0; cell < cells; ++cell) {
    std::vector<std::string> args;
    std::string label;
    std::size_t rem = cell;
    for (auto a = axes.rbegin(); a != axes.rend(); ++a) {
      const std::string& v = a->second[rem % a->second.size()];
      rem /= a->second.size();
      args.push_back(v);
      args.push_back("--" + a->first);
      if (a->second.size() > 1) label = a->first + "=" + v + (label.empty() ? "" : " ") + label;
    }
    // CLI11 consumes a reversed argument vector.
    CLI::App app("bench cell");
    SolveOptions so;
    add_solve_options(app, so);
    try {
      app.parse(args);
    } catch (const CLI::ParseError& e) {
      throw ConfigError("sweep: " + std::string(e.what()));
    }
    char name[32];
    std::snprintf(name, sizeof name, "cell_%03zu.csv", cell);
    so.out = (fs::path(o.out_dir) / name).string();
    const RunRecord rec = run_solve(so, &fstar);
    std::printf("%s  %s  iterations %ld  final opt_err %s\n", name, label.empty() ? "-" : label.c_str(),
                rec.iterations, format_real(rec.rows.back().opt_err).c_str());
  }
  return 0;
}

// ---------------------------------------------------------------------------
// gen

struct GenOptions {
  long samples = 200;
  long features = 50;
  long group_size = 5;
  double active_fraction = 0.4;
  double flip_rate = 0.05;
  std::uint64_t seed = 1;
  std::string out;
};

int run_gen(const GenOptions& o) {
  SyntheticOptions so;
  so.seed = o.seed;
  so.samples = o.samples;
  so.features = o.features;
  so.group_size = o.group_size;
  so.active_fraction = o.active_fraction;
  so.flip_rate = o.flip_rate;
  const Dataset d = gen_fused_lasso_data(so);
  save_libsvm(d, o.out);
  std::printf("wrote %ld samples, %ld features to %s\n", static_cast<long>(d.sample_count()),
              static_cast<long>(d.feature_count()), o.out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app("Stochastic symmetric ADMM solver and benchmark driver");
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);

  SolveOptions solve_opts;
  auto* solve_cmd = app.add_subcommand("solve", "Run one solver configuration and emit a metrics CSV");
  solve_cmd->set_config("--config", "", "Flat key = value file; command-line flags take precedence");
  add_solve_options(*solve_cmd, solve_opts);

  CertifyOptions cert;
  auto* cert_cmd = app.add_subcommand("certify", "Check region membership and the analysis-matrix certificates");
  cert_cmd->add_option("--tau", cert.tau, "First dual stepsize");
  cert_cmd->add_option("--s", cert.s, "Second dual stepsize");
  cert_cmd->add_option("--beta", cert.beta, "Penalty parameter");
  cert_cmd->add_option("--dim-b", cert.dim_b, "Shape of the random B: RxC or k for k x k");
  cert_cmd->add_option("--n1", cert.n1, "Dimension of the random D_k");
  cert_cmd->add_option("--trials", cert.trials, "Random instances");
  cert_cmd->add_option("--seed", cert.seed, "RNG seed");

  BenchOptions bench;
  auto* bench_cmd = app.add_subcommand("bench", "Run a sweep file, one CSV per cell");
  bench_cmd->add_option("--sweep", bench.sweep, "Sweep file: key = v1, v2, ... using solve flag names")->required();
  bench_cmd->add_option("--out-dir", bench.out_dir, "Directory for cell CSVs");

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen", "Write a synthetic fused-lasso dataset in LIBSVM format");
  gen_cmd->add_option("--samples", gen.samples, "Samples N")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--features", gen.features, "Features l")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--group-size", gen.group_size, "Features per latent factor")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--active-fraction", gen.active_fraction, "Fraction of groups with nonzero weight");
  gen_cmd->add_option("--flip-rate", gen.flip_rate, "Label noise");
  gen_cmd->add_option("--seed", gen.seed, "RNG seed");
  gen_cmd->add_option("--out", gen.out, "Output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*solve_cmd) {
      const RunRecord rec = run_solve(solve_opts);
      print_summary(rec, solve_opts.out);
      return 0;
    }
    if (*cert_cmd) return run_certify(cert);
    if (*bench_cmd) return run_bench(bench);
    if (*gen_cmd) return run_gen(gen);
  } catch (const CertifyFailure& e) {
    std::cerr << "certification failed: " << e.what() << '\n';
    return kExitCertify;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitIo;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
