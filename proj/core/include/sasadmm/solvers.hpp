#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sasadmm/errors.hpp"
#include "sasadmm/inner.hpp"
#include "sasadmm/metrics.hpp"
#include "sasadmm/problem.hpp"
#include "sasadmm/stepsize.hpp"

namespace sasadmm {

enum class Method {
  SasAdmm,        ///< two blocks, dual steps tau and s
  AsAdmm,         ///< two blocks, tau = 0 (separate code path)
  AsAlm,          ///< single block, dual step s in (0, 2]
  GaussSeidel3,   ///< z, then x, then y; blocks[0] = y, blocks[1] = z
  PartialJacobi,  ///< x, then all blocks in parallel
};

enum class LMode {
  Auto,        ///< exact when possible, otherwise linearized
  Zero,        ///< exact subproblem only; error if unavailable
  Linearized,  ///< L = gamma I - beta B^T B with gamma = 1.01 beta lambda_max(B^T B)
};

const char* to_string(Method m);
const char* to_string(LMode m);

struct Budget {
  enum class Kind { Iterations, Seconds, GradientEvals, InnerSteps };
  Kind kind = Kind::Iterations;
  double amount = 1000.0;

  static Budget iterations(long n) { return {Kind::Iterations, static_cast<double>(n)}; }
  static Budget seconds(double s) { return {Kind::Seconds, s}; }
  /// Component-gradient evaluations; a full gradient counts N.
  static Budget gradient_evals(double g) { return {Kind::GradientEvals, g}; }
  /// Inner-loop gradient draws d_t, i.e. the sum of m_k over outer iterations.
  static Budget inner_steps(double t) { return {Kind::InnerSteps, t}; }
};

struct SolverConfig {
  Method method = Method::SasAdmm;
  double beta = 1e-3;
  StepsizePair pair{0.9, 1.09};

  LMode l_mode = LMode::Auto;
  double prox_sigma = 0.0;          ///< extra sigma I in L for the y block
  std::vector<double> block_sigma;  ///< Jacobi sigma_i; empty picks the minimum certified value

  std::optional<ScheduleParams> schedule;  ///< empty: ScheduleParams::defaults_for(nu)
  std::optional<InnerStep> fixed_inner;    ///< overrides the schedule with a constant (m, eta)

  EstimatorMode estimator = EstimatorMode::Svrg;
  MkMode mk_mode = MkMode::Strict;
  double fixed_rho = 0.0;  ///< MkMode::Fixed
  double rho_min = 0.0;    ///< MkMode::Adaptive; 0 means beta

  Budget budget;
  long max_outer = 1'000'000'000;
  double ergodic_start_fraction = 1.0 / 3.0;
  long report_every = 1;
  bool report_geometric = false;  ///< report at iterations 1, 2, 4, 8, ...
  double stop_opt_err = 0.0;      ///< stop at a reported row with opt_err <= this; 0 disables

  std::uint64_t seed = 0;
  bool certify_mk_each_iter = false;  ///< psd-check M_k - beta A^T A every iteration (dense, small n1)
  bool collect_variance = false;      ///< empirical E||delta_t||^2_{H^-1}; one extra full gradient per inner step
};

/// One nonsmooth block's subproblem plan, fixed at context creation.
struct BlockPlan {
  enum class Kind { ProxExact, QuadraticExact, Linearized, Frozen };
  Kind kind = Kind::ProxExact;
  double gram_c = -1.0;      ///< c when B^T B = c I, else -1
  double lambda_max = 0.0;   ///< lambda_max(B^T B)
  double sigma = 0.0;        ///< L = sigma I (+ linearization)
  double gamma = 0.0;        ///< linearization constant, 0 if exact
  double weight = 0.0;       ///< prox parameter of the update
  SparseMatrix Bt;
  DenseMatrix quad_M;        ///< beta B^T B + sigma I for QuadraticExact
};

struct SolverState {
  Vector x;
  Vector xbreve;
  std::vector<Vector> ys;  ///< y (and z, or y_1..y_q) in block order
  Vector lambda;
  Vector lambda_half;
  Vector lambda_tilde;
  Vector prev_x;

  bool ergodic_active = false;
  long ergodic_count = 0;
  Vector sum_x;
  std::vector<Vector> sum_ys;
  Vector sum_lambda;

  long iter = 0;

  Vector ergodic_x() const;
  std::vector<Vector> ergodic_ys() const;
  Vector ergodic_lambda() const;
};

/// Precomputed run data. Holds a reference to the problem, which must
/// outlive the context.
struct SolverContext {
  const ProblemSpec* problem = nullptr;
  SolverConfig cfg;
  ScheduleParams sched;
  std::vector<BlockPlan> plans;
  SparseMatrix At;
  Vector H;
  MkState mk;
  GradientEstimator est;
  Rng rng;
  InnerDiagnostics diag;
  long mk_certifications = 0;
  std::uint64_t inner_steps = 0;
  DenseMatrix AtA_dense;  ///< filled when certify_mk_each_iter is set
};

/// Validates the configuration against the problem and precomputes plans.
/// Throws ConfigError on violated preconditions.
SolverContext make_context(const ProblemSpec& problem, const SolverConfig& cfg);

/// Zero start (x^0 = xbreve^0 = 0, y = 0, lambda = 0).
SolverState init_state(const SolverContext& ctx);
/// Start from given iterates; xbreve^0 = x^0.
SolverState init_state(const SolverContext& ctx, const Vector& x0, const std::vector<Vector>& y0,
                       const Vector& lambda0);

/// (m_k, eta_k) used at outer iteration k.
InnerStep inner_step_at(const SolverContext& ctx, long k);

void sas_admm_step(SolverContext& ctx, SolverState& st);
void as_admm_step(SolverContext& ctx, SolverState& st);
void as_alm_step(SolverContext& ctx, SolverState& st);
void gs3_step(SolverContext& ctx, SolverState& st);
void pj_multiblock_step(SolverContext& ctx, SolverState& st);
/// Dispatches on ctx.cfg.method.
void step(SolverContext& ctx, SolverState& st);

struct RunRecord {
  std::vector<MetricRow> rows;
  SolverState final_state;
  std::vector<std::pair<std::string, std::string>> config_echo;
  std::uint64_t seed = 0;
  long iterations = 0;
  std::uint64_t gradient_evals = 0;
  std::uint64_t inner_steps = 0;
  long ergodic_start_iter = -1;  ///< first folded outer iteration, -1 if none
  bool heuristic_mk = false;     ///< adaptive M_k: no monotone D_k guarantee
  int mk_escalations = 0;
  long mk_certifications = 0;
  bool stopped_on_tolerance = false;
  double sigma_sq_estimate = -1.0;  ///< -1 when not collected
};

using Reporter = std::function<void(const MetricRow&)>;

/// Key/value description of a configuration, used as the CSV header echo.
std::vector<std::pair<std::string, std::string>> describe(const SolverConfig& cfg);

/// Runs the configured method under its budget. Rows before the ergodic
/// start report the current iterate; later rows report the running average
/// of w~^k = (x^{k+1}, y^{k+1}, lambda~^k). Time excludes metric evaluation.
RunRecord run(SolverContext& ctx, SolverState& st, double F_star, const Reporter& reporter = {});

/// Convenience: make_context + init_state + run.
RunRecord solve(const ProblemSpec& problem, const SolverConfig& cfg, double F_star,
                const Reporter& reporter = {});

}  // namespace sasadmm
