#include "sasadmm/solvers.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sasadmm {

const char* to_string(Method m) {
  switch (m) {
    case Method::SasAdmm: return "sas-admm";
    case Method::AsAdmm: return "as-admm";
    case Method::AsAlm: return "as-alm";
    case Method::GaussSeidel3: return "gs3";
    case Method::PartialJacobi: return "pj";
  }
  return "?";
}

const char* to_string(LMode m) {
  switch (m) {
    case LMode::Auto: return "auto";
    case LMode::Zero: return "zero";
    case LMode::Linearized: return "linearized";
  }
  return "?";
}

Vector SolverState::ergodic_x() const {
  return ergodic_count > 0 ? Vector(sum_x / static_cast<double>(ergodic_count)) : x;
}

std::vector<Vector> SolverState::ergodic_ys() const {
  if (ergodic_count == 0) return ys;
  std::vector<Vector> out;
  out.reserve(sum_ys.size());
  for (const auto& s : sum_ys) out.emplace_back(s / static_cast<double>(ergodic_count));
  return out;
}

Vector SolverState::ergodic_lambda() const {
  return ergodic_count > 0 ? Vector(sum_lambda / static_cast<double>(ergodic_count)) : lambda_tilde;
}

namespace {

std::size_t expected_blocks(Method m) {
  switch (m) {
    case Method::SasAdmm:
    case Method::AsAdmm: return 1;
    case Method::AsAlm: return 0;
    case Method::GaussSeidel3: return 2;
    case Method::PartialJacobi: return 0;  // any q >= 1, checked separately
  }
  return 0;
}

void check_stepsizes(const SolverConfig& cfg) {
  const StepsizePair p = cfg.pair;
  if (cfg.method == Method::AsAlm) {
    if (!(p.s > 0.0 && p.s <= 2.0)) {
      throw ConfigError("AS-ALM requires s in (0, 2], got s = " + format_real(p.s));
    }
    return;
  }
  if (cfg.method == Method::AsAdmm && p.tau != 0.0) {
    throw ConfigError("AS-ADMM requires tau = 0, got tau = " + format_real(p.tau));
  }
  if (!in_region(p, Region::Delta)) {
    std::string why;
    if (!(p.tau + p.s > 0.0)) why = "tau + s = " + format_real(p.tau + p.s) + " is not positive";
    else if (!(p.tau <= 1.0)) why = "tau = " + format_real(p.tau) + " exceeds 1";
    else why = "region polynomial -tau^2 - s^2 - tau*s + tau + s + 1 = " + format_real(region_polynomial(p)) + " < 0";
    throw ConfigError("stepsizes (tau, s) = (" + format_real(p.tau) + ", " + format_real(p.s) +
                      ") are outside the convergence region: " + why);
  }
}

BlockPlan make_plan(const BlockTerm& blk, double beta, double sigma, LMode mode, std::size_t index) {
  BlockPlan p;
  p.sigma = sigma;
  p.Bt = blk.B.transpose();
  p.gram_c = gram_identity_multiple(blk.B);
  p.lambda_max = p.gram_c >= 0.0 ? p.gram_c : lambda_max_gram(blk.B);
  const std::string label = "block " + std::to_string(index) + " (" + blk.g->name() + ")";

  const bool exact_prox = p.gram_c >= 0.0;
  const bool exact_quad = blk.g->has_exact_subproblem();
  if (mode == LMode::Linearized || (mode == LMode::Auto && !exact_prox && !exact_quad)) {
    p.kind = BlockPlan::Kind::Linearized;
    p.gamma = 1.01 * beta * p.lambda_max;
    p.weight = sigma + p.gamma;
  } else if (exact_prox) {
    p.kind = BlockPlan::Kind::ProxExact;
    p.weight = sigma + beta * p.gram_c;
  } else if (exact_quad) {
    p.kind = BlockPlan::Kind::QuadraticExact;
    const DenseMatrix Bd(blk.B);
    p.quad_M = beta * (Bd.transpose() * Bd);
    p.quad_M.diagonal().array() += sigma;
    return p;
  } else {
    throw ConfigError(label + ": L = 0 needs B^T B = c I or an exact subproblem solver");
  }
  if (p.weight == 0.0) {
    if (!blk.g->is_zero()) throw ConfigError(label + ": degenerate subproblem (zero coupling and zero proximal term)");
    p.kind = BlockPlan::Kind::Frozen;
  }
  return p;
}

void check_orthogonal(const SparseMatrix& C, const SparseMatrix& A) {
  const SparseMatrix CtA = SparseMatrix(C.transpose()) * A;
  double worst = 0.0;
  for (Index r = 0; r < CtA.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(CtA, r); it; ++it) worst = std::max(worst, std::abs(it.value()));
  const double scale = C.norm() * A.norm();
  if (worst > 1e-12 * scale) {
    throw ConfigError("Gauss-Seidel three-block update requires C^T A = 0; max |C^T A| = " + format_real(worst));
  }
}

void fold_sum(Vector& acc, const Vector& v) {
  if (acc.size() == 0) acc = Vector::Zero(v.size());
  acc += v;
}

}  // namespace

SolverContext make_context(const ProblemSpec& problem, const SolverConfig& cfg) {
  problem.validate();
  SolverContext ctx;
  ctx.problem = &problem;
  ctx.cfg = cfg;

  if (!(cfg.beta > 0.0)) throw ConfigError("beta must be positive");
  const std::size_t q = problem.blocks.size();
  if (cfg.method == Method::PartialJacobi) {
    if (q < 1) throw ConfigError("partially-Jacobi method needs at least one block");
  } else if (q != expected_blocks(cfg.method)) {
    throw ConfigError(std::string(to_string(cfg.method)) + " expects " + std::to_string(expected_blocks(cfg.method)) +
                      " nonsmooth block(s), problem has " + std::to_string(q));
  }
  check_stepsizes(cfg);

  const double nu = problem.f->nu();
  if (cfg.fixed_inner) {
    if (cfg.fixed_inner->m < 1 || !(cfg.fixed_inner->eta > 0.0)) throw ConfigError("fixed inner step needs m >= 1, eta > 0");
    if (cfg.fixed_inner->eta > 1.0 / (2.0 * nu)) throw ConfigError("fixed inner eta exceeds 1/(2 nu)");
    ctx.sched = ScheduleParams::defaults_for(nu);
  } else {
    ctx.sched = cfg.schedule ? *cfg.schedule : ScheduleParams::defaults_for(nu);
    try {
      ctx.sched.validate(nu);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }

  if (!(cfg.ergodic_start_fraction > 0.0 && cfg.ergodic_start_fraction < 1.0)) {
    throw ConfigError("ergodic start fraction must lie in (0, 1)");
  }
  if (cfg.report_every < 1) throw ConfigError("report cadence must be >= 1");
  if (cfg.budget.amount < 0.0 || !std::isfinite(cfg.budget.amount)) throw ConfigError("budget must be finite and >= 0");
  if (cfg.budget.kind != Budget::Kind::Iterations && cfg.budget.amount == 0.0) {
    throw ConfigError("time, gradient and inner-step budgets must be positive");
  }

  ctx.At = problem.A.transpose();
  ctx.H = problem.f->metric();

  const double lam_A = lambda_max_gram(problem.A);
  ctx.mk.strict_rho = 1.01 * cfg.beta * lam_A;
  switch (cfg.mk_mode) {
    case MkMode::Strict: ctx.mk.rho = ctx.mk.strict_rho; break;
    case MkMode::Fixed:
      if (!(cfg.fixed_rho > 0.0)) throw ConfigError("fixed M_k mode needs rho > 0");
      ctx.mk.rho = cfg.fixed_rho;
      break;
    case MkMode::Adaptive:
      ctx.mk.rho_min = cfg.rho_min > 0.0 ? cfg.rho_min : cfg.beta;
      ctx.mk.rho = std::max(ctx.mk.strict_rho, ctx.mk.rho_min);
      break;
  }
  if (cfg.certify_mk_each_iter) {
    if (problem.n1() > 2000) throw ConfigError("per-iteration M_k certification is limited to n1 <= 2000");
    const DenseMatrix Ad(problem.A);
    ctx.AtA_dense = cfg.beta * (Ad.transpose() * Ad);
  }

  if (cfg.method == Method::GaussSeidel3) check_orthogonal(problem.blocks[1].B, problem.A);

  for (std::size_t i = 0; i < q; ++i) {
    double sigma = 0.0;
    if (cfg.method == Method::PartialJacobi) {
      const double c = gram_identity_multiple(problem.blocks[i].B);
      const double lam = c >= 0.0 ? c : lambda_max_gram(problem.blocks[i].B);
      const double required = 1.01 * static_cast<double>(q - 1) * cfg.beta * lam;
      if (cfg.block_sigma.empty()) {
        sigma = required;
      } else {
        if (cfg.block_sigma.size() != q) throw ConfigError("need one sigma per block");
        sigma = cfg.block_sigma[i];
        if (sigma < required * (1.0 - 1e-12)) {
          throw ConfigError("block " + std::to_string(i) + ": L_i = sigma I needs sigma >= 1.01 (q-1) beta lambda_max(B_i^T B_i) = " +
                            format_real(required) + ", got " + format_real(sigma));
        }
      }
    } else if (i == 0) {
      if (cfg.prox_sigma < 0.0) throw ConfigError("proximal sigma must be >= 0");
      sigma = cfg.prox_sigma;
    }
    ctx.plans.push_back(make_plan(problem.blocks[i], cfg.beta, sigma, cfg.l_mode, i));
  }

  ctx.est = GradientEstimator(cfg.estimator);
  ctx.rng = Rng(cfg.seed);
  ctx.diag.collect_delta = cfg.collect_variance;
  return ctx;
}

SolverState init_state(const SolverContext& ctx) {
  const ProblemSpec& P = *ctx.problem;
  std::vector<Vector> ys;
  for (std::size_t i = 0; i < P.blocks.size(); ++i) ys.push_back(Vector::Zero(P.block_dim(i)));
  return init_state(ctx, Vector::Zero(P.n1()), ys, Vector::Zero(P.n()));
}

SolverState init_state(const SolverContext& ctx, const Vector& x0, const std::vector<Vector>& y0,
                       const Vector& lambda0) {
  const ProblemSpec& P = *ctx.problem;
  if (x0.size() != P.n1() || lambda0.size() != P.n() || y0.size() != P.blocks.size()) {
    throw std::invalid_argument("init_state: dimension mismatch");
  }
  for (std::size_t i = 0; i < y0.size(); ++i) {
    if (y0[i].size() != P.block_dim(i)) throw std::invalid_argument("init_state: block dimension mismatch");
  }
  SolverState st;
  st.x = x0;
  st.xbreve = x0;
  st.prev_x = x0;
  st.ys = y0;
  st.lambda = lambda0;
  st.lambda_half = lambda0;
  st.lambda_tilde = lambda0;
  st.sum_x = Vector::Zero(x0.size());
  for (const auto& y : y0) st.sum_ys.push_back(Vector::Zero(y.size()));
  st.sum_lambda = Vector::Zero(lambda0.size());
  return st;
}

InnerStep inner_step_at(const SolverContext& ctx, long k) {
  if (ctx.cfg.fixed_inner) return *ctx.cfg.fixed_inner;
  return schedule(k, ctx.sched);
}

namespace {

// A x + sum_{l != skip} B_l y_l - b, in block order.
void partial_residual(const ProblemSpec& P, const Vector& x, const std::vector<Vector>& ys, std::size_t skip,
                      Vector& out) {
  out.noalias() = P.A * x;
  for (std::size_t l = 0; l < P.blocks.size(); ++l) {
    if (l != skip) out.noalias() += P.blocks[l].B * ys[l];
  }
  out -= P.b;
}

void x_update(SolverContext& ctx, SolverState& st, const Vector& r) {
  const ProblemSpec& P = *ctx.problem;
  const double beta = ctx.cfg.beta;
  const Vector tmp = st.lambda - beta * r;
  const Vector h = -(ctx.At * tmp);
  const InnerStep is = inner_step_at(ctx, st.iter);
  InnerConfig ic;
  ic.m = is.m;
  ic.eta = is.eta;
  ic.H = ctx.H;
  ic.M_diag = Vector::Constant(P.n1(), ctx.mk.rho);
  if (ctx.cfg.certify_mk_each_iter) {
    DenseMatrix S = -ctx.AtA_dense;
    S.diagonal().array() += ctx.mk.rho;
    if (!psd_certify(S, 0.0)) {
      throw std::runtime_error("M_k - beta A^T A is not positive semidefinite at iteration " + std::to_string(st.iter));
    }
    ++ctx.mk_certifications;
  }
  ctx.inner_steps += static_cast<std::uint64_t>(is.m);
  ctx.est.refresh(*P.f, st.x);
  XsubResult res = xsub(st.x, st.xbreve, h, ic, ctx.est, *P.f, P.X, ctx.rng,
                        ctx.diag.collect_delta ? &ctx.diag : nullptr);
  st.prev_x = st.x;
  st.x = std::move(res.x);
  st.xbreve = std::move(res.xbreve);
}

// r0 = A x + sum_{l != i} B_l y_l - b on entry.
Vector update_block(const SolverContext& ctx, std::size_t i, Vector& r0, const Vector& lambda_half, const Vector& yk) {
  const ProblemSpec& P = *ctx.problem;
  const BlockPlan& p = ctx.plans[i];
  const double beta = ctx.cfg.beta;
  r0 -= lambda_half / beta;
  switch (p.kind) {
    case BlockPlan::Kind::Frozen:
      return yk;
    case BlockPlan::Kind::ProxExact: {
      Vector v = p.sigma * yk - beta * (p.Bt * r0);
      v /= p.weight;
      return P.blocks[i].g->prox(p.weight, v);
    }
    case BlockPlan::Kind::QuadraticExact: {
      const Vector rhs = p.sigma * yk - beta * (p.Bt * r0);
      return P.blocks[i].g->solve_exact(p.quad_M, rhs);
    }
    case BlockPlan::Kind::Linearized: {
      Vector R = r0;
      R.noalias() += P.blocks[i].B * yk;
      const Vector v = yk - (beta / p.weight) * (p.Bt * R);
      return P.blocks[i].g->prox(p.weight, v);
    }
  }
  return yk;
}

void fold(SolverState& st) {
  if (!st.ergodic_active) return;
  fold_sum(st.sum_x, st.x);
  for (std::size_t i = 0; i < st.ys.size(); ++i) fold_sum(st.sum_ys[i], st.ys[i]);
  fold_sum(st.sum_lambda, st.lambda_tilde);
  ++st.ergodic_count;
}

void finish(SolverContext& ctx, SolverState& st, const Vector& r_full) {
  adaptive_Mk(st.prev_x, st.x, ctx.problem->A, ctx.cfg.beta, ctx.cfg.mk_mode, ctx.mk);
  note_residual(ctx.mk, ctx.cfg.mk_mode, r_full.norm());
  ++st.iter;
}

// Shared tail of the two-block steppers after lambda_half is set.
void two_block_tail(SolverContext& ctx, SolverState& st, Vector& r) {
  const ProblemSpec& P = *ctx.problem;
  partial_residual(P, st.x, st.ys, 0, r);
  st.ys[0] = update_block(ctx, 0, r, st.lambda_half, st.ys[0]);
  P.residual(st.x, st.ys, r);
  st.lambda = st.lambda_half - (ctx.cfg.pair.s * ctx.cfg.beta) * r;
  fold(st);
  finish(ctx, st, r);
}

}  // namespace

void sas_admm_step(SolverContext& ctx, SolverState& st) {
  const ProblemSpec& P = *ctx.problem;
  const double beta = ctx.cfg.beta;
  Vector r(P.n());
  P.residual(st.x, st.ys, r);
  x_update(ctx, st, r);
  P.residual(st.x, st.ys, r);
  st.lambda_tilde = st.lambda - beta * r;
  st.lambda_half = st.lambda - (ctx.cfg.pair.tau * beta) * r;
  two_block_tail(ctx, st, r);
}

void as_admm_step(SolverContext& ctx, SolverState& st) {
  const ProblemSpec& P = *ctx.problem;
  const double beta = ctx.cfg.beta;
  Vector r(P.n());
  P.residual(st.x, st.ys, r);
  x_update(ctx, st, r);
  P.residual(st.x, st.ys, r);
  st.lambda_tilde = st.lambda - beta * r;
  st.lambda_half = st.lambda;
  two_block_tail(ctx, st, r);
}

void as_alm_step(SolverContext& ctx, SolverState& st) {
  const ProblemSpec& P = *ctx.problem;
  const double beta = ctx.cfg.beta;
  Vector r(P.n());
  P.residual(st.x, st.ys, r);
  x_update(ctx, st, r);
  P.residual(st.x, st.ys, r);
  st.lambda_tilde = st.lambda - beta * r;
  st.lambda_half = st.lambda;
  st.lambda = st.lambda - (ctx.cfg.pair.s * beta) * r;
  fold(st);
  finish(ctx, st, r);
}

void gs3_step(SolverContext& ctx, SolverState& st) {
  const ProblemSpec& P = *ctx.problem;
  const double beta = ctx.cfg.beta;
  Vector r(P.n());
  partial_residual(P, st.x, st.ys, 1, r);
  st.ys[1] = update_block(ctx, 1, r, st.lambda, st.ys[1]);
  P.residual(st.x, st.ys, r);
  x_update(ctx, st, r);
  P.residual(st.x, st.ys, r);
  st.lambda_tilde = st.lambda - beta * r;
  st.lambda_half = st.lambda - (ctx.cfg.pair.tau * beta) * r;
  two_block_tail(ctx, st, r);
}

void pj_multiblock_step(SolverContext& ctx, SolverState& st) {
  const ProblemSpec& P = *ctx.problem;
  const double beta = ctx.cfg.beta;
  Vector r(P.n());
  P.residual(st.x, st.ys, r);
  x_update(ctx, st, r);
  P.residual(st.x, st.ys, r);
  st.lambda_tilde = st.lambda - beta * r;
  st.lambda_half = st.lambda - (ctx.cfg.pair.tau * beta) * r;
  std::vector<Vector> next(st.ys.size());
  for (std::size_t i = 0; i < st.ys.size(); ++i) {
    partial_residual(P, st.x, st.ys, i, r);
    next[i] = update_block(ctx, i, r, st.lambda_half, st.ys[i]);
  }
  st.ys = std::move(next);
  P.residual(st.x, st.ys, r);
  st.lambda = st.lambda_half - (ctx.cfg.pair.s * beta) * r;
  fold(st);
  finish(ctx, st, r);
}

void step(SolverContext& ctx, SolverState& st) {
  switch (ctx.cfg.method) {
    case Method::SasAdmm: sas_admm_step(ctx, st); return;
    case Method::AsAdmm: as_admm_step(ctx, st); return;
    case Method::AsAlm: as_alm_step(ctx, st); return;
    case Method::GaussSeidel3: gs3_step(ctx, st); return;
    case Method::PartialJacobi: pj_multiblock_step(ctx, st); return;
  }
}

std::vector<std::pair<std::string, std::string>> describe(const SolverConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  out.emplace_back("method", to_string(cfg.method));
  out.emplace_back("beta", format_real(cfg.beta));
  out.emplace_back("tau", format_real(cfg.pair.tau));
  out.emplace_back("s", format_real(cfg.pair.s));
  out.emplace_back("l_mode", to_string(cfg.l_mode));
  out.emplace_back("prox_sigma", format_real(cfg.prox_sigma));
  out.emplace_back("estimator", to_string(cfg.estimator));
  out.emplace_back("mk_mode", to_string(cfg.mk_mode));
  if (cfg.mk_mode == MkMode::Fixed) out.emplace_back("fixed_rho", format_real(cfg.fixed_rho));
  if (cfg.mk_mode == MkMode::Adaptive) out.emplace_back("rho_min", format_real(cfg.rho_min));
  if (cfg.fixed_inner) {
    out.emplace_back("inner_m", std::to_string(cfg.fixed_inner->m));
    out.emplace_back("inner_eta", format_real(cfg.fixed_inner->eta));
  } else if (cfg.schedule) {
    out.emplace_back("c1", format_real(cfg.schedule->c1));
    out.emplace_back("c2", format_real(cfg.schedule->c2));
    out.emplace_back("c3", format_real(cfg.schedule->c3));
    out.emplace_back("rho", format_real(cfg.schedule->rho));
    out.emplace_back("m", std::to_string(cfg.schedule->m));
  } else {
    out.emplace_back("schedule", "default");
  }
  const char* kind = "iterations";
  switch (cfg.budget.kind) {
    case Budget::Kind::Iterations: kind = "iterations"; break;
    case Budget::Kind::Seconds: kind = "seconds"; break;
    case Budget::Kind::GradientEvals: kind = "gradient_evals"; break;
    case Budget::Kind::InnerSteps: kind = "inner_steps"; break;
  }
  out.emplace_back("budget_kind", kind);
  out.emplace_back("budget", format_real(cfg.budget.amount));
  out.emplace_back("ergodic_frac", format_real(cfg.ergodic_start_fraction));
  out.emplace_back("seed", std::to_string(cfg.seed));
  return out;
}

namespace {

std::uint64_t predicted_cost(const SolverContext& ctx, long k) {
  const auto m = static_cast<std::uint64_t>(inner_step_at(ctx, k).m);
  const auto N = static_cast<std::uint64_t>(ctx.problem->f->count());
  switch (ctx.cfg.estimator) {
    case EstimatorMode::Plain: return m;
    case EstimatorMode::Svrg: return N + 2 * m;
    case EstimatorMode::Full: return N * m;
  }
  return m;
}

}  // namespace

RunRecord run(SolverContext& ctx, SolverState& st, double F_star, const Reporter& reporter) {
  if (!std::isfinite(F_star)) throw std::invalid_argument("run: F_star must be finite");
  const SolverConfig& cfg = ctx.cfg;
  const ProblemSpec& P = *ctx.problem;
  using clock = std::chrono::steady_clock;

  RunRecord rec;
  rec.seed = cfg.seed;
  rec.config_echo = describe(cfg);
  rec.heuristic_mk = cfg.mk_mode == MkMode::Adaptive;

  double solver_time = 0.0;
  auto emit = [&]() -> const MetricRow& {
    MetricRow row;
    row.iter = st.iter;
    row.time_s = solver_time;
    const bool erg = st.ergodic_count > 0;
    row.mode = erg ? RowMode::Ergodic : RowMode::Iterate;
    const MetricValues v = erg ? metrics(P, st.ergodic_x(), st.ergodic_ys(), F_star) : metrics(P, st.x, st.ys, F_star);
    row.obj = v.obj;
    row.obj_err = v.obj_err;
    row.equ_err = v.equ_err;
    row.opt_err = v.opt_err;
    rec.rows.push_back(row);
    if (reporter) reporter(rec.rows.back());
    return rec.rows.back();
  };

  emit();
  const long k0 = st.iter;
  const double amount = cfg.budget.amount;
  bool last_reported = true;
  long next_geo = 1;
  // Fraction of the budget used before the next step, or a negative value
  // when the budget does not allow another step.
  auto progress_before_step = [&]() -> double {
    const long done = st.iter - k0;
    if (done >= cfg.max_outer) return -1.0;
    switch (cfg.budget.kind) {
      case Budget::Kind::Iterations:
        return static_cast<double>(done) >= amount ? -1.0 : static_cast<double>(done) / amount;
      case Budget::Kind::Seconds:
        return solver_time >= amount ? -1.0 : solver_time / amount;
      case Budget::Kind::GradientEvals: {
        const double used = static_cast<double>(ctx.est.gradient_evals());
        if (used + static_cast<double>(predicted_cost(ctx, st.iter)) > amount) return -1.0;
        return used / amount;
      }
      case Budget::Kind::InnerSteps: {
        const double used = static_cast<double>(ctx.inner_steps);
        if (used + static_cast<double>(inner_step_at(ctx, st.iter).m) > amount) return -1.0;
        return used / amount;
      }
    }
    return -1.0;
  };

  for (;;) {
    const double progress = progress_before_step();
    if (progress < 0.0) break;
    if (!st.ergodic_active && progress >= cfg.ergodic_start_fraction) {
      st.ergodic_active = true;
      rec.ergodic_start_iter = st.iter;
    }
    const auto t0 = clock::now();
    step(ctx, st);
    solver_time += std::chrono::duration<double>(clock::now() - t0).count();

    const long n = st.iter - k0;
    bool due;
    if (cfg.report_geometric) {
      due = n == next_geo;
      if (due) next_geo *= 2;
    } else {
      due = n % cfg.report_every == 0;
    }
    last_reported = due;
    if (due) {
      const MetricRow& row = emit();
      if (cfg.stop_opt_err > 0.0 && row.opt_err <= cfg.stop_opt_err) {
        rec.stopped_on_tolerance = true;
        break;
      }
    }
  }
  if (!last_reported) emit();

  rec.iterations = st.iter - k0;
  rec.gradient_evals = ctx.est.gradient_evals();
  rec.inner_steps = ctx.inner_steps;
  rec.mk_escalations = ctx.mk.escalations;
  rec.mk_certifications = ctx.mk_certifications;
  if (ctx.diag.collect_delta && ctx.diag.delta_count > 0) {
    rec.sigma_sq_estimate = ctx.diag.delta_sq_sum / static_cast<double>(ctx.diag.delta_count);
  }
  rec.final_state = st;
  return rec;
}

RunRecord solve(const ProblemSpec& problem, const SolverConfig& cfg, double F_star, const Reporter& reporter) {
  SolverContext ctx = make_context(problem, cfg);
  SolverState st = init_state(ctx);
  return run(ctx, st, F_star, reporter);
}

}  // namespace sasadmm
