#include "sasadmm/inner.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sasadmm {

ScheduleParams ScheduleParams::defaults_for(double nu) {
  if (!(nu > 0.0)) throw std::invalid_argument("ScheduleParams: nu must be positive");
  ScheduleParams p;
  p.c1 = 1.0 / nu;
  p.c2 = 1.0 / (2.0 * nu);
  p.c3 = 1.0;
  p.rho = 1.01;
  p.m = 5;
  return p;
}

void ScheduleParams::validate(double nu) const {
  if (!(c1 > 0.0 && c2 > 0.0 && c3 > 0.0)) throw std::invalid_argument("schedule: c1, c2, c3 must be positive");
  if (!(rho >= 1.0)) throw std::invalid_argument("schedule: exponent rho must be >= 1");
  if (m < 1) throw std::invalid_argument("schedule: m must be >= 1");
  if (c2 > 1.0 / (2.0 * nu)) {
    throw std::invalid_argument("schedule: c2 = " + std::to_string(c2) + " exceeds 1/(2 nu) = " +
                                std::to_string(1.0 / (2.0 * nu)));
  }
}

InnerStep schedule(long k, const ScheduleParams& p) {
  if (k < 0) throw std::invalid_argument("schedule: k must be nonnegative");
  const double grown = std::ceil(p.c3 * std::pow(static_cast<double>(k), p.rho));
  InnerStep s;
  s.m = grown > static_cast<double>(p.m) ? static_cast<int>(grown) : p.m;
  const double mm = static_cast<double>(s.m);
  s.eta = std::min(p.c1 / (mm * (mm + 1.0)), p.c2);
  return s;
}

const char* to_string(EstimatorMode m) {
  switch (m) {
    case EstimatorMode::Plain: return "plain";
    case EstimatorMode::Svrg: return "svrg";
    case EstimatorMode::Full: return "full";
  }
  return "?";
}

const char* to_string(MkMode m) {
  switch (m) {
    case MkMode::Strict: return "strict";
    case MkMode::Adaptive: return "adaptive";
    case MkMode::Fixed: return "fixed";
  }
  return "?";
}

void GradientEstimator::refresh(const SmoothSum& f, const Vector& snapshot) {
  if (mode_ != EstimatorMode::Svrg) return;
  snapshot_ = snapshot;
  f.full_grad(snapshot_, snapshot_grad_);
  grad_evals_ += static_cast<std::uint64_t>(f.count());
  has_snapshot_ = true;
}

Index GradientEstimator::estimate(const SmoothSum& f, const Vector& xhat, Rng& rng, Vector& d) {
  switch (mode_) {
    case EstimatorMode::Full:
      f.full_grad(xhat, d);
      grad_evals_ += static_cast<std::uint64_t>(f.count());
      return -1;
    case EstimatorMode::Plain: {
      const auto xi = static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(f.count())));
      f.component_grad(xi, xhat, d);
      grad_evals_ += 1;
      return xi;
    }
    case EstimatorMode::Svrg: {
      if (!has_snapshot_) throw std::logic_error("GradientEstimator: SVRG snapshot not initialized");
      if (f.count() == 1) {
        // grad f(x~) - grad f_1(x~) vanishes identically.
        f.component_grad(0, xhat, d);
        grad_evals_ += 1;
        return 0;
      }
      const auto xi = static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(f.count())));
      f.component_grad(xi, xhat, buf_hat_);
      f.component_grad(xi, snapshot_, buf_snap_);
      grad_evals_ += 2;
      // Difference first, so x^ == x~ reproduces grad f(x~) exactly.
      d = buf_hat_ - buf_snap_;
      d += snapshot_grad_;
      return xi;
    }
  }
  return -1;
}

XsubResult xsub(const Vector& x_anchor, const Vector& xbreve, const Vector& h, const InnerConfig& cfg,
                GradientEstimator& est, const SmoothSum& f, const FeasibleSet& X, Rng& rng,
                InnerDiagnostics* diag) {
  const Index n1 = x_anchor.size();
  if (xbreve.size() != n1 || h.size() != n1 || cfg.H.size() != n1) {
    throw std::invalid_argument("xsub: dimension mismatch");
  }
  if (cfg.m < 1 || !(cfg.eta > 0.0)) throw std::invalid_argument("xsub: need m >= 1 and eta > 0");
  const bool dense = cfg.M_dense.has_value();
  if (dense) {
    if (!X.is_whole_space()) {
      throw std::invalid_argument("xsub: a non-diagonal metric combined with a constrained X is unsupported");
    }
    if (cfg.M_dense->rows() != n1 || cfg.M_dense->cols() != n1) throw std::invalid_argument("xsub: M_k has the wrong size");
  } else if (cfg.M_diag.size() != n1) {
    throw std::invalid_argument("xsub: M_k diagonal has the wrong size");
  }

  XsubResult out{x_anchor, xbreve};
  Vector& x = out.x;
  Vector& xb = out.xbreve;
  Vector xhat(n1);
  Vector d(n1);
  Vector full(n1);
  // Constant part of the right-hand side: M_k x^k - h.
  const Vector anchor_rhs = dense ? Vector(*cfg.M_dense * x_anchor - h)
                                  : Vector(cfg.M_diag.cwiseProduct(x_anchor) - h);

  for (int t = 1; t <= cfg.m; ++t) {
    const double td = static_cast<double>(t);
    const double beta_t = 2.0 / (td + 1.0);
    const double gamma_t = 2.0 / (td * cfg.eta);
    xhat = beta_t * xb + (1.0 - beta_t) * x;
    est.estimate(f, xhat, rng, d);
    if (diag && diag->collect_delta) {
      f.full_grad(xhat, full);
      diag->delta_sq_sum += ((full - d).array().square() / cfg.H.array()).sum();
      ++diag->delta_count;
    }
    if (dense) {
      DenseMatrix K = *cfg.M_dense;
      K.diagonal() += gamma_t * cfg.H;
      const Vector rhs = gamma_t * cfg.H.cwiseProduct(xb) + anchor_rhs - d;
      xb = K.ldlt().solve(rhs);
    } else {
      xb = ((gamma_t * cfg.H.array()) * xb.array() + anchor_rhs.array() - d.array()) /
           (gamma_t * cfg.H.array() + cfg.M_diag.array());
      X.project_in_place(xb);
    }
    x = beta_t * xb + (1.0 - beta_t) * x;
  }
  return out;
}

double adaptive_Mk(const Vector& prev_x, const Vector& cur_x, const SparseMatrix& A, double beta, MkMode mode,
                   MkState& st) {
  switch (mode) {
    case MkMode::Strict:
      st.rho = st.strict_rho;
      return st.rho;
    case MkMode::Fixed:
      return st.rho;
    case MkMode::Adaptive: {
      const Vector dx = cur_x - prev_x;
      const double delta1 = dx.squaredNorm();
      if (delta1 == 0.0) {
        if (!(st.rho > 0.0)) st.rho = st.rho_min;
        return st.rho;
      }
      const double delta2 = (A * dx).squaredNorm();
      st.rho = std::max(st.rho_min, beta * delta2 / delta1);
      return st.rho;
    }
  }
  return st.rho;
}

void note_residual(MkState& st, MkMode mode, double residual_norm) {
  if (mode == MkMode::Adaptive) {
    if (residual_norm > st.last_residual) {
      if (++st.streak >= kEscalationStreak) {
        st.rho_min *= 2.0;
        st.streak = 0;
        ++st.escalations;
      }
    } else {
      st.streak = 0;
    }
  }
  st.last_residual = residual_norm;
}

}  // namespace sasadmm
