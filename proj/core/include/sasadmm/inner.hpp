#pragma once

#include <cstdint>
#include <limits>
#include <optional>

#include "sasadmm/numerics.hpp"
#include "sasadmm/problem.hpp"

namespace sasadmm {

/// Parameters of eta_k = min{c1 / (m_k (m_k + 1)), c2}, m_k = max{ceil(c3 k^rho), m}.
struct ScheduleParams {
  double c1 = 1.0;
  double c2 = 0.5;
  double c3 = 1.0;
  double rho = 1.01;
  int m = 5;

  /// c1 = 1/nu, c2 = 1/(2 nu), c3 = 1, rho = 1.01, m = 5.
  static ScheduleParams defaults_for(double nu);

  /// Throws std::invalid_argument unless c1, c2, c3 > 0, rho >= 1, m >= 1
  /// and c2 <= 1/(2 nu).
  void validate(double nu) const;
};

struct InnerStep {
  int m = 1;
  double eta = 0.0;
};

InnerStep schedule(long k, const ScheduleParams& p);

// ---------------------------------------------------------------------------

enum class EstimatorMode {
  Plain,  ///< d_t = grad f_xi(x^_t), e_t = 0
  Svrg,   ///< d_t = grad f_xi(x^_t) - grad f_xi(x~) + grad f(x~)
  Full,   ///< d_t = grad f(x^_t); deterministic, no draws
};

const char* to_string(EstimatorMode m);

/// Stochastic gradient rule d_t = grad f_xi(x^_t) + e_t with E[e_t] = 0.
class GradientEstimator {
 public:
  explicit GradientEstimator(EstimatorMode mode = EstimatorMode::Plain) : mode_(mode) {}

  EstimatorMode mode() const { return mode_; }

  /// Stores the SVRG snapshot x~ and grad f(x~). No-op for other modes.
  void refresh(const SmoothSum& f, const Vector& snapshot);
  bool has_snapshot() const { return has_snapshot_; }
  const Vector& snapshot() const { return snapshot_; }

  /// Writes d_t into `d` and returns xi_t (0-based), or -1 in Full mode.
  Index estimate(const SmoothSum& f, const Vector& xhat, Rng& rng, Vector& d);

  /// Component-gradient evaluations so far (a full gradient counts N).
  std::uint64_t gradient_evals() const { return grad_evals_; }

 private:
  EstimatorMode mode_;
  bool has_snapshot_ = false;
  Vector snapshot_;
  Vector snapshot_grad_;
  Vector buf_hat_;
  Vector buf_snap_;
  std::uint64_t grad_evals_ = 0;
};

// ---------------------------------------------------------------------------

/// Per-outer-iteration settings of the inner routine. H and M_k are diagonal
/// unless `M_dense` is set, in which case X must be the whole space.
struct InnerConfig {
  int m = 1;
  double eta = 0.0;
  Vector H;                            ///< diagonal of H (> 0)
  Vector M_diag;                       ///< diagonal of M_k
  std::optional<DenseMatrix> M_dense;  ///< full M_k, overrides M_diag
};

/// Optional per-call diagnostics. Filling them costs one extra full
/// gradient per inner step.
struct InnerDiagnostics {
  bool collect_delta = false;
  double delta_sq_sum = 0.0;  ///< sum_t ||grad f(x^_t) - d_t||^2_{H^-1}
  long delta_count = 0;
};

struct XsubResult {
  Vector x;
  Vector xbreve;
};

/// Accelerated stochastic inner routine. Runs t = 1..m with
/// beta_t = 2/(t+1), gamma_t = 2/(t eta) and returns (x_{m+1}, xbreve_{m+1}).
/// `x_anchor` is the outer iterate x^k; it also seeds x_1.
XsubResult xsub(const Vector& x_anchor, const Vector& xbreve, const Vector& h, const InnerConfig& cfg,
                GradientEstimator& est, const SmoothSum& f, const FeasibleSet& X, Rng& rng,
                InnerDiagnostics* diag = nullptr);

// ---------------------------------------------------------------------------

enum class MkMode {
  Strict,    ///< rho = 1.01 beta lambda_max(A^T A), constant
  Adaptive,  ///< rho_k = max{rho_min, beta delta2 / delta1} with escalation
  Fixed,     ///< rho supplied by the caller
};

const char* to_string(MkMode m);

/// Bookkeeping for M_k = rho_k I.
struct MkState {
  double rho = 0.0;         ///< current rho_k
  double rho_min = 0.0;     ///< adaptive safeguard, doubled on escalation
  double strict_rho = 0.0;  ///< 1.01 beta lambda_max(A^T A)
  int streak = 0;           ///< consecutive residual increases
  double last_residual = std::numeric_limits<double>::infinity();
  int escalations = 0;
};

/// Number of consecutive primal-residual increases that doubles rho_min.
inline constexpr int kEscalationStreak = 10;

/// Returns rho_k for the next outer iteration and stores it in `st.rho`.
/// In adaptive mode a zero displacement keeps the previous rho.
double adaptive_Mk(const Vector& prev_x, const Vector& cur_x, const SparseMatrix& A, double beta, MkMode mode,
                   MkState& st);

/// Records ||A x + B y - b|| after an outer iteration; escalates rho_min in
/// adaptive mode after kEscalationStreak consecutive increases.
void note_residual(MkState& st, MkMode mode, double residual_norm);

}  // namespace sasadmm
