#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sasadmm/numerics.hpp"

namespace sasadmm {

// ---------------------------------------------------------------------------
// Feasible sets

class FeasibleSet {
 public:
  enum class Kind { WholeSpace, Box, Ball };

  FeasibleSet() = default;
  static FeasibleSet whole_space() { return {}; }
  static FeasibleSet box(Vector lo, Vector hi);
  static FeasibleSet ball(Vector center, double radius);

  Kind kind() const { return kind_; }
  bool is_whole_space() const { return kind_ == Kind::WholeSpace; }

  /// Euclidean projection. Idempotent.
  Vector project(const Vector& v) const;
  void project_in_place(Vector& v) const;
  bool contains(const Vector& v, double tol = 0.0) const;

 private:
  Kind kind_ = Kind::WholeSpace;
  Vector lo_, hi_, center_;
  double radius_ = 0.0;
};

// ---------------------------------------------------------------------------
// Smooth finite-sum part f(x) = (1/N) sum_j f_j(x)

class SmoothSum {
 public:
  virtual ~SmoothSum() = default;

  virtual Index dim() const = 0;
  virtual Index count() const = 0;
  virtual double component_value(Index j, const Vector& x) const = 0;
  /// Overwrites `out` with grad f_j(x).
  virtual void component_grad(Index j, const Vector& x, Vector& out) const = 0;
  /// Adds `scale * grad f_j(x)` to `out`.
  virtual void add_component_grad(Index j, const Vector& x, double scale, Vector& out) const;

  virtual double full_value(const Vector& x) const;
  /// Overwrites `out` with grad f(x); reduction order over j is fixed.
  virtual void full_grad(const Vector& x, Vector& out) const;

  /// Lipschitz constant of every grad f_j relative to the metric H.
  double nu() const { return nu_; }
  /// Diagonal of H (all ones by default).
  const Vector& metric() const { return metric_; }

 protected:
  double nu_ = 1.0;
  Vector metric_;
};

/// f_j(x) = log(1 + exp(-b_j <a_j, x>)) with a_j the rows of `features`.
class LogisticSum final : public SmoothSum {
 public:
  /// `metric` empty means H = I. Labels must be +-1.
  LogisticSum(SparseMatrix features, Vector labels, Vector metric = {});

  Index dim() const override { return features_.cols(); }
  Index count() const override { return features_.rows(); }
  double component_value(Index j, const Vector& x) const override;
  void component_grad(Index j, const Vector& x, Vector& out) const override;
  void add_component_grad(Index j, const Vector& x, double scale, Vector& out) const override;
  double full_value(const Vector& x) const override;
  void full_grad(const Vector& x, Vector& out) const override;

  const SparseMatrix& features() const { return features_; }
  const Vector& labels() const { return labels_; }

 private:
  double margin(Index j, const Vector& x) const;

  SparseMatrix features_;
  Vector labels_;
};

/// f_j(x) = 1/2 x^T P x + (q + c_j)^T x + constant, with sum_j c_j = 0, so
/// every component shares the Hessian P and the average is exactly
/// 1/2 x^T P x + q^T x + constant.
class QuadraticSum final : public SmoothSum {
 public:
  QuadraticSum(DenseMatrix P, Vector q, double constant, DenseMatrix offsets, Vector metric = {});

  Index dim() const override { return q_.size(); }
  Index count() const override { return offsets_.cols(); }
  double component_value(Index j, const Vector& x) const override;
  void component_grad(Index j, const Vector& x, Vector& out) const override;
  double full_value(const Vector& x) const override;
  void full_grad(const Vector& x, Vector& out) const override;

  const DenseMatrix& hessian() const { return P_; }
  const Vector& linear() const { return q_; }
  double constant() const { return constant_; }

 private:
  DenseMatrix P_;
  Vector q_;
  double constant_;
  DenseMatrix offsets_;  // dim x N, zero row sums
};

struct LogisticEval {
  double value = 0.0;
  Vector grad;
};

/// Overflow-safe logistic loss and gradient for one labelled sample.
LogisticEval logistic_component(const Vector& a, double label, const Vector& x);

/// Componentwise sign(v) * max(|v| - kappa, 0). Throws for kappa < 0.
Vector soft_shrink(double kappa, const Vector& v);

// ---------------------------------------------------------------------------
// Nonsmooth blocks

class NonsmoothBlock {
 public:
  virtual ~NonsmoothBlock() = default;
  virtual double value(const Vector& y) const = 0;
  /// argmin_y value(y) + (gamma/2)||y - v||^2 over the block's feasible set.
  virtual Vector prox(double gamma, const Vector& v) const = 0;

  /// Blocks that can minimize value(y) + 1/2 y^T M y - r^T y directly.
  virtual bool has_exact_subproblem() const { return false; }
  virtual Vector solve_exact(const DenseMatrix& M, const Vector& r) const;

  /// True for the identically-zero function (optionally restricted to a set).
  virtual bool is_zero() const { return false; }
  virtual std::string name() const = 0;
};

/// mu * ||y||_1, optionally restricted to a box.
class L1Norm final : public NonsmoothBlock {
 public:
  explicit L1Norm(double mu, FeasibleSet set = {});
  double value(const Vector& y) const override;
  Vector prox(double gamma, const Vector& v) const override;
  std::string name() const override { return "l1"; }
  double mu() const { return mu_; }

 private:
  double mu_;
  FeasibleSet set_;
};

/// 1/2 y^T P y + q^T y on the whole space.
class QuadraticBlock final : public NonsmoothBlock {
 public:
  QuadraticBlock(DenseMatrix P, Vector q);
  double value(const Vector& y) const override;
  Vector prox(double gamma, const Vector& v) const override;
  bool has_exact_subproblem() const override { return true; }
  Vector solve_exact(const DenseMatrix& M, const Vector& r) const override;
  std::string name() const override { return "quadratic"; }

 private:
  DenseMatrix P_;
  Vector q_;
};

/// The zero function plus the indicator of `set`; prox is projection.
class ZeroBlock final : public NonsmoothBlock {
 public:
  explicit ZeroBlock(FeasibleSet set = {}) : set_(std::move(set)) {}
  double value(const Vector&) const override { return 0.0; }
  Vector prox(double, const Vector& v) const override { return set_.project(v); }
  bool is_zero() const override { return true; }
  std::string name() const override { return "zero"; }

 private:
  FeasibleSet set_;
};

// ---------------------------------------------------------------------------
// Problem instances

struct BlockTerm {
  std::shared_ptr<const NonsmoothBlock> g;
  SparseMatrix B;  ///< n x n_i
};

/// min f(x) + sum_i g_i(y_i)  s.t.  A x + sum_i B_i y_i = b,  x in X.
/// Zero blocks gives the single-block (augmented Lagrangian) problem.
struct ProblemSpec {
  std::shared_ptr<const SmoothSum> f;
  SparseMatrix A;  ///< n x n1
  Vector b;
  FeasibleSet X;
  std::vector<BlockTerm> blocks;

  Index n1() const { return A.cols(); }
  Index n() const { return A.rows(); }
  Index block_dim(std::size_t i) const { return blocks[i].B.cols(); }

  double objective(const Vector& x, const std::vector<Vector>& ys) const;
  /// A x + sum_i B_i y_i - b, accumulated in block order.
  Vector residual(const Vector& x, const std::vector<Vector>& ys) const;
  void residual(const Vector& x, const std::vector<Vector>& ys, Vector& out) const;

  /// Throws std::invalid_argument on inconsistent dimensions.
  void validate() const;
};

/// Fused lasso with logistic loss: A = [G; I], B = -I, b = 0, g = mu ||.||_1.
/// `metric` empty means H = I.
ProblemSpec make_fused_lasso(const SparseMatrix& features, const Vector& labels, const SparseMatrix& G,
                             double mu, const Vector& metric = {});

/// Strictly convex quadratic instance with an exact KKT oracle. For the
/// single-block form, P2/q2/B are empty (0-sized).
struct QuadraticInstance {
  ProblemSpec spec;
  DenseMatrix P1;
  Vector q1;
  double constant = 0.0;
  DenseMatrix P2;
  Vector q2;
  DenseMatrix A;
  DenseMatrix B;
  Vector b;

  bool has_y_block() const { return B.cols() > 0; }
};

/// Splits f = 1/2 x^T P1 x + q1^T x into N components with zero-mean linear
/// offsets drawn from `rng`; g(y) = 1/2 y^T P2 y + q2^T y. Throws when P1 or
/// P2 is not symmetric PSD.
QuadraticInstance make_quadratic_test(const DenseMatrix& P1, const Vector& q1, const DenseMatrix& P2,
                                      const Vector& q2, const DenseMatrix& A, const DenseMatrix& B,
                                      const Vector& b, Index N, Rng& rng, double constant = 0.0);

/// Single-block form: min 1/2 x^T P1 x + q1^T x s.t. A x = b.
QuadraticInstance make_quadratic_alm_test(const DenseMatrix& P1, const Vector& q1, const DenseMatrix& A,
                                          const Vector& b, Index N, Rng& rng);

struct KktSolution {
  Vector x;
  Vector y;
  Vector lambda;
  double objective = 0.0;
  double residual = 0.0;  ///< max-abs residual of the KKT linear system
};

/// Direct solve of the saddle-point system. Throws std::runtime_error when
/// the KKT matrix is singular or the residual exceeds 1e-10 (relative).
KktSolution kkt_reference(const QuadraticInstance& inst);

/// Vertical concatenation [top; bottom].
SparseMatrix vstack(const SparseMatrix& top, const SparseMatrix& bottom);
SparseMatrix sparse_identity(Index n, double scale = 1.0);

}  // namespace sasadmm
