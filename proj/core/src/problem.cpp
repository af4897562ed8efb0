#include "sasadmm/problem.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace sasadmm {

// ---------------------------------------------------------------------------
// FeasibleSet

FeasibleSet FeasibleSet::box(Vector lo, Vector hi) {
  if (lo.size() != hi.size()) throw std::invalid_argument("FeasibleSet::box: bound sizes differ");
  if ((lo.array() > hi.array()).any()) throw std::invalid_argument("FeasibleSet::box: lo > hi");
  FeasibleSet s;
  s.kind_ = Kind::Box;
  s.lo_ = std::move(lo);
  s.hi_ = std::move(hi);
  return s;
}

FeasibleSet FeasibleSet::ball(Vector center, double radius) {
  if (!(radius >= 0.0)) throw std::invalid_argument("FeasibleSet::ball: negative radius");
  FeasibleSet s;
  s.kind_ = Kind::Ball;
  s.center_ = std::move(center);
  s.radius_ = radius;
  return s;
}

void FeasibleSet::project_in_place(Vector& v) const {
  switch (kind_) {
    case Kind::WholeSpace:
      return;
    case Kind::Box:
      if (v.size() != lo_.size()) throw std::invalid_argument("FeasibleSet::project: dimension mismatch");
      v = v.cwiseMax(lo_).cwiseMin(hi_);
      return;
    case Kind::Ball: {
      if (v.size() != center_.size()) throw std::invalid_argument("FeasibleSet::project: dimension mismatch");
      const double d = (v - center_).norm();
      if (d > radius_) v = center_ + (radius_ / d) * (v - center_);
      return;
    }
  }
}

Vector FeasibleSet::project(const Vector& v) const {
  Vector out = v;
  project_in_place(out);
  return out;
}

bool FeasibleSet::contains(const Vector& v, double tol) const {
  switch (kind_) {
    case Kind::WholeSpace:
      return true;
    case Kind::Box:
      return v.size() == lo_.size() && (v.array() >= lo_.array() - tol).all() &&
             (v.array() <= hi_.array() + tol).all();
    case Kind::Ball:
      return v.size() == center_.size() && (v - center_).norm() <= radius_ + tol;
  }
  return false;
}

// ---------------------------------------------------------------------------
// SmoothSum defaults

void SmoothSum::add_component_grad(Index j, const Vector& x, double scale, Vector& out) const {
  Vector g(dim());
  component_grad(j, x, g);
  out += scale * g;
}

double SmoothSum::full_value(const Vector& x) const {
  double acc = 0.0;
  for (Index j = 0; j < count(); ++j) acc += component_value(j, x);
  return acc / static_cast<double>(count());
}

void SmoothSum::full_grad(const Vector& x, Vector& out) const {
  out.setZero(dim());
  const double w = 1.0 / static_cast<double>(count());
  for (Index j = 0; j < count(); ++j) add_component_grad(j, x, w, out);
}

namespace {

Vector default_metric(Vector metric, Index dim) {
  if (metric.size() == 0) return Vector::Ones(dim);
  if (metric.size() != dim) throw std::invalid_argument("metric diagonal has the wrong size");
  if ((metric.array() <= 0.0).any()) throw std::invalid_argument("metric H must be positive definite");
  return metric;
}

// log(1 + exp(t)) without overflow.
double softplus(double t) { return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

// 1 / (1 + exp(t)) without overflow.
double inv_one_plus_exp(double t) {
  if (t >= 0.0) {
    const double e = std::exp(-t);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(t));
}

}  // namespace

// ---------------------------------------------------------------------------
// LogisticSum

LogisticSum::LogisticSum(SparseMatrix features, Vector labels, Vector metric)
    : features_(std::move(features)), labels_(std::move(labels)) {
  if (labels_.size() != features_.rows()) throw std::invalid_argument("LogisticSum: label count mismatch");
  if (features_.rows() == 0) throw std::invalid_argument("LogisticSum: no samples");
  for (Index j = 0; j < labels_.size(); ++j) {
    if (labels_[j] != 1.0 && labels_[j] != -1.0) throw std::invalid_argument("LogisticSum: labels must be +1 or -1");
  }
  features_.makeCompressed();
  metric_ = default_metric(std::move(metric), features_.cols());
  // The logistic second derivative is bounded by 1/4.
  double worst = 0.0;
  for (Index j = 0; j < features_.outerSize(); ++j) {
    double acc = 0.0;
    for (SparseMatrix::InnerIterator it(features_, j); it; ++it) acc += it.value() * it.value() / metric_[it.col()];
    worst = std::max(worst, acc);
  }
  nu_ = 0.25 * worst;
  if (!(nu_ > 0.0)) throw std::invalid_argument("LogisticSum: all feature rows are zero");
}

double LogisticSum::margin(Index j, const Vector& x) const {
  double acc = 0.0;
  for (SparseMatrix::InnerIterator it(features_, j); it; ++it) acc += it.value() * x[it.col()];
  return labels_[j] * acc;
}

double LogisticSum::component_value(Index j, const Vector& x) const { return softplus(-margin(j, x)); }

void LogisticSum::component_grad(Index j, const Vector& x, Vector& out) const {
  out.setZero(dim());
  add_component_grad(j, x, 1.0, out);
}

void LogisticSum::add_component_grad(Index j, const Vector& x, double scale, Vector& out) const {
  const double coef = -labels_[j] * inv_one_plus_exp(margin(j, x)) * scale;
  for (SparseMatrix::InnerIterator it(features_, j); it; ++it) out[it.col()] += coef * it.value();
}

double LogisticSum::full_value(const Vector& x) const {
  const Vector m = labels_.cwiseProduct(features_ * x);
  double acc = 0.0;
  for (Index j = 0; j < m.size(); ++j) acc += softplus(-m[j]);
  return acc / static_cast<double>(count());
}

void LogisticSum::full_grad(const Vector& x, Vector& out) const {
  const Vector m = labels_.cwiseProduct(features_ * x);
  Vector coef(m.size());
  const double w = 1.0 / static_cast<double>(count());
  for (Index j = 0; j < m.size(); ++j) coef[j] = -labels_[j] * inv_one_plus_exp(m[j]) * w;
  out.noalias() = features_.transpose() * coef;
}

LogisticEval logistic_component(const Vector& a, double label, const Vector& x) {
  if (label != 1.0 && label != -1.0) throw std::invalid_argument("logistic_component: label must be +1 or -1");
  const double m = label * a.dot(x);
  return {softplus(-m), (-label * inv_one_plus_exp(m)) * a};
}

Vector soft_shrink(double kappa, const Vector& v) {
  if (kappa < 0.0) throw std::invalid_argument("soft_shrink: kappa must be nonnegative");
  Vector out(v.size());
  for (Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]) - kappa;
    out[i] = a > 0.0 ? std::copysign(a, v[i]) : 0.0;
  }
  return out;
}

// ---------------------------------------------------------------------------
// QuadraticSum

QuadraticSum::QuadraticSum(DenseMatrix P, Vector q, double constant, DenseMatrix offsets, Vector metric)
    : P_(std::move(P)), q_(std::move(q)), constant_(constant), offsets_(std::move(offsets)) {
  if (P_.rows() != q_.size() || P_.cols() != q_.size() || offsets_.rows() != q_.size() || offsets_.cols() < 1) {
    throw std::invalid_argument("QuadraticSum: inconsistent dimensions");
  }
  metric_ = default_metric(std::move(metric), q_.size());
  const Vector hinv_sqrt = metric_.cwiseSqrt().cwiseInverse();
  const DenseMatrix scaled = hinv_sqrt.asDiagonal() * P_ * hinv_sqrt.asDiagonal();
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(scaled, Eigen::EigenvaluesOnly);
  nu_ = std::max(es.eigenvalues().maxCoeff(), 0.0);
  if (!(nu_ > 0.0)) nu_ = 1e-12;  // linear f: any positive constant works
}

double QuadraticSum::component_value(Index j, const Vector& x) const {
  return 0.5 * x.dot(P_ * x) + (q_ + offsets_.col(j)).dot(x) + constant_;
}

void QuadraticSum::component_grad(Index j, const Vector& x, Vector& out) const {
  out.noalias() = P_ * x;
  out += q_;
  out += offsets_.col(j);
}

double QuadraticSum::full_value(const Vector& x) const { return 0.5 * x.dot(P_ * x) + q_.dot(x) + constant_; }

void QuadraticSum::full_grad(const Vector& x, Vector& out) const {
  out.noalias() = P_ * x;
  out += q_;
}

// ---------------------------------------------------------------------------
// Nonsmooth blocks

Vector NonsmoothBlock::solve_exact(const DenseMatrix&, const Vector&) const {
  throw std::logic_error("block '" + name() + "' has no exact subproblem solver");
}

L1Norm::L1Norm(double mu, FeasibleSet set) : mu_(mu), set_(std::move(set)) {
  if (mu_ < 0.0) throw std::invalid_argument("L1Norm: mu must be nonnegative");
  if (set_.kind() == FeasibleSet::Kind::Ball) throw std::invalid_argument("L1Norm: ball constraints are not supported");
}

double L1Norm::value(const Vector& y) const { return mu_ * y.lpNorm<1>(); }

Vector L1Norm::prox(double gamma, const Vector& v) const {
  if (!(gamma > 0.0)) throw std::invalid_argument("L1Norm::prox: gamma must be positive");
  // Separable, so clamping the unconstrained 1-d minimizer is exact for a box.
  Vector out = soft_shrink(mu_ / gamma, v);
  set_.project_in_place(out);
  return out;
}

QuadraticBlock::QuadraticBlock(DenseMatrix P, Vector q) : P_(std::move(P)), q_(std::move(q)) {
  if (P_.rows() != q_.size() || P_.cols() != q_.size()) throw std::invalid_argument("QuadraticBlock: dimension mismatch");
}

double QuadraticBlock::value(const Vector& y) const { return 0.5 * y.dot(P_ * y) + q_.dot(y); }

Vector QuadraticBlock::prox(double gamma, const Vector& v) const {
  if (!(gamma > 0.0)) throw std::invalid_argument("QuadraticBlock::prox: gamma must be positive");
  const DenseMatrix M = P_ + gamma * DenseMatrix::Identity(P_.rows(), P_.cols());
  return M.ldlt().solve(gamma * v - q_);
}

Vector QuadraticBlock::solve_exact(const DenseMatrix& M, const Vector& r) const {
  return (P_ + M).ldlt().solve(r - q_);
}

// ---------------------------------------------------------------------------
// ProblemSpec

double ProblemSpec::objective(const Vector& x, const std::vector<Vector>& ys) const {
  double F = f->full_value(x);
  for (std::size_t i = 0; i < blocks.size(); ++i) F += blocks[i].g->value(ys[i]);
  return F;
}

void ProblemSpec::residual(const Vector& x, const std::vector<Vector>& ys, Vector& out) const {
  out.noalias() = A * x;
  for (std::size_t i = 0; i < blocks.size(); ++i) out.noalias() += blocks[i].B * ys[i];
  out -= b;
}

Vector ProblemSpec::residual(const Vector& x, const std::vector<Vector>& ys) const {
  Vector out(n());
  residual(x, ys, out);
  return out;
}

void ProblemSpec::validate() const {
  if (!f) throw std::invalid_argument("ProblemSpec: missing smooth part");
  if (f->dim() != A.cols()) throw std::invalid_argument("ProblemSpec: A columns must match dim(x)");
  if (b.size() != A.rows()) throw std::invalid_argument("ProblemSpec: b size must match rows of A");
  for (const auto& blk : blocks) {
    if (!blk.g) throw std::invalid_argument("ProblemSpec: block without function");
    if (blk.B.rows() != A.rows()) throw std::invalid_argument("ProblemSpec: block matrix row count mismatch");
  }
}

SparseMatrix sparse_identity(Index n, double scale) {
  SparseMatrix I(n, n);
  I.reserve(Eigen::VectorXi::Constant(n, 1));
  for (Index i = 0; i < n; ++i) I.insert(i, i) = scale;
  I.makeCompressed();
  return I;
}

SparseMatrix vstack(const SparseMatrix& top, const SparseMatrix& bottom) {
  if (top.rows() > 0 && bottom.rows() > 0 && top.cols() != bottom.cols()) {
    throw std::invalid_argument("vstack: column counts differ");
  }
  const Index cols = top.rows() > 0 ? top.cols() : bottom.cols();
  std::vector<Triplet> trips;
  trips.reserve(static_cast<std::size_t>(top.nonZeros() + bottom.nonZeros()));
  for (Index r = 0; r < top.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(top, r); it; ++it)
      trips.emplace_back(static_cast<int>(r), static_cast<int>(it.col()), it.value());
  for (Index r = 0; r < bottom.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(bottom, r); it; ++it)
      trips.emplace_back(static_cast<int>(top.rows() + r), static_cast<int>(it.col()), it.value());
  SparseMatrix out(top.rows() + bottom.rows(), cols);
  out.setFromTriplets(trips.begin(), trips.end());
  out.makeCompressed();
  return out;
}

ProblemSpec make_fused_lasso(const SparseMatrix& features, const Vector& labels, const SparseMatrix& G,
                             double mu, const Vector& metric) {
  if (!(mu > 0.0)) throw std::invalid_argument("make_fused_lasso: mu must be positive");
  for (Index j = 0; j < labels.size(); ++j) {
    if (labels[j] != 1.0 && labels[j] != -1.0) {
      throw std::invalid_argument("make_fused_lasso: label " + std::to_string(labels[j]) + " at sample " +
                                  std::to_string(j) + " is not +1 or -1");
    }
  }
  const Index l = features.cols();
  if (G.rows() > 0 && G.cols() != l) throw std::invalid_argument("make_fused_lasso: G must have one column per feature");
  ProblemSpec spec;
  spec.f = std::make_shared<LogisticSum>(features, labels, metric);
  spec.A = vstack(G.rows() > 0 ? G : SparseMatrix(0, l), sparse_identity(l));
  spec.b = Vector::Zero(spec.A.rows());
  spec.blocks.push_back({std::make_shared<L1Norm>(mu), sparse_identity(spec.A.rows(), -1.0)});
  spec.validate();
  return spec;
}

namespace {

SparseMatrix to_sparse(const DenseMatrix& M) {
  SparseMatrix S = M.sparseView();
  S.makeCompressed();
  return S;
}

void require_psd(const DenseMatrix& P, const char* what) {
  if (P.size() == 0) return;
  bool ok = false;
  try {
    ok = psd_certify(P, 0.0);
  } catch (const std::invalid_argument&) {
    ok = false;
  }
  if (!ok) throw std::invalid_argument(std::string("make_quadratic_test: ") + what + " is not symmetric PSD");
}

DenseMatrix zero_mean_offsets(Index dim, Index N, Rng& rng) {
  if (N < 1) throw std::invalid_argument("make_quadratic_test: N must be at least 1");
  DenseMatrix C(dim, N);
  for (Index j = 0; j < N; ++j)
    for (Index i = 0; i < dim; ++i) C(i, j) = rng.normal();
  const Vector mean = C.rowwise().mean();
  C.colwise() -= mean;
  return C;
}

}  // namespace

QuadraticInstance make_quadratic_test(const DenseMatrix& P1, const Vector& q1, const DenseMatrix& P2,
                                      const Vector& q2, const DenseMatrix& A, const DenseMatrix& B,
                                      const Vector& b, Index N, Rng& rng, double constant) {
  require_psd(P1, "P1");
  require_psd(P2, "P2");
  if (A.cols() != q1.size() || B.cols() != q2.size() || A.rows() != b.size() || B.rows() != b.size()) {
    throw std::invalid_argument("make_quadratic_test: inconsistent dimensions");
  }
  QuadraticInstance inst;
  inst.P1 = P1;
  inst.q1 = q1;
  inst.constant = constant;
  inst.P2 = P2;
  inst.q2 = q2;
  inst.A = A;
  inst.B = B;
  inst.b = b;
  inst.spec.f = std::make_shared<QuadraticSum>(P1, q1, constant, zero_mean_offsets(q1.size(), N, rng));
  inst.spec.A = to_sparse(A);
  inst.spec.b = b;
  inst.spec.blocks.push_back({std::make_shared<QuadraticBlock>(P2, q2), to_sparse(B)});
  inst.spec.validate();
  return inst;
}

QuadraticInstance make_quadratic_alm_test(const DenseMatrix& P1, const Vector& q1, const DenseMatrix& A,
                                          const Vector& b, Index N, Rng& rng) {
  require_psd(P1, "P1");
  if (A.cols() != q1.size() || A.rows() != b.size()) {
    throw std::invalid_argument("make_quadratic_alm_test: inconsistent dimensions");
  }
  QuadraticInstance inst;
  inst.P1 = P1;
  inst.q1 = q1;
  inst.A = A;
  inst.B = DenseMatrix(A.rows(), 0);
  inst.b = b;
  inst.spec.f = std::make_shared<QuadraticSum>(P1, q1, 0.0, zero_mean_offsets(q1.size(), N, rng));
  inst.spec.A = to_sparse(A);
  inst.spec.b = b;
  inst.spec.validate();
  return inst;
}

KktSolution kkt_reference(const QuadraticInstance& inst) {
  const Index n1 = inst.P1.rows();
  const Index n2 = inst.has_y_block() ? inst.P2.rows() : 0;
  const Index n = inst.b.size();
  const Index dim = n1 + n2 + n;
  DenseMatrix K = DenseMatrix::Zero(dim, dim);
  Vector rhs(dim);
  K.topLeftCorner(n1, n1) = inst.P1;
  K.block(0, n1 + n2, n1, n) = -inst.A.transpose();
  K.block(n1 + n2, 0, n, n1) = inst.A;
  rhs.head(n1) = -inst.q1;
  if (n2 > 0) {
    K.block(n1, n1, n2, n2) = inst.P2;
    K.block(n1, n1 + n2, n2, n) = -inst.B.transpose();
    K.block(n1 + n2, n1, n, n2) = inst.B;
    rhs.segment(n1, n2) = -inst.q2;
  }
  rhs.tail(n) = inst.b;

  Eigen::FullPivLU<DenseMatrix> lu(K);
  if (!lu.isInvertible()) throw std::runtime_error("kkt_reference: KKT matrix is singular");
  const Vector sol = lu.solve(rhs);
  KktSolution out;
  out.residual = max_abs(K * sol - rhs);
  const double scale = std::max({1.0, max_abs(K), rhs.size() ? rhs.cwiseAbs().maxCoeff() : 0.0});
  if (out.residual > 1e-10 * scale) throw std::runtime_error("kkt_reference: residual too large");
  out.x = sol.head(n1);
  out.y = sol.segment(n1, n2);
  out.lambda = sol.tail(n);
  out.objective = 0.5 * out.x.dot(inst.P1 * out.x) + inst.q1.dot(out.x) + inst.constant;
  if (n2 > 0) out.objective += 0.5 * out.y.dot(inst.P2 * out.y) + inst.q2.dot(out.y);
  return out;
}

}  // namespace sasadmm
