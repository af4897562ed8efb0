#include "sasadmm/numerics.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sasadmm {

std::uint64_t Rng::uniform_index(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index: empty range");
  // Largest multiple of n that fits; draws at or above it are rejected.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t r = engine_();
  while (r >= limit) r = engine_();
  return r % n;
}

double Rng::normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  double u1 = uniform01();
  while (u1 <= 0.0) u1 = uniform01();
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  cached_normal_ = r * std::sin(theta);
  has_cached_normal_ = true;
  return r * std::cos(theta);
}

double weighted_norm_sq(const Vector& x, const DenseMatrix& G) {
  if (G.rows() != x.size() || G.cols() != x.size()) {
    throw std::invalid_argument("weighted_norm_sq: dimension mismatch (x has " +
                                std::to_string(x.size()) + " entries, G is " +
                                std::to_string(G.rows()) + "x" + std::to_string(G.cols()) + ")");
  }
  return x.dot(G * x);
}

double weighted_norm_sq_diag(const Vector& x, const Vector& diag) {
  if (diag.size() != x.size()) throw std::invalid_argument("weighted_norm_sq_diag: dimension mismatch");
  return (x.array().square() * diag.array()).sum();
}

namespace {

template <typename Mat>
SpectralEstimate power_iteration(const Mat& M, double tol, int max_it, Rng& rng) {
  if (tol <= 0.0) throw std::invalid_argument("spectral_norm_est: tol must be positive");
  SpectralEstimate est;
  const Index n = M.cols();
  if (n == 0 || M.rows() == 0) {
    est.converged = true;
    return est;
  }
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = rng.normal();
  v.normalize();

  double lambda = 0.0;
  Vector mv(M.rows());
  Vector w(n);
  for (int it = 1; it <= max_it; ++it) {
    mv.noalias() = M * v;
    w.noalias() = M.transpose() * mv;
    const double rayleigh = mv.squaredNorm();
    const double wn = w.norm();
    est.iterations = it;
    if (wn == 0.0) {
      lambda = 0.0;
      est.converged = true;
      break;
    }
    v = w / wn;
    if (it > 1 && std::abs(rayleigh - lambda) <= tol * rayleigh) {
      lambda = std::max(rayleigh, wn);
      est.converged = true;
      break;
    }
    lambda = rayleigh;
  }
  est.value = std::sqrt(std::max(lambda, 0.0));
  return est;
}

}  // namespace

SpectralEstimate spectral_norm_est(const DenseMatrix& M, double tol, int max_it, Rng& rng) {
  return power_iteration(M, tol, max_it, rng);
}

SpectralEstimate spectral_norm_est(const SparseMatrix& M, double tol, int max_it, Rng& rng) {
  return power_iteration(M, tol, max_it, rng);
}

double lambda_max_gram(const SparseMatrix& M) {
  Rng rng(0x5eed5eedULL);
  const auto est = spectral_norm_est(M, 1e-10, 5000, rng);
  return est.value * est.value;
}

double lambda_max_gram(const DenseMatrix& M) {
  Rng rng(0x5eed5eedULL);
  const auto est = spectral_norm_est(M, 1e-10, 5000, rng);
  return est.value * est.value;
}

double max_abs(const DenseMatrix& M) {
  return M.size() == 0 ? 0.0 : M.cwiseAbs().maxCoeff();
}

bool psd_certify(const DenseMatrix& S, double shift) {
  if (S.rows() != S.cols()) throw std::invalid_argument("psd_certify: matrix is not square");
  if (shift < 0.0) throw std::invalid_argument("psd_certify: shift must be nonnegative");
  const Index n = S.rows();
  if (n == 0) return true;
  const double scale = max_abs(S);
  const double asym = max_abs(S - S.transpose());
  if (asym > 1e-10 * scale) {
    throw std::invalid_argument("psd_certify: matrix is not symmetric (asymmetry " +
                                std::to_string(asym) + ")");
  }
  const double slack = 1e-10 * (1.0 + std::abs(S.trace()) / static_cast<double>(n));
  const double diag_shift = shift + slack;

  // Plain left-looking Cholesky on the lower triangle; fails on the first
  // nonpositive pivot.
  DenseMatrix L = DenseMatrix::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    double d = S(j, j) + diag_shift;
    for (Index k = 0; k < j; ++k) d -= L(j, k) * L(j, k);
    if (!(d > 0.0)) return false;
    const double ljj = std::sqrt(d);
    L(j, j) = ljj;
    for (Index i = j + 1; i < n; ++i) {
      double v = S(i, j);
      for (Index k = 0; k < j; ++k) v -= L(i, k) * L(j, k);
      L(i, j) = v / ljj;
    }
  }
  return true;
}

double gram_identity_multiple(const SparseMatrix& M, double rel_tol) {
  if (M.cols() == 0) return 0.0;
  const SparseMatrix gram = SparseMatrix(M.transpose() * M);
  double scale = 0.0;
  for (Index r = 0; r < gram.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(gram, r); it; ++it) scale = std::max(scale, std::abs(it.value()));
  scale = std::max(scale, 1.0);
  const Vector diag = gram.diagonal();
  const double c = diag[0];
  for (Index i = 0; i < diag.size(); ++i)
    if (std::abs(diag[i] - c) > rel_tol * scale) return -1.0;
  for (Index r = 0; r < gram.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(gram, r); it; ++it)
      if (it.col() != r && std::abs(it.value()) > rel_tol * scale) return -1.0;
  return c;
}

std::string format_real(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

}  // namespace sasadmm
