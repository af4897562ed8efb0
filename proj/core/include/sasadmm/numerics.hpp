#pragma once

#include <cstdint>
#include <random>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace sasadmm {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;
/// Compressed-sparse-row storage.
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;
using Triplet = Eigen::Triplet<double, int>;

/// Seeded random source with a stream that is fixed across platforms.
///
/// The engine is std::mt19937_64, whose output sequence is pinned by the
/// standard. The distributions in <random> are implementation-defined, so the
/// mappings from raw 64-bit draws to indices, uniforms and normals are
/// written out here instead.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed), seed_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [0, n) by rejection, no modulo bias.
  std::uint64_t uniform_index(std::uint64_t n);

  /// Standard normal via Box-Muller; caches the second variate.
  double normal();

  std::uint64_t seed() const { return seed_; }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

/// x^T G x. G is used as given, so an indefinite G yields a negative value.
double weighted_norm_sq(const Vector& x, const DenseMatrix& G);

/// Diagonal-metric version: sum_i g_i x_i^2.
double weighted_norm_sq_diag(const Vector& x, const Vector& diag);

struct SpectralEstimate {
  double value = 0.0;   ///< estimate of the largest singular value of M
  bool converged = false;
  int iterations = 0;
};

/// Power iteration on M^T M. The start vector is drawn from `rng`, so the
/// result is deterministic for a given seed.
SpectralEstimate spectral_norm_est(const DenseMatrix& M, double tol, int max_it, Rng& rng);
SpectralEstimate spectral_norm_est(const SparseMatrix& M, double tol, int max_it, Rng& rng);

/// Convenience: estimate of lambda_max(M^T M) using a fixed internal seed.
double lambda_max_gram(const SparseMatrix& M);
double lambda_max_gram(const DenseMatrix& M);

/// True iff S + shift*I has a Cholesky factorization. A relative slack of
/// 1e-10 * (1 + |trace(S)|/n) is added on top of `shift` so exactly singular
/// PSD matrices certify. Throws std::invalid_argument when S is not square or
/// not symmetric (max-abs asymmetry above 1e-10 * max-abs(S)).
bool psd_certify(const DenseMatrix& S, double shift);

/// Max-abs entry; 0 for an empty matrix.
double max_abs(const DenseMatrix& M);

/// Returns c >= 0 if M^T M == c*I up to `rel_tol` (relative to max-abs of
/// M^T M), otherwise -1.
double gram_identity_multiple(const SparseMatrix& M, double rel_tol = 1e-14);

/// Locale-independent text with 17 significant digits; parses back exactly.
std::string format_real(double v);

}  // namespace sasadmm
