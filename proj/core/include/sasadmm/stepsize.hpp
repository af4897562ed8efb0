#pragma once

#include <span>
#include <vector>

#include "sasadmm/numerics.hpp"

namespace sasadmm {

/// Dual stepsizes: tau after the x-update, s after the y-update.
/// Membership in a convergence region is queried, never enforced here.
struct StepsizePair {
  double tau = 0.0;
  double s = 1.0;
};

enum class Region {
  Delta0,  ///< classical symmetric-ADMM region
  Delta1,  ///< strict-polynomial region
  Delta,   ///< enlarged region, closed on the polynomial boundary
};

/// -tau^2 - s^2 - tau*s + tau + s + 1
double region_polynomial(StepsizePair p);

bool in_region(StepsizePair p, Region r);

struct OmegaCoeffs {
  double omega0 = 0.0;
  double omega1 = 0.0;
  double omega2 = 0.0;
};

/// Coefficients of the lower bound on the G-tilde quadratic form.
/// Throws std::domain_error when 1 + tau <= 0 and std::invalid_argument for beta <= 0.
OmegaCoeffs omega_coeffs(StepsizePair p, double beta);

/// Block lower-triangular map with w^k - w^{k+1} = P (w^k - w~^k), where
/// w = (x, y, lambda). `n1` is the x dimension; B is n x n2.
DenseMatrix build_P(StepsizePair p, double beta, Index n1, const DenseMatrix& B);

struct AnalysisMatrices {
  DenseMatrix Q;       ///< nonsymmetric; satisfies Q = Qtilde * P
  DenseMatrix Qtilde;  ///< symmetric
  DenseMatrix Gtilde;  ///< symmetric
  DenseMatrix P;
};

/// Dense block assembly of Q_k, Q~_k, G~_k (and P) for the two-block method.
/// Dk is n1 x n1, L is n2 x n2, B is n x n2. Throws std::domain_error if tau + s == 0.
AnalysisMatrices build_analysis_matrices(StepsizePair p, double beta, const DenseMatrix& Dk,
                                         const DenseMatrix& L, const DenseMatrix& B);

/// Single-block (augmented Lagrangian) specialization:
/// P = diag(I, sI), Q = diag(Dk, I/beta), Q~ = diag(Dk, I/(s beta)), G~ = diag(Dk, (2-s)/beta I).
/// `n` is the number of constraints.
AnalysisMatrices build_alm_matrices(double s, double beta, const DenseMatrix& Dk, Index n);

/// Coupled proximal matrix of the Jacobi multi-block update: diagonal blocks
/// L_i, off-diagonal blocks -beta B_i^T B_j.
DenseMatrix build_multiblock_Ltilde(double beta, std::span<const DenseMatrix> Bs,
                                    std::span<const DenseMatrix> Ls);

/// Horizontal concatenation [B_1, ..., B_q].
DenseMatrix stack_blocks(std::span<const DenseMatrix> Bs);

/// Multi-block analysis matrices: the two-block assembly with L replaced by
/// L~ and B by the stacked blocks.
AnalysisMatrices build_multiblock_matrices(StepsizePair p, double beta, const DenseMatrix& Dk,
                                           std::span<const DenseMatrix> Bs,
                                           std::span<const DenseMatrix> Ls);

struct CertReport {
  double region_poly = 0.0;
  bool region_member = false;
  double identity_residual = 0.0;  ///< max-abs of G~ - (P^T Q~ + Q~ P - P^T Q~ P)
  double identity_scale = 0.0;     ///< max-abs of G~, for relative comparisons
  double factor_residual = 0.0;    ///< max-abs of Q~ P - Q
  bool qtilde_psd = false;
  bool omegas_defined = false;
  OmegaCoeffs omegas;
};

/// Builds the analysis matrices and fills a report. Q~ is certified with
/// shift 1e-9 * max(1, max-abs(Q~)).
CertReport certify(StepsizePair p, double beta, const DenseMatrix& Dk, const DenseMatrix& L,
                   const DenseMatrix& B);

/// Max-abs defect of G~ against P^T Q~ + Q~ P - P^T Q~ P.
double identity_defect(const AnalysisMatrices& m);

/// J(w) = (-A^T lambda; -B^T lambda; A x + B y - b).
Vector vi_map(const Vector& x, const Vector& y, const Vector& lambda, const DenseMatrix& A,
              const DenseMatrix& B, const Vector& b);

}  // namespace sasadmm
