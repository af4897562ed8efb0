#include "sasadmm/stepsize.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sasadmm {

double region_polynomial(StepsizePair p) {
  const double t = p.tau;
  const double s = p.s;
  return -t * t - s * s - t * s + t + s + 1.0;
}

bool in_region(StepsizePair p, Region r) {
  const double t = p.tau;
  const double s = p.s;
  switch (r) {
    case Region::Delta0: {
      const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
      return s > 0.0 && s < golden && t + s > 0.0 && t > -1.0 && t < 1.0 &&
             std::abs(t) < 1.0 + s - s * s;
    }
    case Region::Delta1:
      return t + s > 0.0 && t <= 1.0 && region_polynomial(p) > 0.0;
    case Region::Delta:
      return t + s > 0.0 && t <= 1.0 && region_polynomial(p) >= 0.0;
  }
  return false;
}

OmegaCoeffs omega_coeffs(StepsizePair p, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("omega_coeffs: beta must be positive");
  const double opt = 1.0 + p.tau;
  if (!(opt > 0.0)) throw std::domain_error("omega_coeffs: requires 1 + tau > 0");
  const double one_minus_s_sq = (1.0 - p.s) * (1.0 - p.s);
  OmegaCoeffs w;
  w.omega0 = (2.0 - p.tau - p.s - one_minus_s_sq / opt) * beta;
  w.omega1 = one_minus_s_sq / opt * beta;
  w.omega2 = (1.0 - p.tau) / opt;
  return w;
}

DenseMatrix build_P(StepsizePair p, double beta, Index n1, const DenseMatrix& B) {
  const Index n = B.rows();
  const Index n2 = B.cols();
  const Index dim = n1 + n2 + n;
  DenseMatrix P = DenseMatrix::Zero(dim, dim);
  P.topLeftCorner(n1 + n2, n1 + n2).setIdentity();
  P.block(n1 + n2, n1, n, n2) = -p.s * beta * B;
  P.bottomRightCorner(n, n) = (p.tau + p.s) * DenseMatrix::Identity(n, n);
  return P;
}

AnalysisMatrices build_analysis_matrices(StepsizePair p, double beta, const DenseMatrix& Dk,
                                         const DenseMatrix& L, const DenseMatrix& B) {
  if (!(beta > 0.0)) throw std::invalid_argument("build_analysis_matrices: beta must be positive");
  const double ts = p.tau + p.s;
  if (ts == 0.0) throw std::domain_error("build_analysis_matrices: P is singular (tau + s == 0)");
  const Index n1 = Dk.rows();
  const Index n2 = B.cols();
  const Index n = B.rows();
  if (Dk.cols() != n1 || L.rows() != n2 || L.cols() != n2) {
    throw std::invalid_argument("build_analysis_matrices: inconsistent block dimensions");
  }
  const Index dim = n1 + n2 + n;
  const DenseMatrix BtB = B.transpose() * B;
  const DenseMatrix In = DenseMatrix::Identity(n, n);

  AnalysisMatrices m;
  m.P = build_P(p, beta, n1, B);

  m.Q = DenseMatrix::Zero(dim, dim);
  m.Q.topLeftCorner(n1, n1) = Dk;
  m.Q.block(n1, n1, n2, n2) = L + beta * BtB;
  m.Q.block(n1, n1 + n2, n2, n) = -p.tau * B.transpose();
  m.Q.block(n1 + n2, n1, n, n2) = -B;
  m.Q.bottomRightCorner(n, n) = In / beta;

  m.Qtilde = DenseMatrix::Zero(dim, dim);
  m.Qtilde.topLeftCorner(n1, n1) = Dk;
  m.Qtilde.block(n1, n1, n2, n2) = L + (1.0 - p.tau * p.s / ts) * beta * BtB;
  m.Qtilde.block(n1, n1 + n2, n2, n) = -(p.tau / ts) * B.transpose();
  m.Qtilde.block(n1 + n2, n1, n, n2) = -(p.tau / ts) * B;
  m.Qtilde.bottomRightCorner(n, n) = In / (beta * ts);

  m.Gtilde = DenseMatrix::Zero(dim, dim);
  m.Gtilde.topLeftCorner(n1, n1) = Dk;
  m.Gtilde.block(n1, n1, n2, n2) = L + (1.0 - p.s) * beta * BtB;
  m.Gtilde.block(n1, n1 + n2, n2, n) = (p.s - 1.0) * B.transpose();
  m.Gtilde.block(n1 + n2, n1, n, n2) = (p.s - 1.0) * B;
  m.Gtilde.bottomRightCorner(n, n) = (2.0 - p.tau - p.s) / beta * In;
  return m;
}

AnalysisMatrices build_alm_matrices(double s, double beta, const DenseMatrix& Dk, Index n) {
  if (!(beta > 0.0)) throw std::invalid_argument("build_alm_matrices: beta must be positive");
  if (s == 0.0) throw std::domain_error("build_alm_matrices: P is singular (s == 0)");
  const Index n1 = Dk.rows();
  const Index dim = n1 + n;
  const DenseMatrix In = DenseMatrix::Identity(n, n);
  AnalysisMatrices m;
  m.P = DenseMatrix::Identity(dim, dim);
  m.P.bottomRightCorner(n, n) = s * In;
  m.Q = DenseMatrix::Zero(dim, dim);
  m.Q.topLeftCorner(n1, n1) = Dk;
  m.Q.bottomRightCorner(n, n) = In / beta;
  m.Qtilde = m.Q;
  m.Qtilde.bottomRightCorner(n, n) = In / (s * beta);
  m.Gtilde = m.Q;
  m.Gtilde.bottomRightCorner(n, n) = (2.0 - s) / beta * In;
  return m;
}

DenseMatrix stack_blocks(std::span<const DenseMatrix> Bs) {
  if (Bs.empty()) return DenseMatrix(0, 0);
  const Index n = Bs.front().rows();
  Index cols = 0;
  for (const auto& B : Bs) {
    if (B.rows() != n) throw std::invalid_argument("stack_blocks: blocks have different row counts");
    cols += B.cols();
  }
  DenseMatrix out(n, cols);
  Index c = 0;
  for (const auto& B : Bs) {
    out.middleCols(c, B.cols()) = B;
    c += B.cols();
  }
  return out;
}

DenseMatrix build_multiblock_Ltilde(double beta, std::span<const DenseMatrix> Bs,
                                    std::span<const DenseMatrix> Ls) {
  if (Bs.size() != Ls.size()) throw std::invalid_argument("build_multiblock_Ltilde: need one L per block");
  std::vector<Index> offsets(Bs.size() + 1, 0);
  for (std::size_t i = 0; i < Bs.size(); ++i) {
    if (Ls[i].rows() != Bs[i].cols() || Ls[i].cols() != Bs[i].cols()) {
      throw std::invalid_argument("build_multiblock_Ltilde: L_i must be n_i x n_i");
    }
    offsets[i + 1] = offsets[i] + Bs[i].cols();
  }
  const Index dim = offsets.back();
  DenseMatrix Lt = DenseMatrix::Zero(dim, dim);
  for (std::size_t i = 0; i < Bs.size(); ++i) {
    for (std::size_t j = 0; j < Bs.size(); ++j) {
      auto blk = Lt.block(offsets[i], offsets[j], Bs[i].cols(), Bs[j].cols());
      if (i == j) {
        blk = Ls[i];
      } else {
        blk = -beta * Bs[i].transpose() * Bs[j];
      }
    }
  }
  return Lt;
}

AnalysisMatrices build_multiblock_matrices(StepsizePair p, double beta, const DenseMatrix& Dk,
                                           std::span<const DenseMatrix> Bs,
                                           std::span<const DenseMatrix> Ls) {
  return build_analysis_matrices(p, beta, Dk, build_multiblock_Ltilde(beta, Bs, Ls), stack_blocks(Bs));
}

double identity_defect(const AnalysisMatrices& m) {
  const DenseMatrix& P = m.P;
  const DenseMatrix& Qt = m.Qtilde;
  const DenseMatrix rebuilt = P.transpose() * Qt + Qt * P - P.transpose() * Qt * P;
  return max_abs(m.Gtilde - rebuilt);
}

CertReport certify(StepsizePair p, double beta, const DenseMatrix& Dk, const DenseMatrix& L,
                   const DenseMatrix& B) {
  CertReport rep;
  rep.region_poly = region_polynomial(p);
  rep.region_member = in_region(p, Region::Delta);
  if (1.0 + p.tau > 0.0) {
    rep.omegas = omega_coeffs(p, beta);
    rep.omegas_defined = true;
  } else {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    rep.omegas = {nan, nan, nan};
  }
  const AnalysisMatrices m = build_analysis_matrices(p, beta, Dk, L, B);
  rep.identity_residual = identity_defect(m);
  rep.identity_scale = max_abs(m.Gtilde);
  rep.factor_residual = max_abs(m.Qtilde * m.P - m.Q);
  rep.qtilde_psd = psd_certify(m.Qtilde, 1e-9 * std::max(1.0, max_abs(m.Qtilde)));
  return rep;
}

Vector vi_map(const Vector& x, const Vector& y, const Vector& lambda, const DenseMatrix& A,
              const DenseMatrix& B, const Vector& b) {
  const Index n = b.size();
  if (A.rows() != n || B.rows() != n || A.cols() != x.size() || B.cols() != y.size() ||
      lambda.size() != n) {
    throw std::invalid_argument("vi_map: dimension mismatch");
  }
  Vector out(x.size() + y.size() + n);
  out.head(x.size()) = -A.transpose() * lambda;
  out.segment(x.size(), y.size()) = -B.transpose() * lambda;
  out.tail(n) = A * x + B * y - b;
  return out;
}

}  // namespace sasadmm
