#pragma once

#include <bit>
#include <cstdint>
#include <memory>

#include "sasadmm/data_io.hpp"
#include "sasadmm/harness.hpp"
#include "sasadmm/problem.hpp"
#include "sasadmm/solvers.hpp"

namespace fixtures {

using namespace sasadmm;

// min 1/2 (x - 1)^2 + |y|  s.t.  x - y = 0.  Solution x = y = 0, lambda = -1, F = 0.5.
inline ProblemSpec nonsmooth_1d() {
  ProblemSpec p;
  p.f = std::make_shared<QuadraticSum>(DenseMatrix::Identity(1, 1), Vector::Constant(1, -1.0), 0.5,
                                       DenseMatrix::Zero(1, 1));
  p.A = sparse_identity(1);
  p.b = Vector::Zero(1);
  p.blocks.push_back({std::make_shared<L1Norm>(1.0), sparse_identity(1, -1.0)});
  return p;
}

// min 1/2 x^2  s.t.  x = 1.  x = lambda = 1.
inline ProblemSpec alm_1d() {
  ProblemSpec p;
  p.f = std::make_shared<QuadraticSum>(DenseMatrix::Identity(1, 1), Vector::Zero(1), 0.0, DenseMatrix::Zero(1, 1));
  p.A = sparse_identity(1);
  p.b = Vector::Constant(1, 1.0);
  return p;
}

// The one-iteration hand-trace settings: beta = 1, m = 1, eta = 0.5, H = M = 1, Plain.
inline SolverConfig hand_trace_config(StepsizePair pair) {
  SolverConfig c;
  c.beta = 1.0;
  c.pair = pair;
  c.fixed_inner = InnerStep{1, 0.5};
  c.mk_mode = MkMode::Fixed;
  c.fixed_rho = 1.0;
  c.estimator = EstimatorMode::Plain;
  return c;
}

inline SparseMatrix to_sparse(const DenseMatrix& M) {
  SparseMatrix S = M.sparseView(0.0, 0.0);
  S.makeCompressed();
  return S;
}

inline Vector random_vector(Index n, Rng& rng, double scale = 1.0) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = scale * rng.normal();
  return v;
}

inline DenseMatrix random_matrix(Index r, Index c, Rng& rng) {
  DenseMatrix M(r, c);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < c; ++j) M(i, j) = rng.normal();
  return M;
}

inline bool bit_equal(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) return false;
  for (Index i = 0; i < a.size(); ++i)
    if (std::bit_cast<std::uint64_t>(a[i]) != std::bit_cast<std::uint64_t>(b[i])) return false;
  return true;
}

}  // namespace fixtures
