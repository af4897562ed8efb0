#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sasadmm/errors.hpp"
#include "sasadmm/metrics.hpp"
#include "sasadmm/problem.hpp"
#include "sasadmm/solvers.hpp"

namespace sasadmm {

struct ReferenceSolution {
  Vector x;
  std::vector<Vector> ys;
  Vector lambda;
  double F_star = 0.0;
  double optimality_residual = 0.0;  ///< see optimality_residual()
  long iterations = 0;               ///< 0 for direct solves
};

/// Max-abs of three residuals: x - Pi_X(x - (grad f(x) - A^T lambda)),
/// y_i - prox_1^{g_i}(y_i + B_i^T lambda), and A x + sum B_i y_i - b.
/// Zero exactly at a saddle point of f + sum g_i - lambda^T (constraint).
double optimality_residual(const ProblemSpec& problem, const Vector& x, const std::vector<Vector>& ys,
                           const Vector& lambda);

/// Exact KKT solve.
ReferenceSolution reference_solution(const QuadraticInstance& inst);

struct ReferenceOptions {
  double beta = 1.0;
  StepsizePair pair{0.5, 1.0};
  int inner_m = 50;
  double change_tol = 1e-12;
  long max_outer = 1'000'000;
  double certify_tol = 1e-8;
};

/// Deterministic full-gradient run (estimator Full, m = 50, eta = 1/(2 nu),
/// strict M_k) until the max-abs iterate change falls below change_tol.
/// Throws std::runtime_error when the run stalls or the optimality
/// residual exceeds certify_tol.
ReferenceSolution reference_solution(const ProblemSpec& problem, const ReferenceOptions& opts = {});

/// Least-squares slope of log(err) against log(T). Throws
/// std::invalid_argument with fewer than 5 positive pairs.
double rate_fit(std::span<const double> T, std::span<const double> err);

/// Same fit on ergodic rows, with T = iter - ergodic_start_iter.
double rate_fit(const std::vector<MetricRow>& rows, long ergodic_start_iter);

struct CsvData {
  std::vector<std::pair<std::string, std::string>> echo;
  std::vector<MetricRow> rows;
};

inline constexpr const char* kCsvHeader = "iter,time_s,mode,obj,obj_err,equ_err,opt_err";

/// `# key = value` echo lines, the header, then one line per row.
void write_csv(const RunRecord& record, std::ostream& out);
void write_csv(const std::vector<std::pair<std::string, std::string>>& echo, const std::vector<MetricRow>& rows,
               std::ostream& out);
/// Throws IoError on open or write failure.
void emit_csv(const RunRecord& record, const std::string& path);

/// Throws ParseError on malformed content.
CsvData read_csv(std::istream& in);
CsvData read_csv(const std::string& path);

}  // namespace sasadmm
