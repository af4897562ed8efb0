#pragma once

#include <string>
#include <vector>

#include "sasadmm/problem.hpp"

namespace sasadmm {

enum class RowMode { Iterate, Ergodic };

const char* to_string(RowMode m);

struct MetricRow {
  long iter = 0;
  double time_s = 0.0;
  RowMode mode = RowMode::Iterate;
  double obj = 0.0;
  double obj_err = 0.0;
  double equ_err = 0.0;
  double opt_err = 0.0;  ///< max(obj_err, equ_err)
};

struct MetricValues {
  double obj = 0.0;
  double obj_err = 0.0;
  double equ_err = 0.0;
  double opt_err = 0.0;
};

/// obj_err = |F - F*| / max(F*, 1), equ_err = ||A x + sum B_i y_i - b||.
/// Throws std::invalid_argument when F_star is not finite.
MetricValues metrics(const ProblemSpec& problem, const Vector& x, const std::vector<Vector>& ys, double F_star);

}  // namespace sasadmm
