#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sasadmm/errors.hpp"
#include "sasadmm/numerics.hpp"
#include "sasadmm/problem.hpp"

namespace sasadmm {

struct Dataset {
  SparseMatrix features;  ///< N x l
  Vector labels;          ///< +-1
  std::vector<std::string> warnings;

  Index sample_count() const { return features.rows(); }
  Index feature_count() const { return features.cols(); }
};

struct ParseOptions {
  Index feature_count = 0;        ///< 0: largest index seen
  bool remap_zero_labels = true;  ///< label 0 becomes -1 (with a warning)
};

/// LIBSVM text: `<label> <idx>:<val> ...`, 1-based strictly increasing
/// indices. Blank lines are skipped. Throws ParseError with the line number.
Dataset parse_libsvm(std::istream& in, const ParseOptions& opts = {});
/// Throws IoError when the file cannot be opened.
Dataset read_libsvm(const std::string& path, const ParseOptions& opts = {});

void write_libsvm(const Dataset& data, std::ostream& out);
void save_libsvm(const Dataset& data, const std::string& path);

enum class NormalizeMode {
  Rows,     ///< each sample scaled to unit Euclidean norm
  Columns,  ///< each feature scaled to max-abs 1
};

/// Rescales features in place; labels are untouched. All-zero rows or
/// columns are left as they are.
void normalize(Dataset& data, NormalizeMode mode);

struct FeatureGraph {
  SparseMatrix G;                         ///< one +1/-1 row per edge
  std::vector<Index> zero_variance;       ///< columns left out of the correlation
  std::vector<std::pair<Index, Index>> edges;
};

/// Thresholded absolute Pearson correlation between feature columns. Edges
/// (i, j), i < j, are emitted in lexicographic order. Throws
/// std::invalid_argument for threshold outside (0, 1] or fewer than 2 samples.
FeatureGraph build_graph_matrix(const SparseMatrix& features, double threshold);

enum class SyntheticKind { FusedLasso, Quadratic, Alm };

const char* to_string(SyntheticKind k);

struct SyntheticOptions {
  SyntheticKind kind = SyntheticKind::FusedLasso;
  std::uint64_t seed = 0;
  // fused lasso
  Index samples = 200;
  Index features = 50;
  Index group_size = 5;           ///< features sharing one latent factor
  double active_fraction = 0.4;   ///< fraction of groups with nonzero weight
  double flip_rate = 0.05;
  double graph_threshold = 0.5;
  double mu = 1e-5;
  // quadratic / alm
  Index n1 = 1;
  Index n2 = 1;
  Index n = 1;
  Index components = 4;
};

struct SyntheticProblem {
  ProblemSpec spec;
  std::optional<Dataset> data;        ///< fused lasso
  std::optional<FeatureGraph> graph;  ///< fused lasso
  std::optional<QuadraticInstance> quad;
  std::optional<KktSolution> kkt;
};

/// Seeded generators. Fused lasso: grouped Gaussian features (unit-norm
/// rows), group-constant sparse ground truth, labels sign(a^T x) with
/// random flips. Quadratic: the 1-d default is min 1/2 x^2 + 1/2 y^2
/// s.t. x + y = 2; larger dims draw random SPD data. Alm: the 1-d default is
/// min 1/2 x^2 s.t. x = 1.
SyntheticProblem gen_synthetic(const SyntheticOptions& opts);

/// The fused-lasso dataset alone (no problem assembly).
Dataset gen_fused_lasso_data(const SyntheticOptions& opts);

}  // namespace sasadmm
