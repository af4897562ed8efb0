#include "sasadmm/data_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <memory>
#include <ostream>
#include <sstream>
#include <string_view>

namespace sasadmm {

namespace {

std::string_view strip_plus(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  return s;
}

bool parse_double(std::string_view s, double& out) {
  s = strip_plus(s);
  if (s.empty()) return false;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size() && std::isfinite(out);
}

bool parse_index(std::string_view s, long& out) {
  s = strip_plus(s);
  if (s.empty()) return false;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

}  // namespace

Dataset parse_libsvm(std::istream& in, const ParseOptions& opts) {
  std::vector<Triplet> trips;
  std::vector<double> labels;
  long max_index = 0;
  long zero_labels = 0;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    double label = 0.0;
    if (!parse_double(tok, label)) throw ParseError(lineno, tok, "label is not a number");
    if (label == 0.0) {
      if (!opts.remap_zero_labels) throw ParseError(lineno, tok, "label 0 is not allowed");
      ++zero_labels;
      label = -1.0;
    } else if (label != 1.0 && label != -1.0) {
      throw ParseError(lineno, tok, "label must be +1, -1 or 0");
    }
    const int row = static_cast<int>(labels.size());
    labels.push_back(label);
    long prev = 0;
    while (ls >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos) throw ParseError(lineno, tok, "expected <index>:<value>");
      long idx = 0;
      double val = 0.0;
      const std::string_view sv(tok);
      if (!parse_index(sv.substr(0, colon), idx)) throw ParseError(lineno, tok, "feature index is not an integer");
      if (!parse_double(sv.substr(colon + 1), val)) throw ParseError(lineno, tok, "feature value is not a finite number");
      if (idx < 1) throw ParseError(lineno, tok, "feature index must be >= 1");
      if (idx <= prev) throw ParseError(lineno, tok, "feature indices must be strictly increasing");
      if (opts.feature_count > 0 && idx > opts.feature_count) {
        throw ParseError(lineno, tok, "feature index exceeds feature count " + std::to_string(opts.feature_count));
      }
      prev = idx;
      max_index = std::max(max_index, idx);
      trips.emplace_back(row, static_cast<int>(idx - 1), val);
    }
  }
  if (in.bad()) throw IoError("read error while parsing LIBSVM input");
  if (labels.empty()) throw ParseError(0, "", "no samples in input");

  Dataset d;
  const Index cols = opts.feature_count > 0 ? opts.feature_count : static_cast<Index>(max_index);
  d.features.resize(static_cast<Index>(labels.size()), cols);
  d.features.setFromTriplets(trips.begin(), trips.end());
  d.features.makeCompressed();
  d.labels = Eigen::Map<const Vector>(labels.data(), static_cast<Index>(labels.size()));
  if (zero_labels > 0) {
    d.warnings.push_back(std::to_string(zero_labels) + " label(s) equal to 0 were mapped to -1");
  }
  return d;
}

Dataset read_libsvm(const std::string& path, const ParseOptions& opts) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return parse_libsvm(in, opts);
}

void write_libsvm(const Dataset& data, std::ostream& out) {
  for (Index r = 0; r < data.features.rows(); ++r) {
    out << (data.labels[r] > 0 ? "+1" : "-1");
    for (SparseMatrix::InnerIterator it(data.features, r); it; ++it) {
      out << ' ' << (it.col() + 1) << ':' << format_real(it.value());
    }
    out << '\n';
  }
}

void save_libsvm(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  write_libsvm(data, out);
  out.flush();
  if (!out) throw IoError("write to " + path + " failed");
}

void normalize(Dataset& data, NormalizeMode mode) {
  SparseMatrix& F = data.features;
  if (mode == NormalizeMode::Rows) {
    for (Index r = 0; r < F.outerSize(); ++r) {
      double sq = 0.0;
      for (SparseMatrix::InnerIterator it(F, r); it; ++it) sq += it.value() * it.value();
      if (sq == 0.0) continue;
      const double inv = 1.0 / std::sqrt(sq);
      for (SparseMatrix::InnerIterator it(F, r); it; ++it) it.valueRef() *= inv;
    }
    return;
  }
  Vector colmax = Vector::Zero(F.cols());
  for (Index r = 0; r < F.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(F, r); it; ++it)
      colmax[it.col()] = std::max(colmax[it.col()], std::abs(it.value()));
  for (Index r = 0; r < F.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(F, r); it; ++it)
      if (colmax[it.col()] > 0.0) it.valueRef() /= colmax[it.col()];
}

FeatureGraph build_graph_matrix(const SparseMatrix& features, double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) throw std::invalid_argument("build_graph_matrix: threshold must lie in (0, 1]");
  const Index N = features.rows();
  const Index l = features.cols();
  if (N < 2) throw std::invalid_argument("build_graph_matrix: need at least 2 samples");

  DenseMatrix Z(features);
  const Vector mean = Z.colwise().mean().transpose();
  Z.rowwise() -= mean.transpose();
  const Vector norms = Z.colwise().norm().transpose();

  FeatureGraph out;
  std::vector<char> usable(static_cast<std::size_t>(l), 1);
  for (Index i = 0; i < l; ++i) {
    // Constant columns have undefined correlation.
    if (!(norms[i] > 1e-14 * std::max(1.0, mean.cwiseAbs()[i]) * std::sqrt(static_cast<double>(N)))) {
      usable[static_cast<std::size_t>(i)] = 0;
      out.zero_variance.push_back(i);
    } else {
      Z.col(i) /= norms[i];
    }
  }
  const DenseMatrix C = Z.transpose() * Z;

  std::vector<Triplet> trips;
  for (Index i = 0; i < l; ++i) {
    if (!usable[static_cast<std::size_t>(i)]) continue;
    for (Index j = i + 1; j < l; ++j) {
      if (!usable[static_cast<std::size_t>(j)]) continue;
      // Clamp rounding overshoot so identical columns give exactly 1.
      const double corr = std::min(1.0, std::abs(C(i, j)));
      if (corr >= threshold || (threshold == 1.0 && corr >= 1.0 - 1e-12)) {
        const int row = static_cast<int>(out.edges.size());
        out.edges.emplace_back(i, j);
        trips.emplace_back(row, static_cast<int>(i), 1.0);
        trips.emplace_back(row, static_cast<int>(j), -1.0);
      }
    }
  }
  out.G.resize(static_cast<Index>(out.edges.size()), l);
  out.G.setFromTriplets(trips.begin(), trips.end());
  out.G.makeCompressed();
  return out;
}

const char* to_string(SyntheticKind k) {
  switch (k) {
    case SyntheticKind::FusedLasso: return "fused-lasso";
    case SyntheticKind::Quadratic: return "quadratic";
    case SyntheticKind::Alm: return "alm";
  }
  return "?";
}

Dataset gen_fused_lasso_data(const SyntheticOptions& o) {
  if (o.samples < 2 || o.features < 1 || o.group_size < 1) throw std::invalid_argument("gen_synthetic: dims must be positive");
  Rng rng(o.seed);
  const Index groups = (o.features + o.group_size - 1) / o.group_size;

  // Group-constant ground truth on a random subset of groups.
  Vector truth = Vector::Zero(o.features);
  for (Index g = 0; g < groups; ++g) {
    if (rng.uniform01() >= o.active_fraction) continue;
    const double w = rng.normal();
    for (Index i = g * o.group_size; i < std::min(o.features, (g + 1) * o.group_size); ++i) truth[i] = w;
  }

  DenseMatrix X(o.samples, o.features);
  for (Index j = 0; j < o.samples; ++j) {
    for (Index g = 0; g < groups; ++g) {
      const double latent = rng.normal();
      for (Index i = g * o.group_size; i < std::min(o.features, (g + 1) * o.group_size); ++i) {
        X(j, i) = latent + 0.5 * rng.normal();
      }
    }
  }
  Dataset d;
  d.features = X.sparseView();
  d.features.makeCompressed();
  normalize(d, NormalizeMode::Rows);
  d.labels.resize(o.samples);
  const Vector margins = d.features * truth;
  for (Index j = 0; j < o.samples; ++j) {
    double label = margins[j] >= 0.0 ? 1.0 : -1.0;
    if (rng.uniform01() < o.flip_rate) label = -label;
    d.labels[j] = label;
  }
  return d;
}

namespace {

DenseMatrix random_spd(Index n, Rng& rng) {
  DenseMatrix M(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) M(i, j) = rng.normal();
  DenseMatrix S = M.transpose() * M / static_cast<double>(n);
  S.diagonal().array() += 1.0;
  return 0.5 * (S + S.transpose());
}

DenseMatrix random_dense(Index r, Index c, Rng& rng) {
  DenseMatrix M(r, c);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < c; ++j) M(i, j) = rng.normal();
  return M;
}

Vector random_vector(Index n, Rng& rng) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = rng.normal();
  return v;
}

}  // namespace

SyntheticProblem gen_synthetic(const SyntheticOptions& o) {
  SyntheticProblem out;
  switch (o.kind) {
    case SyntheticKind::FusedLasso: {
      Dataset d = gen_fused_lasso_data(o);
      FeatureGraph g = build_graph_matrix(d.features, o.graph_threshold);
      out.spec = make_fused_lasso(d.features, d.labels, g.G, o.mu);
      out.data = std::move(d);
      out.graph = std::move(g);
      return out;
    }
    case SyntheticKind::Quadratic: {
      if (o.n1 < 1 || o.n2 < 1 || o.n < 1 || o.components < 1) throw std::invalid_argument("gen_synthetic: dims must be positive");
      Rng rng(o.seed);
      QuadraticInstance inst;
      if (o.n1 == 1 && o.n2 == 1 && o.n == 1) {
        const DenseMatrix I = DenseMatrix::Identity(1, 1);
        inst = make_quadratic_test(I, Vector::Zero(1), I, Vector::Zero(1), I, I, Vector::Constant(1, 2.0), o.components, rng);
      } else {
        const DenseMatrix P1 = random_spd(o.n1, rng);
        const DenseMatrix P2 = random_spd(o.n2, rng);
        const Vector q1 = random_vector(o.n1, rng);
        const Vector q2 = random_vector(o.n2, rng);
        const DenseMatrix A = random_dense(o.n, o.n1, rng);
        const DenseMatrix B = random_dense(o.n, o.n2, rng);
        const Vector b = random_vector(o.n, rng);
        inst = make_quadratic_test(P1, q1, P2, q2, A, B, b, o.components, rng);
      }
      out.kkt = kkt_reference(inst);
      out.spec = inst.spec;
      out.quad = std::move(inst);
      return out;
    }
    case SyntheticKind::Alm: {
      if (o.n1 < 1 || o.n < 1 || o.components < 1) throw std::invalid_argument("gen_synthetic: dims must be positive");
      Rng rng(o.seed);
      QuadraticInstance inst;
      if (o.n1 == 1 && o.n == 1) {
        const DenseMatrix I = DenseMatrix::Identity(1, 1);
        inst = make_quadratic_alm_test(I, Vector::Zero(1), I, Vector::Ones(1), o.components, rng);
      } else {
        if (o.n > o.n1) throw std::invalid_argument("gen_synthetic: alm needs n <= n1 for a full-rank A");
        inst = make_quadratic_alm_test(random_spd(o.n1, rng), random_vector(o.n1, rng), random_dense(o.n, o.n1, rng),
                                       random_vector(o.n, rng), o.components, rng);
      }
      out.kkt = kkt_reference(inst);
      out.spec = inst.spec;
      out.quad = std::move(inst);
      return out;
    }
  }
  return out;
}

}  // namespace sasadmm
