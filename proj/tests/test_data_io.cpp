#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <sstream>

#include "fixtures.hpp"
#include "sasadmm/data_io.hpp"

using namespace sasadmm;

namespace {

Dataset parse(const std::string& text, ParseOptions opts = {}) {
  std::istringstream in(text);
  return parse_libsvm(in, opts);
}

ParseError parse_error(const std::string& text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e;
  }
  ADD_FAILURE() << "no ParseError for: " << text;
  return ParseError(-1, "", "");
}

bool same_structure(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.nonZeros() != b.nonZeros()) return false;
  for (Index r = 0; r < a.outerSize(); ++r) {
    SparseMatrix::InnerIterator ia(a, r), ib(b, r);
    for (; ia && ib; ++ia, ++ib)
      if (ia.col() != ib.col() || ia.value() != ib.value()) return false;
    if (ia || ib) return false;
  }
  return true;
}

}  // namespace

TEST(Libsvm, GrammarExample) {
  const Dataset d = parse("+1 3:0.5 7:-1.2\n");
  ASSERT_EQ(d.sample_count(), 1);
  EXPECT_EQ(d.feature_count(), 7);
  EXPECT_EQ(d.labels[0], 1.0);
  EXPECT_EQ(d.features.coeff(0, 2), 0.5);
  EXPECT_EQ(d.features.coeff(0, 6), -1.2);
  EXPECT_EQ(d.features.nonZeros(), 2);
}

TEST(Libsvm, LabelOnlyLine) {
  const Dataset d = parse("+1 1:1\n-1\n");
  ASSERT_EQ(d.sample_count(), 2);
  EXPECT_EQ(d.labels[1], -1.0);
  EXPECT_EQ(d.features.row(1).nonZeros(), 0);
}

TEST(Libsvm, MalformedValueReportsLineAndToken) {
  const ParseError e = parse_error("1 2:a");
  EXPECT_EQ(e.line, 1);
  EXPECT_EQ(e.token, "2:a");
  EXPECT_NE(std::string(e.what()).find("line 1"), std::string::npos);
}

TEST(Libsvm, ErrorsCarryLineNumbers) {
  EXPECT_EQ(parse_error("+1 1:1\n-1 0:3\n").line, 2);
  EXPECT_EQ(parse_error("+1 1:1\n\n-1 4:1 2:1\n").line, 3);
  EXPECT_EQ(parse_error("+1 1:1 1:2\n").line, 1);
  EXPECT_EQ(parse_error("+1 1:1\nx 1:1\n").line, 2);
  EXPECT_EQ(parse_error("+1 1:1\n+1 3\n").line, 2);
  EXPECT_EQ(parse_error("2 1:1\n").line, 1);
  EXPECT_EQ(parse_error("+1 1:inf\n").line, 1);
  EXPECT_EQ(parse_error("+1 1.5:1\n").line, 1);
  EXPECT_EQ(parse_error("").line, 0);
  EXPECT_EQ(parse_error("\n  \n").line, 0);
}

TEST(Libsvm, ZeroLabelsRemappedWithWarning) {
  const Dataset d = parse("0 1:1\n1 2:1\n");
  EXPECT_EQ(d.labels[0], -1.0);
  EXPECT_EQ(d.labels[1], 1.0);
  ASSERT_EQ(d.warnings.size(), 1u);
  ParseOptions strict;
  strict.remap_zero_labels = false;
  EXPECT_THROW(parse("0 1:1\n", strict), ParseError);
}

TEST(Libsvm, FeatureCountOverride) {
  ParseOptions o;
  o.feature_count = 10;
  EXPECT_EQ(parse("+1 2:1\n", o).feature_count(), 10);
  o.feature_count = 1;
  EXPECT_THROW(parse("+1 2:1\n", o), ParseError);
}

TEST(Libsvm, RoundTripIsIdentity) {
  SyntheticOptions o;
  o.seed = 12;
  o.samples = 30;
  o.features = 9;
  Dataset d = gen_fused_lasso_data(o);
  d.labels[0] = -1.0;
  std::ostringstream out;
  write_libsvm(d, out);
  ParseOptions p;
  p.feature_count = d.feature_count();
  std::istringstream in(out.str());
  const Dataset back = parse_libsvm(in, p);
  EXPECT_TRUE(same_structure(d.features, back.features));
  EXPECT_EQ(d.labels, back.labels);
  std::ostringstream again;
  write_libsvm(back, again);
  EXPECT_EQ(out.str(), again.str());
}

TEST(Libsvm, FileRoundTripAndMissingFile) {
  const auto path = std::filesystem::temp_directory_path() / "sasadmm_roundtrip.svm";
  const Dataset d = parse("+1 1:0.25 4:3\n-1 2:-7\n");
  save_libsvm(d, path.string());
  const Dataset back = read_libsvm(path.string());
  EXPECT_TRUE(same_structure(d.features, back.features));
  std::filesystem::remove(path);
  EXPECT_THROW(read_libsvm("/nonexistent/dir/file.svm"), IoError);
  EXPECT_THROW(save_libsvm(d, "/nonexistent/dir/file.svm"), IoError);
}

TEST(Normalize, PreservesLabels) {
  SyntheticOptions o;
  o.samples = 20;
  o.features = 6;
  Dataset d = gen_fused_lasso_data(o);
  const Vector labels = d.labels;
  normalize(d, NormalizeMode::Columns);
  EXPECT_EQ(d.labels, labels);
  const DenseMatrix F(d.features);
  for (Index i = 0; i < F.cols(); ++i) EXPECT_NEAR(F.col(i).cwiseAbs().maxCoeff(), 1.0, 1e-15);
  normalize(d, NormalizeMode::Rows);
  EXPECT_EQ(d.labels, labels);
  const DenseMatrix G(d.features);
  for (Index j = 0; j < G.rows(); ++j) EXPECT_NEAR(G.row(j).norm(), 1.0, 1e-14);
}

TEST(Graph, IdenticalColumnsGiveOneEdge) {
  Rng rng(1);
  DenseMatrix X(20, 2);
  for (Index j = 0; j < 20; ++j) X(j, 0) = X(j, 1) = rng.normal();
  const auto g = build_graph_matrix(fixtures::to_sparse(X), 0.9);
  ASSERT_EQ(g.G.rows(), 1);
  EXPECT_EQ(g.G.coeff(0, 0), 1.0);
  EXPECT_EQ(g.G.coeff(0, 1), -1.0);
}

TEST(Graph, IndependentColumnsGiveAtMostOneSpuriousEdge) {
  Rng rng(2);
  const DenseMatrix X = fixtures::random_matrix(1000, 20, rng);
  EXPECT_LE(build_graph_matrix(fixtures::to_sparse(X), 0.99).G.rows(), 1);
}

TEST(Graph, OrthogonalColumnsAtThresholdOne) {
  DenseMatrix X(4, 2);
  X << 1, 1, -1, 1, 1, -1, -1, -1;
  const auto g = build_graph_matrix(fixtures::to_sparse(X), 1.0);
  EXPECT_EQ(g.G.rows(), 0);
  DenseMatrix Y(4, 2);
  Y << 1, 2, 2, 4, 3, 6, 5, 10;
  EXPECT_EQ(build_graph_matrix(fixtures::to_sparse(Y), 1.0).G.rows(), 1);
}

TEST(Graph, RowsAreSignedDifferencesInLexicographicOrder) {
  SyntheticOptions o;
  o.seed = 3;
  const Dataset d = gen_fused_lasso_data(o);
  const auto g = build_graph_matrix(d.features, 0.5);
  ASSERT_GT(g.G.rows(), 0);
  ASSERT_EQ(static_cast<Index>(g.edges.size()), g.G.rows());
  for (Index r = 0; r < g.G.rows(); ++r) {
    int plus = 0, minus = 0;
    double row_abs = 0;
    for (SparseMatrix::InnerIterator it(g.G, r); it; ++it) {
      plus += it.value() == 1.0;
      minus += it.value() == -1.0;
      row_abs += std::abs(it.value());
    }
    EXPECT_EQ(plus, 1);
    EXPECT_EQ(minus, 1);
    EXPECT_EQ(row_abs, 2.0);
    if (r > 0) EXPECT_LT(g.edges[r - 1], g.edges[r]);
    EXPECT_EQ(g.G.coeff(r, g.edges[r].first), 1.0);
  }
}

TEST(Graph, ZeroVarianceColumnsExcluded) {
  DenseMatrix X(5, 3);
  X << 1, 2, 7, 2, 4, 7, 3, 6, 7, 4, 8, 7, 5, 10, 7;
  const auto g = build_graph_matrix(fixtures::to_sparse(X), 0.5);
  EXPECT_EQ(g.zero_variance, std::vector<Index>{2});
  EXPECT_EQ(g.G.rows(), 1);
}

TEST(Graph, ArgumentChecks) {
  const SparseMatrix one = sparse_identity(1);
  EXPECT_THROW(build_graph_matrix(one, 0.5), std::invalid_argument);
  EXPECT_THROW(build_graph_matrix(sparse_identity(3), 0.0), std::invalid_argument);
  EXPECT_THROW(build_graph_matrix(sparse_identity(3), 1.5), std::invalid_argument);
}

TEST(Synthetic, QuadraticDefaultIsHandFixture) {
  SyntheticOptions o;
  o.kind = SyntheticKind::Quadratic;
  const auto sp = gen_synthetic(o);
  ASSERT_TRUE(sp.kkt.has_value());
  EXPECT_NEAR(sp.kkt->x[0], 1.0, 1e-14);
  EXPECT_NEAR(sp.kkt->y[0], 1.0, 1e-14);
  EXPECT_NEAR(sp.kkt->lambda[0], 1.0, 1e-14);
  EXPECT_NEAR(sp.kkt->objective, 1.0, 1e-14);
  EXPECT_EQ(sp.spec.f->count(), o.components);
}

TEST(Synthetic, AlmDefault) {
  SyntheticOptions o;
  o.kind = SyntheticKind::Alm;
  const auto sp = gen_synthetic(o);
  EXPECT_TRUE(sp.spec.blocks.empty());
  EXPECT_NEAR(sp.kkt->x[0], 1.0, 1e-14);
  EXPECT_NEAR(sp.kkt->lambda[0], 1.0, 1e-14);
}

TEST(Synthetic, LargerQuadraticHasValidKkt) {
  SyntheticOptions o;
  o.kind = SyntheticKind::Quadratic;
  o.n1 = 5;
  o.n2 = 3;
  o.n = 4;
  o.seed = 9;
  const auto sp = gen_synthetic(o);
  EXPECT_EQ(sp.spec.n1(), 5);
  EXPECT_EQ(sp.spec.n(), 4);
  EXPECT_LE(sp.kkt->residual, 1e-10);
}

TEST(Synthetic, SameSeedSameData) {
  SyntheticOptions o;
  o.seed = 77;
  const auto a = gen_synthetic(o), b = gen_synthetic(o);
  EXPECT_TRUE(same_structure(a.data->features, b.data->features));
  EXPECT_EQ(a.data->labels, b.data->labels);
  EXPECT_TRUE(same_structure(a.graph->G, b.graph->G));
  o.seed = 78;
  EXPECT_NE(gen_synthetic(o).data->labels, a.data->labels);
}

TEST(Synthetic, FusedLassoShape) {
  SyntheticOptions o;
  o.seed = 1;
  o.samples = 200;
  o.features = 50;
  const auto sp = gen_synthetic(o);
  EXPECT_EQ(sp.spec.A.cols(), 50);
  EXPECT_EQ(sp.spec.A.rows(), sp.graph->G.rows() + 50);
  EXPECT_EQ(sp.spec.f->count(), 200);
  for (Index j = 0; j < 200; ++j) EXPECT_NEAR(sp.data->features.row(j).norm(), 1.0, 1e-14);
  const double pos = (sp.data->labels.array() > 0).cast<double>().sum();
  EXPECT_GT(pos, 40);
  EXPECT_LT(pos, 160);
}
