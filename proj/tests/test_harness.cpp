#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include "fixtures.hpp"
#include "sasadmm/harness.hpp"

using namespace sasadmm;

TEST(Metrics, TracedIterate) {
  const ProblemSpec p = fixtures::nonsmooth_1d();
  const auto m = metrics(p, Vector::Constant(1, 0.2), {Vector::Zero(1)}, 0.5);
  EXPECT_NEAR(m.obj, 0.32, 1e-15);
  EXPECT_NEAR(m.obj_err, 0.18, 1e-15);
  EXPECT_NEAR(m.equ_err, 0.2, 1e-15);
  EXPECT_NEAR(m.opt_err, 0.2, 1e-15);
}

TEST(Metrics, ZeroAtSolutionAndDenominatorBranch) {
  const ProblemSpec p = fixtures::nonsmooth_1d();
  const auto m = metrics(p, Vector::Zero(1), {Vector::Zero(1)}, 0.5);
  EXPECT_EQ(m.obj_err, 0.0);
  EXPECT_EQ(m.equ_err, 0.0);
  EXPECT_EQ(m.opt_err, 0.0);
  // F* = 2 uses the F* branch of max(F*, 1); F = 2 gives zero either way.
  SyntheticOptions o;
  o.kind = SyntheticKind::Quadratic;
  const auto sp = gen_synthetic(o);
  const auto q = metrics(sp.spec, Vector::Constant(1, 2.0), {Vector::Zero(1)}, 2.0);
  EXPECT_EQ(q.obj, 2.0);
  EXPECT_EQ(q.obj_err, 0.0);
  const auto r = metrics(sp.spec, Vector::Constant(1, 2.0), {Vector::Zero(1)}, 4.0);
  EXPECT_DOUBLE_EQ(r.obj_err, 0.5);
  EXPECT_THROW(metrics(p, Vector::Zero(1), {Vector::Zero(1)}, INFINITY), std::invalid_argument);
}

TEST(Reference, NonsmoothFixture) {
  const auto ref = reference_solution(fixtures::nonsmooth_1d());
  EXPECT_NEAR(ref.F_star, 0.5, 1e-10);
  EXPECT_NEAR(ref.x[0], 0.0, 1e-10);
  EXPECT_NEAR(ref.ys[0][0], 0.0, 1e-10);
  EXPECT_NEAR(ref.lambda[0], -1.0, 1e-10);
  EXPECT_LE(ref.optimality_residual, 1e-8);
  EXPECT_GT(ref.iterations, 0);
}

TEST(Reference, QuadraticFixtureAndKktAgreement) {
  SyntheticOptions o;
  o.kind = SyntheticKind::Quadratic;
  const auto sp = gen_synthetic(o);
  const auto direct = reference_solution(*sp.quad);
  EXPECT_NEAR(direct.F_star, 1.0, 1e-14);
  EXPECT_EQ(direct.iterations, 0);

  o.n1 = 4;
  o.n2 = 3;
  o.n = 3;
  o.seed = 5;
  const auto big = gen_synthetic(o);
  const auto kk = reference_solution(*big.quad);
  EXPECT_LE((kk.x - big.kkt->x).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_LE((kk.lambda - big.kkt->lambda).cwiseAbs().maxCoeff(), 1e-8);
  // The iterative reference lands on the same point.
  const auto it = reference_solution(big.spec);
  EXPECT_LE((it.x - big.kkt->x).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_LE((it.ys[0] - big.kkt->y).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_LE((it.lambda - big.kkt->lambda).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Reference, AlmInstance) {
  SyntheticOptions o;
  o.kind = SyntheticKind::Alm;
  const auto sp = gen_synthetic(o);
  const auto ref = reference_solution(sp.spec);
  EXPECT_NEAR(ref.x[0], 1.0, 1e-10);
  EXPECT_NEAR(ref.lambda[0], 1.0, 1e-10);
}

TEST(Reference, DeterministicAcrossRepeats) {
  SyntheticOptions o;
  o.seed = 4;
  o.samples = 60;
  o.features = 8;
  o.mu = 0.05;
  const auto sp = gen_synthetic(o);
  ReferenceOptions ro;
  ro.beta = 0.1;
  const auto a = reference_solution(sp.spec, ro), b = reference_solution(sp.spec, ro);
  EXPECT_NEAR(a.F_star, b.F_star, 1e-10);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(Reference, StallIsReported) {
  ReferenceOptions ro;
  ro.max_outer = 3;
  EXPECT_THROW(reference_solution(fixtures::nonsmooth_1d(), ro), std::runtime_error);
}

TEST(OptimalityResidual, ZeroAtSaddlePoint) {
  const ProblemSpec p = fixtures::nonsmooth_1d();
  EXPECT_EQ(optimality_residual(p, Vector::Zero(1), {Vector::Zero(1)}, Vector::Constant(1, -1.0)), 0.0);
  EXPECT_GT(optimality_residual(p, Vector::Zero(1), {Vector::Zero(1)}, Vector::Constant(1, -0.5)), 0.1);
}

TEST(RateFit, ExactPowerLaw) {
  const std::vector<double> T{10, 100, 1000, 10000, 100000}, e{1, 0.1, 0.01, 0.001, 0.0001};
  EXPECT_NEAR(rate_fit(T, e), -1.0, 1e-12);
  const std::vector<double> c(5, 0.3);
  EXPECT_NEAR(rate_fit(T, c), 0.0, 1e-12);
}

TEST(RateFit, NeedsFiveUsableRows) {
  const std::vector<double> T{1, 2, 3, 4, 5}, e{1, 1, 0, 1, 1};
  EXPECT_THROW(rate_fit(T, e), std::invalid_argument);
  const std::vector<double> shortT{1, 2, 3};
  EXPECT_THROW(rate_fit(shortT, std::vector<double>{1, 2, 3}), std::invalid_argument);
}

TEST(RateFit, FromErgodicRows) {
  std::vector<MetricRow> rows;
  for (long k = 0; k <= 10; ++k) {
    MetricRow r;
    r.iter = 100 + (1L << k);
    r.mode = k == 0 ? RowMode::Iterate : RowMode::Ergodic;
    r.opt_err = 3.0 / std::pow(static_cast<double>(r.iter - 100), 2);
    rows.push_back(r);
  }
  EXPECT_NEAR(rate_fit(rows, 100), -2.0, 1e-12);
}

namespace {

std::vector<MetricRow> sample_rows() {
  std::vector<MetricRow> rows;
  Rng rng(5);
  for (long k = 0; k < 25; ++k) {
    MetricRow r;
    r.iter = k;
    r.time_s = 1e-3 * k + rng.uniform01() * 1e-7;
    r.mode = k < 8 ? RowMode::Iterate : RowMode::Ergodic;
    r.obj = 0.5 + rng.normal();
    r.obj_err = std::ldexp(rng.uniform01(), -static_cast<int>(k));
    r.equ_err = rng.uniform01() * 1e-3;
    r.opt_err = std::max(r.obj_err, r.equ_err);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace

TEST(Csv, EmptyRecordIsHeaderOnly) {
  std::ostringstream out;
  write_csv({}, {}, out);
  EXPECT_EQ(out.str(), std::string(kCsvHeader) + "\n");
}

TEST(Csv, OneRowIsTwoLines) {
  MetricRow r;
  r.iter = 3;
  r.time_s = 0.25;
  r.obj = 0.1;
  r.obj_err = 0.2;
  r.equ_err = 0.3;
  r.opt_err = 0.3;
  std::ostringstream out;
  write_csv({}, {r}, out);
  EXPECT_EQ(out.str(), std::string(kCsvHeader) +
                           "\n3,0.25,iterate,0.10000000000000001,0.20000000000000001,0.29999999999999999,"
                           "0.29999999999999999\n");
}

TEST(Csv, RoundTripIsExact) {
  const auto rows = sample_rows();
  const std::vector<std::pair<std::string, std::string>> echo{{"method", "sas-admm"}, {"beta", "0.001"}};
  std::ostringstream out;
  write_csv(echo, rows, out);
  std::istringstream in(out.str());
  const CsvData back = read_csv(in);
  EXPECT_EQ(back.echo, echo);
  ASSERT_EQ(back.rows.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(back.rows[i].iter, rows[i].iter);
    EXPECT_EQ(back.rows[i].mode, rows[i].mode);
    EXPECT_EQ(back.rows[i].time_s, rows[i].time_s);
    EXPECT_EQ(back.rows[i].obj, rows[i].obj);
    EXPECT_EQ(back.rows[i].obj_err, rows[i].obj_err);
    EXPECT_EQ(back.rows[i].equ_err, rows[i].equ_err);
    EXPECT_EQ(back.rows[i].opt_err, rows[i].opt_err);
  }
}

TEST(Csv, FileEmissionAndErrors) {
  RunRecord rec;
  rec.rows = sample_rows();
  rec.config_echo = {{"seed", "3"}};
  const auto path = std::filesystem::temp_directory_path() / "sasadmm_emit.csv";
  emit_csv(rec, path.string());
  const CsvData back = read_csv(path.string());
  EXPECT_EQ(back.rows.size(), rec.rows.size());
  std::filesystem::remove(path);
  EXPECT_THROW(emit_csv(rec, "/nonexistent/dir/out.csv"), IoError);
  EXPECT_THROW(read_csv(std::string("/nonexistent/dir/out.csv")), IoError);
}

TEST(Csv, MalformedInputReportsLine) {
  const std::string header = std::string(kCsvHeader) + "\n";
  auto line_of = [](const std::string& text) -> long {
    std::istringstream in(text);
    try {
      read_csv(in);
    } catch (const ParseError& e) {
      return e.line;
    }
    return -1;
  };
  EXPECT_EQ(line_of("# a = 1\n" + header + "1,0,iterate,1,1,1\n"), 3);
  EXPECT_EQ(line_of(header + "1,0,sideways,1,1,1,1\n"), 2);
  EXPECT_EQ(line_of(header + "x,0,iterate,1,1,1,1\n"), 2);
  EXPECT_EQ(line_of("iter,time\n"), 1);
  EXPECT_EQ(line_of("# a = 1\n"), 0);
}
