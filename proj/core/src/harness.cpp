#include "sasadmm/harness.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>

namespace sasadmm {

const char* to_string(RowMode m) { return m == RowMode::Iterate ? "iterate" : "ergodic"; }

MetricValues metrics(const ProblemSpec& problem, const Vector& x, const std::vector<Vector>& ys, double F_star) {
  if (!std::isfinite(F_star)) throw std::invalid_argument("metrics: F_star must be finite");
  MetricValues v;
  v.obj = problem.objective(x, ys);
  v.obj_err = std::abs(v.obj - F_star) / std::max(F_star, 1.0);
  v.equ_err = problem.residual(x, ys).norm();
  v.opt_err = std::max(v.obj_err, v.equ_err);
  return v;
}

double optimality_residual(const ProblemSpec& problem, const Vector& x, const std::vector<Vector>& ys,
                           const Vector& lambda) {
  Vector grad;
  problem.f->full_grad(x, grad);
  const Vector g = grad - problem.A.transpose() * lambda;
  double worst = (x - problem.X.project(x - g)).cwiseAbs().maxCoeff();
  for (std::size_t i = 0; i < problem.blocks.size(); ++i) {
    const auto& blk = problem.blocks[i];
    if (ys[i].size() == 0) continue;
    const Vector v = ys[i] + blk.B.transpose() * lambda;
    worst = std::max(worst, (ys[i] - blk.g->prox(1.0, v)).cwiseAbs().maxCoeff());
  }
  const Vector r = problem.residual(x, ys);
  if (r.size() > 0) worst = std::max(worst, r.cwiseAbs().maxCoeff());
  return worst;
}

ReferenceSolution reference_solution(const QuadraticInstance& inst) {
  const KktSolution k = kkt_reference(inst);
  ReferenceSolution out;
  out.x = k.x;
  if (inst.has_y_block()) out.ys.push_back(k.y);
  out.lambda = k.lambda;
  out.F_star = k.objective;
  out.optimality_residual = optimality_residual(inst.spec, out.x, out.ys, out.lambda);
  return out;
}

ReferenceSolution reference_solution(const ProblemSpec& problem, const ReferenceOptions& opts) {
  SolverConfig cfg;
  const std::size_t q = problem.blocks.size();
  cfg.method = q == 0 ? Method::AsAlm : q == 1 ? Method::SasAdmm : Method::PartialJacobi;
  cfg.beta = opts.beta;
  cfg.pair = q == 0 ? StepsizePair{0.0, 1.0} : opts.pair;
  cfg.estimator = EstimatorMode::Full;
  cfg.mk_mode = MkMode::Strict;
  cfg.fixed_inner = InnerStep{opts.inner_m, 1.0 / (2.0 * problem.f->nu())};
  SolverContext ctx = make_context(problem, cfg);
  SolverState st = init_state(ctx);

  auto change = [](const Vector& a, const Vector& b) { return a.size() ? (a - b).cwiseAbs().maxCoeff() : 0.0; };
  auto scale = [](const Vector& a) { return a.size() ? a.cwiseAbs().maxCoeff() : 0.0; };
  bool converged = false;
  for (long k = 0; k < opts.max_outer; ++k) {
    const Vector x0 = st.x;
    const std::vector<Vector> y0 = st.ys;
    const Vector l0 = st.lambda;
    step(ctx, st);
    double d = std::max(change(st.x, x0), change(st.lambda, l0));
    double s = std::max({1.0, scale(st.x), scale(st.lambda)});
    for (std::size_t i = 0; i < q; ++i) {
      d = std::max(d, change(st.ys[i], y0[i]));
      s = std::max(s, scale(st.ys[i]));
    }
    if (!std::isfinite(d)) throw std::runtime_error("reference_solution: iterates diverged");
    if (d < opts.change_tol * s) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw std::runtime_error("reference_solution: no convergence within " + std::to_string(opts.max_outer) +
                             " outer iterations");
  }
  ReferenceSolution out;
  out.x = st.x;
  out.ys = st.ys;
  out.lambda = st.lambda;
  out.iterations = st.iter;
  out.F_star = problem.objective(out.x, out.ys);
  out.optimality_residual = optimality_residual(problem, out.x, out.ys, out.lambda);
  if (!(out.optimality_residual <= opts.certify_tol)) {
    throw std::runtime_error("reference_solution: optimality residual " + format_real(out.optimality_residual) +
                             " exceeds " + format_real(opts.certify_tol));
  }
  return out;
}

double rate_fit(std::span<const double> T, std::span<const double> err) {
  if (T.size() != err.size()) throw std::invalid_argument("rate_fit: size mismatch");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < T.size(); ++i) {
    if (T[i] > 0.0 && err[i] > 0.0 && std::isfinite(err[i])) {
      lx.push_back(std::log(T[i]));
      ly.push_back(std::log(err[i]));
    }
  }
  if (lx.size() < 5) throw std::invalid_argument("rate_fit: need at least 5 rows with positive T and error");
  const double n = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (sxx == 0.0) throw std::invalid_argument("rate_fit: all T values coincide");
  return sxy / sxx;
}

double rate_fit(const std::vector<MetricRow>& rows, long ergodic_start_iter) {
  std::vector<double> T, err;
  for (const auto& r : rows) {
    if (r.mode != RowMode::Ergodic) continue;
    T.push_back(static_cast<double>(r.iter - ergodic_start_iter));
    err.push_back(r.opt_err);
  }
  return rate_fit(T, err);
}

void write_csv(const std::vector<std::pair<std::string, std::string>>& echo, const std::vector<MetricRow>& rows,
               std::ostream& out) {
  for (const auto& [k, v] : echo) out << "# " << k << " = " << v << '\n';
  out << kCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.iter << ',' << format_real(r.time_s) << ',' << to_string(r.mode) << ',' << format_real(r.obj) << ','
        << format_real(r.obj_err) << ',' << format_real(r.equ_err) << ',' << format_real(r.opt_err) << '\n';
  }
}

void write_csv(const RunRecord& record, std::ostream& out) { write_csv(record.config_echo, record.rows, out); }

void emit_csv(const RunRecord& record, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  write_csv(record, out);
  out.flush();
  if (!out) throw IoError("write to " + path + " failed");
}

namespace {

double field_double(std::string_view s, long lineno) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw ParseError(lineno, std::string(s), "not a number");
  return v;
}

}  // namespace

CsvData read_csv(std::istream& in) {
  CsvData out;
  std::string line;
  long lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto eq = line.find(" = ");
      if (eq == std::string::npos || line.size() < 2) throw ParseError(lineno, line, "malformed echo line");
      out.echo.emplace_back(line.substr(2, eq - 2), line.substr(eq + 3));
      continue;
    }
    if (!header) {
      if (line != kCsvHeader) throw ParseError(lineno, line, "unexpected CSV header");
      header = true;
      continue;
    }
    std::vector<std::string_view> f;
    std::string_view sv(line);
    while (true) {
      const auto c = sv.find(',');
      f.push_back(sv.substr(0, c));
      if (c == std::string_view::npos) break;
      sv.remove_prefix(c + 1);
    }
    if (f.size() != 7) throw ParseError(lineno, line, "expected 7 fields");
    MetricRow r;
    long it = 0;
    const auto res = std::from_chars(f[0].data(), f[0].data() + f[0].size(), it);
    if (res.ec != std::errc() || res.ptr != f[0].data() + f[0].size()) throw ParseError(lineno, std::string(f[0]), "bad iteration");
    r.iter = it;
    r.time_s = field_double(f[1], lineno);
    if (f[2] == "iterate") r.mode = RowMode::Iterate;
    else if (f[2] == "ergodic") r.mode = RowMode::Ergodic;
    else throw ParseError(lineno, std::string(f[2]), "mode must be iterate or ergodic");
    r.obj = field_double(f[3], lineno);
    r.obj_err = field_double(f[4], lineno);
    r.equ_err = field_double(f[5], lineno);
    r.opt_err = field_double(f[6], lineno);
    out.rows.push_back(r);
  }
  if (!header) throw ParseError(0, "", "missing CSV header");
  return out;
}

CsvData read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return read_csv(in);
}

}  // namespace sasadmm
