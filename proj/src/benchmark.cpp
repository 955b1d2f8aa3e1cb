#include "sing/benchmark.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <stdexcept>

#include "sing/baselines.hpp"
#include "sing/lngca.hpp"
#include "sing/matching.hpp"
#include "sing/metrics.hpp"
#include "sing/parallel.hpp"
#include "sing/simulate.hpp"
#include "sing/sing.hpp"
#include "sing/sing_averaged.hpp"

namespace sing {

namespace {

double abs_pearson(const Vector& a, const Vector& b) {
  const double n = static_cast<double>(a.size());
  Vector ca = a.array() - a.mean();
  Vector cb = b.array() - b.mean();
  const double denom = ca.norm() * cb.norm();
  if (denom == 0.0) return 0.0;
  (void)n;
  return std::abs(ca.dot(cb) / denom);
}

struct RepContext {
  SimulationTruth truth;
  double snr_x, snr_y;
  int rep;
  std::vector<BenchmarkRow>* rows;

  void emit(const std::string& method, const std::string& metric,
            double value) const {
    rows->push_back(
        BenchmarkRow{method, snr_x, snr_y, rep, metric, value});
  }

  void emit_errors(const std::string& method, const Matrix& S_Jx_hat,
                   const Matrix& S_Jy_hat, const Matrix& M_Jx_hat,
                   const Matrix& M_Jy_hat, const Matrix& Jx_hat,
                   const Matrix& Jy_hat) const {
    emit(method, "sqrt_pmse_S_Jx", sqrt_pmse(truth.S_Jx, S_Jx_hat));
    emit(method, "sqrt_pmse_S_Jy", sqrt_pmse(truth.S_Jy, S_Jy_hat));
    emit(method, "sqrt_pmse_M_Jx", sqrt_pmse_mixing(truth.M_J, M_Jx_hat));
    emit(method, "sqrt_pmse_M_Jy", sqrt_pmse_mixing(truth.M_J, M_Jy_hat));
    emit(method, "sqrt_mse_J_x", sqrt_mse(truth.joint_signal_x(), Jx_hat));
    emit(method, "sqrt_mse_J_y", sqrt_mse(truth.joint_signal_y(), Jy_hat));
  }

  void emit_sing_diagnostics(const std::string& method,
                             const JointFit& fit) const {
    double min_corr = 1.0;
    for (int l = 0; l < fit.r_J; ++l)
      min_corr = std::min(min_corr,
                          abs_pearson(fit.M_J.col(l), fit.M_Jy.col(l)));
    emit(method, "min_corr_MJxy", min_corr);
    emit(method, "strict_decrease", fit.all_steps_decreased ? 1.0 : 0.0);
    emit(method, "max_orth_err", fit.max_orthogonality_error);
    emit(method, "converged", fit.converged ? 1.0 : 0.0);
  }
};

}  // namespace

std::vector<std::string> expand_method_list(
    const std::vector<std::string>& methods) {
  static const std::set<std::string> known = {
      "jointica", "mcca",        "rho0",    "sing-small",
      "sing-medium", "sing-large", "sing-avg"};
  std::vector<std::string> out;
  auto add = [&](const std::string& m) {
    if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
  };
  for (const auto& m : methods) {
    if (m == "sing") {
      add("rho0");
      add("sing-small");
      add("sing-medium");
      add("sing-large");
    } else if (known.count(m)) {
      add(m);
    } else {
      throw std::invalid_argument("unknown method: " + m);
    }
  }
  return out;
}

std::vector<BenchmarkRow> run_benchmark(const BenchmarkOptions& opts) {
  const std::vector<std::string> methods = expand_method_list(opts.methods);
  auto wants = [&](const std::string& m) {
    return std::find(methods.begin(), methods.end(), m) != methods.end();
  };
  const bool needs_separate = wants("rho0") || wants("sing-small") ||
                              wants("sing-medium") || wants("sing-large") ||
                              wants("sing-avg");

  const int n_tasks = static_cast<int>(opts.regimes.size()) * opts.reps;
  std::vector<std::vector<BenchmarkRow>> buffers(n_tasks);

  parallel_for(n_tasks, opts.jobs, [&](int task) {
    const int regime = task / opts.reps;
    const int rep = task % opts.reps;
    const auto [snr_x, snr_y] = opts.regimes[regime];
    const rng::Seed rep_seed = rng::derive(opts.seed, regime, rep);

    RepContext ctx{setting1_generate(snr_x, snr_y, rep_seed, 48, opts.sparse),
                   snr_x, snr_y, rep, &buffers[task]};
    const SimulationTruth& truth = ctx.truth;

    MultiStartConfig ms = MultiStartConfig::from_base_seed(
        opts.restarts, rng::derive(rep_seed, 101), opts.lngca_max_iter,
        opts.lngca_tol);

    if (wants("jointica")) {
      JointIcaFit fit = joint_ica(truth.X, truth.Y, 2, ms);
      ctx.emit_errors("jointica", fit.loadings_x, fit.loadings_y, fit.scores,
                      fit.scores, fit.joint_signal_x(), fit.joint_signal_y());
    }
    if (wants("mcca")) {
      MccaJicaFit fit = mcca_jica(truth.X, truth.Y, 3, 4, 2, ms);
      ctx.emit_errors("mcca", fit.loadings_x, fit.loadings_y, fit.scores_x,
                      fit.scores_y, fit.joint_signal_x(),
                      fit.joint_signal_y());
    }
    if (!needs_separate) return;

    // Separate LNGCA fits at the true ranks, matched so the two joint
    // components lead.
    WhitenedData Xw = whiten_matrix(truth.X);
    WhitenedData Yw = whiten_matrix(truth.Y);
    LngcaFit fx = fit_lngca(Xw, 3, ms);
    LngcaFit fy = fit_lngca(Yw, 4, ms);
    auto [Ux0, Uy0] = match_unmixing_for_init(fx, fy);
    const int r_J = 2;

    JointFit rho0 = assemble_joint_fit(Xw, Yw, Ux0, Uy0, r_J);
    if (wants("rho0")) {
      ctx.emit_errors("rho0", rho0.S_Jx, rho0.S_Jy, rho0.M_J, rho0.M_Jy,
                      rho0.joint_signal_x(), rho0.joint_signal_y());
      ctx.emit_sing_diagnostics("rho0", rho0);
    }
    if (wants("sing-avg")) {
      AveragedFit avg = sing_averaged(
          rho0.M_J * rho0.D_x.asDiagonal(), rho0.M_Jy * rho0.D_y.asDiagonal(),
          rho0.S_Jx, rho0.S_Jy);
      ctx.emit_errors("sing-avg", avg.S_Jx, avg.S_Jy, avg.M_J, avg.M_J,
                      avg.joint_signal_x(), avg.joint_signal_y());
    }

    // rho-hat: sum of the JB values of the joint components from both
    // separate fits.
    Vector jb_joint(2 * r_J);
    jb_joint << jb_rows(rho0.S_Jx), jb_rows(rho0.S_Jy);
    const double rho_hat = 10.0 * default_rho(jb_joint);  // = sum of JB

    const std::pair<std::string, double> rho_schemes[] = {
        {"sing-small", 0.1 * rho_hat},
        {"sing-medium", rho_hat},
        {"sing-large", 20.0 * rho_hat}};
    for (const auto& [name, rho] : rho_schemes) {
      if (!wants(name)) continue;
      SingConfig cfg;
      cfg.rho = rho;
      cfg.epsilon = opts.sing_epsilon;
      cfg.max_iter = opts.sing_max_iter;
      JointFit fit = fit_sing(Xw, Yw, Ux0, Uy0, r_J, cfg);
      ctx.emit_errors(name, fit.S_Jx, fit.S_Jy, fit.M_J, fit.M_Jy,
                      fit.joint_signal_x(), fit.joint_signal_y());
      ctx.emit_sing_diagnostics(name, fit);
    }
  });

  std::vector<BenchmarkRow> rows;
  for (auto& buf : buffers)
    rows.insert(rows.end(), buf.begin(), buf.end());
  return rows;
}

std::string benchmark_csv(const std::vector<BenchmarkRow>& rows) {
  std::ostringstream out;
  out << "method,snr_x,snr_y,rep,metric,value\n";
  for (const auto& r : rows) {
    out << r.method << ',' << r.snr_x << ',' << r.snr_y << ',' << r.rep << ','
        << r.metric << ',';
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", r.value);
    out << buf << '\n';
  }
  return out.str();
}

}  // namespace sing
