#pragma once

#include <string>
#include <vector>

#include "sing/rng.hpp"

namespace sing {

/// One tidy-format result: method x SNR regime x replication x metric.
struct BenchmarkRow {
  std::string method;
  double snr_x = 0.0;
  double snr_y = 0.0;
  int rep = 0;
  std::string metric;
  double value = 0.0;
};

struct BenchmarkOptions {
  /// Scheme names: "jointica", "mcca", "rho0", "sing-small", "sing-medium",
  /// "sing-large", "sing-avg". The CLI alias "sing" expands to the four
  /// rho variants.
  std::vector<std::string> methods = {"jointica", "mcca",        "rho0",
                                      "sing-small", "sing-medium", "sing-large",
                                      "sing-avg"};
  std::vector<std::pair<double, double>> regimes = {
      {0.2, 0.2}, {0.2, 5.0}, {5.0, 0.2}, {5.0, 5.0}};
  int reps = 20;
  rng::Seed seed = 1;
  int jobs = 1;
  bool sparse = false;       // sparse-truth variant of the setting
  int restarts = 20;         // multi-start count for the separate fits
  int lngca_max_iter = 300;
  double lngca_tol = 1e-6;
  double sing_epsilon = 1e-6;
  int sing_max_iter = 3000;
};

/// Expands the CLI aliases and validates names.
std::vector<std::string> expand_method_list(const std::vector<std::string>& methods);

/// Runs the comparison study. Emits sqrt PMSE rows for S_Jx, S_Jy, M_Jx,
/// M_Jy and sqrt MSE rows for J_x, J_y per scheme, plus diagnostic rows for
/// the SING variants (min_corr_MJxy, strict_decrease, max_orth_err,
/// converged). Deterministic given the seed; replications fan out over
/// `jobs` workers.
std::vector<BenchmarkRow> run_benchmark(const BenchmarkOptions& opts);

std::string benchmark_csv(const std::vector<BenchmarkRow>& rows);

}  // namespace sing
