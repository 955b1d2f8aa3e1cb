// Command-line surface for the SING pipeline: lngca / sing / simulate /
// benchmark / evaluate subcommands. Every run writes a manifest.json with
// the configuration snapshot, seeds, input digests and convergence flags.

#include <chrono>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sing/baselines.hpp"
#include "sing/benchmark.hpp"
#include "sing/io.hpp"
#include "sing/lngca.hpp"
#include "sing/matching.hpp"
#include "sing/metrics.hpp"
#include "sing/parallel.hpp"
#include "sing/preprocess.hpp"
#include "sing/rank_test.hpp"
#include "sing/simulate.hpp"
#include "sing/sing.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitConfig = 3;

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ =
      std::chrono::steady_clock::now();
};

sing::Matrix load_input(const fs::path& path) {
  if (!fs::exists(path))
    throw std::runtime_error("input not found: " + path.string());
  return sing::io::read_matrix(path);
}

struct LngcaArgs {
  std::string input;
  int r = 0;
  bool saturated = false;
  int restarts = 20;
  std::uint64_t seed = 0;
  std::string out_dir = "lngca_out";
  int max_iter = 500;
  double tol = 1e-6;
  bool binary = false;
};

int run_lngca(const LngcaArgs& a) {
  Timer timer;
  sing::Matrix X;
  try {
    X = load_input(a.input);
  } catch (const std::exception& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  }
  if (!a.saturated && a.r < 1) {
    std::cerr << "config error: need -r or --saturated\n";
    return kExitConfig;
  }
  sing::WhitenedData w = sing::whiten_matrix(X);
  const int r = a.saturated ? w.retained_rank : a.r;
  if (r > w.retained_rank) {
    std::cerr << "config error: r exceeds retained rank "
              << w.retained_rank << "\n";
    return kExitConfig;
  }
  auto cfg = sing::MultiStartConfig::from_base_seed(a.restarts, a.seed,
                                                    a.max_iter, a.tol);
  sing::LngcaFit fit = sing::fit_lngca(w, r, cfg);

  fs::create_directories(a.out_dir);
  const fs::path dir(a.out_dir);
  const char* ext = a.binary ? ".bin" : ".csv";
  sing::io::write_matrix(dir / (std::string("U") + ext), fit.U, a.binary);
  sing::io::write_matrix(dir / (std::string("M") + ext), fit.M, a.binary);
  sing::io::write_matrix(dir / (std::string("S") + ext), fit.S, a.binary);
  sing::io::write_matrix(dir / (std::string("jb_values") + ext),
                         fit.jb_values.transpose(), a.binary);

  sing::io::RunManifest manifest("lngca");
  manifest.add_input(a.input);
  manifest.set("config", json{{"r", r},
                              {"saturated", a.saturated},
                              {"restarts", a.restarts},
                              {"seed", a.seed},
                              {"max_iter", a.max_iter},
                              {"tol", a.tol}});
  manifest.set("objective", fit.objective);
  manifest.set("converged", fit.converged);
  if (!fit.converged) manifest.set("warning", "no convergence; best iterate");
  manifest.set("best_seed", fit.best_seed);
  manifest.set("retained_rank", w.retained_rank);
  for (const char* f : {"U", "M", "S", "jb_values"})
    manifest.add_output(dir / (std::string(f) + ext));
  manifest.set_wall_clock(timer.seconds());
  manifest.write(dir / "manifest.json");
  std::cout << "lngca: r=" << r << " objective=" << fit.objective
            << (fit.converged ? "" : " (not converged)") << "\n";
  return kExitOk;
}

struct SingArgs {
  std::string x_path, y_path;
  std::string rho = "auto";
  std::string rj = "test";
  int restarts = 20;
  std::uint64_t seed = 0;
  std::string out_dir = "sing_out";
  int max_iter = 10000;
  double epsilon = 1e-6;
  int T = 200;
  double alpha = 0.01;
  bool binary = false;
};

int run_sing(const SingArgs& a) {
  Timer timer;
  sing::Matrix X, Y;
  try {
    X = load_input(a.x_path);
    Y = load_input(a.y_path);
  } catch (const std::exception& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  }
  if (X.rows() != Y.rows()) {
    std::cerr << "input error: row counts differ (" << X.rows() << " vs "
              << Y.rows() << ")\n";
    return kExitInput;
  }

  sing::WhitenedData Xw = sing::whiten_matrix(X);
  sing::WhitenedData Yw = sing::whiten_matrix(Y);
  auto ms = sing::MultiStartConfig::from_base_seed(a.restarts, a.seed);
  sing::LngcaFit fx = sing::fit_saturated(Xw, ms);
  sing::LngcaFit fy = sing::fit_saturated(Yw, ms);

  sing::MatchResult match = sing::joint_rank_test(
      fx.M, fy.M, a.T, a.alpha, sing::rng::derive(a.seed, 9001));

  int r_J;
  if (a.rj == "test") {
    r_J = match.r_J;
  } else {
    try {
      r_J = std::stoi(a.rj);
    } catch (...) {
      std::cerr << "config error: --rj must be an integer or 'test'\n";
      return kExitConfig;
    }
    if (r_J < 0 || r_J > static_cast<int>(match.permutation.size())) {
      std::cerr << "config error: --rj out of range\n";
      return kExitConfig;
    }
  }

  fs::create_directories(a.out_dir);
  const fs::path dir(a.out_dir);
  sing::io::RunManifest manifest("sing");
  manifest.add_input(a.x_path);
  manifest.add_input(a.y_path);
  manifest.set("match",
               json{{"r_J", match.r_J},
                    {"T", match.T},
                    {"alpha", match.alpha},
                    {"nonmonotone_significance", match.nonmonotone_significance}});
  {
    json pv = json::array(), ds = json::array();
    for (Eigen::Index i = 0; i < match.p_values.size(); ++i) {
      pv.push_back(match.p_values(i));
      ds.push_back(match.distances(i));
    }
    manifest.set("match_p_values", pv);
    manifest.set("match_distances", ds);
  }

  if (r_J == 0) {
    manifest.set("result", "no joint structure");
    manifest.set_wall_clock(timer.seconds());
    manifest.write(dir / "manifest.json");
    std::cout << "sing: no joint structure detected (r_J = 0)\n";
    return kExitOk;
  }

  auto [Ux0, Uy0] = sing::match_unmixing_for_init(fx, fy);
  sing::JointFit rho0 = sing::assemble_joint_fit(Xw, Yw, Ux0, Uy0, r_J);

  double rho_value;
  if (a.rho == "auto") {
    sing::Vector jb_joint(2 * r_J);
    jb_joint << sing::jb_rows(rho0.S_Jx), sing::jb_rows(rho0.S_Jy);
    rho_value = sing::default_rho(jb_joint);
  } else {
    try {
      rho_value = std::stod(a.rho);
    } catch (...) {
      std::cerr << "config error: --rho must be a number or 'auto'\n";
      return kExitConfig;
    }
    if (rho_value < 0) {
      std::cerr << "config error: --rho must be >= 0\n";
      return kExitConfig;
    }
  }

  sing::SingConfig cfg;
  cfg.rho = rho_value;
  cfg.epsilon = a.epsilon;
  cfg.max_iter = a.max_iter;
  sing::JointFit fit = (rho_value > 0.0)
                           ? sing::fit_sing(Xw, Yw, Ux0, Uy0, r_J, cfg)
                           : std::move(rho0);

  const char* ext = a.binary ? ".bin" : ".csv";
  auto save = [&](const char* name, const sing::Matrix& m) {
    const fs::path p = dir / (std::string(name) + ext);
    sing::io::write_matrix(p, m, a.binary);
    manifest.add_output(p);
  };
  save("M_J", fit.M_J);
  save("M_Jy", fit.M_Jy);
  save("D_x", fit.D_x.transpose());
  save("D_y", fit.D_y.transpose());
  save("S_Jx", fit.S_Jx);
  save("S_Jy", fit.S_Jy);
  save("S_Ix", fit.S_Ix);
  save("S_Iy", fit.S_Iy);
  save("M_Ix", fit.M_Ix);
  save("M_Iy", fit.M_Iy);
  {
    sing::Matrix trace(static_cast<Eigen::Index>(fit.objective_trace.size()), 1);
    for (std::size_t i = 0; i < fit.objective_trace.size(); ++i)
      trace(static_cast<Eigen::Index>(i), 0) = fit.objective_trace[i];
    save("objective_trace", trace);
  }

  manifest.set("config", json{{"rho", rho_value},
                              {"rho_mode", a.rho},
                              {"r_J", r_J},
                              {"restarts", a.restarts},
                              {"seed", a.seed},
                              {"epsilon", a.epsilon},
                              {"max_iter", a.max_iter}});
  manifest.set("converged", fit.converged);
  manifest.set("stalled", fit.stalled);
  manifest.set("iterations", fit.iterations);
  manifest.set_wall_clock(timer.seconds());
  manifest.write(dir / "manifest.json");
  std::cout << "sing: r_J=" << r_J << " rho=" << rho_value
            << " iterations=" << fit.iterations << "\n";
  return kExitOk;
}

struct SimulateArgs {
  std::string setting = "1";
  double snr_x = 0.2;
  double snr_y = 0.2;
  std::uint64_t seed = 0;
  std::string out_dir = "sim_out";
};

int run_simulate(const SimulateArgs& a) {
  bool sparse;
  if (a.setting == "1")
    sparse = false;
  else if (a.setting == "1-sparse")
    sparse = true;
  else {
    std::cerr << "config error: --setting must be 1 or 1-sparse\n";
    return kExitConfig;
  }
  if (a.snr_x <= 0 || a.snr_y <= 0) {
    std::cerr << "config error: SNR values must be positive\n";
    return kExitConfig;
  }
  sing::SimulationTruth truth =
      sing::setting1_generate(a.snr_x, a.snr_y, a.seed, 48, sparse);
  sing::io::write_simulation_truth(a.out_dir, truth);
  std::cout << "simulate: wrote " << a.out_dir << " (R2_Jx="
            << truth.r2_x.joint << ", R2_Jy=" << truth.r2_y.joint << ")\n";
  return kExitOk;
}

struct BenchmarkArgs {
  std::string methods = "sing,sing-avg,jointica,mcca";
  int reps = 20;
  std::uint64_t seed = 1;
  std::string out_dir = "benchmark_out";
  int jobs = 0;
  int restarts = 20;
  bool sparse = false;
};

int run_benchmark_cmd(const BenchmarkArgs& a) {
  Timer timer;
  sing::BenchmarkOptions opts;
  opts.methods.clear();
  std::stringstream ss(a.methods);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) opts.methods.push_back(item);
  try {
    opts.methods = sing::expand_method_list(opts.methods);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  opts.reps = a.reps;
  opts.seed = a.seed;
  opts.jobs = a.jobs > 0 ? a.jobs : sing::default_jobs();
  opts.restarts = a.restarts;
  opts.sparse = a.sparse;

  std::vector<sing::BenchmarkRow> rows = sing::run_benchmark(opts);
  fs::create_directories(a.out_dir);
  const fs::path csv = fs::path(a.out_dir) / "results.csv";
  {
    std::ofstream out(csv);
    out << sing::benchmark_csv(rows);
  }
  sing::io::RunManifest manifest("benchmark");
  manifest.set("config", json{{"methods", opts.methods},
                              {"reps", opts.reps},
                              {"seed", opts.seed},
                              {"jobs", opts.jobs},
                              {"restarts", opts.restarts},
                              {"sparse", opts.sparse}});
  manifest.add_output(csv);
  manifest.set_wall_clock(timer.seconds());
  manifest.write(fs::path(a.out_dir) / "manifest.json");
  std::cout << "benchmark: " << rows.size() << " rows -> " << csv.string()
            << "\n";
  return kExitOk;
}

struct EvaluateArgs {
  std::string components;
  std::vector<std::string> pmse_pair;
  std::vector<std::string> pmse_mixing_pair;
  std::vector<std::string> mse_pair;
};

int run_evaluate(const EvaluateArgs& a) {
  try {
    if (!a.components.empty()) {
      sing::Matrix S = load_input(a.components);
      const double p = static_cast<double>(S.cols());
      sing::Matrix gram = S * S.transpose() / p;
      gram.diagonal().array() -= 1.0;
      const double err = gram.cwiseAbs().maxCoeff();
      std::cout << "orthogonality: max |S S^T / p - I| = " << err
                << (err < 1e-6 ? " (ok)" : " (violated)") << "\n";
    }
    if (a.pmse_pair.size() == 2) {
      std::cout << "sqrt_pmse = "
                << sing::sqrt_pmse(load_input(a.pmse_pair[0]),
                                   load_input(a.pmse_pair[1]))
                << "\n";
    }
    if (a.pmse_mixing_pair.size() == 2) {
      std::cout << "sqrt_pmse_mixing = "
                << sing::sqrt_pmse_mixing(load_input(a.pmse_mixing_pair[0]),
                                          load_input(a.pmse_mixing_pair[1]))
                << "\n";
    }
    if (a.mse_pair.size() == 2) {
      std::cout << "sqrt_mse = "
                << sing::sqrt_mse(load_input(a.mse_pair[0]),
                                  load_input(a.mse_pair[1]))
                << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simultaneous non-Gaussian component analysis"};
  app.require_subcommand(1);

  LngcaArgs lngca;
  auto* c_lngca = app.add_subcommand("lngca", "Single-dataset LNGCA fit");
  c_lngca->add_option("input", lngca.input, "matrix file (.csv or .bin)")
      ->required();
  c_lngca->add_option("-r,--rank", lngca.r, "number of components");
  c_lngca->add_flag("--saturated", lngca.saturated,
                    "components = retained rank");
  c_lngca->add_option("--restarts", lngca.restarts, "random restarts");
  c_lngca->add_option("--seed", lngca.seed, "base seed");
  c_lngca->add_option("-o,--out", lngca.out_dir, "output directory");
  c_lngca->add_option("--max-iter", lngca.max_iter, "iteration cap");
  c_lngca->add_option("--tol", lngca.tol, "convergence tolerance");
  c_lngca->add_flag("--binary", lngca.binary, "write binary matrices");

  SingArgs sng;
  auto* c_sing = app.add_subcommand("sing", "Joint decomposition of two datasets");
  c_sing->add_option("x", sng.x_path, "dataset X")->required();
  c_sing->add_option("y", sng.y_path, "dataset Y")->required();
  c_sing->add_option("--rho", sng.rho, "penalty weight or 'auto'");
  c_sing->add_option("--rj", sng.rj, "joint rank or 'test'");
  c_sing->add_option("--restarts", sng.restarts, "random restarts");
  c_sing->add_option("--seed", sng.seed, "base seed");
  c_sing->add_option("-o,--out", sng.out_dir, "output directory");
  c_sing->add_option("--max-iter", sng.max_iter, "iteration cap");
  c_sing->add_option("--epsilon", sng.epsilon, "convergence tolerance");
  c_sing->add_option("-T,--permutations", sng.T, "permutation count");
  c_sing->add_option("--alpha", sng.alpha, "test level");
  c_sing->add_flag("--binary", sng.binary, "write binary matrices");

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "Generate ground-truth data");
  c_sim->add_option("--setting", sim.setting, "1 or 1-sparse");
  c_sim->add_option("--snr-x", sim.snr_x, "SNR for X");
  c_sim->add_option("--snr-y", sim.snr_y, "SNR for Y");
  c_sim->add_option("--seed", sim.seed, "seed");
  c_sim->add_option("-o,--out", sim.out_dir, "output directory");

  BenchmarkArgs bench;
  auto* c_bench = app.add_subcommand("benchmark", "Method comparison study");
  c_bench->add_option("--methods", bench.methods, "comma-separated list");
  c_bench->add_option("--reps", bench.reps, "replications per regime");
  c_bench->add_option("--seed", bench.seed, "base seed");
  c_bench->add_option("-o,--out", bench.out_dir, "output directory");
  c_bench->add_option("-j,--jobs", bench.jobs,
                      "worker threads (default: SING_JOBS or hardware)");
  c_bench->add_option("--restarts", bench.restarts, "restarts per fit");
  c_bench->add_flag("--sparse", bench.sparse, "sparse-truth variant");

  EvaluateArgs eval;
  auto* c_eval = app.add_subcommand("evaluate", "Metric / invariant checks");
  c_eval->add_option("--components", eval.components,
                     "check S S^T = p I for a component file");
  c_eval->add_option("--pmse", eval.pmse_pair, "sqrt PMSE of two matrices")
      ->expected(2);
  c_eval->add_option("--pmse-mixing", eval.pmse_mixing_pair,
                     "column-scaled sqrt PMSE")
      ->expected(2);
  c_eval->add_option("--mse", eval.mse_pair, "sqrt MSE of two matrices")
      ->expected(2);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*c_lngca) return run_lngca(lngca);
    if (*c_sing) return run_sing(sng);
    if (*c_sim) return run_simulate(sim);
    if (*c_bench) return run_benchmark_cmd(bench);
    if (*c_eval) return run_evaluate(eval);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitOk;
}
