#include "sing/rank_test.hpp"

#include <cmath>
#include <stdexcept>

#include "sing/parallel.hpp"

namespace sing {

namespace {

// Best single-component JB value of a (possibly sub-sampled, permuted)
// matrix, over `restarts` random starts.
double best_single_component_jb(const Matrix& data, rng::Seed seed,
                                const RankTestConfig& cfg,
                                const ContrastConfig& contrast) {
  WhitenedData w = whiten_matrix(data);
  double best = -1.0;
  for (int s = 0; s < cfg.perm_restarts; ++s) {
    Matrix U0 = random_semiorthogonal_start(w, 1, rng::derive(seed, s));
    LngcaFit fit = fit_lngca_from(w, U0, cfg.max_iter, cfg.tol, contrast);
    best = std::max(best, fit.jb_values(0));
  }
  return best;
}

}  // namespace

double test_rank_r(const CenteredData& Xc, int r, int T, rng::Seed seed,
                   const ContrastConfig& contrast, const RankTestConfig& cfg) {
  const int n = static_cast<int>(Xc.values.rows());
  if (r < 1 || r > n - 1)
    throw std::invalid_argument("test_rank_r: r out of range");
  if (T < 50) throw std::invalid_argument("test_rank_r: T must be >= 50");

  WhitenedData w = whiten(Xc);
  if (r > w.retained_rank)
    throw std::invalid_argument("test_rank_r: r exceeds retained rank");
  MultiStartConfig ms = MultiStartConfig::from_base_seed(
      cfg.fit_restarts, rng::derive(seed, 7), cfg.max_iter, cfg.tol);
  LngcaFit fit = fit_lngca(w, r, ms, contrast);
  const double observed = fit.jb_values(r - 1);

  // Residual after removing the r-1 strongest components; rows of S are
  // scaled so the projector is S^T S / p.
  Matrix resid = Xc.values;
  if (r > 1) {
    const double p = static_cast<double>(Xc.values.cols());
    Matrix S_head = fit.S.topRows(r - 1);
    resid -= (Xc.values * S_head.transpose()) * S_head / p;
  }

  const int keep = n - r + 1;
  std::vector<double> null_jb(T);
  parallel_for(T, cfg.jobs, [&](int t) {
    rng::Rng gen(rng::derive(seed, 1000 + t));
    std::vector<int> rows = gen.sample_without_replacement(n, keep);
    Matrix sub(keep, resid.cols());
    for (int i = 0; i < keep; ++i) sub.row(i) = resid.row(rows[i]);
    // Permute features within each row; destroys cross-subject alignment
    // while preserving each row's marginal moments exactly.
    const int p = static_cast<int>(sub.cols());
    for (int i = 0; i < keep; ++i) {
      std::vector<int> perm = gen.permutation(p);
      Eigen::RowVectorXd row = sub.row(i);
      for (int j = 0; j < p; ++j) sub(i, j) = row(perm[j]);
    }
    null_jb[t] = best_single_component_jb(sub, rng::derive(seed, 5000 + t),
                                          cfg, contrast);
  });

  int count = 0;
  for (int t = 0; t < T; ++t)
    if (observed < null_jb[t]) ++count;
  return static_cast<double>(count) / static_cast<double>(T);
}

RankTestResult binary_search_rank(const CenteredData& Xc, int T, double alpha,
                                  rng::Seed seed,
                                  const ContrastConfig& contrast,
                                  const RankTestConfig& cfg) {
  const int n = static_cast<int>(Xc.values.rows());
  RankTestResult out;
  out.T = T;
  out.alpha = alpha;

  // Invariant: lo is the largest rank known significant (0 = none),
  // hi the smallest known non-significant (n = none).
  int lo = 0, hi = n;
  std::vector<double> pvals;
  int next_r = (n + 1) / 2;  // start from ceil(n/2)
  while (lo + 1 < hi) {
    const int r = std::min(std::max(next_r, lo + 1), hi - 1);
    const double p = test_rank_r(Xc, r, T, rng::derive(seed, r), contrast, cfg);
    out.tested_ranks.push_back(r);
    pvals.push_back(p);
    if (p < alpha)
      lo = r;
    else
      hi = r;
    next_r = (lo + hi) / 2;
  }
  out.p_values =
      Eigen::Map<Vector>(pvals.data(), static_cast<Eigen::Index>(pvals.size()));
  out.selected_rank = lo;
  return out;
}

}  // namespace sing
