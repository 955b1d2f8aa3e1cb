#pragma once

#include <vector>

#include "sing/contrast.hpp"
#include "sing/lngca.hpp"
#include "sing/preprocess.hpp"
#include "sing/rng.hpp"

namespace sing {

struct RankTestResult {
  std::vector<int> tested_ranks;
  Vector p_values;         // aligned with tested_ranks
  int selected_rank = 0;
  int T = 0;
  double alpha = 0.0;
};

/// Knobs for the sequential permutation test. The permutation fits estimate
/// a single component each, so small restart counts suffice.
struct RankTestConfig {
  int fit_restarts = 4;     // restarts when estimating the observed components
  int perm_restarts = 2;    // restarts per permutation fit
  int max_iter = 200;
  double tol = 1e-5;
  int jobs = 1;             // permutation iterations run on this many threads
};

/// Tests whether the r-th most non-Gaussian component of Xc is signal.
/// Estimates r components, removes the first r-1 from Xc, and compares the
/// r-th JB value against JB values of single components estimated from
/// row-wise feature permutations of the residual on n-r+1 random subjects.
double test_rank_r(const CenteredData& Xc, int r, int T, rng::Seed seed,
                   const ContrastConfig& contrast = {},
                   const RankTestConfig& cfg = {});

/// Bisection over r in [1, n-1] driven by test_rank_r p-values, starting at
/// ceil(n/2); at most ceil(log2 n) + 1 tests. selected_rank is the largest
/// rank whose test rejected (0 when none did).
RankTestResult binary_search_rank(const CenteredData& Xc, int T, double alpha,
                                  rng::Seed seed,
                                  const ContrastConfig& contrast = {},
                                  const RankTestConfig& cfg = {});

}  // namespace sing
