#pragma once

#include <vector>

#include "sing/contrast.hpp"
#include "sing/preprocess.hpp"
#include "sing/rng.hpp"
#include "sing/types.hpp"

namespace sing {

/// Multi-start protocol for the nonconvex fits. Restarts are independent;
/// the best objective wins, ties break on the lowest seed index.
struct MultiStartConfig {
  std::vector<rng::Seed> seeds;
  int max_iter = 500;
  double tol = 1e-6;

  MultiStartConfig() : seeds{0} {}
  explicit MultiStartConfig(std::vector<rng::Seed> s, int max_it = 500,
                            double tolerance = 1e-6);

  static MultiStartConfig from_base_seed(int n_restarts, rng::Seed base,
                                         int max_iter = 500,
                                         double tol = 1e-6);

  int n_restarts() const { return static_cast<int>(seeds.size()); }
};

struct LngcaFit {
  Matrix U;          // r x n, semi-orthogonal rows inside the retained span
  Matrix M;          // n x r, equals Xc S^T / p
  Matrix S;          // r x p, S S^T = p I
  Vector jb_values;  // descending
  double objective = 0.0;  // sum of jb_values
  int restarts_used = 0;
  rng::Seed best_seed = 0;
  bool converged = false;
  int iterations = 0;
  std::vector<double> objective_trace;  // per accepted iteration

  UnmixingMatrix unmixing() const { return UnmixingMatrix(U); }
  ComponentMatrix components() const { return ComponentMatrix(S, 1e-6); }
};

/// Estimates r maximally non-Gaussian components of whitened data by the
/// symmetric-decorrelation fixed point with a monotone line-search
/// fallback, over multiple random orthonormal starts.
LngcaFit fit_lngca(const WhitenedData& Xw, int r, const MultiStartConfig& cfg,
                   const ContrastConfig& contrast = {});

/// fit_lngca with r equal to the retained rank of the data.
LngcaFit fit_saturated(const WhitenedData& Xw, const MultiStartConfig& cfg,
                       const ContrastConfig& contrast = {});

/// Single fixed-point run from a given orthonormal start; exposed for the
/// rank test, which estimates one component per permutation.
LngcaFit fit_lngca_from(const WhitenedData& Xw, const Matrix& U0,
                        int max_iter, double tol,
                        const ContrastConfig& contrast = {});

/// Indices of argmax components whose greedy-matched absolute correlation
/// against the other initializations exceeds corr_threshold in at least
/// frac_threshold of them.
std::vector<int> reliability_filter(const std::vector<LngcaFit>& fits,
                                    int argmax_index, double corr_threshold,
                                    double frac_threshold);

/// Random r x n matrix with orthonormal rows inside the retained span of Xw.
Matrix random_semiorthogonal_start(const WhitenedData& Xw, int r,
                                   rng::Seed seed);

/// Polar factor: rows of A orthonormalized symmetrically (no row ordering
/// preference), (A A^T)^{-1/2} A computed through an SVD for stability.
Matrix symmetric_orthonormalize(const Matrix& A);

}  // namespace sing
