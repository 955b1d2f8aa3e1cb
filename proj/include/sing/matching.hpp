#pragma once

#include <utility>
#include <vector>

#include "sing/rng.hpp"
#include "sing/types.hpp"

namespace sing {

/// Squared chordal distance between the rank-one projectors of x and y,
/// computed as 2 - 2 (x^T y)^2 / (||x||^2 ||y||^2). Scale- and sign-
/// invariant, in [0, 2]. Throws on zero vectors.
double chordal_distance(const Eigen::Ref<const Vector>& x,
                        const Eigen::Ref<const Vector>& y);

struct GreedyMatch {
  /// (x column, y column) pairs in match order; distances are ascending.
  std::vector<std::pair<int, int>> pairs;
  Vector distances;
};

/// Sequentially pairs the globally closest remaining columns of Mx and My
/// by chordal distance. Ties break on the smallest (x, y) index pair.
GreedyMatch greedy_match(const Matrix& Mx, const Matrix& My);

struct MatchResult {
  std::vector<std::pair<int, int>> permutation;  // pairing, ascending distance
  Vector distances;                              // psi_r
  Vector p_values;                               // FWER-adjusted, per pair
  int r_J = 0;
  int T = 0;
  double alpha = 0.0;
  /// Set when some pair at index <= r_J has p >= alpha, which the literal
  /// "largest index with p < alpha" rule would skip over.
  bool nonmonotone_significance = false;
};

/// Permutation test for the joint rank. For each of T draws the rows of My
/// are permuted and psi_min, the smallest chordal distance over all column
/// pairs, is recorded; p_r = (1/T) sum 1(psi_r > psi_min). r_J is the
/// largest index with p < alpha. Deterministic given the seed.
MatchResult joint_rank_test(const Matrix& Mx, const Matrix& My, int T,
                            double alpha, rng::Seed seed);

MatchResult joint_rank_test(const MixingMatrix& Mx, const MixingMatrix& My,
                            int T, double alpha, rng::Seed seed);

}  // namespace sing
