#include "sing/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace sing {

double chordal_distance(const Eigen::Ref<const Vector>& x,
                        const Eigen::Ref<const Vector>& y) {
  if (x.size() != y.size())
    throw std::invalid_argument("chordal_distance: dimension mismatch");
  const double nx = x.squaredNorm();
  const double ny = y.squaredNorm();
  if (nx == 0.0 || ny == 0.0)
    throw std::invalid_argument("chordal_distance: zero vector");
  const double c = x.dot(y);
  const double d = 2.0 - 2.0 * (c * c) / (nx * ny);
  return std::clamp(d, 0.0, 2.0);
}

namespace {

Matrix normalized_columns(const Matrix& M, const char* what) {
  Matrix out = M;
  for (Eigen::Index j = 0; j < M.cols(); ++j) {
    const double norm = out.col(j).norm();
    if (norm == 0.0)
      throw std::invalid_argument(std::string(what) + ": zero column " +
                                  std::to_string(j));
    out.col(j) /= norm;
  }
  return out;
}

}  // namespace

GreedyMatch greedy_match(const Matrix& Mx, const Matrix& My) {
  if (Mx.cols() < 1 || My.cols() < 1)
    throw std::invalid_argument("greedy_match: empty matrix");
  if (Mx.rows() != My.rows())
    throw std::invalid_argument("greedy_match: row count mismatch");
  Matrix Nx = normalized_columns(Mx, "greedy_match");
  Matrix Ny = normalized_columns(My, "greedy_match");
  Matrix cos2 = (Nx.transpose() * Ny).array().square();
  Matrix dist = 2.0 - 2.0 * cos2.array();

  const int rx = static_cast<int>(Mx.cols());
  const int ry = static_cast<int>(My.cols());
  const int k = std::min(rx, ry);
  std::vector<bool> used_x(rx, false), used_y(ry, false);

  GreedyMatch out;
  out.pairs.reserve(k);
  out.distances.resize(k);
  for (int m = 0; m < k; ++m) {
    double best = std::numeric_limits<double>::infinity();
    int bi = -1, bj = -1;
    for (int i = 0; i < rx; ++i) {
      if (used_x[i]) continue;
      for (int j = 0; j < ry; ++j) {
        if (used_y[j]) continue;
        if (dist(i, j) < best) {
          best = dist(i, j);
          bi = i;
          bj = j;
        }
      }
    }
    used_x[bi] = true;
    used_y[bj] = true;
    out.pairs.emplace_back(bi, bj);
    out.distances(m) = std::clamp(best, 0.0, 2.0);
  }
  return out;
}

MatchResult joint_rank_test(const Matrix& Mx, const Matrix& My, int T,
                            double alpha, rng::Seed seed) {
  if (T < 50) throw std::invalid_argument("joint_rank_test: T must be >= 50");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("joint_rank_test: alpha must be in (0, 1)");

  GreedyMatch match = greedy_match(Mx, My);
  const int k = static_cast<int>(match.pairs.size());

  Matrix Nx = normalized_columns(Mx, "joint_rank_test");
  Matrix Ny = normalized_columns(My, "joint_rank_test");
  const int n = static_cast<int>(Mx.rows());

  // psi_min over all column pairs under a random row permutation of My.
  Vector psi_min(T);
  rng::Rng gen(seed);
  Matrix perm_y(n, Ny.cols());
  for (int t = 0; t < T; ++t) {
    std::vector<int> perm = gen.permutation(n);
    for (int i = 0; i < n; ++i) perm_y.row(i) = Ny.row(perm[i]);
    // Row-permuting unit columns keeps them unit, so the smallest chordal
    // distance is 2 - 2 max |cos|^2.
    const double max_cos2 =
        (Nx.transpose() * perm_y).array().square().maxCoeff();
    psi_min(t) = 2.0 - 2.0 * max_cos2;
  }

  MatchResult out;
  out.permutation = match.pairs;
  out.distances = match.distances;
  out.T = T;
  out.alpha = alpha;
  out.p_values.resize(k);
  for (int r = 0; r < k; ++r) {
    int count = 0;
    for (int t = 0; t < T; ++t)
      if (match.distances(r) > psi_min(t)) ++count;
    out.p_values(r) = static_cast<double>(count) / static_cast<double>(T);
  }
  out.r_J = 0;
  for (int r = 0; r < k; ++r)
    if (out.p_values(r) < alpha) out.r_J = r + 1;
  for (int r = 0; r < out.r_J; ++r)
    if (out.p_values(r) >= alpha) out.nonmonotone_significance = true;
  return out;
}

MatchResult joint_rank_test(const MixingMatrix& Mx, const MixingMatrix& My,
                            int T, double alpha, rng::Seed seed) {
  return joint_rank_test(Mx.values(), My.values(), T, alpha, seed);
}

}  // namespace sing
