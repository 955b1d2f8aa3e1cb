#include "sing/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace sing {

namespace {

// Rows scaled to variance one (uncentered rows keep their mean).
Matrix scale_rows_unit_variance(const Matrix& S) {
  Matrix out = S;
  const double p = static_cast<double>(S.cols());
  for (Eigen::Index i = 0; i < S.rows(); ++i) {
    const double mean = S.row(i).mean();
    const double var = S.row(i).squaredNorm() / p - mean * mean;
    if (var <= 0.0)
      throw std::invalid_argument("pmse: constant row has no scale");
    out.row(i) /= std::sqrt(var);
  }
  return out;
}

// Maximum-total-|gain| assignment via exhaustive search, r <= 8.
std::vector<int> assign_exhaustive(const Matrix& gain) {
  const int r = static_cast<int>(gain.rows());
  std::vector<int> idx(r), best(r);
  std::iota(idx.begin(), idx.end(), 0);
  double best_total = -std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (int i = 0; i < r; ++i) total += gain(i, idx[i]);
    if (total > best_total) {
      best_total = total;
      best = idx;
    }
  } while (std::next_permutation(idx.begin(), idx.end()));
  return best;
}

// Jonker-Volgenant style shortest augmenting path assignment, O(r^3).
// Maximizes the total gain by minimizing its negation.
std::vector<int> assign_hungarian(const Matrix& gain) {
  const int n = static_cast<int>(gain.rows());
  Matrix cost = -gain;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      int j1 = 0;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> row_to_col(n);
  for (int j = 1; j <= n; ++j)
    if (p[j] > 0) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

SignedPermutation match_scaled(const Matrix& A, const Matrix& B) {
  const int r = static_cast<int>(A.rows());
  Matrix gram = A * B.transpose();
  Matrix gain = gram.cwiseAbs();
  std::vector<int> row_to_col =
      (r <= 8) ? assign_exhaustive(gain) : assign_hungarian(gain);
  // out.row(i) = sign * B.row(perm[i]); choose perm so row i of A pairs
  // with its assigned row of B.
  std::vector<int> perm(r), signs(r);
  for (int i = 0; i < r; ++i) {
    perm[i] = row_to_col[i];
    signs[i] = gram(i, row_to_col[i]) >= 0.0 ? 1 : -1;
  }
  return SignedPermutation(std::move(perm), std::move(signs));
}

PmseResult pmse_from_scaled(const Matrix& A, const Matrix& B) {
  SignedPermutation P = match_scaled(A, B);
  const double rp = static_cast<double>(A.rows()) * A.cols();
  const double value = (A - P.apply(B)).squaredNorm() / rp;
  return PmseResult{std::sqrt(std::max(0.0, value)), std::move(P)};
}

}  // namespace

SignedPermutation match_rows_min_frobenius(const Matrix& A, const Matrix& B) {
  if (A.rows() != B.rows() || A.cols() != B.cols())
    throw std::invalid_argument("match_rows_min_frobenius: shape mismatch");
  return match_scaled(A, B);
}

SignedPermutation match_for_pmse(const Matrix& S, const Matrix& S_hat) {
  if (S.rows() != S_hat.rows() || S.cols() != S_hat.cols())
    throw std::invalid_argument("match_for_pmse: shape mismatch");
  return match_scaled(scale_rows_unit_variance(S),
                      scale_rows_unit_variance(S_hat));
}

PmseResult pmse_components(const Matrix& S, const Matrix& S_hat) {
  if (S.rows() != S_hat.rows() || S.cols() != S_hat.cols())
    throw std::invalid_argument("pmse: shape mismatch");
  return pmse_from_scaled(scale_rows_unit_variance(S),
                          scale_rows_unit_variance(S_hat));
}

double sqrt_pmse(const Matrix& S, const Matrix& S_hat) {
  return pmse_components(S, S_hat).sqrt_pmse;
}

PmseResult pmse_mixing(const Matrix& M, const Matrix& M_hat) {
  if (M.rows() != M_hat.rows() || M.cols() != M_hat.cols())
    throw std::invalid_argument("pmse_mixing: shape mismatch");
  const double sqrt_n = std::sqrt(static_cast<double>(M.rows()));
  auto unit_cols_t = [&](const Matrix& m) {
    Matrix t = m.transpose();  // rows are columns of m
    for (Eigen::Index i = 0; i < t.rows(); ++i) {
      const double norm = t.row(i).norm();
      if (norm == 0.0)
        throw std::invalid_argument("pmse_mixing: zero column");
      t.row(i) *= sqrt_n / norm;
    }
    return t;
  };
  return pmse_from_scaled(unit_cols_t(M), unit_cols_t(M_hat));
}

double sqrt_pmse_mixing(const Matrix& M, const Matrix& M_hat) {
  return pmse_mixing(M, M_hat).sqrt_pmse;
}

double sqrt_mse(const Matrix& J, const Matrix& J_hat) {
  if (J.rows() != J_hat.rows() || J.cols() != J_hat.cols())
    throw std::invalid_argument("sqrt_mse: shape mismatch");
  const double denom = J.squaredNorm();
  if (denom == 0.0) throw std::invalid_argument("sqrt_mse: zero reference");
  return std::sqrt((J - J_hat).squaredNorm() / denom);
}

VarianceDecomposition variance_decomposition(const Matrix& X,
                                             const Matrix& S_J,
                                             const Matrix& S_I) {
  if (S_J.cols() != X.cols() || S_I.cols() != X.cols())
    throw std::invalid_argument("variance_decomposition: shape mismatch");
  const double p = static_cast<double>(X.cols());
  const double total = X.squaredNorm();
  if (total == 0.0)
    throw std::invalid_argument("variance_decomposition: zero data");
  VarianceDecomposition out;
  out.r2_joint = ((X * S_J.transpose()) * S_J / p).squaredNorm() / total;
  out.r2_individual = ((X * S_I.transpose()) * S_I / p).squaredNorm() / total;
  out.r2_noise = 1.0 - out.r2_joint - out.r2_individual;
  out.snr = out.r2_signal() / out.r2_noise;
  return out;
}

}  // namespace sing
