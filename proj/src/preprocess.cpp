#include "sing/preprocess.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sing {

bool CenteredData::is_doubly_centered(double tol) const {
  const double row_err = values.rowwise().sum().cwiseAbs().maxCoeff();
  const double col_err = values.colwise().sum().cwiseAbs().maxCoeff();
  return row_err <= tol * static_cast<double>(values.cols()) &&
         col_err <= tol * static_cast<double>(values.rows());
}

CenteredData double_center(const DataMatrix& X) {
  const Matrix& V = X.values();
  Vector row_means = V.rowwise().mean();
  Eigen::RowVectorXd col_means = V.colwise().mean();
  const double grand = V.mean();
  Matrix out = V;
  out.colwise() -= row_means;
  out.rowwise() -= col_means;
  out.array() += grand;
  return CenteredData{std::move(out), 1};
}

CenteredData iterated_standardize_center(const DataMatrix& X, int max_iter,
                                         double tol) {
  Matrix M = X.values();
  const auto n = M.rows();
  const auto p = M.cols();
  const double denom = static_cast<double>(n - 1);

  auto residual = [&]() {
    Eigen::RowVectorXd col_means = M.colwise().mean();
    Eigen::RowVectorXd col_vars =
        (M.rowwise() - col_means).colwise().squaredNorm() / denom;
    const double col_err = col_means.cwiseAbs().maxCoeff();
    const double var_err = (col_vars.array() - 1.0).abs().maxCoeff();
    const double row_err = M.rowwise().mean().cwiseAbs().maxCoeff();
    return std::max({col_err, var_err, row_err});
  };

  // Always performs at least one pass; a fixed point passes through
  // unchanged.
  int iter = 0;
  bool converged = false;
  while (iter < max_iter) {
    // Standardize each feature across subjects.
    Eigen::RowVectorXd col_means = M.colwise().mean();
    M.rowwise() -= col_means;
    Eigen::RowVectorXd col_sd = (M.colwise().squaredNorm() / denom).cwiseSqrt();
    if (col_sd.minCoeff() <= 0.0)
      throw std::invalid_argument(
          "iterated_standardize_center: zero-variance feature");
    M.array().rowwise() /= col_sd.array();
    // Center each subject across features.
    M.colwise() -= M.rowwise().mean().eval();
    ++iter;
    if (residual() <= tol) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw std::runtime_error(
        "iterated_standardize_center: no convergence in " +
        std::to_string(max_iter) + " iterations, residual " +
        std::to_string(residual()));
  return CenteredData{std::move(M), iter};
}

WhitenedData whiten_matrix(const Matrix& Xc, double rank_tol) {
  const auto n = Xc.rows();
  const double p = static_cast<double>(Xc.cols());

  Matrix sigma = Xc * Xc.transpose() / p;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sigma);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("whiten: eigendecomposition failed");

  // SelfAdjointEigenSolver returns ascending order; flip to descending.
  Vector lam_all = eig.eigenvalues().reverse();
  Matrix vec_all = eig.eigenvectors().rowwise().reverse();

  const double lam_max = lam_all(0);
  if (!(lam_max > 0.0))
    throw std::invalid_argument("whiten: all eigenvalues below threshold");
  const double cutoff = rank_tol * lam_max;
  int rank = 0;
  while (rank < n && lam_all(rank) > cutoff) ++rank;
  if (rank == 0)
    throw std::invalid_argument("whiten: all eigenvalues below threshold");

  WhitenedData out;
  out.retained_rank = rank;
  out.eigenvalues = lam_all.head(rank);
  out.eigenvectors = vec_all.leftCols(rank);

  Vector inv_sqrt = out.eigenvalues.cwiseSqrt().cwiseInverse();
  out.whitener = out.eigenvectors * inv_sqrt.asDiagonal() *
                 out.eigenvectors.transpose();
  // (Xc Xc^T / n)^{1/2}: eigenvalues of Xc Xc^T / n are lambda * p / n.
  Vector unw = (out.eigenvalues * (p / static_cast<double>(n))).cwiseSqrt();
  out.unwhitener =
      out.eigenvectors * unw.asDiagonal() * out.eigenvectors.transpose();
  out.Xw = out.whitener * Xc;
  return out;
}

WhitenedData whiten(const CenteredData& Xc, double rank_tol) {
  return whiten_matrix(Xc.values, rank_tol);
}

Matrix WhitenedData::mixing_from_unmixing(const Matrix& U) const {
  if (U.cols() != whitener.rows())
    throw std::invalid_argument("mixing_from_unmixing: dimension mismatch");
  Vector sqrt_lam = eigenvalues.cwiseSqrt();
  return eigenvectors * sqrt_lam.asDiagonal() *
         (eigenvectors.transpose() * U.transpose());
}

Matrix WhitenedData::retained_projector() const {
  return eigenvectors * eigenvectors.transpose();
}

}  // namespace sing
