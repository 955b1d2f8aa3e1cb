#include "sing/baselines.hpp"

#include <cmath>
#include <stdexcept>

namespace sing {

namespace {

double rms_scale(const Matrix& X) {
  const double ms = X.squaredNorm() / static_cast<double>(X.size());
  if (ms == 0.0) throw std::invalid_argument("baselines: zero data matrix");
  return std::sqrt(ms);
}

struct Pca {
  Matrix V;    // n x r eigenvectors
  Vector lam;  // top r eigenvalues of X X^T / p, descending
};

Pca top_pca(const Matrix& X, int r) {
  const double p = static_cast<double>(X.cols());
  Matrix sigma = X * X.transpose() / p;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sigma);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("baselines: eigendecomposition failed");
  Vector lam_all = eig.eigenvalues().reverse();
  Matrix vec_all = eig.eigenvectors().rowwise().reverse();
  if (r > lam_all.size() || lam_all(r - 1) <= 0.0)
    throw std::invalid_argument("baselines: rank exceeds data rank");
  return Pca{vec_all.leftCols(r), lam_all.head(r)};
}

// Wraps already-whitened rows (Zw Zw^T = p I) so the LNGCA fixed point can
// search for the maximizing rotation.
WhitenedData as_whitened(const Matrix& Zw) {
  WhitenedData w;
  const auto r = Zw.rows();
  w.Xw = Zw;
  w.whitener = Matrix::Identity(r, r);
  w.unwhitener = Matrix::Identity(r, r);
  w.retained_rank = static_cast<int>(r);
  w.eigenvalues = Vector::Ones(r);
  w.eigenvectors = Matrix::Identity(r, r);
  return w;
}

}  // namespace

JointIcaFit joint_ica(const Matrix& X, const Matrix& Y, int r_J,
                      const MultiStartConfig& cfg,
                      const ContrastConfig& contrast) {
  if (X.rows() != Y.rows())
    throw std::invalid_argument("joint_ica: subject counts differ");
  if (r_J < 1 || r_J > X.rows() - 1)
    throw std::invalid_argument("joint_ica: r_J out of range");

  JointIcaFit fit;
  fit.scale_x = rms_scale(X);
  fit.scale_y = rms_scale(Y);
  const auto px = X.cols();
  const auto py = Y.cols();
  Matrix Z(X.rows(), px + py);
  Z.leftCols(px) = X / fit.scale_x;
  Z.rightCols(py) = Y / fit.scale_y;

  Pca pca = top_pca(Z, r_J);
  Matrix Zw = pca.lam.cwiseSqrt().cwiseInverse().asDiagonal() *
              (pca.V.transpose() * Z);

  LngcaFit rot = fit_lngca(as_whitened(Zw), r_J, cfg, contrast);
  fit.loadings_x = rot.S.leftCols(px);
  fit.loadings_y = rot.S.rightCols(py);
  fit.scores =
      pca.V * pca.lam.cwiseSqrt().asDiagonal() * rot.U.transpose();
  return fit;
}

CcaResult cca(const Matrix& A, const Matrix& B, double ridge) {
  if (A.rows() != B.rows())
    throw std::invalid_argument("cca: row counts differ");
  Matrix Saa = A.transpose() * A;
  Matrix Sbb = B.transpose() * B;
  Saa.diagonal().array() += ridge * Saa.diagonal().maxCoeff();
  Sbb.diagonal().array() += ridge * Sbb.diagonal().maxCoeff();
  Matrix Sab = A.transpose() * B;

  auto inv_sqrt = [](const Matrix& S) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(S);
    if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() <= 0.0)
      throw std::runtime_error("cca: covariance not positive definite");
    return Matrix(eig.eigenvectors() *
                  eig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                  eig.eigenvectors().transpose());
  };
  Matrix Wa = inv_sqrt(Saa);
  Matrix Wb = inv_sqrt(Sbb);
  Matrix K = Wa * Sab * Wb;
  Eigen::BDCSVD<Matrix> svd(K, Eigen::ComputeThinU | Eigen::ComputeThinV);

  CcaResult out;
  out.ax = Wa * svd.matrixU();
  out.ay = Wb * svd.matrixV();
  out.correlations = svd.singularValues().cwiseMin(1.0).cwiseMax(0.0);
  return out;
}

MccaJicaFit mcca_jica(const Matrix& X, const Matrix& Y, int r_x, int r_y,
                      int r_J, const MultiStartConfig& cfg,
                      const ContrastConfig& contrast) {
  if (X.rows() != Y.rows())
    throw std::invalid_argument("mcca_jica: subject counts differ");
  if (r_J < 1 || r_J > std::min(r_x, r_y) || std::max(r_x, r_y) > X.rows() - 1)
    throw std::invalid_argument("mcca_jica: rank constraints violated");

  MccaJicaFit fit;
  fit.scale_x = rms_scale(X);
  fit.scale_y = rms_scale(Y);
  Matrix Xs = X / fit.scale_x;
  Matrix Ys = Y / fit.scale_y;

  Pca px = top_pca(Xs, r_x);
  Pca py = top_pca(Ys, r_y);
  Matrix Ax = px.V * px.lam.cwiseSqrt().asDiagonal();  // n x r_x PC scores
  Matrix Ay = py.V * py.lam.cwiseSqrt().asDiagonal();

  CcaResult cc = cca(Ax, Ay);
  Matrix U = Ax * cc.ax.leftCols(r_J);  // canonical variates
  Matrix V = Ay * cc.ay.leftCols(r_J);
  fit.canonical_correlations = cc.correlations.head(r_J);

  // Loadings of each dataset on its canonical variates.
  Matrix Dx = (U.transpose() * U).ldlt().solve(U.transpose() * Xs);
  Matrix Dy = (V.transpose() * V).ldlt().solve(V.transpose() * Ys);

  // Joint-ICA refinement on the concatenated loadings.
  Matrix F(r_J, Xs.cols() + Ys.cols());
  F.leftCols(Xs.cols()) = Dx;
  F.rightCols(Ys.cols()) = Dy;
  const double p_tot = static_cast<double>(F.cols());
  Matrix Sf = F * F.transpose() / p_tot;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(Sf);
  if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() <= 0.0)
    throw std::runtime_error("mcca_jica: degenerate canonical loadings");
  Matrix T = eig.eigenvectors() *
             eig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
             eig.eigenvectors().transpose();
  Matrix T_inv = eig.eigenvectors() *
                 eig.eigenvalues().cwiseSqrt().asDiagonal() *
                 eig.eigenvectors().transpose();
  Matrix Fw = T * F;

  LngcaFit rot = fit_lngca(as_whitened(Fw), r_J, cfg, contrast);
  fit.loadings_x = rot.S.leftCols(Xs.cols());
  fit.loadings_y = rot.S.rightCols(Ys.cols());
  fit.scores_x = U * T_inv * rot.U.transpose();
  fit.scores_y = V * T_inv * rot.U.transpose();
  return fit;
}

}  // namespace sing
