#include "sing/sing_averaged.hpp"

#include <cmath>
#include <stdexcept>

namespace sing {

Matrix average_mixing(const Matrix& Mx_J, const Matrix& My_J) {
  if (Mx_J.cols() != My_J.cols() || Mx_J.rows() != My_J.rows())
    throw std::invalid_argument("average_mixing: shape mismatch");
  Matrix out(Mx_J.rows(), Mx_J.cols());
  for (Eigen::Index l = 0; l < Mx_J.cols(); ++l) {
    const double nx = Mx_J.col(l).norm();
    const double ny = My_J.col(l).norm();
    if (nx == 0.0 || ny == 0.0)
      throw std::invalid_argument("average_mixing: zero column");
    Vector mx = Mx_J.col(l) / nx;
    Vector my = My_J.col(l) / ny;
    if (mx.dot(my) < 0.0) my = -my;
    Vector avg = 0.5 * (mx + my);
    const double norm = avg.norm();
    if (norm < 1e-12)
      throw std::invalid_argument(
          "average_mixing: antipodal column pair, average degenerate");
    out.col(l) = avg / norm;
  }
  return out;
}

ProcrustesRefit procrustes_refit(const Matrix& J_hat, const Matrix& M_J,
                                 Vector D_init, double d_tol,
                                 int max_alternations) {
  const auto r = M_J.cols();
  const double p = static_cast<double>(J_hat.cols());
  if (J_hat.rows() != M_J.rows())
    throw std::invalid_argument("procrustes_refit: shape mismatch");
  if (D_init.size() != r)
    throw std::invalid_argument("procrustes_refit: D size mismatch");

  ProcrustesRefit out;
  Vector D = std::move(D_init);
  Matrix S;
  for (int it = 0; it < max_alternations; ++it) {
    // S step: orthogonal Procrustes, S = sqrt(p) V U^T from the SVD of
    // J_hat^T M_J D = U L V^T.
    Matrix B = J_hat.transpose() * (M_J * D.asDiagonal());  // p x r
    Eigen::BDCSVD<Matrix> svd(B, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.rank() < r)
      throw std::runtime_error("procrustes_refit: rank-deficient SVD input");
    S = std::sqrt(p) * svd.matrixV() * svd.matrixU().transpose();  // r x p
    out.objective_trace.push_back(
        (J_hat - M_J * D.asDiagonal() * S).squaredNorm());

    // D step: quadratic minimization; rows of S are orthogonal with
    // squared norm p, so the diagonal solution decouples.
    Vector D_new = (S * J_hat.transpose() * M_J).diagonal() / p;
    for (Eigen::Index l = 0; l < r; ++l)
      D_new(l) /= M_J.col(l).squaredNorm();

    out.objective_trace.push_back(
        (J_hat - M_J * D_new.asDiagonal() * S).squaredNorm());
    const double change = (D_new - D).cwiseAbs().maxCoeff();
    D = std::move(D_new);
    out.iterations = it + 1;
    if (change < d_tol) break;
  }
  out.S = std::move(S);
  out.D = std::move(D);
  return out;
}

AveragedFit sing_averaged(const Matrix& Mx_joint, const Matrix& My_joint,
                          const Matrix& Sx_joint, const Matrix& Sy_joint) {
  AveragedFit fit;
  fit.M_J = average_mixing(Mx_joint, My_joint);

  Matrix Jx = Mx_joint * Sx_joint;
  Matrix Jy = My_joint * Sy_joint;

  Vector Dx0(Mx_joint.cols()), Dy0(My_joint.cols());
  for (Eigen::Index l = 0; l < Mx_joint.cols(); ++l)
    Dx0(l) = Mx_joint.col(l).norm();
  for (Eigen::Index l = 0; l < My_joint.cols(); ++l)
    Dy0(l) = My_joint.col(l).norm();

  ProcrustesRefit rx = procrustes_refit(Jx, fit.M_J, std::move(Dx0));
  ProcrustesRefit ry = procrustes_refit(Jy, fit.M_J, std::move(Dy0));
  fit.S_Jx = std::move(rx.S);
  fit.D_x = std::move(rx.D);
  fit.procrustes_iterations_x = rx.iterations;
  fit.S_Jy = std::move(ry.S);
  fit.D_y = std::move(ry.D);
  fit.procrustes_iterations_y = ry.iterations;
  return fit;
}

}  // namespace sing
