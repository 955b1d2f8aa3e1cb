#include "sing/sing.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "sing/metrics.hpp"

namespace sing {

namespace {

double convergence_sqrt_pmse(const Matrix& A, const Matrix& B) {
  const double n = static_cast<double>(A.cols());
  auto scaled = [&](const Matrix& m) {
    Matrix out = m;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const double rms = m.row(i).norm() / std::sqrt(n);
      out.row(i) /= (rms > 0.0 ? rms : 1.0);
    }
    return out;
  };
  Matrix sa = scaled(A), sb = scaled(B);
  SignedPermutation P = match_rows_min_frobenius(sa, sb);
  const double v = (sa - P.apply(sb)).squaredNorm() /
                   (static_cast<double>(A.rows()) * n);
  return std::sqrt(std::max(0.0, v));
}

double orthogonality_error(const Matrix& U) {
  Matrix gram = U * U.transpose();
  gram.diagonal().array() -= 1.0;
  return gram.norm();
}

// Gradient of the full objective with respect to Ux (rows are per-component
// gradients). The contrast part is the exact gradient of -sum f(u_l Xw);
// the penalty part follows the closed form for the chordal distance.
Matrix objective_gradient(const Matrix& Ux, const Matrix& Sx, const Matrix& Xw,
                          const Matrix& Lx_inv, const Matrix& Uy,
                          const Matrix& Ly_inv, int r_J, double rho,
                          const ContrastConfig& contrast) {
  Matrix G = -jb_gradient_rows(Sx, Xw, contrast);
  if (rho > 0.0) {
    for (int l = 0; l < r_J; ++l) {
      Vector by = Ly_inv * Uy.row(l).transpose();
      const double norm = by.norm();
      if (norm == 0.0)
        throw std::invalid_argument("sing: zero unwhitened direction");
      Vector a = by / norm;
      G.row(l) +=
          penalty_gradient(Ux.row(l).transpose(), a, Lx_inv, rho).transpose();
    }
  }
  return G;
}

Matrix cayley_update(const Matrix& U, const Matrix& G, double tau) {
  const auto n = U.cols();
  Matrix W = U.transpose() * G - G.transpose() * U;  // skew-symmetric, n x n
  Matrix A = Matrix::Identity(n, n) + (tau / 2.0) * W;
  Matrix B = Matrix::Identity(n, n) - (tau / 2.0) * W;
  // U_new = U * B * A^{-1}, via a solve on A^T.
  Matrix rhs = (U * B).transpose();
  Matrix U_new = A.transpose().partialPivLu().solve(rhs).transpose();
  return U_new;
}

}  // namespace

void SingConfig::validate() const {
  if (rho < 0.0) throw std::invalid_argument("SingConfig: rho must be >= 0");
  if (!(tau0 > 0.0)) throw std::invalid_argument("SingConfig: tau0 > 0");
  if (!(backtrack > 0.0 && backtrack < 1.0))
    throw std::invalid_argument("SingConfig: backtrack in (0, 1)");
  if (max_iter < 1 || max_backtracks < 1)
    throw std::invalid_argument("SingConfig: iteration limits");
}

double sing_objective(const Matrix& Ux, const Matrix& Uy, const Matrix& Xw,
                      const Matrix& Yw, const Matrix& Lx_inv,
                      const Matrix& Ly_inv, int r_J, double rho,
                      const ContrastConfig& contrast) {
  if (r_J > std::min(Ux.rows(), Uy.rows()))
    throw std::invalid_argument("sing_objective: r_J exceeds component count");
  double value = -jb_rows(Ux * Xw, contrast).sum() -
                 jb_rows(Uy * Yw, contrast).sum();
  if (rho > 0.0) {
    for (int l = 0; l < r_J; ++l) {
      Vector bx = Lx_inv * Ux.row(l).transpose();
      Vector by = Ly_inv * Uy.row(l).transpose();
      value += rho * chordal_distance(bx, by);
    }
  }
  return value;
}

Vector penalty_gradient(const Vector& u_xl, const Vector& a_yl,
                        const Matrix& L_inv_x, double rho) {
  if (u_xl.norm() == 0.0)
    throw std::invalid_argument("penalty_gradient: zero vector");
  Vector b = L_inv_x * u_xl;
  const double q = b.squaredNorm();
  const double c = b.dot(a_yl);
  return rho * (-4.0 * c / q) * (L_inv_x * (a_yl - (c / q) * b));
}

std::pair<Matrix, Matrix> curvilinear_step(const Matrix& Ux, const Matrix& Uy,
                                           const Matrix& Gx, const Matrix& Gy,
                                           double tau) {
  return {cayley_update(Ux, Gx, tau), cayley_update(Uy, Gy, tau)};
}

TauSelection select_tau(
    const Matrix& Ux, const Matrix& Uy, const Matrix& Gx, const Matrix& Gy,
    double f_current,
    const std::function<double(const Matrix&, const Matrix&)>& objective,
    const SingConfig& cfg) {
  TauSelection sel;
  double tau = cfg.tau0;
  for (int h = 0; h <= cfg.max_backtracks; ++h, tau *= cfg.backtrack) {
    auto [ux, uy] = curvilinear_step(Ux, Uy, Gx, Gy, tau);
    if (!ux.allFinite() || !uy.allFinite()) continue;
    const double f_new = objective(ux, uy);
    if (f_new < f_current) {
      sel.tau = tau;
      sel.Ux = std::move(ux);
      sel.Uy = std::move(uy);
      sel.objective = f_new;
      sel.backtracks = h;
      return sel;
    }
  }
  sel.stalled = true;
  return sel;
}

JointFit fit_sing(const WhitenedData& Xw, const WhitenedData& Yw,
                  const Matrix& init_Ux, const Matrix& init_Uy, int r_J,
                  const SingConfig& cfg, const ContrastConfig& contrast) {
  cfg.validate();
  const int r_x = static_cast<int>(init_Ux.rows());
  const int r_y = static_cast<int>(init_Uy.rows());
  if (r_J < 0 || r_J > std::min(r_x, r_y))
    throw std::invalid_argument("fit_sing: r_J exceeds min(r_x, r_y)");
  if (init_Ux.cols() != Xw.n() || init_Uy.cols() != Yw.n())
    throw std::invalid_argument("fit_sing: init dimensions mismatch");

  Matrix Ux = symmetric_orthonormalize(init_Ux);
  Matrix Uy = symmetric_orthonormalize(init_Uy);
  const Matrix& X = Xw.Xw;
  const Matrix& Y = Yw.Xw;
  const Matrix& Lx_inv = Xw.unwhitener;
  const Matrix& Ly_inv = Yw.unwhitener;

  auto objective = [&](const Matrix& ux, const Matrix& uy) {
    return sing_objective(ux, uy, X, Y, Lx_inv, Ly_inv, r_J, cfg.rho,
                          contrast);
  };

  JointFit fit;
  fit.r_J = r_J;
  double f = objective(Ux, Uy);
  fit.objective_trace.push_back(f);

  int k = 0;
  for (; k < cfg.max_iter; ++k) {
    Matrix prev_Ux = Ux, prev_Uy = Uy;
    if (cfg.joint_update) {
      Matrix Gx = objective_gradient(Ux, Ux * X, X, Lx_inv, Uy, Ly_inv, r_J,
                                     cfg.rho, contrast);
      Matrix Gy = objective_gradient(Uy, Uy * Y, Y, Ly_inv, Ux, Lx_inv, r_J,
                                     cfg.rho, contrast);
      TauSelection sel = select_tau(Ux, Uy, Gx, Gy, f, objective, cfg);
      if (sel.stalled) {
        fit.stalled = true;
        break;
      }
      if (sel.objective >= f) fit.all_steps_decreased = false;
      Ux = std::move(sel.Ux);
      Uy = std::move(sel.Uy);
      f = sel.objective;
    } else {
      // Alternating variant: one constraint at a time.
      bool moved = false;
      {
        Matrix Gx = objective_gradient(Ux, Ux * X, X, Lx_inv, Uy, Ly_inv, r_J,
                                       cfg.rho, contrast);
        TauSelection sel =
            select_tau(Ux, Uy, Gx, Matrix::Zero(r_y, Yw.n()), f, objective,
                       cfg);
        if (!sel.stalled) {
          Ux = std::move(sel.Ux);
          f = sel.objective;
          moved = true;
        }
      }
      {
        Matrix Gy = objective_gradient(Uy, Uy * Y, Y, Ly_inv, Ux, Lx_inv, r_J,
                                       cfg.rho, contrast);
        TauSelection sel =
            select_tau(Ux, Uy, Matrix::Zero(r_x, Xw.n()), Gy, f, objective,
                       cfg);
        if (!sel.stalled) {
          Uy = std::move(sel.Uy);
          f = sel.objective;
          moved = true;
        }
      }
      if (!moved) {
        fit.stalled = true;
        break;
      }
    }
    fit.objective_trace.push_back(f);

    const double orth_err =
        std::max(orthogonality_error(Ux), orthogonality_error(Uy));
    fit.max_orthogonality_error = std::max(fit.max_orthogonality_error, orth_err);
    if (orth_err > 1e-7) {
      Ux = symmetric_orthonormalize(Ux);
      Uy = symmetric_orthonormalize(Uy);
    }

    const double delta = convergence_sqrt_pmse(prev_Ux, Ux) +
                         convergence_sqrt_pmse(prev_Uy, Uy);
    if (delta < cfg.epsilon) {
      fit.converged = true;
      ++k;
      break;
    }
  }
  fit.iterations = k;

  JointFit assembled = assemble_joint_fit(Xw, Yw, std::move(Ux), std::move(Uy),
                                          r_J);
  assembled.objective_trace = std::move(fit.objective_trace);
  assembled.converged = fit.converged;
  assembled.stalled = fit.stalled;
  assembled.iterations = fit.iterations;
  assembled.max_orthogonality_error = fit.max_orthogonality_error;
  assembled.all_steps_decreased = fit.all_steps_decreased;
  return assembled;
}

JointFit assemble_joint_fit(const WhitenedData& Xw, const WhitenedData& Yw,
                            Matrix Ux, Matrix Uy, int r_J) {
  const int r_x = static_cast<int>(Ux.rows());
  const int r_y = static_cast<int>(Uy.rows());
  if (r_J < 0 || r_J > std::min(r_x, r_y))
    throw std::invalid_argument("assemble_joint_fit: bad r_J");

  JointFit fit;
  fit.r_J = r_J;
  Matrix Sx = Ux * Xw.Xw;
  Matrix Sy = Uy * Yw.Xw;
  Matrix Mx = Xw.mixing_from_unmixing(Ux);
  Matrix My = Yw.mixing_from_unmixing(Uy);

  // Sign convention: loadings have nonnegative skewness; compensating
  // flips go into the score columns.
  auto fix_skew = [&](Matrix& S, Matrix& M, Matrix& U) {
    for (Eigen::Index l = 0; l < S.rows(); ++l) {
      if (skewness(S.row(l).transpose()) < 0.0) {
        S.row(l) *= -1.0;
        M.col(l) *= -1.0;
        U.row(l) *= -1.0;
      }
    }
  };
  fix_skew(Sx, Mx, Ux);
  fix_skew(Sy, My, Uy);

  fit.D_x.resize(r_J);
  fit.D_y.resize(r_J);
  fit.M_J.resize(Mx.rows(), r_J);
  fit.M_Jy.resize(My.rows(), r_J);
  fit.matched_chordal.resize(r_J);
  for (int l = 0; l < r_J; ++l) {
    const double dx = Mx.col(l).norm();
    const double dy = My.col(l).norm();
    if (dx == 0.0 || dy == 0.0)
      throw std::runtime_error("assemble_joint_fit: degenerate score column");
    fit.M_J.col(l) = Mx.col(l) / dx;
    fit.D_x(l) = dx;
    Vector my = My.col(l) / dy;
    // Matched columns get positive inner product; the sign moves into D_y.
    if (fit.M_J.col(l).dot(my) < 0.0) {
      my = -my;
      fit.D_y(l) = -dy;
    } else {
      fit.D_y(l) = dy;
    }
    fit.M_Jy.col(l) = my;
    Vector bx = Xw.unwhitener * Ux.row(l).transpose();
    Vector by = Yw.unwhitener * Uy.row(l).transpose();
    fit.matched_chordal(l) = chordal_distance(bx, by);
  }
  fit.S_Jx = Sx.topRows(r_J);
  fit.S_Jy = Sy.topRows(r_J);
  fit.S_Ix = Sx.bottomRows(r_x - r_J);
  fit.S_Iy = Sy.bottomRows(r_y - r_J);
  fit.M_Ix = Mx.rightCols(r_x - r_J);
  fit.M_Iy = My.rightCols(r_y - r_J);
  fit.U_x = std::move(Ux);
  fit.U_y = std::move(Uy);
  return fit;
}

JointFit fit_sing(const CenteredData& Xc, const CenteredData& Yc,
                  const Matrix& init_Ux, const Matrix& init_Uy, int r_J,
                  const SingConfig& cfg, const ContrastConfig& contrast) {
  if (Xc.values.rows() != Yc.values.rows())
    throw std::invalid_argument("fit_sing: subject counts differ");
  WhitenedData Xw = whiten(Xc);
  WhitenedData Yw = whiten(Yc);
  return fit_sing(Xw, Yw, init_Ux, init_Uy, r_J, cfg, contrast);
}

double default_rho(const Vector& jb_joint_values) {
  if (jb_joint_values.size() == 0)
    throw std::invalid_argument("default_rho: empty JB list");
  return jb_joint_values.sum() / 10.0;
}

std::pair<Matrix, Matrix> match_unmixing_for_init(const LngcaFit& fit_x,
                                                  const LngcaFit& fit_y) {
  GreedyMatch match = greedy_match(fit_x.M, fit_y.M);
  const int r_x = static_cast<int>(fit_x.U.rows());
  const int r_y = static_cast<int>(fit_y.U.rows());
  const int k = static_cast<int>(match.pairs.size());

  std::vector<bool> used_x(r_x, false), used_y(r_y, false);
  Matrix Ux(r_x, fit_x.U.cols());
  Matrix Uy(r_y, fit_y.U.cols());
  for (int m = 0; m < k; ++m) {
    Ux.row(m) = fit_x.U.row(match.pairs[m].first);
    Uy.row(m) = fit_y.U.row(match.pairs[m].second);
    used_x[match.pairs[m].first] = true;
    used_y[match.pairs[m].second] = true;
  }
  int ix = k, iy = k;
  for (int i = 0; i < r_x; ++i)
    if (!used_x[i]) Ux.row(ix++) = fit_x.U.row(i);
  for (int i = 0; i < r_y; ++i)
    if (!used_y[i]) Uy.row(iy++) = fit_y.U.row(i);
  return {std::move(Ux), std::move(Uy)};
}

Matrix JointFit::joint_signal_x() const {
  return M_J * D_x.asDiagonal() * S_Jx;
}

Matrix JointFit::joint_signal_y() const {
  return M_Jy * D_y.asDiagonal() * S_Jy;
}

}  // namespace sing
