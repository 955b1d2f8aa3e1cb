#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "sing/contrast.hpp"
#include "sing/lngca.hpp"
#include "sing/matching.hpp"
#include "sing/preprocess.hpp"
#include "sing/types.hpp"

namespace sing {

/// Settings for the penalized joint fit (curvilinear search with Cayley
/// updates). rho >= 0 weighs the chordal-distance penalty; the step size
/// starts at tau0 and backtracks geometrically until the objective
/// strictly decreases.
struct SingConfig {
  enum class RhoRule { explicit_value, jb_sum_over_10 };

  double rho = 0.0;
  RhoRule rho_rule = RhoRule::explicit_value;
  double epsilon = 1e-6;
  int max_iter = 10000;
  double tau0 = 0.01;
  double backtrack = 0.8;
  int max_backtracks = 50;
  bool joint_update = true;  // false: alternate U_x / U_y updates

  void validate() const;
};

struct JointFit {
  int r_J = 0;
  Matrix M_J;    // n x r_J, unit columns (x-side estimate, sign-fixed)
  Matrix M_Jy;   // y-side counterpart, columns aligned with M_J
  Vector D_x, D_y;
  Matrix S_Jx, S_Jy;  // r_J x p, joint loadings (rows skew-positive)
  Matrix S_Ix, S_Iy;  // individual loadings
  Matrix M_Ix, M_Iy;  // individual scores with their natural column scale
  Matrix U_x, U_y;    // unmixing matrices at convergence
  std::vector<double> objective_trace;
  bool converged = false;
  bool stalled = false;
  int iterations = 0;
  Vector matched_chordal;  // per joint column, unwhitener-based distance

  // Diagnostics accumulated over all accepted steps.
  double max_orthogonality_error = 0.0;
  bool all_steps_decreased = true;

  /// Joint signal reconstruction M_J diag(D) S_J for one dataset.
  Matrix joint_signal_x() const;
  Matrix joint_signal_y() const;
};

/// Eq.-style penalized objective:
///   -sum f(u_xl Xw) - sum f(u_yl Yw)
///   + rho * sum_{l<=r_J} d(Lx_inv u_xl, Ly_inv u_yl).
double sing_objective(const Matrix& Ux, const Matrix& Uy, const Matrix& Xw,
                      const Matrix& Yw, const Matrix& Lx_inv,
                      const Matrix& Ly_inv, int r_J, double rho,
                      const ContrastConfig& contrast = {});

/// Gradient of the rho * d(L_inv u, a) penalty term with respect to u,
/// where a is the unit vector L_inv_other u_other / ||.||.
Vector penalty_gradient(const Vector& u_xl, const Vector& a_yl,
                        const Matrix& L_inv_x, double rho);

/// One joint Cayley update: U <- U (I - tau/2 W)(I + tau/2 W)^{-1} with
/// W = U^T G - G^T U built from the (rows-as-gradients) matrices. The
/// inverse is applied by a linear solve. Orthonormality is preserved.
std::pair<Matrix, Matrix> curvilinear_step(const Matrix& Ux, const Matrix& Uy,
                                           const Matrix& Gx, const Matrix& Gy,
                                           double tau);

struct TauSelection {
  double tau = 0.0;
  Matrix Ux, Uy;
  double objective = 0.0;
  bool stalled = false;
  int backtracks = 0;
};

/// Backtracking step-size search: tau = tau0 * backtrack^h for the smallest
/// h giving a strict objective decrease; stalls after max_backtracks.
TauSelection select_tau(const Matrix& Ux, const Matrix& Uy, const Matrix& Gx,
                        const Matrix& Gy, double f_current,
                        const std::function<double(const Matrix&, const Matrix&)>& objective,
                        const SingConfig& cfg);

/// Runs the curvilinear search from matched initial unmixing matrices.
/// The first r_J rows of each init are the matched joint components.
JointFit fit_sing(const WhitenedData& Xw, const WhitenedData& Yw,
                  const Matrix& init_Ux, const Matrix& init_Uy, int r_J,
                  const SingConfig& cfg, const ContrastConfig& contrast = {});

/// Convenience overload that whitens the centered data first.
JointFit fit_sing(const CenteredData& Xc, const CenteredData& Yc,
                  const Matrix& init_Ux, const Matrix& init_Uy, int r_J,
                  const SingConfig& cfg, const ContrastConfig& contrast = {});

/// rho-hat rule: sum of the JB values of the joint components divided by 10.
double default_rho(const Vector& jb_joint_values);

/// Builds the decomposition (scores, scalings, loadings, sign conventions)
/// from unmixing matrices whose first r_J rows are the matched joint
/// components. fit_sing uses this as its epilogue; calling it on the
/// matched separate fits yields the rho = 0 scheme.
JointFit assemble_joint_fit(const WhitenedData& Xw, const WhitenedData& Yw,
                            Matrix Ux, Matrix Uy, int r_J);

/// Reorders the rows of the separate unmixing matrices so that greedy-
/// matched pairs come first, in match order. Returns the reordered pair.
std::pair<Matrix, Matrix> match_unmixing_for_init(const LngcaFit& fit_x,
                                                  const LngcaFit& fit_y);

}  // namespace sing
