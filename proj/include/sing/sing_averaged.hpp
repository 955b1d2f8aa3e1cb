#pragma once

#include <vector>

#include "sing/lngca.hpp"
#include "sing/types.hpp"

namespace sing {

struct AveragedFit {
  Matrix M_J;      // n x r_J, unit columns
  Vector D_x, D_y;
  Matrix S_Jx, S_Jy;
  int procrustes_iterations_x = 0;
  int procrustes_iterations_y = 0;

  Matrix joint_signal_x() const { return M_J * D_x.asDiagonal() * S_Jx; }
  Matrix joint_signal_y() const { return M_J * D_y.asDiagonal() * S_Jy; }
};

/// Averages matched joint score columns: columns are unit-normalized, the
/// y column is sign-aligned to have positive inner product with its x
/// partner, and the mean direction is re-normalized.
Matrix average_mixing(const Matrix& Mx_J, const Matrix& My_J);

struct ProcrustesRefit {
  Matrix S;   // r x p with S S^T = p I
  Vector D;
  int iterations = 0;
  std::vector<double> objective_trace;  // || J_hat - M_J D S ||_F^2 per pass
};

/// Alternating minimization of || J_hat - M_J D S ||_F^2 over orthogonal S
/// (Procrustes step, SVD closed form) and diagonal D. Stops when the
/// sup-norm change of D falls below d_tol, or after max_alternations.
ProcrustesRefit procrustes_refit(const Matrix& J_hat, const Matrix& M_J,
                                 Vector D_init, double d_tol = 0.1,
                                 int max_alternations = 100);

/// Full SING-averaged estimate from two separate fits: greedy matching
/// already applied (the first r_J rows/columns of each fit are the matched
/// joint components, as produced by match_unmixing_for_init ordering).
AveragedFit sing_averaged(const Matrix& Mx_joint, const Matrix& My_joint,
                          const Matrix& Sx_joint, const Matrix& Sy_joint);

}  // namespace sing
