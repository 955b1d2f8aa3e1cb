#pragma once

#include "sing/rng.hpp"
#include "sing/types.hpp"

namespace sing {

/// Ground-truth loadings in the style of the desk-scale setting: the X
/// components are vectorized 33x33 images with a constant patch on a
/// N(0, 0.005) background, the Y components are vectorized strict lower
/// triangles of 100x100 symmetric matrices with a constant node block.
/// Rows are ordered [joint 1, joint 2, individual...]; rows are mean zero,
/// mutually orthogonal, and scaled to S S^T = p I.
///
/// The sparse variant shrinks the patches (3x3 pixels, 10-node blocks) so
/// that thresholding at 5 leaves >= 99% exact zeros.
struct Setting1Components {
  Matrix S_x;  // 3 x 1089
  Matrix S_y;  // 4 x 4950
};

Setting1Components setting1_components(bool sparse_variant = false);

struct VarianceShares {
  double joint = 0.0;
  double individual = 0.0;
  double noise = 0.0;
};

/// Everything needed to reconstruct the generated pair of datasets exactly:
/// X = M_J diag(D_x) S_Jx + M_Ix S_Ix + M_Nx N_x (and likewise Y).
struct SimulationTruth {
  Matrix X, Y;
  Matrix M_J;            // n x 2, unit columns
  Matrix M_Ix, M_Iy;     // n x 1, n x 2
  Matrix M_Nx, M_Ny;
  Vector D_x, D_y;       // signed column scales
  Matrix S_Jx, S_Ix, S_Jy, S_Iy;
  Matrix N_x, N_y;       // Gaussian components, rows orthogonal to S rows
  double snr_x = 0.0, snr_y = 0.0;
  VarianceShares r2_x, r2_y;
  rng::Seed seed = 0;
  bool sparse = false;

  Matrix joint_signal_x() const { return M_J * D_x.asDiagonal() * S_Jx; }
  Matrix joint_signal_y() const { return M_J * D_y.asDiagonal() * S_Jy; }
};

/// Draws scores and noise (subject count n, default 48), rescales the noise
/// so the realized signal-to-noise variance ratio matches the target
/// exactly, and assembles both datasets. Deterministic given the seed.
SimulationTruth setting1_generate(double snr_x, double snr_y, rng::Seed seed,
                                  int n = 48, bool sparse_variant = false);

/// Zeroes entries below threshold in absolute value, then re-centers on the
/// support, re-orthogonalizes (fills zeros only where supports overlap) and
/// rescales rows to S S^T = p I. Throws if a row becomes all zero. When
/// sparsity_out is given it receives the fraction of exact zeros.
Matrix sparsify_components(const Matrix& S, double threshold,
                           double* sparsity_out = nullptr);

}  // namespace sing
