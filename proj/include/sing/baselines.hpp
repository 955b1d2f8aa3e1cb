#pragma once

#include "sing/contrast.hpp"
#include "sing/lngca.hpp"
#include "sing/types.hpp"

namespace sing {

struct JointIcaFit {
  Matrix scores;      // n x r_J, shared across both datasets by construction
  Matrix loadings_x;  // r_J x p_x block of the concatenated components
  Matrix loadings_y;  // r_J x p_y block
  double scale_x = 1.0;  // sqrt(mean of squared elements), per dataset
  double scale_y = 1.0;

  Matrix joint_signal_x() const { return scale_x * scores * loadings_x; }
  Matrix joint_signal_y() const { return scale_y * scores * loadings_y; }
};

/// Concatenation ICA: each dataset is divided by the root mean square of
/// its elements, the datasets are concatenated feature-wise, PCA reduces to
/// r_J subject directions, and an orthogonal rotation maximizes the JB
/// statistic of the loadings.
JointIcaFit joint_ica(const Matrix& X, const Matrix& Y, int r_J,
                      const MultiStartConfig& cfg,
                      const ContrastConfig& contrast = {});

struct MccaJicaFit {
  Matrix scores_x;    // n x r_J
  Matrix scores_y;    // n x r_J, generally different from scores_x
  Matrix loadings_x;  // r_J x p_x
  Matrix loadings_y;  // r_J x p_y
  Vector canonical_correlations;  // length r_J, non-increasing in [0, 1]
  double scale_x = 1.0;
  double scale_y = 1.0;

  Matrix joint_signal_x() const { return scale_x * scores_x * loadings_x; }
  Matrix joint_signal_y() const { return scale_y * scores_y * loadings_y; }
};

/// mCCA+jICA: per-dataset PCA to r_x / r_y subject-score directions, CCA on
/// the scores (ridge-regularized), then a Joint-ICA style rotation of the
/// concatenated canonical loadings.
MccaJicaFit mcca_jica(const Matrix& X, const Matrix& Y, int r_x, int r_y,
                      int r_J, const MultiStartConfig& cfg,
                      const ContrastConfig& contrast = {});

/// CCA directions and correlations for two score matrices; exposed for the
/// eigenproblem oracle tests. Returns coefficient matrices ax (cols_x x k),
/// ay (cols_y x k) and the correlations, k = min(cols_x, cols_y).
struct CcaResult {
  Matrix ax, ay;
  Vector correlations;
};
CcaResult cca(const Matrix& A, const Matrix& B, double ridge = 1e-8);

}  // namespace sing
