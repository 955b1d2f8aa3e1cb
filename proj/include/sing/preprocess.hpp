#pragma once

#include "sing/types.hpp"

namespace sing {

/// Data with row and column means removed. Produced by double_center (exact)
/// or iterated_standardize_center (converged to its tolerance).
struct CenteredData {
  Matrix values;
  int iterations_used = 1;

  bool is_doubly_centered(double tol = 1e-8) const;
};

/// One pass of (I - 11^T/n) X (I - 11^T/p); both mean sets vanish exactly.
CenteredData double_center(const DataMatrix& X);

/// Alternates feature standardization (mean 0, variance 1 across subjects)
/// with subject centering (mean 0 across features) until all three
/// conditions hold within tol. Throws on zero-variance features and on
/// non-convergence (the message reports the achieved residual).
CenteredData iterated_standardize_center(const DataMatrix& X,
                                         int max_iter = 100,
                                         double tol = 1e-6);

/// Whitened data together with the whitening operators.
///
/// whitener  = V diag(lambda)^{-1/2} V^T with lambda from Sigma = Xc Xc^T / p
/// unwhitener = (Xc Xc^T / n)^{1/2}, the operator used inside the joint
/// penalty. The two denominators differ (p vs n), so
/// whitener * unwhitener = sqrt(p/n) * (projector onto the retained span);
/// every consumer of `unwhitener` here is scale-invariant.
/// Mixing matrices are recovered with mixing_from_unmixing, which applies
/// V diag(lambda)^{1/2} V^T and therefore equals Xc S^T / p.
struct WhitenedData {
  Matrix Xw;                // whitener * Xc, n x p
  Matrix whitener;          // n x n, symmetric
  Matrix unwhitener;        // n x n, symmetric
  int retained_rank = 0;
  Vector eigenvalues;       // retained eigenvalues of Xc Xc^T / p, descending
  Matrix eigenvectors;      // corresponding eigenvectors, n x retained_rank

  Eigen::Index n() const { return Xw.rows(); }
  Eigen::Index p() const { return Xw.cols(); }

  /// M = V diag(lambda)^{1/2} V^T U^T (n x r). Identical to Xc S^T / p with
  /// S = U Xw.
  Matrix mixing_from_unmixing(const Matrix& U) const;

  /// Projector onto the retained subspace, V V^T.
  Matrix retained_projector() const;
};

WhitenedData whiten(const CenteredData& Xc, double rank_tol = 1e-10);

/// Same computation on a raw matrix. Used on simulated data that is only
/// approximately centered, mirroring how such data are analyzed.
WhitenedData whiten_matrix(const Matrix& Xc, double rank_tol = 1e-10);

}  // namespace sing
