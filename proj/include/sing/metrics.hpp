#pragma once

#include "sing/types.hpp"

namespace sing {

/// Minimizer of || A - P B ||_F^2 over signed permutations P acting on the
/// rows of B. Exhaustive enumeration for r <= 8, optimal assignment on the
/// absolute cross-Gram for larger r; both are exact minimizers.
SignedPermutation match_rows_min_frobenius(const Matrix& A, const Matrix& B);

/// Same minimizer on the PMSE scaling (rows standardized to variance one).
SignedPermutation match_for_pmse(const Matrix& S, const Matrix& S_hat);

struct PmseResult {
  double sqrt_pmse = 0.0;
  SignedPermutation permutation;
};

/// sqrt of (1/(r p)) min_P || S - P S_hat ||_F^2 with rows of both matrices
/// scaled to variance one. Value lies in [0, sqrt 2] for orthonormalized
/// mean-zero inputs.
PmseResult pmse_components(const Matrix& S, const Matrix& S_hat);
double sqrt_pmse(const Matrix& S, const Matrix& S_hat);

/// Mixing-matrix variant: columns are normalized and compared per column,
/// (1/r) min_P sum_l || m_l - (P M_hat)_l ||^2 on unit columns scaled by
/// sqrt(n) so the range matches the component metric.
PmseResult pmse_mixing(const Matrix& M, const Matrix& M_hat);
double sqrt_pmse_mixing(const Matrix& M, const Matrix& M_hat);

/// sqrt of || J - J_hat ||_F^2 / || J ||_F^2.
double sqrt_mse(const Matrix& J, const Matrix& J_hat);

struct VarianceDecomposition {
  double r2_joint = 0.0;
  double r2_individual = 0.0;
  double r2_noise = 0.0;
  double snr = 0.0;

  double r2_signal() const { return r2_joint + r2_individual; }
};

/// R2_J = ||(1/p) X S_J^T S_J||_F^2 / ||X||_F^2 and likewise for the
/// individual block; the noise share is the remainder. Components must
/// satisfy S S^T = p I.
VarianceDecomposition variance_decomposition(const Matrix& X,
                                             const Matrix& S_J,
                                             const Matrix& S_I);

}  // namespace sing
