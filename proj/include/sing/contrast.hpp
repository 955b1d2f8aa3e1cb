#pragma once

#include "sing/preprocess.hpp"
#include "sing/types.hpp"

namespace sing {

/// Weighting between squared skewness (alpha) and squared excess kurtosis
/// (1 - alpha). The default 0.8 / 0.2 split is the JB statistic.
struct ContrastConfig {
  double alpha = 0.8;

  ContrastConfig() = default;
  explicit ContrastConfig(double a);
};

/// (1/p) sum s_j^3.
double skewness(const Eigen::Ref<const Vector>& s);

/// (1/p) sum s_j^4 - 3.
double excess_kurtosis(const Eigen::Ref<const Vector>& s);

/// alpha * skewness^2 + (1 - alpha) * excess_kurtosis^2. Nonnegative,
/// zero exactly when both moments match the Gaussian values.
double jb(const Eigen::Ref<const Vector>& s, const ContrastConfig& cfg = {});

/// Analytic gradient of f(u^T Xw) with respect to u:
///   t_alpha(u) = 6 alpha gamma sum_j Xw_j (u^T Xw_j)^2
///              + 8 (1-alpha) kappa sum_j Xw_j (u^T Xw_j)^3,
/// with gamma and kappa the mean-based moments of u^T Xw. The sums run over
/// features without the 1/p factor, so t_alpha = p * grad f; callers that
/// need the exact gradient of f divide by p.
Vector jb_gradient(const Vector& u, const WhitenedData& Xw,
                   const ContrastConfig& cfg = {});
Vector jb_gradient(const Vector& u, const Matrix& Xw,
                   const ContrastConfig& cfg = {});

/// JB value of every row of S.
Vector jb_rows(const Matrix& S, const ContrastConfig& cfg = {});

/// Exact gradient of sum_l f(u_l^T Xw) with respect to U, one row per
/// component: rows are t_alpha(u_l) / p. S must equal U * Xw.
Matrix jb_gradient_rows(const Matrix& S, const Matrix& Xw,
                        const ContrastConfig& cfg = {});

}  // namespace sing
