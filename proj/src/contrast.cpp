#include "sing/contrast.hpp"

#include <stdexcept>

namespace sing {

ContrastConfig::ContrastConfig(double a) : alpha(a) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw std::invalid_argument("ContrastConfig: alpha must be in [0, 1]");
}

double skewness(const Eigen::Ref<const Vector>& s) {
  if (s.size() == 0) throw std::invalid_argument("skewness: empty vector");
  return s.array().cube().mean();
}

double excess_kurtosis(const Eigen::Ref<const Vector>& s) {
  if (s.size() == 0)
    throw std::invalid_argument("excess_kurtosis: empty vector");
  return s.array().square().square().mean() - 3.0;
}

double jb(const Eigen::Ref<const Vector>& s, const ContrastConfig& cfg) {
  const double g = skewness(s);
  const double k = excess_kurtosis(s);
  return cfg.alpha * g * g + (1.0 - cfg.alpha) * k * k;
}

Vector jb_gradient(const Vector& u, const Matrix& Xw,
                   const ContrastConfig& cfg) {
  if (u.size() != Xw.rows())
    throw std::invalid_argument("jb_gradient: dimension mismatch");
  Vector s = Xw.transpose() * u;  // p entries
  const double g = skewness(s);
  const double k = excess_kurtosis(s);
  Vector s2 = s.array().square();
  Vector s3 = s2.array() * s.array();
  return 6.0 * cfg.alpha * g * (Xw * s2) +
         8.0 * (1.0 - cfg.alpha) * k * (Xw * s3);
}

Vector jb_gradient(const Vector& u, const WhitenedData& Xw,
                   const ContrastConfig& cfg) {
  return jb_gradient(u, Xw.Xw, cfg);
}

Vector jb_rows(const Matrix& S, const ContrastConfig& cfg) {
  const double p = static_cast<double>(S.cols());
  if (p == 0) throw std::invalid_argument("jb_rows: empty");
  Vector out(S.rows());
  Eigen::ArrayXXd sq = S.array().square();
  Vector g = (sq * S.array()).rowwise().mean();
  Vector k = sq.square().rowwise().mean().array() - 3.0;
  out = cfg.alpha * g.array().square() +
        (1.0 - cfg.alpha) * k.array().square();
  return out;
}

Matrix jb_gradient_rows(const Matrix& S, const Matrix& Xw,
                        const ContrastConfig& cfg) {
  if (S.cols() != Xw.cols())
    throw std::invalid_argument("jb_gradient_rows: dimension mismatch");
  const double p = static_cast<double>(S.cols());
  Eigen::ArrayXXd s2 = S.array().square();
  Eigen::ArrayXXd s3 = s2 * S.array();
  Vector g = s3.rowwise().mean();
  Vector k = s2.square().rowwise().mean().array() - 3.0;
  // rows: (6 alpha gamma_l s_l^2 + 8 (1-alpha) kappa_l s_l^3) Xw^T / p
  Matrix weights =
      (6.0 * cfg.alpha) * (g.asDiagonal() * s2.matrix()) +
      (8.0 * (1.0 - cfg.alpha)) * (k.asDiagonal() * s3.matrix());
  return weights * Xw.transpose() / p;
}

}  // namespace sing
