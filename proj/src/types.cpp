#include "sing/types.hpp"

#include <stdexcept>
#include <string>

namespace sing {

namespace {

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite())
    throw std::invalid_argument(std::string(what) + ": non-finite entries");
}

}  // namespace

DataMatrix::DataMatrix(Matrix values) : values_(std::move(values)) {
  require_finite(values_, "DataMatrix");
  if (values_.rows() < 3)
    throw std::invalid_argument("DataMatrix: need at least 3 subjects");
  if (values_.cols() < 1)
    throw std::invalid_argument("DataMatrix: need at least 1 feature");
}

ComponentMatrix::ComponentMatrix(Matrix values, double tol)
    : values_(std::move(values)) {
  require_finite(values_, "ComponentMatrix");
  const auto r = values_.rows();
  const auto p = values_.cols();
  if (r < 1 || p < 1) throw std::invalid_argument("ComponentMatrix: empty");
  // S S^T = p I, checked on the p-normalized Gram matrix.
  Matrix gram = values_ * values_.transpose() / static_cast<double>(p);
  gram.diagonal().array() -= 1.0;
  const double err = gram.cwiseAbs().maxCoeff();
  if (err > tol)
    throw std::invalid_argument(
        "ComponentMatrix: rows violate S S^T = p I (max deviation " +
        std::to_string(err) + ")");
}

MixingMatrix::MixingMatrix(Matrix values, bool require_unit_columns)
    : values_(std::move(values)), unit_columns_(require_unit_columns) {
  require_finite(values_, "MixingMatrix");
  if (values_.rows() < 1 || values_.cols() < 1)
    throw std::invalid_argument("MixingMatrix: empty");
  if (values_.cols() > values_.rows())
    throw std::invalid_argument("MixingMatrix: more columns than rows");
  Eigen::ColPivHouseholderQR<Matrix> qr(values_);
  if (qr.rank() < values_.cols())
    throw std::invalid_argument("MixingMatrix: rank-deficient columns");
  if (require_unit_columns) {
    for (Eigen::Index j = 0; j < values_.cols(); ++j) {
      if (std::abs(values_.col(j).norm() - 1.0) > kUnitNormTol)
        throw std::invalid_argument("MixingMatrix: column " +
                                    std::to_string(j) + " is not unit-norm");
    }
  }
}

UnmixingMatrix::UnmixingMatrix(Matrix values, double tol)
    : values_(std::move(values)) {
  require_finite(values_, "UnmixingMatrix");
  if (values_.rows() < 1 || values_.rows() > values_.cols())
    throw std::invalid_argument("UnmixingMatrix: need 1 <= r <= n");
  Matrix gram = values_ * values_.transpose();
  gram.diagonal().array() -= 1.0;
  const double err = gram.cwiseAbs().maxCoeff();
  if (err > tol)
    throw std::invalid_argument(
        "UnmixingMatrix: rows violate U U^T = I (max deviation " +
        std::to_string(err) + ")");
}

SignedPermutation::SignedPermutation(std::vector<int> perm_,
                                     std::vector<int> signs_)
    : perm(std::move(perm_)), signs(std::move(signs_)) {
  if (perm.size() != signs.size())
    throw std::invalid_argument("SignedPermutation: size mismatch");
  std::vector<bool> seen(perm.size(), false);
  for (std::size_t i = 0; i < perm.size(); ++i) {
    if (perm[i] < 0 || perm[i] >= static_cast<int>(perm.size()) || seen[perm[i]])
      throw std::invalid_argument("SignedPermutation: not a bijection");
    seen[perm[i]] = true;
    if (signs[i] != 1 && signs[i] != -1)
      throw std::invalid_argument("SignedPermutation: signs must be +-1");
  }
}

SignedPermutation SignedPermutation::identity(int r) {
  std::vector<int> p(r), s(r, 1);
  for (int i = 0; i < r; ++i) p[i] = i;
  return SignedPermutation(std::move(p), std::move(s));
}

SignedPermutation SignedPermutation::inverse() const {
  const int r = size();
  std::vector<int> p(r), s(r);
  for (int i = 0; i < r; ++i) {
    p[perm[i]] = i;
    s[perm[i]] = signs[i];
  }
  return SignedPermutation(std::move(p), std::move(s));
}

Matrix SignedPermutation::apply(const Matrix& rows) const {
  if (rows.rows() != size())
    throw std::invalid_argument("SignedPermutation: dimension mismatch");
  Matrix out(rows.rows(), rows.cols());
  for (int i = 0; i < size(); ++i)
    out.row(i) = static_cast<double>(signs[i]) * rows.row(perm[i]);
  return out;
}

ComponentMatrix apply_signed_permutation(const ComponentMatrix& S,
                                         const SignedPermutation& P) {
  if (P.size() != S.r())
    throw std::invalid_argument("apply_signed_permutation: dimension mismatch");
  return ComponentMatrix(P.apply(S.values()));
}

}  // namespace sing
