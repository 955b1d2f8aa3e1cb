#pragma once

#include <Eigen/Dense>
#include <vector>

namespace sing {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Subjects-by-features data. Rows are subjects, columns are features.
/// Rejects non-finite entries and degenerate sizes (n < 3 or p < 1).
class DataMatrix {
 public:
  explicit DataMatrix(Matrix values);

  const Matrix& values() const { return values_; }
  Eigen::Index n() const { return values_.rows(); }
  Eigen::Index p() const { return values_.cols(); }

 private:
  Matrix values_;
};

/// Component loadings, r rows of length p with S S^T = p I_r.
/// Each row has mean-square one; rows are mutually orthogonal.
class ComponentMatrix {
 public:
  static constexpr double kOrthTol = 1e-8;

  explicit ComponentMatrix(Matrix values, double tol = kOrthTol);

  const Matrix& values() const { return values_; }
  Eigen::Index r() const { return values_.rows(); }
  Eigen::Index p() const { return values_.cols(); }

 private:
  Matrix values_;
};

/// Subject scores, n rows by r columns with full column rank.
/// Joint score matrices may additionally require unit-norm columns.
class MixingMatrix {
 public:
  static constexpr double kUnitNormTol = 1e-10;

  explicit MixingMatrix(Matrix values, bool require_unit_columns = false);

  const Matrix& values() const { return values_; }
  Eigen::Index n() const { return values_.rows(); }
  Eigen::Index r() const { return values_.cols(); }
  bool unit_columns() const { return unit_columns_; }

 private:
  Matrix values_;
  bool unit_columns_;
};

/// Semi-orthogonal unmixing matrix, r rows of length n with U U^T = I_r.
class UnmixingMatrix {
 public:
  static constexpr double kOrthTol = 1e-8;

  explicit UnmixingMatrix(Matrix values, double tol = kOrthTol);

  const Matrix& values() const { return values_; }
  Eigen::Index r() const { return values_.rows(); }
  Eigen::Index n() const { return values_.cols(); }

 private:
  Matrix values_;
};

/// A signed permutation on r indices. Applying it to a matrix S produces
/// out.row(i) = signs[i] * S.row(perm[i]).
struct SignedPermutation {
  std::vector<int> perm;
  std::vector<int> signs;  // entries are +1 or -1

  SignedPermutation() = default;
  SignedPermutation(std::vector<int> perm_, std::vector<int> signs_);

  int size() const { return static_cast<int>(perm.size()); }
  static SignedPermutation identity(int r);
  SignedPermutation inverse() const;

  Matrix apply(const Matrix& rows) const;
};

ComponentMatrix apply_signed_permutation(const ComponentMatrix& S,
                                         const SignedPermutation& P);

}  // namespace sing
