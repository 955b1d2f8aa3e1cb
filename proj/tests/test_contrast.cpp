#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sing/contrast.hpp"
#include "sing/lngca.hpp"
#include "sing/preprocess.hpp"
#include "sing/rng.hpp"

using sing::ContrastConfig;
using sing::Matrix;
using sing::Vector;

TEST_CASE("skewness and kurtosis on hand cases") {
  Vector s(4);
  s << 1, -1, 1, -1;
  CHECK(sing::skewness(s) == doctest::Approx(0.0));
  CHECK(sing::excess_kurtosis(s) == doctest::Approx(-2.0));

  Vector t(4);
  t << 2, 0, 0, 0;
  CHECK(sing::skewness(t) == doctest::Approx(2.0));

  Vector z = Vector::Zero(6);
  CHECK(sing::excess_kurtosis(z) == doctest::Approx(-3.0));

  Vector empty(0);
  CHECK_THROWS_AS(sing::skewness(empty), std::invalid_argument);
  CHECK_THROWS_AS(sing::excess_kurtosis(empty), std::invalid_argument);
}

TEST_CASE("moments vanish on large standard normal samples") {
  sing::rng::Rng gen(5);
  Vector s = gen.gaussian_vector(1'000'000);
  CHECK(std::abs(sing::skewness(s)) < 0.01);
  CHECK(std::abs(sing::excess_kurtosis(s)) < 0.05);
}

TEST_CASE("jb hand arithmetic and Gaussian-moment zero") {
  Vector s(4);
  s << 1, -1, 1, -1;
  CHECK(sing::jb(s) == doctest::Approx(0.8));  // 0.8*0 + 0.2*(-2)^2

  // Any vector with gamma = 0 and kappa = 0: solve for a symmetric pair
  // mixture {a, -a, b, -b, ...} with fourth moment 3.
  // Take values +-a each appearing twice with a^4 = 3 -> kappa = 0.
  const double a = std::pow(3.0, 0.25);
  Vector g(4);
  g << a, -a, a, -a;
  CHECK(sing::jb(g) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("jb positive for sub- and super-Gaussian samples") {
  sing::rng::Rng gen(9);
  const int p = 100'000;
  Vector uniform(p), laplace(p);
  for (int i = 0; i < p; ++i) {
    // Uniform on [-sqrt(3), sqrt(3)]: variance 1, kurtosis -1.2.
    uniform(i) = (2.0 * gen.uniform() - 1.0) * std::sqrt(3.0);
    // Laplace with variance 1: inverse-CDF sampling, kurtosis +3.
    const double u = gen.uniform() - 0.5;
    laplace(i) = -(u < 0 ? -1.0 : 1.0) * std::log(1.0 - 2.0 * std::abs(u)) /
                 std::sqrt(2.0);
  }
  CHECK(sing::jb(uniform) > 0.05);
  CHECK(sing::jb(laplace) > 0.05);
}

TEST_CASE("jb is invariant under sign flip") {
  sing::rng::Rng gen(13);
  for (int trial = 0; trial < 20; ++trial) {
    Vector s = gen.gaussian_vector(200);
    s = s.array().cube();  // make it skewed
    CHECK(sing::jb(s) == doctest::Approx(sing::jb((-s).eval())));
    CHECK(sing::jb(s) >= 0.0);
  }
}

TEST_CASE("ContrastConfig validates alpha") {
  CHECK_THROWS_AS(ContrastConfig{1.5}, std::invalid_argument);
  CHECK_THROWS_AS(ContrastConfig{-0.1}, std::invalid_argument);
  CHECK_NOTHROW(ContrastConfig{0.0});
  CHECK_NOTHROW(ContrastConfig{1.0});
}

namespace {

// Central finite differences of jb(u^T Xw) in u.
Vector fd_gradient(const Vector& u, const Matrix& Xw, const ContrastConfig& cfg,
                   double h = 1e-5) {
  Vector g(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    Vector up = u, dn = u;
    up(i) += h;
    dn(i) -= h;
    const double fp = sing::jb((Xw.transpose() * up).eval(), cfg);
    const double fm = sing::jb((Xw.transpose() * dn).eval(), cfg);
    g(i) = (fp - fm) / (2.0 * h);
  }
  return g;
}

}  // namespace

TEST_CASE("jb_gradient matches finite differences up to the factor p") {
  sing::rng::Rng gen(21);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 4, p = 20;
    Matrix Xw = gen.gaussian_matrix(n, p);
    Vector u = gen.gaussian_vector(n);
    u /= u.norm();
    ContrastConfig cfg(trial % 3 == 0 ? 0.8 : (trial % 3 == 1 ? 0.3 : 1.0));

    Vector analytic = sing::jb_gradient(u, Xw, cfg);
    // The analytic form uses feature sums, the objective feature means.
    Vector expected = double(p) * fd_gradient(u, Xw, cfg);
    const double rel =
        (analytic - expected).norm() / std::max(1e-12, expected.norm());
    CHECK(rel < 1e-5);
  }
}

TEST_CASE("jb_gradient vanishes when both moment prefactors vanish") {
  // Rows of Xw chosen so u^T Xw hits gamma = kappa = 0: u picks out a
  // single row holding the {a, -a} pattern with a^4 = 3.
  const double a = std::pow(3.0, 0.25);
  Matrix Xw(2, 4);
  Xw << a, -a, a, -a,
      0.5, 0.25, -0.5, -0.25;
  Vector u(2);
  u << 1.0, 0.0;
  Vector g = sing::jb_gradient(u, Xw);
  CHECK(g.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("sign symmetries of the skewness contribution") {
  sing::rng::Rng gen(33);
  const int n = 5, p = 40;
  Matrix Xw = gen.gaussian_matrix(n, p);
  Vector u = gen.gaussian_vector(n);
  Vector s = Xw.transpose() * u;

  // Negating the data flips the skewness prefactor gamma but not kappa.
  CHECK(sing::skewness((-s).eval()) == doctest::Approx(-sing::skewness(s)));
  CHECK(sing::excess_kurtosis((-s).eval()) ==
        doctest::Approx(sing::excess_kurtosis(s)));

  // Both flips cancel inside the gradient: t_alpha is even in the data and
  // odd in u. Verified against recomputation.
  const double tol = 1e-10 *
                     std::max(1.0, sing::jb_gradient(u, Xw).cwiseAbs().maxCoeff());
  Vector g_data_flip = sing::jb_gradient(u, (-Xw).eval());
  CHECK((g_data_flip - sing::jb_gradient(u, Xw)).cwiseAbs().maxCoeff() < tol);
  Vector g_u_flip = sing::jb_gradient((-u).eval(), Xw);
  CHECK((g_u_flip + sing::jb_gradient(u, Xw)).cwiseAbs().maxCoeff() < tol);
}

TEST_CASE("jb_rows and jb_gradient_rows agree with the scalar versions") {
  sing::rng::Rng gen(41);
  const int r = 3, n = 6, p = 25;
  Matrix Xw = gen.gaussian_matrix(n, p);
  Matrix U = gen.gaussian_matrix(r, n);
  Matrix S = U * Xw;

  Vector vals = sing::jb_rows(S);
  Matrix grads = sing::jb_gradient_rows(S, Xw);
  for (int l = 0; l < r; ++l) {
    CHECK(vals(l) == doctest::Approx(sing::jb(S.row(l).transpose())));
    Vector gl = sing::jb_gradient(U.row(l).transpose(), Xw) / double(p);
    CHECK((grads.row(l).transpose() - gl).cwiseAbs().maxCoeff() < 1e-10);
  }
}
