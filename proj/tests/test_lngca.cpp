#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "sing/lngca.hpp"
#include "sing/metrics.hpp"
#include "sing/preprocess.hpp"
#include "sing/rng.hpp"

using sing::Matrix;
using sing::MultiStartConfig;
using sing::Vector;
using sing::WhitenedData;

namespace {

// Two strongly non-Gaussian orthogonal rows on disjoint supports: a sparse
// positive spike block (skewed) and an alternating +-1 block (kurtotic),
// centered and scaled to S S^T = p I. Their cross-moments vanish closely
// enough that the truth is the finite-sample JB argmax.
Matrix planted_components(int p, sing::rng::Seed) {
  Matrix S = Matrix::Zero(2, p);
  const int k = p / 10;
  for (int j = 0; j < k; ++j) S(0, j) = 1.0;
  for (int j = k; j < 2 * k; ++j) S(1, j) = (j % 2 ? -1.0 : 1.0);
  S.colwise() -= S.rowwise().mean().eval();
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < i; ++j)
      S.row(i) -= (S.row(i).dot(S.row(j)) / S.row(j).squaredNorm()) * S.row(j);
    S.row(i) *= std::sqrt(double(p)) / S.row(i).norm();
  }
  return S;
}

}  // namespace

TEST_CASE("noise-free planted components are recovered") {
  const int n = 20, p = 1200;
  Matrix S_true = planted_components(p, 3);
  sing::rng::Rng gen(4);
  Matrix M = gen.gaussian_matrix(n, 2);
  Matrix X = M * S_true;

  WhitenedData w = sing::whiten_matrix(X);
  CHECK(w.retained_rank == 2);
  auto fit = sing::fit_lngca(w, 2, MultiStartConfig::from_base_seed(5, 11));
  CHECK(fit.converged);
  CHECK(sing::sqrt_pmse(S_true, fit.S) < 0.05);
}

TEST_CASE("single planted binary component under Gaussian noise") {
  const int n = 24, p = 600;
  sing::rng::Rng gen(7);
  Vector s = Vector::Zero(p);
  for (int j = 0; j < p / 12; ++j) s(j) = 1.0;
  s.array() -= s.mean();
  s *= std::sqrt(double(p)) / s.norm();

  Vector m = gen.gaussian_vector(n);
  Matrix noise = gen.gaussian_matrix(n, 10) * gen.gaussian_matrix(10, p);
  Matrix X = m * s.transpose() + 0.7 * noise;

  WhitenedData w = sing::whiten_matrix(X);
  auto fit = sing::fit_lngca(w, 1, MultiStartConfig::from_base_seed(6, 21));
  Vector shat = fit.S.row(0).transpose();
  Vector sc = s.array() - s.mean();
  Vector shatc = shat.array() - shat.mean();
  const double corr = std::abs(sc.dot(shatc)) / (sc.norm() * shatc.norm());
  CHECK(corr > 0.99);
}

TEST_CASE("seed lists reaching the same argmax agree up to signed permutation") {
  const int n = 16, p = 300;
  Matrix S_true = planted_components(p, 13);
  sing::rng::Rng gen(14);
  Matrix X = gen.gaussian_matrix(n, 2) * S_true;
  WhitenedData w = sing::whiten_matrix(X);

  auto fit_a =
      sing::fit_lngca(w, 2, MultiStartConfig({1001, 1002, 1003}, 500, 1e-8));
  auto fit_b =
      sing::fit_lngca(w, 2, MultiStartConfig({2004, 2005, 2006}, 500, 1e-8));
  CHECK(std::abs(fit_a.objective - fit_b.objective) <
        1e-6 * std::max(1.0, std::abs(fit_a.objective)));
  CHECK(sing::sqrt_pmse(fit_a.S, fit_b.S) < 1e-4);
}

TEST_CASE("fit is deterministic given the seed list") {
  const int n = 12, p = 150;
  sing::rng::Rng gen(23);
  Matrix X = gen.gaussian_matrix(n, p);
  WhitenedData w = sing::whiten_matrix(X);
  auto cfg = MultiStartConfig::from_base_seed(3, 77);
  auto a = sing::fit_lngca(w, 3, cfg);
  auto b = sing::fit_lngca(w, 3, cfg);
  CHECK((a.S - b.S).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.best_seed == b.best_seed);
}

TEST_CASE("saturated fit returns rank n-1 components on centered data") {
  const int n = 10, p = 50;
  sing::rng::Rng gen(31);
  auto Xc = sing::double_center(sing::DataMatrix{gen.gaussian_matrix(n, p)});
  WhitenedData w = sing::whiten(Xc);
  auto cfg = MultiStartConfig::from_base_seed(2, 5, 300, 1e-5);
  auto fit = sing::fit_saturated(w, cfg);
  CHECK(fit.S.rows() == n - 1);

  // Nested feasible sets: the saturated objective dominates smaller fits.
  for (int r : {2, 5}) {
    auto small = sing::fit_lngca(w, r, cfg);
    CHECK(fit.objective >= small.objective - 1e-9);
  }
}

TEST_CASE("fit satisfies the orthogonality and reconstruction invariants") {
  const int n = 14, p = 200;
  sing::rng::Rng gen(41);
  auto Xc = sing::double_center(sing::DataMatrix{gen.gaussian_matrix(n, p)});
  WhitenedData w = sing::whiten(Xc);
  auto fit = sing::fit_lngca(w, 4, MultiStartConfig::from_base_seed(3, 2));

  Matrix ug = fit.U * fit.U.transpose();
  ug.diagonal().array() -= 1.0;
  CHECK(ug.cwiseAbs().maxCoeff() < 1e-8);

  Matrix sg = fit.S * fit.S.transpose() / double(p);
  sg.diagonal().array() -= 1.0;
  CHECK(sg.cwiseAbs().maxCoeff() < 1e-6);

  for (int l = 1; l < 4; ++l) CHECK(fit.jb_values(l) <= fit.jb_values(l - 1));
  CHECK(fit.objective == doctest::Approx(fit.jb_values.sum()).epsilon(1e-8));

  // M = Xc S^T / p makes the residual orthogonal to the loadings.
  Matrix resid = Xc.values - fit.M * fit.S;
  CHECK((resid * fit.S.transpose()).cwiseAbs().maxCoeff() < 1e-6 * double(p));

  CHECK_NOTHROW(fit.unmixing());
  CHECK_NOTHROW(fit.components());
}

TEST_CASE("objective is non-decreasing along the fixed-point iterations") {
  const int n = 12, p = 160;
  sing::rng::Rng gen(51);
  Matrix X = gen.gaussian_matrix(n, p);
  WhitenedData w = sing::whiten_matrix(X);
  Matrix U0 = sing::random_semiorthogonal_start(w, 4, 99);
  auto fit = sing::fit_lngca_from(w, U0, 400, 1e-7);
  REQUIRE(fit.objective_trace.size() > 2);
  for (std::size_t k = 1; k < fit.objective_trace.size(); ++k)
    CHECK(fit.objective_trace[k] >= fit.objective_trace[k - 1] - 1e-12);
}

TEST_CASE("r beyond the retained rank is rejected") {
  sing::rng::Rng gen(61);
  auto Xc = sing::double_center(sing::DataMatrix{gen.gaussian_matrix(8, 30)});
  WhitenedData w = sing::whiten(Xc);
  CHECK_THROWS_AS(sing::fit_lngca(w, w.retained_rank + 1,
                                  MultiStartConfig::from_base_seed(1, 1)),
                  std::invalid_argument);
}

TEST_CASE("reliability filter keeps stable components, drops noise") {
  const int n = 20, p = 300;
  Matrix S_true = planted_components(p, 71);
  sing::rng::Rng gen(72);
  Matrix X = gen.gaussian_matrix(n, 2) * S_true +
             0.15 * gen.gaussian_matrix(n, 4) * gen.gaussian_matrix(4, p);
  WhitenedData w = sing::whiten_matrix(X);

  // r = 4: two real components plus two that chase noise directions.
  std::vector<sing::LngcaFit> fits;
  for (int i = 0; i < 6; ++i)
    fits.push_back(sing::fit_lngca(
        w, 4, MultiStartConfig::from_base_seed(1, 1000 + 97 * i)));
  int argmax = 0;
  for (std::size_t i = 1; i < fits.size(); ++i)
    if (fits[i].objective > fits[argmax].objective) argmax = int(i);

  auto kept = sing::reliability_filter(fits, argmax, 0.95, 0.75);
  CHECK(kept.size() >= 2);
  CHECK(std::find(kept.begin(), kept.end(), 0) != kept.end());
  CHECK(std::find(kept.begin(), kept.end(), 1) != kept.end());

  std::vector<sing::LngcaFit> same(4, fits[argmax]);
  auto all = sing::reliability_filter(same, 0, 0.95, 0.75);
  CHECK(int(all.size()) == 4);

  CHECK_THROWS_AS(sing::reliability_filter({fits[0]}, 0, 0.95, 0.75),
                  std::invalid_argument);
}
