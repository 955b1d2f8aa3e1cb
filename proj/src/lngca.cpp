#include "sing/lngca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "sing/matching.hpp"
#include "sing/metrics.hpp"

namespace sing {

MultiStartConfig::MultiStartConfig(std::vector<rng::Seed> s, int max_it,
                                   double tolerance)
    : seeds(std::move(s)), max_iter(max_it), tol(tolerance) {
  if (seeds.empty())
    throw std::invalid_argument("MultiStartConfig: need at least one seed");
  if (max_iter < 1) throw std::invalid_argument("MultiStartConfig: max_iter");
}

MultiStartConfig MultiStartConfig::from_base_seed(int n_restarts,
                                                  rng::Seed base, int max_iter,
                                                  double tol) {
  if (n_restarts < 1)
    throw std::invalid_argument("MultiStartConfig: n_restarts >= 1");
  std::vector<rng::Seed> seeds(n_restarts);
  for (int i = 0; i < n_restarts; ++i)
    seeds[i] = rng::derive(base, static_cast<std::uint64_t>(i));
  return MultiStartConfig(std::move(seeds), max_iter, tol);
}

Matrix symmetric_orthonormalize(const Matrix& A) {
  Eigen::BDCSVD<Matrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU() * svd.matrixV().transpose();
}

Matrix random_semiorthogonal_start(const WhitenedData& Xw, int r,
                                   rng::Seed seed) {
  rng::Rng gen(seed);
  Matrix A = gen.gaussian_matrix(r, Xw.n());
  // Restrict to the retained span so S = U Xw keeps S S^T = p I exact.
  Matrix in_span = (A * Xw.eigenvectors) * Xw.eigenvectors.transpose();
  return symmetric_orthonormalize(in_span);
}

namespace {

// Convergence monitor: sqrt PMSE between successive unmixing iterates,
// rows scaled to mean-square one.
double convergence_sqrt_pmse(const Matrix& A, const Matrix& B) {
  const double n = static_cast<double>(A.cols());
  auto scaled = [&](const Matrix& m) {
    Matrix out = m;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const double rms = m.row(i).norm() / std::sqrt(n);
      out.row(i) /= (rms > 0.0 ? rms : 1.0);
    }
    return out;
  };
  Matrix sa = scaled(A), sb = scaled(B);
  SignedPermutation P = match_rows_min_frobenius(sa, sb);
  const double v = (sa - P.apply(sb)).squaredNorm() /
                   (static_cast<double>(A.rows()) * n);
  return std::sqrt(std::max(0.0, v));
}

}  // namespace

LngcaFit fit_lngca_from(const WhitenedData& Xw, const Matrix& U0, int max_iter,
                        double tol, const ContrastConfig& contrast) {
  const Matrix& X = Xw.Xw;
  Matrix U = U0;
  Matrix S = U * X;
  double obj = jb_rows(S, contrast).sum();

  LngcaFit fit;
  fit.converged = false;
  fit.objective_trace.push_back(obj);
  int iter = 0;
  for (; iter < max_iter; ++iter) {
    Matrix G = jb_gradient_rows(S, X, contrast);
    Matrix U_new = symmetric_orthonormalize(G);
    Matrix S_new = U_new * X;
    double obj_new = jb_rows(S_new, contrast).sum();

    if (obj_new < obj) {
      // Damped ascent with polar retraction; guarantees a non-decreasing
      // objective or detects stationarity.
      double eta = 1.0;
      bool improved = false;
      for (int h = 0; h < 30; ++h) {
        U_new = symmetric_orthonormalize(U + eta * G);
        S_new = U_new * X;
        obj_new = jb_rows(S_new, contrast).sum();
        if (obj_new > obj) {
          improved = true;
          break;
        }
        eta *= 0.5;
      }
      if (!improved) {
        fit.converged = true;  // no ascent direction left
        break;
      }
    }

    const double delta = convergence_sqrt_pmse(U, U_new);
    U = std::move(U_new);
    S = std::move(S_new);
    obj = obj_new;
    fit.objective_trace.push_back(obj);
    if (delta < tol) {
      fit.converged = true;
      ++iter;
      break;
    }
  }

  // Order components by descending non-Gaussianity.
  Vector jb_vals = jb_rows(S, contrast);
  std::vector<int> order(U.rows());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return jb_vals(a) > jb_vals(b);
  });
  Matrix U_sorted(U.rows(), U.cols());
  Matrix S_sorted(S.rows(), S.cols());
  Vector jb_sorted(U.rows());
  for (Eigen::Index i = 0; i < U.rows(); ++i) {
    U_sorted.row(i) = U.row(order[i]);
    S_sorted.row(i) = S.row(order[i]);
    jb_sorted(i) = jb_vals(order[i]);
  }

  fit.U = std::move(U_sorted);
  fit.S = std::move(S_sorted);
  fit.jb_values = std::move(jb_sorted);
  fit.objective = fit.jb_values.sum();
  fit.M = Xw.mixing_from_unmixing(fit.U);
  fit.iterations = iter;
  fit.restarts_used = 1;
  return fit;
}

LngcaFit fit_lngca(const WhitenedData& Xw, int r, const MultiStartConfig& cfg,
                   const ContrastConfig& contrast) {
  if (r < 1 || r > Xw.retained_rank)
    throw std::invalid_argument(
        "fit_lngca: r must be between 1 and the retained rank (" +
        std::to_string(Xw.retained_rank) + ")");

  LngcaFit best;
  bool have_best = false;
  for (int i = 0; i < cfg.n_restarts(); ++i) {
    Matrix U0 = random_semiorthogonal_start(Xw, r, cfg.seeds[i]);
    LngcaFit fit = fit_lngca_from(Xw, U0, cfg.max_iter, cfg.tol, contrast);
    fit.best_seed = cfg.seeds[i];
    if (!have_best || fit.objective > best.objective) {
      best = std::move(fit);
      have_best = true;
    }
  }
  best.restarts_used = cfg.n_restarts();
  return best;
}

LngcaFit fit_saturated(const WhitenedData& Xw, const MultiStartConfig& cfg,
                       const ContrastConfig& contrast) {
  return fit_lngca(Xw, Xw.retained_rank, cfg, contrast);
}

std::vector<int> reliability_filter(const std::vector<LngcaFit>& fits,
                                    int argmax_index, double corr_threshold,
                                    double frac_threshold) {
  if (fits.size() < 2)
    throw std::invalid_argument("reliability_filter: need at least two fits");
  if (argmax_index < 0 || argmax_index >= static_cast<int>(fits.size()))
    throw std::invalid_argument("reliability_filter: bad argmax index");
  if (!(corr_threshold > 0.0 && corr_threshold <= 1.0) ||
      !(frac_threshold > 0.0 && frac_threshold <= 1.0))
    throw std::invalid_argument("reliability_filter: thresholds in (0, 1]");

  const Matrix& S0 = fits[argmax_index].S;
  auto centered_t = [](const Matrix& S) {
    Matrix t = S.transpose();  // columns are components
    Eigen::RowVectorXd means = t.colwise().mean();
    t.rowwise() -= means;
    return t;
  };
  Matrix A = centered_t(S0);

  const int r = static_cast<int>(S0.rows());
  std::vector<int> hit_count(r, 0);
  int others = 0;
  for (std::size_t f = 0; f < fits.size(); ++f) {
    if (static_cast<int>(f) == argmax_index) continue;
    if (fits[f].S.rows() != S0.rows() || fits[f].S.cols() != S0.cols())
      throw std::invalid_argument("reliability_filter: mismatched fits");
    ++others;
    // Greedy one-to-one matching by |correlation| (chordal on centered
    // columns).
    GreedyMatch match = greedy_match(A, centered_t(fits[f].S));
    for (std::size_t m = 0; m < match.pairs.size(); ++m) {
      const double abs_corr =
          std::sqrt(std::max(0.0, (2.0 - match.distances(m)) / 2.0));
      if (abs_corr > corr_threshold) ++hit_count[match.pairs[m].first];
    }
  }

  std::vector<int> kept;
  for (int i = 0; i < r; ++i) {
    const double frac =
        static_cast<double>(hit_count[i]) / static_cast<double>(others);
    if (frac >= frac_threshold) kept.push_back(i);
  }
  return kept;
}

}  // namespace sing
