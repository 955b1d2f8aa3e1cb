#include "sing/simulate.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sing {

namespace {

constexpr int kImageSide = 33;     // X features form 33x33 images
constexpr int kNetworkNodes = 100; // Y features are lower-triangle edges
constexpr double kBackgroundVar = 0.005;
constexpr rng::Seed kComponentSeed = 0x51a6c0317ed5ULL;

void add_image_patch(Eigen::RowVectorXd& row, int r0, int r1, int c0, int c1) {
  for (int r = r0; r <= r1; ++r)
    for (int c = c0; c <= c1; ++c) row(r * kImageSide + c) = 1.0;
}

// Strict lower triangle vectorization: rows i = 1..n-1, entries j < i.
int edge_index(int i, int j) { return i * (i - 1) / 2 + j; }

void add_node_block(Eigen::RowVectorXd& row, int n0, int n1) {
  for (int i = n0; i <= n1; ++i)
    for (int j = n0; j < i; ++j) row(edge_index(i, j)) = 1.0;
}

// Mean-center rows, orthogonalize in row order (joint rows first), and
// rescale to S S^T = p I. Linear combinations of mean-zero rows stay mean
// zero, so centering survives the orthogonalization.
Matrix finalize_components(Matrix S) {
  const double p = static_cast<double>(S.cols());
  S.colwise() -= S.rowwise().mean().eval();
  for (Eigen::Index i = 0; i < S.rows(); ++i) {
    for (Eigen::Index j = 0; j < i; ++j)
      S.row(i) -= (S.row(i).dot(S.row(j)) / S.row(j).squaredNorm()) * S.row(j);
    const double norm = S.row(i).norm();
    if (norm == 0.0)
      throw std::runtime_error("setting1_components: degenerate row");
    S.row(i) *= std::sqrt(p) / norm;
  }
  return S;
}

// +-1 pattern of `blocks` equal consecutive blocks, starting at start_sign.
Vector block_signs(int n, int blocks, int start_sign) {
  Vector out(n);
  const int len = n / blocks;
  for (int i = 0; i < n; ++i) {
    const int b = std::min(i / std::max(len, 1), blocks - 1);
    out(i) = static_cast<double>(start_sign) * ((b % 2 == 0) ? 1.0 : -1.0);
  }
  return out;
}

}  // namespace

Setting1Components setting1_components(bool sparse_variant) {
  rng::Rng gen(kComponentSeed);
  const double sd = std::sqrt(kBackgroundVar);

  const int px = kImageSide * kImageSide;
  Matrix Sx(3, px);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < px; ++c) Sx(r, c) = sd * gen.normal();
  {
    Eigen::RowVectorXd row = Sx.row(0);  // joint 1
    if (sparse_variant)
      add_image_patch(row, 4, 6, 4, 6);
    else
      add_image_patch(row, 3, 12, 3, 12);
    Sx.row(0) = row;
    row = Sx.row(1);  // joint 2
    if (sparse_variant)
      add_image_patch(row, 20, 22, 20, 22);
    else
      add_image_patch(row, 18, 27, 18, 27);
    Sx.row(1) = row;
    row = Sx.row(2);  // individual
    if (sparse_variant)
      add_image_patch(row, 4, 6, 24, 26);
    else
      add_image_patch(row, 3, 12, 20, 29);
    Sx.row(2) = row;
  }

  const int py = kNetworkNodes * (kNetworkNodes - 1) / 2;
  Matrix Sy(4, py);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < py; ++c) Sy(r, c) = sd * gen.normal();
  {
    const int width = sparse_variant ? 9 : 19;  // node span per block
    const int starts[4] = {5, 30, 55, 80};      // joint 1, joint 2, ind 1, ind 2
    for (int r = 0; r < 4; ++r) {
      Eigen::RowVectorXd row = Sy.row(r);
      add_node_block(row, starts[r], starts[r] + width);
      Sy.row(r) = row;
    }
  }

  return Setting1Components{finalize_components(std::move(Sx)),
                            finalize_components(std::move(Sy))};
}

Matrix sparsify_components(const Matrix& S, double threshold,
                           double* sparsity_out) {
  if (threshold < 0.0)
    throw std::invalid_argument("sparsify_components: negative threshold");
  const double p = static_cast<double>(S.cols());
  Matrix out = S;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    int support = 0;
    double sum = 0.0;
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
      if (std::abs(out(i, j)) < threshold) {
        out(i, j) = 0.0;
      } else {
        ++support;
        sum += out(i, j);
      }
    }
    if (support == 0)
      throw std::invalid_argument("sparsify_components: row " +
                                  std::to_string(i) + " became all zero");
    // Re-center on the support so the zero pattern is preserved.
    const double shift = sum / static_cast<double>(support);
    for (Eigen::Index j = 0; j < out.cols(); ++j)
      if (out(i, j) != 0.0) out(i, j) -= shift;
  }
  // Orthogonalize; disjoint supports pass through untouched.
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      const double coef = out.row(i).dot(out.row(j)) / out.row(j).squaredNorm();
      if (coef != 0.0) out.row(i) -= coef * out.row(j);
    }
    const double norm = out.row(i).norm();
    if (norm == 0.0)
      throw std::invalid_argument("sparsify_components: degenerate row");
    out.row(i) *= std::sqrt(p) / norm;
  }
  if (sparsity_out) {
    const double zeros = (out.array() == 0.0).count();
    *sparsity_out = zeros / static_cast<double>(out.size());
  }
  return out;
}

SimulationTruth setting1_generate(double snr_x, double snr_y, rng::Seed seed,
                                  int n, bool sparse_variant) {
  if (n < 8 || n % 8 != 0)
    throw std::invalid_argument("setting1_generate: n must be a multiple of 8");
  if (!(snr_x > 0.0) || !(snr_y > 0.0))
    throw std::invalid_argument("setting1_generate: SNR must be positive");

  Setting1Components comps = setting1_components(sparse_variant);
  SimulationTruth t;
  t.seed = seed;
  t.sparse = sparse_variant;
  t.snr_x = snr_x;
  t.snr_y = snr_y;
  if (sparse_variant) {
    Matrix sx = sparsify_components(comps.S_x, 5.0);
    t.S_Jx = sx.topRows(2);
    t.S_Ix = sx.bottomRows(1);
    Matrix sy = sparsify_components(comps.S_y, 5.0);
    t.S_Jy = sy.topRows(2);
    t.S_Iy = sy.bottomRows(2);
  } else {
    t.S_Jx = comps.S_x.topRows(2);
    t.S_Ix = comps.S_x.bottomRows(1);
    t.S_Jy = comps.S_y.topRows(2);
    t.S_Iy = comps.S_y.bottomRows(2);
  }
  const int px = static_cast<int>(t.S_Jx.cols());
  const int py = static_cast<int>(t.S_Jy.cols());

  rng::Rng gen(seed);
  // Joint scores around the +/- block means; both datasets share them.
  Matrix Mj_raw(n, 2);
  Vector mu1 = block_signs(n, 2, +1);
  Vector mu2 = block_signs(n, 2, -1);
  for (int i = 0; i < n; ++i) Mj_raw(i, 0) = mu1(i) + gen.normal();
  for (int i = 0; i < n; ++i) Mj_raw(i, 1) = mu2(i) + gen.normal();

  Matrix Mix(n, 1);
  Vector mu3x = block_signs(n, 4, -1);
  for (int i = 0; i < n; ++i) Mix(i, 0) = mu3x(i) + gen.normal();

  Matrix Miy(n, 2);
  Vector mu3y = block_signs(n, 8, -1);
  Vector mu4y = block_signs(n, 2, +1);
  for (int i = 0; i < n; ++i) Miy(i, 0) = mu3y(i) + gen.normal();
  for (int i = 0; i < n; ++i) Miy(i, 1) = mu4y(i) + gen.normal();

  const int rx = 3, ry = 4;
  Matrix Mnx = gen.gaussian_matrix(n, n - rx - 1);
  Matrix Mny = gen.gaussian_matrix(n, n - ry - 1);
  Matrix Nx = gen.gaussian_matrix(n - rx - 1, px);
  Matrix Ny = gen.gaussian_matrix(n - ry - 1, py);

  // Gaussian components live in the orthogonal complement of the signal rows.
  auto project_off = [](Matrix& N, const Matrix& S) {
    const double p = static_cast<double>(S.cols());
    N -= (N * S.transpose()) * S / p;
  };
  Matrix Sx_all(rx, px);
  Sx_all << t.S_Jx, t.S_Ix;
  Matrix Sy_all(ry, py);
  Sy_all << t.S_Jy, t.S_Iy;
  project_off(Nx, Sx_all);
  project_off(Ny, Sy_all);

  // D_x = I and D_y = diag(-5, 2) act on the raw joint scores; the column
  // norms then move into D so that the stored M_J has unit columns.
  Vector norms(2);
  norms << Mj_raw.col(0).norm(), Mj_raw.col(1).norm();
  t.M_J = Mj_raw * norms.cwiseInverse().asDiagonal();
  t.D_x = norms;
  t.D_y = Vector(2);
  t.D_y << -5.0 * norms(0), 2.0 * norms(1);
  t.M_Ix = std::move(Mix);
  t.M_Iy = std::move(Miy);

  Matrix Jx = t.joint_signal_x();
  Matrix Jy = t.joint_signal_y();
  Matrix Ix = t.M_Ix * t.S_Ix;
  Matrix Iy = t.M_Iy * t.S_Iy;

  auto calibrate = [](const Matrix& joint, const Matrix& indiv,
                      const Matrix& noise_m, Matrix& noise_s,
                      double target_snr) {
    const double signal = joint.squaredNorm() + indiv.squaredNorm();
    const double noise = (noise_m * noise_s).squaredNorm();
    const double c = std::sqrt(signal / (target_snr * noise));
    noise_s *= c;
  };
  calibrate(Jx, Ix, Mnx, Nx, snr_x);
  calibrate(Jy, Iy, Mny, Ny, snr_y);
  t.M_Nx = std::move(Mnx);
  t.M_Ny = std::move(Mny);
  t.N_x = std::move(Nx);
  t.N_y = std::move(Ny);

  // Assembled from the stored fields so re-evaluating the decomposition
  // reproduces X and Y bit for bit.
  t.X = Jx + Ix + t.M_Nx * t.N_x;
  t.Y = Jy + Iy + t.M_Ny * t.N_y;

  auto shares = [](const Matrix& joint, const Matrix& indiv,
                   const Matrix& total) {
    VarianceShares s;
    const double tot = total.squaredNorm();
    s.joint = joint.squaredNorm() / tot;
    s.individual = indiv.squaredNorm() / tot;
    s.noise = 1.0 - s.joint - s.individual;
    return s;
  };
  t.r2_x = shares(Jx, Ix, t.X);
  t.r2_y = shares(Jy, Iy, t.Y);
  return t;
}

}  // namespace sing
