#include "sing/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace sing::rng {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

Seed derive(Seed base, std::uint64_t stream) {
  std::uint64_t s = base;
  (void)splitmix64(s);
  s ^= stream + 0x9e3779b97f4a7c15ULL;
  return splitmix64(s);
}

Seed derive(Seed base, std::uint64_t stream_a, std::uint64_t stream_b) {
  return derive(derive(base, stream_a), stream_b);
}

Rng::Rng(Seed seed) : gen_(seed) {}

std::uint64_t Rng::next_u64() { return gen_(); }

double Rng::uniform() {
  // 53 random bits -> double in [0, 1).
  return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::uniform_int(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_int: n must be positive");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t v;
  do {
    v = gen_();
  } while (v >= limit);
  return v % n;
}

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double m = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * m;
  have_spare_ = true;
  return u * m;
}

Eigen::MatrixXd Rng::gaussian_matrix(Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd out(rows, cols);
  // Row-major fill order so the draw sequence is part of the format.
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) out(i, j) = normal();
  return out;
}

Eigen::VectorXd Rng::gaussian_vector(Eigen::Index n) {
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) out(i) = normal();
  return out;
}

std::vector<int> Rng::permutation(int n) {
  std::vector<int> p(n);
  for (int i = 0; i < n; ++i) p[i] = i;
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(uniform_int(static_cast<std::uint64_t>(i) + 1));
    std::swap(p[i], p[j]);
  }
  return p;
}

std::vector<int> Rng::sample_without_replacement(int n, int k) {
  if (k > n) throw std::invalid_argument("sample_without_replacement: k > n");
  std::vector<int> pool(n);
  for (int i = 0; i < n; ++i) pool[i] = i;
  for (int i = 0; i < k; ++i) {
    const int j = i + static_cast<int>(uniform_int(static_cast<std::uint64_t>(n - i)));
    std::swap(pool[i], pool[j]);
  }
  std::vector<int> out(pool.begin(), pool.begin() + k);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace sing::rng
