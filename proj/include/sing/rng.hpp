#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace sing::rng {

using Seed = std::uint64_t;

/// Mixes a base seed with a stream id so that parallel workers (restarts,
/// permutations, replications) get decorrelated, reproducible streams.
Seed derive(Seed base, std::uint64_t stream);
Seed derive(Seed base, std::uint64_t stream_a, std::uint64_t stream_b);

/// Deterministic random source. Draws are generated from mt19937_64 raw
/// output through our own transforms, so results do not depend on the
/// standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(Seed seed);

  std::uint64_t next_u64();

  /// Uniform on [0, 1).
  double uniform();

  /// Uniform integer in [0, n), n >= 1. Rejection sampling, unbiased.
  std::uint64_t uniform_int(std::uint64_t n);

  /// Standard normal via the polar (Marsaglia) method.
  double normal();

  Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols);
  Eigen::VectorXd gaussian_vector(Eigen::Index n);

  /// Fisher-Yates shuffle of {0, ..., n-1}.
  std::vector<int> permutation(int n);

  /// k distinct values from {0, ..., n-1} (partial Fisher-Yates), sorted.
  std::vector<int> sample_without_replacement(int n, int k);

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace sing::rng
