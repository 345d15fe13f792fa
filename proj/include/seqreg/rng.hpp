#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <random>

namespace seqreg {

/// Stage tags used to split per-particle random streams.
enum class StreamTag : std::uint64_t {
  resample = 1,
  coeffs = 2,
  warps = 3,
  gibbs = 4,
  mcmc = 5,
  simulate = 6,
};

/// Thin wrapper over a 64-bit Mersenne twister with the draws this
/// library needs. Streams are derived deterministically from a tuple of
/// counters so results do not depend on thread scheduling.
class Rng {
public:
  explicit Rng(std::uint64_t seed);

  /// Independent stream for (seed, a, b, tag).
  static Rng stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b, StreamTag tag);

  double uniform();
  double normal();
  /// Gamma(shape, scale = 1).
  double gamma(double shape);
  /// Inverse-gamma with the given shape and scale.
  double inverse_gamma(double shape, double scale);
  /// Symmetric Dirichlet with concentration alpha per coordinate.
  Eigen::VectorXd dirichlet(Eigen::Index L, double alpha);
  Eigen::VectorXd standard_normal(Eigen::Index n);
  std::uint64_t next_u64() { return engine_(); }

  std::mt19937_64& engine() { return engine_; }

private:
  std::mt19937_64 engine_;
};

}  // namespace seqreg
