#include "seqreg/rng.hpp"

#include <stdexcept>

namespace seqreg {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

Rng::Rng(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  engine_.seed(seq);
}

Rng Rng::stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b, StreamTag tag) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ a);
  h = splitmix64(h ^ (b * 0x632be59bd9b4e019ULL));
  h = splitmix64(h ^ static_cast<std::uint64_t>(tag));
  return Rng(h);
}

double Rng::uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

double Rng::normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }

double Rng::gamma(double shape) {
  if (!(shape > 0.0)) {
    throw std::invalid_argument("gamma shape must be positive");
  }
  return std::gamma_distribution<double>(shape, 1.0)(engine_);
}

double Rng::inverse_gamma(double shape, double scale) {
  double g = gamma(shape);
  while (g <= 0.0) g = gamma(shape);
  return scale / g;
}

Eigen::VectorXd Rng::dirichlet(Eigen::Index L, double alpha) {
  Eigen::VectorXd d(L);
  double sum = 0.0;
  for (Eigen::Index k = 0; k < L; ++k) {
    d[k] = gamma(alpha);
    sum += d[k];
  }
  if (!(sum > 0.0)) {
    // all draws underflowed; fall back to a single-vertex draw
    d.setZero();
    d[static_cast<Eigen::Index>(uniform() * static_cast<double>(L)) % L] = 1.0;
    return d;
  }
  return d / sum;
}

Eigen::VectorXd Rng::standard_normal(Eigen::Index n) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z[i] = dist(engine_);
  return z;
}

}  // namespace seqreg
