#pragma once

#include "seqreg/model.hpp"
#include "seqreg/smc.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace seqreg {

struct McmcSettings {
  int iterations = 50000;
  int burn_in = 40000;
  int thin = 1;
  /// Initial random-walk standard deviation for every coefficient.
  double c_step = 0.05;
  bool adapt = true;
  std::uint64_t seed = 0;
  /// Warp MH steps per function per sweep.
  int warp_steps = 1;
  /// Rounds of least-squares template fitting, warp refinement and centering
  /// applied to the starting state.
  int init_refinements = 5;
  /// Test hook: skip the per-sweep centering transformation.
  bool center = true;
};

void validate(const McmcSettings& s);

struct McmcResult {
  ParticleSystem system;
  /// Unnormalized log posterior of each retained draw, aligned with particles.
  std::vector<double> log_posterior;
  double accept_c = 0.0;
  double accept_warp = 0.0;
};

/// Number of post-burn-in states kept after thinning.
int retained_count(const McmcSettings& s);

/// Local pattern search on the interior knot values of `start` minimizing
/// the residual sum of squares against the template q_mu.
Warp refine_warp(const Eigen::Ref<const Eigen::VectorXd>& q_i, const Eigen::Ref<const Eigen::VectorXd>& q_mu,
                 const Warp& start, const ModelConfig& cfg);

/// Ridge-regularized least-squares coefficients for fixed warps.
Eigen::VectorXd coefficients_given_warps(std::span<const Srvf> data, const std::vector<Warp>& warps,
                                         const ModelConfig& cfg);

/// Single-chain batch sampler for the posterior given `data`. Returns the
/// last J retained states with equal weights.
McmcResult mcmc_batch(std::span<const Srvf> data, const ModelConfig& cfg, const McmcSettings& settings, int J);

/// Starting state: template from the cross-sectional SRVF mean and warps from
/// dynamic-programming alignment to it, followed by `refinements` rounds of
/// least-squares coefficients given the warps, per-warp knot refinement and
/// centering.
Particle mcmc_initial_state(std::span<const Srvf> data, const ModelConfig& cfg, int refinements = 5);

}  // namespace seqreg
