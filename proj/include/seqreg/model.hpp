#pragma once

#include "seqreg/grid.hpp"
#include "seqreg/srvf.hpp"
#include "seqreg/warp.hpp"

#include <Eigen/Core>

#include <span>
#include <vector>

namespace seqreg {

/// Correction factor used in the warp Metropolis-Hastings ratio.
enum class WarpCorrection {
  /// Products of knot values of gamma*^{-1} o gamma_i and the Dirichlet
  /// density of the projected inverse perturbation, taken term by term.
  literal,
  /// Exact reverse-move density with the slope Jacobian of the
  /// composition map; leaves the target invariant.
  jacobian,
};

/// Covariance used for the SMC coefficient random-walk proposal.
enum class CoeffProposal {
  /// Weighted second moment about zero divided by J - 1.
  second_moment,
  /// Weighted covariance about the weighted mean.
  centered,
};

/// Plain hyperparameters; everything needed to rebuild a ModelConfig on a grid.
struct ModelSettings {
  int basis_count = 8;
  int partition_size = 5;
  double sigma_c = 20.0;  // prior covariance sigma_c * I
  double kappa = 5.0;
  double alpha_sigma = 4.0;
  double beta_sigma = 0.01;
  double theta_prop = 4000.0;
  int sweeps = 20;  // K
  double resample_fraction = 0.5;
  bool center_weights = true;
  int dp_max_step = 3;
  WarpCorrection warp_correction = WarpCorrection::jacobian;
  CoeffProposal coeff_proposal = CoeffProposal::centered;
};

struct ModelConfig {
  ModelSettings settings;
  BasisSet basis;
  Partition partition;
  /// Test hook: when false every likelihood term is zero.
  bool use_likelihood = true;

  int B() const { return basis.count; }
  Eigen::Index L() const { return partition.segments(); }
  Eigen::Index M() const { return basis.grid.size(); }
  const Grid& grid() const { return basis.grid; }
};

/// Validates settings and builds the basis and uniform partition.
ModelConfig make_config(const Grid& grid, const ModelSettings& settings);

struct Particle {
  Eigen::VectorXd c;
  std::vector<Warp> warps;
  double sigma2 = 1.0;
};

struct InverseGammaParams {
  double shape;
  double scale;
};

/// sum_m (q_i(t_m) - (q_mu, w^{-1})(t_m))^2 for a template already
/// synthesized on the grid.
double residual_sumsq(const ModelConfig& cfg, const Eigen::Ref<const Eigen::VectorXd>& q_i,
                      const Eigen::Ref<const Eigen::VectorXd>& q_mu, const Warp& w);

/// Gaussian log-likelihood of M iid residuals with the given sum of squares.
double gaussian_loglik(double sumsq, Eigen::Index M, double sigma2);

double log_likelihood_one(const Srvf& q_i, const Eigen::Ref<const Eigen::VectorXd>& c, const Warp& w_i,
                          double sigma2, const ModelConfig& cfg);
double log_prior_c(const Eigen::Ref<const Eigen::VectorXd>& c, const ModelConfig& cfg);
double log_prior_d(const Warp& w, const ModelConfig& cfg);
double log_prior_sigma2(double sigma2, const ModelConfig& cfg);

/// Log density of a symmetric Dirichlet with total concentration
/// `total` (each coordinate total / L).
double log_dirichlet_symmetric(const Eigen::Ref<const Eigen::VectorXd>& d, double total);
/// The same density without its normalizing constant, for ratios.
double log_dirichlet_kernel(const Eigen::Ref<const Eigen::VectorXd>& d, double total);

double log_posterior(const Particle& p, std::span<const Srvf> data, const ModelConfig& cfg);

InverseGammaParams sigma2_full_conditional_params(const Particle& p, std::span<const Srvf> data,
                                                  const ModelConfig& cfg);

}  // namespace seqreg
