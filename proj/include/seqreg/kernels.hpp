#pragma once

#include "seqreg/model.hpp"
#include "seqreg/rng.hpp"

#include <Eigen/Core>

#include <span>

namespace seqreg {

struct AcceptCount {
  long accepted = 0;
  long proposed = 0;

  AcceptCount& operator+=(const AcceptCount& o) {
    accepted += o.accepted;
    proposed += o.proposed;
    return *this;
  }
  double rate() const { return proposed > 0 ? static_cast<double>(accepted) / static_cast<double>(proposed) : 0.0; }
};

/// Terms of the warp acceptance ratio other than likelihood and prior.
/// `current` is gamma_i, `perturbation` gamma^p and `proposal` gamma*.
double warp_proposal_log_correction(const Warp& current, const Warp& perturbation, const Warp& proposal,
                                    double theta, WarpCorrection mode);

/// K Metropolis-Hastings steps on the warp of function i. Proposals compose
/// the current warp with a symmetric Dirichlet(theta / L) perturbation.
AcceptCount mh_warp_steps(Particle& p, std::size_t i, const Srvf& q_i, const Eigen::Ref<const Eigen::VectorXd>& q_mu,
                          const ModelConfig& cfg, int K, Rng& rng);

/// K random-walk steps on the coefficients with proposal N(c, L L^T).
AcceptCount mh_coeff_steps(Particle& p, std::span<const Srvf> data, const ModelConfig& cfg,
                           const Eigen::Ref<const Eigen::MatrixXd>& chol, int K, Rng& rng);

/// Sum over functions of squared residuals for coefficients c.
double data_sumsq(const Particle& p, const Eigen::Ref<const Eigen::VectorXd>& c, std::span<const Srvf> data,
                  const ModelConfig& cfg);

/// Warps every phase by the inverse Karcher mean and moves the template
/// accordingly. Returns log p(centered) - log p(uncentered) over the c and
/// increment priors.
double center_particle(Particle& p, const ModelConfig& cfg);

void gibbs_sigma2(Particle& p, std::span<const Srvf> data, const ModelConfig& cfg, Rng& rng);

}  // namespace seqreg
