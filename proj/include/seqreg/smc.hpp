#pragma once

#include "seqreg/kernels.hpp"
#include "seqreg/model.hpp"
#include "seqreg/rng.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <vector>

namespace seqreg {

/// Master seed plus the number of completed sequential updates; together
/// with particle index and stage they key every random stream.
struct RngState {
  std::uint64_t seed = 0;
  std::uint64_t update_index = 0;
};

struct UpdateDiagnostics {
  int n = 0;                   // functions assimilated after this update
  double ess_weighted = 0.0;   // after the new-phase reweighting
  bool resampled = false;
  double ess_final = 0.0;      // at the end of the update
  double accept_c = 0.0;
  double accept_warp = 0.0;
  double wall_seconds = 0.0;   // not persisted in state files
};

struct ParticleSystem {
  std::vector<Particle> particles;
  Eigen::VectorXd weights;
  int n = 0;
  ModelConfig cfg;
  RngState rng;
  std::vector<UpdateDiagnostics> history;

  std::size_t size() const { return particles.size(); }
};

/// Checks weight normalization and warp-count bookkeeping.
void validate(const ParticleSystem& sys);

/// (sum w^2)^{-1}; throws std::invalid_argument if weights are not normalized.
double ess(const Eigen::Ref<const Eigen::VectorXd>& weights);

/// Normalizes log-weights with the log-sum-exp shift.
Eigen::VectorXd normalize_log_weights(const Eigen::Ref<const Eigen::VectorXd>& log_w);

/// Multinomial resampling from the resample stream of the current update.
ParticleSystem resample_multinomial(const ParticleSystem& sys);

/// Dynamic-programming registration of q_new to the particle's template,
/// projected to the model partition.
Warp init_new_phase(const Particle& particle, const Srvf& q_new, const ModelConfig& cfg);

/// Appends a new phase to every particle and reweights by likelihood times
/// increment prior; resamples when ESS drops below resample_fraction * J.
void augment_and_weight(ParticleSystem& sys, const Srvf& q_new, int workers = 1,
                        UpdateDiagnostics* diag = nullptr);

/// Proposal covariance for the coefficient sweep, chosen by
/// cfg.settings.coeff_proposal, with a small diagonal jitter.
Eigen::MatrixXd coefficient_proposal_covariance(const ParticleSystem& sys);

AcceptCount mh_sweep_coeffs(ParticleSystem& sys, std::span<const Srvf> data, int K, int workers = 1);
AcceptCount mh_sweep_warps(ParticleSystem& sys, std::span<const Srvf> data, int K, int workers = 1);

/// Centering with the prior-ratio weight update (skipped when
/// cfg.settings.center_weights is false).
void center(ParticleSystem& sys, int workers = 1);

void gibbs_sigma(ParticleSystem& sys, std::span<const Srvf> data, int workers = 1);

/// One full sequential update. `data_so_far` holds the sys.n functions
/// already assimilated.
void assimilate(ParticleSystem& sys, const FunctionSample& f_new, std::span<const FunctionSample> data_so_far,
                int workers = 1);
/// Same, with SRVFs precomputed: data holds all n + 1 functions.
void assimilate_srvf(ParticleSystem& sys, std::span<const Srvf> data, int workers = 1);

/// Weighted posterior summaries.
Eigen::VectorXd weighted_mean_coefficients(const ParticleSystem& sys);
Eigen::VectorXd weighted_mean_increments(const ParticleSystem& sys, std::size_t i);
double weighted_mean_sigma2(const ParticleSystem& sys);

}  // namespace seqreg
