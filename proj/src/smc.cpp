#include "seqreg/smc.hpp"

#include "seqreg/align.hpp"
#include "seqreg/errors.hpp"
#include "seqreg/parallel.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace seqreg {

void validate(const ParticleSystem& sys) {
  if (sys.weights.size() != static_cast<Eigen::Index>(sys.particles.size())) {
    throw std::invalid_argument("weights and particles differ in length");
  }
  if (std::abs(sys.weights.sum() - 1.0) > 1e-12) {
    throw std::invalid_argument("particle weights are not normalized");
  }
  for (const auto& p : sys.particles) {
    if (static_cast<int>(p.warps.size()) != sys.n) {
      throw std::invalid_argument("particle warp count does not match n");
    }
    if (!(p.sigma2 > 0.0)) throw std::invalid_argument("particle sigma2 must be positive");
    if (p.c.size() != sys.cfg.B()) throw std::invalid_argument("particle coefficient length mismatch");
  }
}

double ess(const Eigen::Ref<const Eigen::VectorXd>& weights) {
  if (weights.size() == 0 || std::abs(weights.sum() - 1.0) > 1e-9 || (weights.array() < 0.0).any()) {
    throw std::invalid_argument("ess: weights must be nonnegative and sum to one");
  }
  return 1.0 / weights.squaredNorm();
}

Eigen::VectorXd normalize_log_weights(const Eigen::Ref<const Eigen::VectorXd>& log_w) {
  const double top = log_w.maxCoeff();
  if (!std::isfinite(top)) {
    throw NumericalError("all particle log-weights are non-finite");
  }
  Eigen::VectorXd w = (log_w.array() - top).exp().matrix();
  w /= w.sum();
  return w;
}

ParticleSystem resample_multinomial(const ParticleSystem& sys) {
  const std::size_t J = sys.size();
  Rng rng = Rng::stream(sys.rng.seed, sys.rng.update_index, 0, StreamTag::resample);
  std::vector<double> cdf(J);
  double acc = 0.0;
  for (std::size_t j = 0; j < J; ++j) {
    acc += sys.weights[static_cast<Eigen::Index>(j)];
    cdf[j] = acc;
  }
  ParticleSystem out;
  out.cfg = sys.cfg;
  out.n = sys.n;
  out.rng = sys.rng;
  out.history = sys.history;
  out.particles.reserve(J);
  for (std::size_t j = 0; j < J; ++j) {
    const double u = rng.uniform() * acc;
    auto idx = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    idx = std::min(idx, J - 1);
    while (sys.weights[static_cast<Eigen::Index>(idx)] <= 0.0 && idx > 0) --idx;
    out.particles.push_back(sys.particles[idx]);
  }
  out.weights = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(J), 1.0 / static_cast<double>(J));
  return out;
}

Warp init_new_phase(const Particle& particle, const Srvf& q_new, const ModelConfig& cfg) {
  const Srvf q_mu(cfg.grid(), cfg.basis.phi * particle.c);
  const FineWarp gamma = dp_align(q_mu, q_new, cfg.settings.dp_max_step);
  return increments_of(gamma, cfg.partition);
}

void augment_and_weight(ParticleSystem& sys, const Srvf& q_new, int workers, UpdateDiagnostics* diag) {
  const std::size_t J = sys.size();
  Eigen::VectorXd log_w(static_cast<Eigen::Index>(J));
  parallel_for(J, workers, [&](std::size_t j) {
    Particle& p = sys.particles[j];
    Warp w = init_new_phase(p, q_new, sys.cfg);
    const double w_old = sys.weights[static_cast<Eigen::Index>(j)];
    log_w[static_cast<Eigen::Index>(j)] =
        (w_old > 0.0 ? std::log(w_old) : -std::numeric_limits<double>::infinity()) +
        log_likelihood_one(q_new, p.c, w, p.sigma2, sys.cfg) + log_prior_d(w, sys.cfg);
    p.warps.push_back(std::move(w));
  });
  sys.weights = normalize_log_weights(log_w);
  sys.n += 1;

  const double e = ess(sys.weights);
  const bool resample = e < sys.cfg.settings.resample_fraction * static_cast<double>(J);
  if (diag) {
    diag->ess_weighted = e;
    diag->resampled = resample;
  }
  if (resample) sys = resample_multinomial(sys);
}

Eigen::MatrixXd coefficient_proposal_covariance(const ParticleSystem& sys) {
  const int B = sys.cfg.B();
  const bool centered = sys.cfg.settings.coeff_proposal == CoeffProposal::centered;
  const Eigen::VectorXd mean = centered ? weighted_mean_coefficients(sys) : Eigen::VectorXd::Zero(B);
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(B, B);
  for (std::size_t j = 0; j < sys.size(); ++j) {
    const Eigen::VectorXd c = sys.particles[j].c - mean;
    S.noalias() += sys.weights[static_cast<Eigen::Index>(j)] * c * c.transpose();
  }
  if (!centered && sys.size() > 1) S /= static_cast<double>(sys.size() - 1);
  S.diagonal().array() += 1e-8;
  return S;
}

AcceptCount mh_sweep_coeffs(ParticleSystem& sys, std::span<const Srvf> data, int K, int workers) {
  AcceptCount total;
  if (K <= 0 || sys.size() == 0) return total;
  const Eigen::MatrixXd cov = coefficient_proposal_covariance(sys);
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("coefficient proposal covariance is not positive definite");
  }
  const Eigen::MatrixXd chol = llt.matrixL();
  std::vector<AcceptCount> counts(sys.size());
  parallel_for(sys.size(), workers, [&](std::size_t j) {
    Rng rng = Rng::stream(sys.rng.seed, j, sys.rng.update_index, StreamTag::coeffs);
    counts[j] = mh_coeff_steps(sys.particles[j], data, sys.cfg, chol, K, rng);
  });
  for (const auto& c : counts) total += c;
  return total;
}

AcceptCount mh_sweep_warps(ParticleSystem& sys, std::span<const Srvf> data, int K, int workers) {
  AcceptCount total;
  if (K <= 0 || sys.size() == 0) return total;
  std::vector<AcceptCount> counts(sys.size());
  parallel_for(sys.size(), workers, [&](std::size_t j) {
    Rng rng = Rng::stream(sys.rng.seed, j, sys.rng.update_index, StreamTag::warps);
    Particle& p = sys.particles[j];
    const Eigen::VectorXd q_mu = sys.cfg.basis.phi * p.c;
    for (std::size_t i = 0; i < p.warps.size(); ++i) {
      counts[j] += mh_warp_steps(p, i, data[i], q_mu, sys.cfg, K, rng);
    }
  });
  for (const auto& c : counts) total += c;
  return total;
}

void center(ParticleSystem& sys, int workers) {
  const std::size_t J = sys.size();
  Eigen::VectorXd log_ratio(static_cast<Eigen::Index>(J));
  parallel_for(J, workers, [&](std::size_t j) {
    log_ratio[static_cast<Eigen::Index>(j)] = center_particle(sys.particles[j], sys.cfg);
  });
  if (!sys.cfg.settings.center_weights) return;
  Eigen::VectorXd log_w(static_cast<Eigen::Index>(J));
  for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(J); ++j) {
    log_w[j] = (sys.weights[j] > 0.0 ? std::log(sys.weights[j]) : -std::numeric_limits<double>::infinity()) +
               log_ratio[j];
  }
  sys.weights = normalize_log_weights(log_w);
}

void gibbs_sigma(ParticleSystem& sys, std::span<const Srvf> data, int workers) {
  parallel_for(sys.size(), workers, [&](std::size_t j) {
    Rng rng = Rng::stream(sys.rng.seed, j, sys.rng.update_index, StreamTag::gibbs);
    gibbs_sigma2(sys.particles[j], data, sys.cfg, rng);
  });
}

void assimilate_srvf(ParticleSystem& sys, std::span<const Srvf> data, int workers) {
  if (data.size() != static_cast<std::size_t>(sys.n) + 1) {
    throw std::invalid_argument("assimilate: expected " + std::to_string(sys.n + 1) + " functions, got " +
                                std::to_string(data.size()));
  }
  const auto start = std::chrono::steady_clock::now();
  UpdateDiagnostics diag;
  const int K = sys.cfg.settings.sweeps;

  augment_and_weight(sys, data.back(), workers, &diag);
  diag.accept_c = mh_sweep_coeffs(sys, data, K, workers).rate();
  diag.accept_warp = mh_sweep_warps(sys, data, K, workers).rate();
  center(sys, workers);
  gibbs_sigma(sys, data, workers);

  diag.n = sys.n;
  diag.ess_final = ess(sys.weights);
  diag.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  sys.history.push_back(diag);
  sys.rng.update_index += 1;
}

void assimilate(ParticleSystem& sys, const FunctionSample& f_new, std::span<const FunctionSample> data_so_far,
                int workers) {
  if (data_so_far.size() != static_cast<std::size_t>(sys.n)) {
    throw std::invalid_argument("assimilate: data_so_far must hold the " + std::to_string(sys.n) +
                                " assimilated functions");
  }
  std::vector<Srvf> q;
  q.reserve(data_so_far.size() + 1);
  for (const auto& f : data_so_far) q.push_back(to_srvf(f));
  q.push_back(to_srvf(f_new));
  assimilate_srvf(sys, q, workers);
}

Eigen::VectorXd weighted_mean_coefficients(const ParticleSystem& sys) {
  Eigen::VectorXd m = Eigen::VectorXd::Zero(sys.cfg.B());
  for (std::size_t j = 0; j < sys.size(); ++j) m += sys.weights[static_cast<Eigen::Index>(j)] * sys.particles[j].c;
  return m;
}

Eigen::VectorXd weighted_mean_increments(const ParticleSystem& sys, std::size_t i) {
  Eigen::VectorXd m = Eigen::VectorXd::Zero(sys.cfg.L());
  for (std::size_t j = 0; j < sys.size(); ++j) {
    m += sys.weights[static_cast<Eigen::Index>(j)] * sys.particles[j].warps.at(i).increments();
  }
  return m;
}

double weighted_mean_sigma2(const ParticleSystem& sys) {
  double m = 0.0;
  for (std::size_t j = 0; j < sys.size(); ++j) m += sys.weights[static_cast<Eigen::Index>(j)] * sys.particles[j].sigma2;
  return m;
}

}  // namespace seqreg
