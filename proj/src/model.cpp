#include "seqreg/model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace seqreg {

ModelConfig make_config(const Grid& grid, const ModelSettings& s) {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) throw std::invalid_argument(std::string(name) + " must be positive");
  };
  positive(s.sigma_c, "sigma_c");
  positive(s.kappa, "kappa");
  positive(s.alpha_sigma, "alpha_sigma");
  positive(s.beta_sigma, "beta_sigma");
  positive(s.theta_prop, "theta_prop");
  if (s.sweeps < 0) throw std::invalid_argument("sweeps must be nonnegative");
  if (!(s.resample_fraction >= 0.0 && s.resample_fraction <= 1.0)) {
    throw std::invalid_argument("resample_fraction must lie in [0, 1]");
  }
  if (s.dp_max_step < 1) throw std::invalid_argument("dp_max_step must be >= 1");

  ModelConfig cfg;
  cfg.settings = s;
  cfg.basis = make_basis(grid, s.basis_count);
  cfg.partition = Partition::uniform(s.partition_size);
  return cfg;
}

double residual_sumsq(const ModelConfig& cfg, const Eigen::Ref<const Eigen::VectorXd>& q_i,
                      const Eigen::Ref<const Eigen::VectorXd>& q_mu, const Warp& w) {
  Eigen::VectorXd warped(q_i.size());
  warp_action_inverse_into(cfg.grid(), q_mu, w, warped);
  return (q_i - warped).squaredNorm();
}

double gaussian_loglik(double sumsq, Eigen::Index M, double sigma2) {
  return -0.5 * static_cast<double>(M) * std::log(2.0 * std::numbers::pi * sigma2) - sumsq / (2.0 * sigma2);
}

double log_likelihood_one(const Srvf& q_i, const Eigen::Ref<const Eigen::VectorXd>& c, const Warp& w_i,
                          double sigma2, const ModelConfig& cfg) {
  if (!(sigma2 > 0.0)) {
    throw std::invalid_argument("log_likelihood_one: sigma2 must be positive");
  }
  if (c.size() != cfg.B() || q_i.values.size() != cfg.M()) {
    throw std::invalid_argument("log_likelihood_one: dimension mismatch");
  }
  if (!cfg.use_likelihood) return 0.0;
  const Eigen::VectorXd q_mu = cfg.basis.phi * c;
  return gaussian_loglik(residual_sumsq(cfg, q_i.values, q_mu, w_i), cfg.M(), sigma2);
}

double log_prior_c(const Eigen::Ref<const Eigen::VectorXd>& c, const ModelConfig& cfg) {
  const double v = cfg.settings.sigma_c;
  const auto B = static_cast<double>(c.size());
  return -0.5 * B * std::log(2.0 * std::numbers::pi * v) - 0.5 * c.squaredNorm() / v;
}

double log_dirichlet_kernel(const Eigen::Ref<const Eigen::VectorXd>& d, double total) {
  const double a = total / static_cast<double>(d.size());
  double s = 0.0;
  for (Eigen::Index k = 0; k < d.size(); ++k) s += std::log(d[k]);
  return (a - 1.0) * s;
}

double log_dirichlet_symmetric(const Eigen::Ref<const Eigen::VectorXd>& d, double total) {
  const auto L = static_cast<double>(d.size());
  return std::lgamma(total) - L * std::lgamma(total / L) + log_dirichlet_kernel(d, total);
}

double log_prior_d(const Warp& w, const ModelConfig& cfg) {
  return log_dirichlet_symmetric(w.increments(), cfg.settings.kappa);
}

double log_prior_sigma2(double sigma2, const ModelConfig& cfg) {
  if (!(sigma2 > 0.0)) {
    throw std::invalid_argument("log_prior_sigma2: sigma2 must be positive");
  }
  const double a = cfg.settings.alpha_sigma;
  const double b = cfg.settings.beta_sigma;
  return a * std::log(b) - std::lgamma(a) - (a + 1.0) * std::log(sigma2) - b / sigma2;
}

namespace {

void check_data(const Particle& p, std::span<const Srvf> data) {
  if (p.warps.size() != data.size()) {
    throw std::invalid_argument("particle has " + std::to_string(p.warps.size()) + " warps but " +
                                std::to_string(data.size()) + " functions were given");
  }
}

double total_sumsq(const Particle& p, std::span<const Srvf> data, const ModelConfig& cfg) {
  const Eigen::VectorXd q_mu = cfg.basis.phi * p.c;
  double ss = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    ss += residual_sumsq(cfg, data[i].values, q_mu, p.warps[i]);
  }
  return ss;
}

}  // namespace

double log_posterior(const Particle& p, std::span<const Srvf> data, const ModelConfig& cfg) {
  check_data(p, data);
  double lp = log_prior_c(p.c, cfg) + log_prior_sigma2(p.sigma2, cfg);
  for (std::size_t i = 0; i < data.size(); ++i) {
    lp += log_likelihood_one(data[i], p.c, p.warps[i], p.sigma2, cfg) + log_prior_d(p.warps[i], cfg);
  }
  return lp;
}

InverseGammaParams sigma2_full_conditional_params(const Particle& p, std::span<const Srvf> data,
                                                  const ModelConfig& cfg) {
  check_data(p, data);
  if (!cfg.use_likelihood) return {cfg.settings.alpha_sigma, cfg.settings.beta_sigma};
  const auto n = static_cast<double>(data.size());
  const auto M = static_cast<double>(cfg.M());
  return {cfg.settings.alpha_sigma + 0.5 * n * M, cfg.settings.beta_sigma + 0.5 * total_sumsq(p, data, cfg)};
}

}  // namespace seqreg
