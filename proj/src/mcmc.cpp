#include "seqreg/mcmc.hpp"

#include "seqreg/align.hpp"
#include "seqreg/errors.hpp"
#include "seqreg/kernels.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace seqreg {

namespace {

// Welford accumulator for the running coefficient covariance.
struct RunningCov {
  long count = 0;
  Eigen::VectorXd mean;
  Eigen::MatrixXd m2;

  explicit RunningCov(int B) : mean(Eigen::VectorXd::Zero(B)), m2(Eigen::MatrixXd::Zero(B, B)) {}

  void add(const Eigen::VectorXd& x) {
    ++count;
    const Eigen::VectorXd delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2.noalias() += delta * (x - mean).transpose();
  }
  Eigen::MatrixXd cov() const { return m2 / static_cast<double>(count - 1); }
};

Eigen::MatrixXd cholesky_or_throw(const Eigen::MatrixXd& cov) {
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) throw NumericalError("MCMC proposal covariance is not positive definite");
  return llt.matrixL();
}

}  // namespace

void validate(const McmcSettings& s) {
  if (s.iterations < 1) throw std::invalid_argument("iterations must be positive");
  if (s.burn_in < 0 || s.burn_in >= s.iterations) throw std::invalid_argument("burn-in must be in [0, iterations)");
  if (s.thin < 1) throw std::invalid_argument("thin must be at least 1");
  if (!(s.c_step > 0.0)) throw std::invalid_argument("c_step must be positive");
  if (s.warp_steps < 0) throw std::invalid_argument("warp_steps must be nonnegative");
  if (s.init_refinements < 0) throw std::invalid_argument("init_refinements must be nonnegative");
}

int retained_count(const McmcSettings& s) { return (s.iterations - s.burn_in + s.thin - 1) / s.thin; }

Warp refine_warp(const Eigen::Ref<const Eigen::VectorXd>& q_i, const Eigen::Ref<const Eigen::VectorXd>& q_mu,
                 const Warp& start, const ModelConfig& cfg) {
  const Partition& part = cfg.partition;
  const Eigen::Index L = part.segments();
  Eigen::VectorXd g = start.knot_values();
  auto cost = [&](const Eigen::VectorXd& knots) {
    Eigen::VectorXd d(L);
    for (Eigen::Index k = 0; k < L; ++k) d[k] = knots[k + 1] - knots[k];
    return residual_sumsq(cfg, q_i, q_mu, Warp(part, d));
  };
  double best = cost(g);
  for (double h = 0.02; h > 1e-6; h *= 0.5) {
    bool improved = true;
    while (improved) {
      improved = false;
      for (Eigen::Index m = 1; m < L; ++m) {
        for (const double step : {h, -h}) {
          const double v = g[m] + step;
          if (v - g[m - 1] < 2.0 * kIncrementFloor || g[m + 1] - v < 2.0 * kIncrementFloor) continue;
          const double old = g[m];
          g[m] = v;
          const double c = cost(g);
          if (c < best) {
            best = c;
            improved = true;
          } else {
            g[m] = old;
          }
        }
      }
    }
  }
  Eigen::VectorXd d(L);
  for (Eigen::Index k = 0; k < L; ++k) d[k] = g[k + 1] - g[k];
  return Warp(part, d);
}

Eigen::VectorXd coefficients_given_warps(std::span<const Srvf> data, const std::vector<Warp>& warps,
                                         const ModelConfig& cfg) {
  const int B = cfg.B();
  const Eigen::Index M = cfg.M();
  Eigen::MatrixXd normal = Eigen::MatrixXd::Identity(B, B) / cfg.settings.sigma_c;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(B);
  Eigen::MatrixXd A(M, B);
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (int b = 0; b < B; ++b) warp_action_inverse_into(cfg.grid(), cfg.basis.phi.col(b), warps[i], A.col(b));
    normal.noalias() += A.transpose() * A;
    rhs.noalias() += A.transpose() * data[i].values;
  }
  return normal.ldlt().solve(rhs);
}

Particle mcmc_initial_state(std::span<const Srvf> data, const ModelConfig& cfg, int refinements) {
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(cfg.M());
  for (const auto& q : data) mean += q.values;
  mean /= static_cast<double>(data.size());

  Particle p;
  p.c = project_onto_basis(cfg.basis, mean);
  const Srvf q_mu(cfg.grid(), cfg.basis.phi * p.c);
  for (const auto& q : data) {
    p.warps.push_back(increments_of(dp_align(q_mu, q, cfg.settings.dp_max_step), cfg.partition));
  }

  for (int r = 0; r < refinements; ++r) {
    p.c = coefficients_given_warps(data, p.warps, cfg);
    const Eigen::VectorXd q = cfg.basis.phi * p.c;
    for (std::size_t i = 0; i < data.size(); ++i) p.warps[i] = refine_warp(data[i].values, q, p.warps[i], cfg);
    center_particle(p, cfg);
  }

  const double a = cfg.settings.alpha_sigma;
  p.sigma2 = a > 1.0 ? cfg.settings.beta_sigma / (a - 1.0) : cfg.settings.beta_sigma;
  return p;
}

McmcResult mcmc_batch(std::span<const Srvf> data, const ModelConfig& cfg, const McmcSettings& settings, int J) {
  validate(settings);
  if (data.empty()) throw std::invalid_argument("mcmc_batch needs at least one function");
  if (J < 1) throw std::invalid_argument("particle count must be positive");
  if (J > retained_count(settings)) {
    throw std::invalid_argument("requested " + std::to_string(J) + " particles but only " +
                                std::to_string(retained_count(settings)) +
                                " states are retained; increase iterations or thin less");
  }
  for (const auto& q : data) {
    if (!(q.grid == cfg.grid())) throw std::invalid_argument("data grid does not match the model grid");
  }

  const int B = cfg.B();
  Rng rng = Rng::stream(settings.seed, 0, 0, StreamTag::mcmc);
  Particle state = mcmc_initial_state(data, cfg, settings.init_refinements);

  Eigen::MatrixXd base_cov = Eigen::MatrixXd::Identity(B, B) * (settings.c_step * settings.c_step);
  double log_scale = 0.0;
  Eigen::MatrixXd chol = cholesky_or_throw(base_cov);

  // Adaptation runs only inside burn-in so retained draws come from a fixed kernel.
  const int adapt_from = settings.burn_in / 4;
  const int adapt_every = 50;
  RunningCov running(B);

  const int first_kept = retained_count(settings) - J;
  std::vector<Particle> kept;
  std::vector<double> kept_lp;
  kept.reserve(J);
  kept_lp.reserve(J);
  AcceptCount acc_c_post;
  AcceptCount acc_w_post;

  for (int sweep = 0; sweep < settings.iterations; ++sweep) {
    const bool adapting = settings.adapt && sweep < settings.burn_in;

    const AcceptCount ac = mh_coeff_steps(state, data, cfg, chol, 1, rng);
    const Eigen::VectorXd q_mu = cfg.basis.phi * state.c;
    AcceptCount aw;
    for (std::size_t i = 0; i < data.size(); ++i) {
      aw += mh_warp_steps(state, i, data[i], q_mu, cfg, settings.warp_steps, rng);
    }
    gibbs_sigma2(state, data, cfg, rng);
    if (settings.center) center_particle(state, cfg);

    if (adapting) {
      const double step = std::pow(1.0 + sweep, -0.6);
      log_scale += step * (ac.rate() - 0.234);
      log_scale = std::clamp(log_scale, -20.0, 20.0);
      if (sweep >= adapt_from) running.add(state.c);
      if (sweep % adapt_every == 0) {
        Eigen::MatrixXd cov = base_cov;
        if (running.count > 2 * B) cov = (2.38 * 2.38 / B) * running.cov();
        cov *= std::exp(2.0 * log_scale);
        cov.diagonal().array() += 1e-8;
        chol = cholesky_or_throw(cov);
      }
    } else if (settings.adapt && sweep == settings.burn_in) {
      Eigen::MatrixXd cov = base_cov;
      if (running.count > 2 * B) cov = (2.38 * 2.38 / B) * running.cov();
      cov *= std::exp(2.0 * log_scale);
      cov.diagonal().array() += 1e-8;
      chol = cholesky_or_throw(cov);
    }

    if (sweep >= settings.burn_in) {
      acc_c_post += ac;
      acc_w_post += aw;
      const int offset = sweep - settings.burn_in;
      if (offset % settings.thin == 0 && offset / settings.thin >= first_kept) {
        kept.push_back(state);
        kept_lp.push_back(log_posterior(state, data, cfg));
      }
    }
  }

  McmcResult out;
  out.system.cfg = cfg;
  out.system.n = static_cast<int>(data.size());
  out.system.rng = {settings.seed, 0};
  out.system.particles = std::move(kept);
  out.system.weights = Eigen::VectorXd::Constant(J, 1.0 / J);
  out.log_posterior = std::move(kept_lp);
  out.accept_c = acc_c_post.rate();
  out.accept_warp = acc_w_post.rate();
  return out;
}

}  // namespace seqreg
