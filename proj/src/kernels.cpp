#include "seqreg/kernels.hpp"

#include <cmath>
#include <limits>

namespace seqreg {

double warp_proposal_log_correction(const Warp& current, const Warp& perturbation, const Warp& proposal,
                                    double theta, WarpCorrection mode) {
  const Eigen::Index L = current.segments();
  const Eigen::VectorXd g_cur = current.knot_values();
  const PiecewiseLinearMap prop_inv = proposal.inverse_curve();

  if (mode == WarpCorrection::literal) {
    const Eigen::VectorXd g_prop = proposal.knot_values();
    const PiecewiseLinearMap cur_inv = current.inverse_curve();
    double num = 0.0;
    double den = 0.0;
    // interior knots only; the endpoint factors are the constants 0 and 1
    for (Eigen::Index m = 1; m < L; ++m) {
      num += std::log(prop_inv(g_cur[m]));
      den += std::log(cur_inv(g_prop[m]));
    }
    return num - den + log_dirichlet_kernel(invert(perturbation).increments(), theta) -
           log_dirichlet_kernel(perturbation.increments(), theta);
  }

  // Reverse move: the perturbation taking gamma* back to gamma_i has knot
  // values gamma*^{-1}(gamma_i(s_m)). Each interior knot maps through a
  // single segment, so the Jacobians are products of segment slopes.
  const Eigen::VectorXd g_pert = perturbation.knot_values();
  const PiecewiseLinearMap cur = current.curve();
  const PiecewiseLinearMap prop = proposal.curve();
  Eigen::VectorXd d_rev(L);
  double prev = 0.0;
  double log_jac_fwd = 0.0;
  double log_jac_rev = 0.0;
  for (Eigen::Index m = 1; m <= L; ++m) {
    const double next = (m == L) ? 1.0 : prop_inv(g_cur[m]);
    d_rev[m - 1] = next - prev;
    if (!(d_rev[m - 1] > 0.0)) return -std::numeric_limits<double>::infinity();
    if (m < L) {
      log_jac_fwd += std::log(cur.slope(g_pert[m]));
      log_jac_rev += std::log(prop.slope(next));
    }
    prev = next;
  }
  return log_dirichlet_kernel(d_rev, theta) - log_dirichlet_kernel(perturbation.increments(), theta) +
         log_jac_fwd - log_jac_rev;
}

AcceptCount mh_warp_steps(Particle& p, std::size_t i, const Srvf& q_i, const Eigen::Ref<const Eigen::VectorXd>& q_mu,
                          const ModelConfig& cfg, int K, Rng& rng) {
  AcceptCount count;
  if (K <= 0) return count;
  const double theta = cfg.settings.theta_prop;
  const double kappa = cfg.settings.kappa;
  const Eigen::Index L = cfg.L();
  Warp& w = p.warps[i];
  Eigen::VectorXd warped(q_i.values.size());
  const auto sumsq = [&](const Warp& v) {
    if (!cfg.use_likelihood) return 0.0;
    warp_action_inverse_into(cfg.grid(), q_mu, v, warped);
    return (q_i.values - warped).squaredNorm();
  };
  double ss = sumsq(w);
  double log_prior = log_dirichlet_kernel(w.increments(), kappa);
  for (int k = 0; k < K; ++k) {
    const Warp perturbation(cfg.partition, rng.dirichlet(L, theta / static_cast<double>(L)));
    Warp proposal = compose(w, perturbation);
    const double ss_new = sumsq(proposal);
    const double log_prior_new = log_dirichlet_kernel(proposal.increments(), kappa);
    const double log_ratio = -(ss_new - ss) / (2.0 * p.sigma2) + log_prior_new - log_prior +
                             warp_proposal_log_correction(w, perturbation, proposal, theta,
                                                          cfg.settings.warp_correction);
    ++count.proposed;
    if (std::log(rng.uniform()) < log_ratio) {
      w = std::move(proposal);
      ss = ss_new;
      log_prior = log_prior_new;
      ++count.accepted;
    }
  }
  return count;
}

double data_sumsq(const Particle& p, const Eigen::Ref<const Eigen::VectorXd>& c, std::span<const Srvf> data,
                  const ModelConfig& cfg) {
  if (!cfg.use_likelihood) return 0.0;
  const Eigen::VectorXd q_mu = cfg.basis.phi * c;
  double ss = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) ss += residual_sumsq(cfg, data[i].values, q_mu, p.warps[i]);
  return ss;
}

AcceptCount mh_coeff_steps(Particle& p, std::span<const Srvf> data, const ModelConfig& cfg,
                           const Eigen::Ref<const Eigen::MatrixXd>& chol, int K, Rng& rng) {
  AcceptCount count;
  if (K <= 0) return count;
  const int B = cfg.B();

  // With A_i the warped basis, SS(c) = const - 2 h'c + c'Gc, so after one
  // pass over the data each proposal costs O(B^2). Worth it beyond a few steps.
  const bool quadratic = cfg.use_likelihood && K >= 4;
  Eigen::MatrixXd G;
  Eigen::VectorXd h;
  double ss = 0.0;
  if (quadratic) {
    G = Eigen::MatrixXd::Zero(B, B);
    h = Eigen::VectorXd::Zero(B);
    Eigen::MatrixXd A(cfg.M(), B);
    for (std::size_t i = 0; i < data.size(); ++i) {
      warp_action_columns_into(cfg.grid(), cfg.basis.phi, p.warps[i].inverse_curve(), A);
      G.selfadjointView<Eigen::Lower>().rankUpdate(A.transpose());
      h.noalias() += A.transpose() * data[i].values;
    }
    G.triangularView<Eigen::StrictlyUpper>() = G.transpose();
  } else {
    ss = data_sumsq(p, p.c, data, cfg);
  }

  double lp = log_prior_c(p.c, cfg);
  for (int k = 0; k < K; ++k) {
    Eigen::VectorXd proposal = p.c + chol * rng.standard_normal(B);
    double delta = 0.0;
    double ss_new = ss;
    if (quadratic) {
      delta = (proposal - p.c).dot(G * (proposal + p.c) - 2.0 * h);
    } else {
      ss_new = data_sumsq(p, proposal, data, cfg);
      delta = ss_new - ss;
    }
    const double lp_new = log_prior_c(proposal, cfg);
    const double log_ratio = -delta / (2.0 * p.sigma2) + lp_new - lp;
    ++count.proposed;
    if (std::log(rng.uniform()) < log_ratio) {
      p.c = std::move(proposal);
      ss = ss_new;
      lp = lp_new;
      ++count.accepted;
    }
  }
  return count;
}

double center_particle(Particle& p, const ModelConfig& cfg) {
  if (p.warps.empty()) return 0.0;
  const double kappa = cfg.settings.kappa;
  double before = log_prior_c(p.c, cfg);
  for (const auto& w : p.warps) before += log_dirichlet_kernel(w.increments(), kappa);

  const Warp mean = karcher_mean_warps(p.warps);
  const PiecewiseLinearMap mean_inv = mean.inverse_curve();

  Eigen::VectorXd q_mu = cfg.basis.phi * p.c;
  Eigen::VectorXd moved(q_mu.size());
  warp_action_into(cfg.grid(), q_mu, mean_inv, moved);
  p.c = project_onto_basis(cfg.basis, moved);
  for (auto& w : p.warps) w = compose(w, mean_inv);

  double after = log_prior_c(p.c, cfg);
  for (const auto& w : p.warps) after += log_dirichlet_kernel(w.increments(), kappa);
  return after - before;
}

void gibbs_sigma2(Particle& p, std::span<const Srvf> data, const ModelConfig& cfg, Rng& rng) {
  const InverseGammaParams ig = sigma2_full_conditional_params(p, data, cfg);
  p.sigma2 = rng.inverse_gamma(ig.shape, ig.scale);
}

}  // namespace seqreg
