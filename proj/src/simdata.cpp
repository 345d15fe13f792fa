#include "seqreg/simdata.hpp"

#include "seqreg/rng.hpp"
#include "seqreg/srvf.hpp"

#include <cmath>
#include <stdexcept>

namespace seqreg {

void validate(const SimSpec& spec) {
  if (spec.n < 1 || spec.M < 3 || spec.B_true < 4 || spec.M_gamma_true < 2) {
    throw std::invalid_argument("simulation counts must be positive (M >= 3, B >= 4, M_gamma >= 2)");
  }
  if (!(spec.kappa_true > 0.0)) throw std::invalid_argument("kappa_true must be positive");
  if (!(spec.noise_sigma2 >= 0.0)) throw std::invalid_argument("noise_sigma2 must be nonnegative");
}

namespace {

std::vector<Warp> draw_warps(Rng& rng, const Partition& part, int n, double kappa) {
  std::vector<Warp> ws;
  ws.reserve(n);
  const double a = kappa / static_cast<double>(part.segments());
  for (int i = 0; i < n; ++i) ws.emplace_back(part, rng.dirichlet(part.segments(), a));
  return ws;
}

void center_warps(std::vector<Warp>& ws) {
  for (int iter = 0; iter < 20; ++iter) {
    const Warp mean = karcher_mean_warps(ws);
    const Eigen::VectorXd id = identity_warp(mean.partition()).increments();
    if ((mean.increments() - id).lpNorm<Eigen::Infinity>() < 1e-12) break;
    const PiecewiseLinearMap inv = mean.inverse_curve();
    for (auto& w : ws) w = compose(w, inv);
  }
}

}  // namespace

SimResult simulate_example1(const SimSpec& spec) {
  validate(spec);
  const Grid grid = make_uniform_grid(spec.M);
  const BasisSet basis = make_basis(grid, spec.B_true);
  const Partition part = Partition::uniform(spec.M_gamma_true);
  Rng rng = Rng::stream(spec.seed, 0, 0, StreamTag::simulate);

  SimResult out;
  out.truth.c_true = spec.c_scale * rng.standard_normal(spec.B_true);
  out.truth.sigma2_true = spec.noise_sigma2;
  const Eigen::VectorXd q_mu = basis.phi * out.truth.c_true;

  if (spec.identity_warps) {
    out.truth.warps.assign(spec.n, identity_warp(part));
  } else {
    out.truth.warps = draw_warps(rng, part, spec.n, spec.kappa_true);
    if (spec.center_truth) center_warps(out.truth.warps);
  }

  const double sd = std::sqrt(spec.noise_sigma2);
  Eigen::VectorXd q(spec.M);
  out.functions.reserve(spec.n);
  for (int i = 0; i < spec.n; ++i) {
    warp_action_inverse_into(grid, q_mu, out.truth.warps[i], q);
    if (sd > 0.0) q += sd * rng.standard_normal(spec.M);
    out.functions.push_back(from_srvf(0.0, Srvf(grid, q)));
  }
  return out;
}

SimResult simulate_example2(std::uint64_t seed, const Example2Shape& shape) {
  const Grid grid = make_uniform_grid(shape.M);
  const Partition part = Partition::uniform(shape.M_gamma);
  Rng rng = Rng::stream(seed, 1, 0, StreamTag::simulate);

  auto bump = [&](double t, double centre) {
    const double z = (t - centre) / shape.width;
    return shape.height * std::exp(-0.5 * z * z);
  };

  SimResult out;
  const int n = shape.n_two_peak + 1;
  out.truth.warps = draw_warps(rng, part, n, shape.kappa);
  for (int i = 0; i < n; ++i) {
    const PiecewiseLinearMap inv = out.truth.warps[i].inverse_curve();
    Eigen::VectorXd f(shape.M);
    for (Eigen::Index m = 0; m < shape.M; ++m) {
      const double s = inv(grid[m]);
      f[m] = i < shape.n_two_peak ? bump(s, shape.left) + bump(s, shape.right) : bump(s, shape.single);
    }
    out.functions.emplace_back(grid, std::move(f));
  }
  return out;
}

SimResult simulate(const SimSpec& spec) {
  if (spec.scenario == Scenario::example2) {
    Example2Shape shape;
    shape.M = spec.M;
    return simulate_example2(spec.seed, shape);
  }
  return simulate_example1(spec);
}

int count_local_maxima(const Eigen::Ref<const Eigen::VectorXd>& f) {
  const Eigen::Index M = f.size();
  int count = 0;
  Eigen::Index m = 1;
  while (m + 1 < M) {
    if (f[m] > f[m - 1]) {
      Eigen::Index k = m;
      while (k + 1 < M && f[k + 1] == f[m]) ++k;
      if (k + 1 < M && f[k + 1] < f[m]) ++count;
      m = k + 1;
    } else {
      ++m;
    }
  }
  return count;
}

}  // namespace seqreg
