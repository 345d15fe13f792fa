#include "seqreg/srvf.hpp"

#include "seqreg/rng.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace seqreg;

namespace {

Eigen::VectorXd smooth_random(const Grid& g, Rng& rng) {
  const Eigen::ArrayXd t = g.points().array();
  Eigen::ArrayXd v = Eigen::ArrayXd::Constant(t.size(), rng.normal());
  for (int k = 1; k <= 4; ++k) {
    v += rng.normal() / k * (2.0 * M_PI * k * t).sin() + rng.normal() / k * (2.0 * M_PI * k * t).cos();
  }
  return v.matrix();
}

Warp random_warp(const Partition& p, Rng& rng, double alpha) {
  return Warp(p, rng.dirichlet(p.segments(), alpha));
}

}  // namespace

TEST(Srvf, LinearFunctions) {
  const Grid g = make_uniform_grid(51);
  const Srvf up = to_srvf(FunctionSample(g, g.points()));
  const Srvf down = to_srvf(FunctionSample(g, -g.points()));
  for (Eigen::Index m = 0; m < g.size(); ++m) {
    EXPECT_NEAR(up.values[m], 1.0, 1e-12);
    EXPECT_NEAR(down.values[m], -1.0, 1e-12);
  }
}

TEST(Srvf, SquareMatchesAnalyticOracle) {
  const Grid g = make_uniform_grid(201);
  const Srvf q = to_srvf(FunctionSample(g, g.points().array().square().matrix()));
  for (Eigen::Index m = 10; m < g.size(); ++m) EXPECT_NEAR(q.values[m], std::sqrt(2.0 * g[m]), 2e-2);
}

TEST(Srvf, ReconstructionFromConstants) {
  const Grid g = make_uniform_grid(33);
  const FunctionSample f = from_srvf(0.0, Srvf(g, Eigen::VectorXd::Ones(33)));
  EXPECT_LT((f.values - g.points()).cwiseAbs().maxCoeff(), 1e-12);
  const FunctionSample c = from_srvf(2.5, Srvf(g, Eigen::VectorXd::Zero(33)));
  EXPECT_LT((c.values.array() - 2.5).abs().maxCoeff(), 1e-15);
}

TEST(Srvf, RoundTripOnFineGrid) {
  const Grid g = make_uniform_grid(401);
  const Eigen::VectorXd f = ((2.0 * M_PI * g.points().array()).sin() + g.points().array()).matrix();
  const FunctionSample back = from_srvf(f[0], to_srvf(FunctionSample(g, f)));
  EXPECT_DOUBLE_EQ(back.values[0], f[0]);
  EXPECT_LT((back.values - f).cwiseAbs().maxCoeff(), 1e-3);
}

TEST(Srvf, Distances) {
  const Grid g = make_uniform_grid(21);
  const Srvf one(g, Eigen::VectorXd::Ones(21));
  const Srvf zero(g, Eigen::VectorXd::Zero(21));
  const Srvf minus(g, -Eigen::VectorXd::Ones(21));
  EXPECT_DOUBLE_EQ(l2_distance(one, one), 0.0);
  EXPECT_NEAR(l2_distance(one, zero), 1.0, 1e-14);
  EXPECT_NEAR(l2_distance(one, minus), 2.0, 1e-14);
  EXPECT_THROW(l2_distance(one, Srvf(make_uniform_grid(22), Eigen::VectorXd::Ones(22))), std::invalid_argument);
}

TEST(Srvf, IdentityActionIsExact) {
  const Grid g = make_uniform_grid(101);
  Rng rng(3);
  const Srvf q(g, smooth_random(g, rng));
  const Srvf moved = warp_action(q, identity_warp(Partition::uniform(6)));
  EXPECT_EQ(moved.values, q.values);

  const Partition half(Eigen::Vector3d(0.0, 0.5, 1.0));
  const Srvf ones(g, Eigen::VectorXd::Ones(101));
  const Srvf moved_ones = warp_action(ones, Warp(half, Eigen::Vector2d(0.5, 0.5)));
  EXPECT_LT((moved_ones.values.array() - 1.0).abs().maxCoeff(), 1e-14);
}

TEST(Srvf, ActionPreservesNorm) {
  const Grid g = make_uniform_grid(401);
  const Partition p = Partition::uniform(6);
  const Srvf zero(g, Eigen::VectorXd::Zero(401));
  Rng rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    const Srvf q(g, smooth_random(g, rng));
    const Srvf moved = warp_action(q, random_warp(p, rng, 10.0));
    const double n0 = l2_distance(q, zero);
    EXPECT_NEAR(l2_distance(moved, zero), n0, 5e-3 * n0);
  }
}

TEST(Srvf, SimultaneousWarpIsometry) {
  const Grid g = make_uniform_grid(401);
  const Partition p = Partition::uniform(6);
  Rng rng(12);
  for (int rep = 0; rep < 20; ++rep) {
    const Srvf q1(g, smooth_random(g, rng));
    const Srvf q2(g, smooth_random(g, rng));
    const Warp w = random_warp(p, rng, 10.0);
    EXPECT_LT(std::abs(l2_distance(q1, q2) - l2_distance(warp_action(q1, w), warp_action(q2, w))), 1e-2);
  }
}

namespace {

PiecewiseLinearMap exact_composition(const Warp& w1, const Warp& w2) {
  const PiecewiseLinearMap outer = w1.curve();
  const PiecewiseLinearMap inner_map = w2.curve();
  const PiecewiseLinearMap inner_inv = w2.inverse_curve();
  std::vector<double> xs(outer.x.data(), outer.x.data() + outer.x.size());
  for (Eigen::Index k = 0; k < outer.x.size(); ++k) xs.push_back(inner_inv(outer.x[k]));
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end(), [](double a, double b) { return b - a < 1e-14; }), xs.end());
  PiecewiseLinearMap out{Eigen::VectorXd(static_cast<Eigen::Index>(xs.size())),
                         Eigen::VectorXd(static_cast<Eigen::Index>(xs.size()))};
  for (std::size_t k = 0; k < xs.size(); ++k) {
    out.x[static_cast<Eigen::Index>(k)] = xs[k];
    out.y[static_cast<Eigen::Index>(k)] = outer(inner_map(xs[k]));
  }
  out.x[0] = 0.0;
  out.x[out.x.size() - 1] = 1.0;
  return out;
}

}  // namespace

// Kinks of the composed warp fall between grid points, so the two routes
// differ by an O(sqrt(h)) interpolation error that shrinks under refinement.
TEST(Srvf, ActionComposes) {
  const Partition p = Partition::uniform(6);
  std::vector<double> worst;
  for (int M : {401, 2001}) {
    const Grid g = make_uniform_grid(M);
    Rng rng(13);
    double w = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
      const Srvf q(g, smooth_random(g, rng));
      const Warp w1 = random_warp(p, rng, 20.0);
      const Warp w2 = random_warp(p, rng, 20.0);
      const Srvf twice = warp_action(warp_action(q, w1), w2);
      const Srvf once = warp_action(q, exact_composition(w1, w2));
      w = std::max(w, l2_distance(twice, once) / std::sqrt(inner(g, q.values, q.values)));
    }
    worst.push_back(w);
  }
  EXPECT_LT(worst[1], 0.6 * worst[0]);
  EXPECT_LT(worst[1], 2e-2);
}

TEST(Srvf, ComposedWarpMatchesExactCompositionAtKnots) {
  const Partition p = Partition::uniform(6);
  Rng rng(15);
  for (int rep = 0; rep < 20; ++rep) {
    const Warp w1 = random_warp(p, rng, 20.0);
    const Warp w2 = random_warp(p, rng, 20.0);
    const PiecewiseLinearMap exact = exact_composition(w1, w2);
    const Eigen::VectorXd knots = compose(w1, w2).knot_values();
    for (Eigen::Index m = 0; m < p.size(); ++m) EXPECT_NEAR(knots[m], exact(p[m]), 1e-12);
  }
}

TEST(Srvf, ColumnActionMatchesVectorAction) {
  const Grid g = make_uniform_grid(101);
  const Partition p = Partition::uniform(5);
  Rng rng(16);
  Eigen::MatrixXd Q(101, 3);
  for (int b = 0; b < 3; ++b) Q.col(b) = smooth_random(g, rng);
  const PiecewiseLinearMap gamma = random_warp(p, rng, 10.0).inverse_curve();
  Eigen::MatrixXd out(101, 3);
  warp_action_columns_into(g, Q, gamma, out);
  for (int b = 0; b < 3; ++b) {
    Eigen::VectorXd v(101);
    warp_action_into(g, Q.col(b), gamma, v);
    EXPECT_EQ(v, out.col(b));
  }
}

TEST(Srvf, InverseActionUndoesAction) {
  const Grid g = make_uniform_grid(401);
  const Partition p = Partition::uniform(5);
  Rng rng(14);
  const Srvf q(g, smooth_random(g, rng));
  const Warp w = random_warp(p, rng, 20.0);
  Eigen::VectorXd back(401);
  warp_action_inverse_into(g, warp_action(q, w).values, w, back);
  EXPECT_LT(l2_distance(Srvf(g, back), q), 2e-2);
}
