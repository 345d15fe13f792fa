#include "seqreg/warp.hpp"

#include "seqreg/rng.hpp"

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace seqreg;

namespace {

void expect_on_simplex(const Warp& w) {
  EXPECT_GE(w.increments().minCoeff(), kIncrementFloor * (1.0 - 1e-12));
  EXPECT_NEAR(w.increments().sum(), 1.0, 1e-10);
}

}  // namespace

TEST(Partition, Validation) {
  EXPECT_THROW(Partition(Eigen::Vector2d(0.0, 1.0)), std::invalid_argument);
  EXPECT_THROW(Partition(Eigen::Vector3d(0.0, 1.0, 1.0)), std::invalid_argument);
  EXPECT_THROW(Partition(Eigen::Vector3d(0.0, 0.4, 0.9)), std::invalid_argument);
  EXPECT_EQ(Partition::uniform(5).segments(), 4);
}

TEST(Warp, IdentityIncrements) {
  const Warp u = identity_warp(Partition::uniform(5));
  for (Eigen::Index m = 0; m < 4; ++m) EXPECT_NEAR(u.increments()[m], 0.25, 1e-15);
  const Warp nu = identity_warp(Partition(Eigen::Vector3d(0.0, 0.1, 1.0)));
  EXPECT_NEAR(nu.increments()[0], 0.1, 1e-15);
  EXPECT_NEAR(nu.increments()[1], 0.9, 1e-15);
  for (double t : {0.0, 0.13, 0.3, 0.77, 1.0}) EXPECT_NEAR(eval_warp(u, t), t, 1e-15);
}

TEST(Warp, Evaluation) {
  const Warp w(Partition(Eigen::Vector3d(0.0, 0.5, 1.0)), Eigen::Vector2d(0.2, 0.8));
  EXPECT_DOUBLE_EQ(eval_warp(w, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(eval_warp(w, 1.0), 1.0);
  EXPECT_NEAR(eval_warp(w, 0.25), 0.1, 1e-15);
  EXPECT_NEAR(eval_warp(w, 0.75), 0.6, 1e-15);
  EXPECT_THROW(eval_warp(w, -0.01), std::invalid_argument);
  EXPECT_THROW(eval_warp(w, 1.01), std::invalid_argument);
}

TEST(Warp, ConstructorClipsToFloor) {
  const Warp w(Partition::uniform(4), Eigen::Vector3d(0.0, 0.5, 0.5));
  expect_on_simplex(w);
  EXPECT_NEAR(w.increments()[0], kIncrementFloor, 1e-15);
}

TEST(IncrementsOf, RecoversPiecewiseLinear) {
  const Grid g = make_uniform_grid(137);
  const Partition p = Partition::uniform(6);
  Rng rng(5);
  for (int rep = 0; rep < 10; ++rep) {
    const Warp w(p, rng.dirichlet(5, 3.0));
    Eigen::VectorXd v(g.size());
    for (Eigen::Index m = 0; m < g.size(); ++m) v[m] = eval_warp(w, g[m]);
    const Warp back = increments_of(FineWarp(g, v), p);
    EXPECT_LT((back.increments() - w.increments()).cwiseAbs().maxCoeff(), 1e-8);
  }
  const Warp id = increments_of(FineWarp(g, g.points()), p);
  EXPECT_LT((id.increments() - identity_warp(p).increments()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(IncrementsOf, MatchesLeastSquaresOracleOnSquare) {
  const Grid g = make_uniform_grid(401);
  const Partition p = Partition::uniform(5);
  const Eigen::VectorXd target = g.points().array().square().matrix();

  // Hat functions at the interior knots; endpoint values fixed at 0 and 1.
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(g.size(), 3);
  Eigen::VectorXd offset = Eigen::VectorXd::Zero(g.size());
  for (Eigen::Index m = 0; m < g.size(); ++m) {
    const double t = g[m];
    for (int k = 1; k <= 3; ++k) {
      const double s = p[k];
      H(m, k - 1) = std::max(0.0, 1.0 - std::abs(t - s) / 0.25);
    }
    offset[m] = std::max(0.0, 1.0 - (1.0 - t) / 0.25);
  }
  const Eigen::VectorXd interior = H.colPivHouseholderQr().solve(target - offset);

  const Eigen::VectorXd fitted = increments_of(FineWarp(g, target), p).knot_values();
  EXPECT_DOUBLE_EQ(fitted[0], 0.0);
  EXPECT_DOUBLE_EQ(fitted[4], 1.0);
  for (int k = 1; k <= 3; ++k) EXPECT_NEAR(fitted[k], interior[k - 1], 2e-2);
}

TEST(Compose, IdentityIsNeutral) {
  const Partition p = Partition::uniform(7);
  Rng rng(6);
  const Warp id = identity_warp(p);
  for (int rep = 0; rep < 20; ++rep) {
    const Warp w(p, rng.dirichlet(6, 2.0));
    EXPECT_LT((compose(w, id).increments() - w.increments()).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LT((compose(id, w).increments() - w.increments()).cwiseAbs().maxCoeff(), 1e-14);
  }
  EXPECT_THROW(compose(id, identity_warp(Partition::uniform(6))), std::invalid_argument);
}

TEST(Compose, InverseGivesIdentity) {
  Rng rng(7);
  double worst = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    const int size = 3 + static_cast<int>(rng.uniform() * 13.0);
    const Partition p = Partition::uniform(std::min(size, 15));
    const Warp w(p, rng.dirichlet(p.segments(), 1.0 + 5.0 * rng.uniform()));
    const Warp back = compose(w, invert(w));
    expect_on_simplex(back);
    worst = std::max(worst, (back.increments() - identity_warp(p).increments()).cwiseAbs().maxCoeff());
  }
  EXPECT_LT(worst, 1e-6);
}

TEST(Invert, AnalyticExample) {
  const Partition p(Eigen::Vector3d(0.0, 0.5, 1.0));
  const Warp w(p, Eigen::Vector2d(0.2, 0.8));
  const PiecewiseLinearMap exact = w.inverse_curve();
  EXPECT_NEAR(exact(0.2), 0.5, 1e-15);
  EXPECT_NEAR(exact(0.5), 0.5 + 0.3 / 0.8 * 0.5, 1e-15);
  const Warp inv = invert(w);
  EXPECT_NEAR(inv.increments()[0], 0.6875, 1e-14);
  EXPECT_NEAR(inv.increments()[1], 0.3125, 1e-14);

  const Warp id = identity_warp(Partition::uniform(5));
  EXPECT_LT((invert(id).increments() - id.increments()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Invert, ExactInverseReflectsKnots) {
  const Partition p = Partition::uniform(8);
  Rng rng(8);
  for (int rep = 0; rep < 20; ++rep) {
    const Warp w(p, rng.dirichlet(7, 1.5));
    const PiecewiseLinearMap inv = w.inverse_curve();
    for (Eigen::Index m = 0; m < p.size(); ++m) EXPECT_NEAR(inv(eval_warp(w, p[m])), p[m], 1e-6);
    expect_on_simplex(invert(w));
  }
}

TEST(Karcher, FixedPointsAndSymmetry) {
  const Partition p = Partition::uniform(5);
  Rng rng(9);
  const Warp w(p, rng.dirichlet(4, 5.0));
  const std::vector<Warp> same(4, w);
  EXPECT_LT((karcher_mean_warps(same).increments() - w.increments()).cwiseAbs().maxCoeff(), 1e-8);

  const std::vector<Warp> ids(3, identity_warp(p));
  EXPECT_LT((karcher_mean_warps(ids).increments() - ids[0].increments()).cwiseAbs().maxCoeff(), 1e-12);

  const Warp mild(p, Eigen::Vector4d(0.22, 0.27, 0.26, 0.25));
  const std::vector<Warp> pair{mild, invert(mild)};
  const Warp mean = karcher_mean_warps(pair);
  expect_on_simplex(mean);
  EXPECT_LT((mean.increments() - identity_warp(p).increments()).cwiseAbs().maxCoeff(), 2e-2);

  EXPECT_THROW(karcher_mean_warps(std::vector<Warp>{}), std::invalid_argument);
}

TEST(Karcher, CenteringByInverseMeanReachesIdentity) {
  const Partition p = Partition::uniform(5);
  Rng rng(10);
  std::vector<Warp> ws;
  for (int i = 0; i < 30; ++i) ws.emplace_back(p, rng.dirichlet(4, 12.5));
  const PiecewiseLinearMap inv = karcher_mean_warps(ws).inverse_curve();
  for (auto& w : ws) w = compose(w, inv);
  const Warp after = karcher_mean_warps(ws);
  EXPECT_LT((after.increments() - identity_warp(p).increments()).cwiseAbs().maxCoeff(), 2e-2);
}
