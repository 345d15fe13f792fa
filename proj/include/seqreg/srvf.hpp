#pragma once

#include "seqreg/grid.hpp"
#include "seqreg/warp.hpp"

#include <Eigen/Core>

namespace seqreg {

/// Square-root velocity function sampled on a grid.
struct Srvf {
  Grid grid;
  Eigen::VectorXd values;

  Srvf() = default;
  Srvf(Grid g, Eigen::VectorXd v);
};

/// q = sign(f') sqrt(|f'|) from finite-difference derivatives.
Srvf to_srvf(const FunctionSample& f);

/// f(t) = f0 + int_0^t q|q|, by the cumulative trapezoid rule.
FunctionSample from_srvf(double f0, const Srvf& q);

/// (q o gamma) sqrt(gamma') on q's grid. gamma' is the exact segment slope
/// (right-hand at interior knots, left-hand at t = 1).
Srvf warp_action(const Srvf& q, const Warp& gamma);
Srvf warp_action(const Srvf& q, const FineWarp& gamma);
Srvf warp_action(const Srvf& q, const PiecewiseLinearMap& gamma);

/// Raw form of warp_action writing into out (same length as grid).
void warp_action_into(const Grid& grid, const Eigen::Ref<const Eigen::VectorXd>& q,
                      const PiecewiseLinearMap& gamma, Eigen::Ref<Eigen::VectorXd> out);

/// warp_action_into applied to every column of Q; the action is linear in q.
void warp_action_columns_into(const Grid& grid, const Eigen::Ref<const Eigen::MatrixXd>& Q,
                              const PiecewiseLinearMap& gamma, Eigen::Ref<Eigen::MatrixXd> out);

/// (q, w^{-1}) with the exact piecewise-linear inverse of w.
void warp_action_inverse_into(const Grid& grid, const Eigen::Ref<const Eigen::VectorXd>& q,
                              const Warp& w, Eigen::Ref<Eigen::VectorXd> out);

double l2_distance(const Srvf& q1, const Srvf& q2);

}  // namespace seqreg
