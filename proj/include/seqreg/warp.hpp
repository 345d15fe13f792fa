#pragma once

#include "seqreg/grid.hpp"

#include <Eigen/Core>

#include <memory>
#include <span>
#include <vector>

namespace seqreg {

/// Smallest admissible warp increment.
inline constexpr double kIncrementFloor = 1e-6;

/// Fixed partition 0 = s_1 < ... < s_{Mgamma} = 1 of the warp domain.
class Partition {
public:
  Partition() = default;
  explicit Partition(Eigen::VectorXd knots);

  static Partition uniform(int size);

  Eigen::Index size() const { return knots_ ? knots_->size() : 0; }
  /// Number of increments L = Mgamma - 1.
  Eigen::Index segments() const { return size() - 1; }
  const Eigen::VectorXd& knots() const { return *knots_; }
  double operator[](Eigen::Index m) const { return (*knots_)[m]; }

  friend bool operator==(const Partition& a, const Partition& b);

private:
  std::shared_ptr<const Eigen::VectorXd> knots_;
};

/// Piecewise-linear increasing map through (x_k, y_k); x spans [0, 1].
/// Used for exact warps, their exact inverses and compositions before they
/// are projected back to a fixed partition.
struct PiecewiseLinearMap {
  Eigen::VectorXd x;
  Eigen::VectorXd y;

  double operator()(double t) const;
  /// Segment slope to the right of t (left slope at t = 1).
  double slope(double t) const;
};

/// Piecewise-linear warp parameterized by its simplex increments.
class Warp {
public:
  Warp() = default;
  /// Clips increments to kIncrementFloor and renormalizes to the simplex.
  Warp(Partition partition, Eigen::VectorXd increments);

  const Partition& partition() const { return partition_; }
  const Eigen::VectorXd& increments() const { return increments_; }
  Eigen::Index segments() const { return increments_.size(); }

  /// Knot values gamma(s_1) = 0, ..., gamma(s_Mgamma) = 1.
  Eigen::VectorXd knot_values() const;

  /// The warp itself through (s_m, gamma(s_m)).
  PiecewiseLinearMap curve() const;
  /// Exact inverse through (gamma(s_m), s_m).
  PiecewiseLinearMap inverse_curve() const;

private:
  Partition partition_;
  Eigen::VectorXd increments_;
};

/// Monotone warp sampled on a fine grid (e.g. the dynamic-programming path).
struct FineWarp {
  Grid grid;
  Eigen::VectorXd values;

  FineWarp() = default;
  FineWarp(Grid g, Eigen::VectorXd v);
  PiecewiseLinearMap curve() const { return {grid.points(), values}; }
};

/// Clip to the increment floor and rescale the free coordinates so the
/// vector sums to one.
Eigen::VectorXd project_to_simplex_floor(Eigen::VectorXd d, double floor = kIncrementFloor);

/// Increments of a map evaluated at the partition knots.
Warp warp_from_knot_values(const Partition& p, const PiecewiseLinearMap& map);

Warp identity_warp(const Partition& p);

double eval_warp(const Warp& w, double t);

/// Least-squares piecewise-linear fit of a fine warp with knots at the partition.
Warp increments_of(const FineWarp& fw, const Partition& p);

/// t -> w1(w2(t)), evaluated exactly at the partition knots.
Warp compose(const Warp& w1, const Warp& w2);
Warp compose(const Warp& w1, const PiecewiseLinearMap& w2);

/// Exact piecewise-linear inverse evaluated at the partition knots.
Warp invert(const Warp& w);

struct KarcherOptions {
  double tolerance = 1e-8;
  int max_iterations = 50;
};

/// Karcher mean of warps under the square-root-slope sphere geometry.
Warp karcher_mean_warps(std::span<const Warp> ws, const KarcherOptions& options = {});

}  // namespace seqreg
