#pragma once

#include <Eigen/Core>

#include <memory>
#include <span>
#include <vector>

namespace seqreg {

/// Common evaluation grid t_1 = 0 < ... < t_M = 1 shared by all functions.
///
/// Points and trapezoid quadrature weights live behind a shared pointer so
/// grids are cheap to copy into every sample.
class Grid {
public:
  Grid() = default;

  /// Throws std::invalid_argument unless points are strictly increasing
  /// from exactly 0 to exactly 1 with at least three entries.
  explicit Grid(Eigen::VectorXd points);

  Eigen::Index size() const { return data_ ? data_->points.size() : 0; }
  const Eigen::VectorXd& points() const { return data_->points; }
  double operator[](Eigen::Index m) const { return data_->points[m]; }

  /// Trapezoid rule weights: sum_m w_m f(t_m) approximates the integral.
  const Eigen::VectorXd& weights() const { return data_->weights; }

  bool is_uniform() const { return data_->uniform; }

  friend bool operator==(const Grid& a, const Grid& b);

private:
  struct Data {
    Eigen::VectorXd points;
    Eigen::VectorXd weights;
    bool uniform = false;
  };
  std::shared_ptr<const Data> data_;
};

/// A real function sampled on a grid.
struct FunctionSample {
  Grid grid;
  Eigen::VectorXd values;

  FunctionSample() = default;
  FunctionSample(Grid g, Eigen::VectorXd v);
};

/// Orthonormalized order-4 B-spline basis evaluated on a grid.
struct BasisSet {
  Grid grid;
  int count = 0;
  Eigen::MatrixXd phi;        // M x B, orthonormal under the trapezoid rule
  Eigen::VectorXd raw_knots;  // clamped knot vector of the raw splines
};

Grid make_uniform_grid(int M);

/// Trapezoid-rule inner product of two sampled functions.
double inner(const Grid& grid, const Eigen::Ref<const Eigen::VectorXd>& a,
             const Eigen::Ref<const Eigen::VectorXd>& b);

FunctionSample derivative(const FunctionSample& f);

/// Piecewise-linear evaluation at arbitrary query times in [0, 1].
Eigen::VectorXd interp_linear(const FunctionSample& f, std::span<const double> query);
double interp_linear(const Grid& grid, const Eigen::Ref<const Eigen::VectorXd>& values, double t);

/// Raw clamped cubic B-spline design matrix (M x B) with equally spaced knots.
Eigen::MatrixXd bspline_design(const Grid& grid, int B, Eigen::VectorXd* knots_out = nullptr);

BasisSet make_basis(const Grid& grid, int B);

/// Phi * c on the basis grid.
FunctionSample synthesize(const BasisSet& basis, const Eigen::Ref<const Eigen::VectorXd>& c);

/// Coefficients of the trapezoid-orthogonal projection onto the basis span.
Eigen::VectorXd project_onto_basis(const BasisSet& basis,
                                   const Eigen::Ref<const Eigen::VectorXd>& values);

}  // namespace seqreg
