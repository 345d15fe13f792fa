#include "seqreg/srvf.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace seqreg {

Srvf::Srvf(Grid g, Eigen::VectorXd v) : grid(std::move(g)), values(std::move(v)) {
  if (values.size() != grid.size()) {
    throw std::invalid_argument("srvf values do not match grid size");
  }
}

Srvf to_srvf(const FunctionSample& f) {
  const FunctionSample df = derivative(f);
  Eigen::VectorXd q = df.values.unaryExpr([](double v) {
    return v >= 0.0 ? std::sqrt(v) : -std::sqrt(-v);
  });
  return {f.grid, std::move(q)};
}

FunctionSample from_srvf(double f0, const Srvf& q) {
  const auto& t = q.grid.points();
  const Eigen::Index M = t.size();
  const Eigen::ArrayXd g = q.values.array() * q.values.array().abs();
  Eigen::VectorXd f(M);
  f[0] = f0;
  for (Eigen::Index m = 1; m < M; ++m) {
    f[m] = f[m - 1] + 0.5 * (t[m] - t[m - 1]) * (g[m] + g[m - 1]);
  }
  return {q.grid, std::move(f)};
}

namespace {

// Calls row(m, j, u, scale) so that the warped value at t_m is
// (v[j] + u * (v[j + 1] - v[j])) * scale for any v sampled on the grid.
template <class Row>
void for_each_warped_row(const Grid& grid, const PiecewiseLinearMap& gamma, Row&& row) {
  const auto& t = grid.points();
  const Eigen::Index M = t.size();
  const auto& gx = gamma.x;
  const auto& gy = gamma.y;
  const Eigen::Index nseg = gx.size() - 1;
  const bool uniform = grid.is_uniform();
  const auto cells = static_cast<double>(M - 1);

  Eigen::Index k = 0;  // warp segment
  Eigen::Index j = 0;  // grid cell holding gamma(t_m)
  double slope = (gy[1] - gy[0]) / (gx[1] - gx[0]);
  double scale = std::sqrt(std::max(slope, 0.0));
  for (Eigen::Index m = 0; m < M; ++m) {
    const double tm = t[m];
    while (k + 1 < nseg && gx[k + 1] <= tm) {
      ++k;
      slope = (gy[k + 1] - gy[k]) / (gx[k + 1] - gx[k]);
      scale = std::sqrt(std::max(slope, 0.0));
    }
    const double x = std::clamp(gy[k] + (tm - gx[k]) * slope, 0.0, 1.0);
    if (uniform) {
      j = std::min(static_cast<Eigen::Index>(x * cells), M - 2);
    } else {
      if (j > 0 && t[j] > x) {
        j = static_cast<Eigen::Index>(std::upper_bound(t.data(), t.data() + M, x) - t.data()) - 1;
        j = std::clamp<Eigen::Index>(j, 0, M - 2);
      }
      while (j + 1 < M - 1 && t[j + 1] <= x) ++j;
    }
    row(m, j, (x - t[j]) / (t[j + 1] - t[j]), scale);
  }
}

}  // namespace

void warp_action_into(const Grid& grid, const Eigen::Ref<const Eigen::VectorXd>& q,
                      const PiecewiseLinearMap& gamma, Eigen::Ref<Eigen::VectorXd> out) {
  for_each_warped_row(grid, gamma, [&](Eigen::Index m, Eigen::Index j, double u, double scale) {
    out[m] = (q[j] + u * (q[j + 1] - q[j])) * scale;
  });
}

void warp_action_columns_into(const Grid& grid, const Eigen::Ref<const Eigen::MatrixXd>& Q,
                              const PiecewiseLinearMap& gamma, Eigen::Ref<Eigen::MatrixXd> out) {
  for_each_warped_row(grid, gamma, [&](Eigen::Index m, Eigen::Index j, double u, double scale) {
    out.row(m) = (Q.row(j) + u * (Q.row(j + 1) - Q.row(j))) * scale;
  });
}

void warp_action_inverse_into(const Grid& grid, const Eigen::Ref<const Eigen::VectorXd>& q,
                              const Warp& w, Eigen::Ref<Eigen::VectorXd> out) {
  warp_action_into(grid, q, w.inverse_curve(), out);
}

Srvf warp_action(const Srvf& q, const PiecewiseLinearMap& gamma) {
  Eigen::VectorXd out(q.values.size());
  warp_action_into(q.grid, q.values, gamma, out);
  return {q.grid, std::move(out)};
}

Srvf warp_action(const Srvf& q, const Warp& gamma) { return warp_action(q, gamma.curve()); }

Srvf warp_action(const Srvf& q, const FineWarp& gamma) { return warp_action(q, gamma.curve()); }

double l2_distance(const Srvf& q1, const Srvf& q2) {
  if (!(q1.grid == q2.grid)) {
    throw std::invalid_argument("l2_distance: functions live on different grids");
  }
  const Eigen::VectorXd diff = q1.values - q2.values;
  return std::sqrt(std::max(inner(q1.grid, diff, diff), 0.0));
}

}  // namespace seqreg
