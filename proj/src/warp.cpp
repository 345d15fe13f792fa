#include "seqreg/warp.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace seqreg {

Partition::Partition(Eigen::VectorXd knots) {
  const Eigen::Index n = knots.size();
  if (n < 3) {
    throw std::invalid_argument("partition needs at least 3 knots");
  }
  if (knots[0] != 0.0 || knots[n - 1] != 1.0) {
    throw std::invalid_argument("partition must start at 0 and end at 1");
  }
  for (Eigen::Index m = 1; m < n; ++m) {
    if (!(knots[m] > knots[m - 1])) {
      throw std::invalid_argument("partition knots must be strictly increasing");
    }
  }
  knots_ = std::make_shared<const Eigen::VectorXd>(std::move(knots));
}

Partition Partition::uniform(int size) {
  if (size < 3) {
    throw std::invalid_argument("partition needs at least 3 knots");
  }
  Eigen::VectorXd s(size);
  for (int m = 0; m < size; ++m) s[m] = static_cast<double>(m) / static_cast<double>(size - 1);
  s[size - 1] = 1.0;
  return Partition(std::move(s));
}

bool operator==(const Partition& a, const Partition& b) {
  if (a.knots_ == b.knots_) return true;
  if (!a.knots_ || !b.knots_) return false;
  return a.knots_->size() == b.knots_->size() && *a.knots_ == *b.knots_;
}

namespace {

Eigen::Index segment_of(const Eigen::VectorXd& x, double t) {
  const Eigen::Index n = x.size();
  auto k = static_cast<Eigen::Index>(std::upper_bound(x.data(), x.data() + n, t) - x.data()) - 1;
  return std::clamp<Eigen::Index>(k, 0, n - 2);
}

}  // namespace

double PiecewiseLinearMap::operator()(double t) const {
  const Eigen::Index k = segment_of(x, t);
  const double dx = x[k + 1] - x[k];
  const double u = (t - x[k]) / dx;
  return y[k] + u * (y[k + 1] - y[k]);
}

double PiecewiseLinearMap::slope(double t) const {
  const Eigen::Index k = segment_of(x, t);
  return (y[k + 1] - y[k]) / (x[k + 1] - x[k]);
}

Eigen::VectorXd project_to_simplex_floor(Eigen::VectorXd d, double floor) {
  const Eigen::Index L = d.size();
  if (L == 0) return d;
  if (static_cast<double>(L) * floor >= 1.0) {
    throw std::invalid_argument("increment floor too large for dimension");
  }
  std::vector<bool> pinned(static_cast<std::size_t>(L), false);
  for (Eigen::Index k = 0; k < L; ++k) {
    if (!std::isfinite(d[k])) d[k] = 0.0;
  }
  for (int iter = 0; iter <= L; ++iter) {
    double free_sum = 0.0;
    Eigen::Index n_pinned = 0;
    for (Eigen::Index k = 0; k < L; ++k) {
      if (pinned[static_cast<std::size_t>(k)] || d[k] < floor) {
        pinned[static_cast<std::size_t>(k)] = true;
        d[k] = floor;
        ++n_pinned;
      } else {
        free_sum += d[k];
      }
    }
    const double target = 1.0 - static_cast<double>(n_pinned) * floor;
    if (free_sum <= 0.0) {
      // nothing left to rescale: spread the mass evenly
      d.setConstant(1.0 / static_cast<double>(L));
      return d;
    }
    const double scale = target / free_sum;
    bool changed = false;
    for (Eigen::Index k = 0; k < L; ++k) {
      if (!pinned[static_cast<std::size_t>(k)]) {
        d[k] *= scale;
        if (d[k] < floor) changed = true;
      }
    }
    if (!changed) break;
  }
  return d;
}

Warp::Warp(Partition partition, Eigen::VectorXd increments) : partition_(std::move(partition)) {
  if (increments.size() != partition_.segments()) {
    throw std::invalid_argument("warp increments length " + std::to_string(increments.size()) +
                                " does not match partition segments " +
                                std::to_string(partition_.segments()));
  }
  bool ok = true;
  double sum = 0.0;
  for (Eigen::Index k = 0; k < increments.size(); ++k) {
    if (!(increments[k] >= kIncrementFloor)) ok = false;
    sum += increments[k];
  }
  if (ok && std::abs(sum - 1.0) <= 1e-13) {
    increments_ = std::move(increments);
  } else {
    increments_ = project_to_simplex_floor(std::move(increments));
  }
}

Eigen::VectorXd Warp::knot_values() const {
  const Eigen::Index L = increments_.size();
  Eigen::VectorXd g(L + 1);
  g[0] = 0.0;
  for (Eigen::Index k = 0; k < L; ++k) g[k + 1] = g[k] + increments_[k];
  g[L] = 1.0;
  for (Eigen::Index k = L - 1; k > 0; --k) g[k] = std::min(g[k], g[k + 1]);
  return g;
}

PiecewiseLinearMap Warp::curve() const { return {partition_.knots(), knot_values()}; }

PiecewiseLinearMap Warp::inverse_curve() const { return {knot_values(), partition_.knots()}; }

FineWarp::FineWarp(Grid g, Eigen::VectorXd v) : grid(std::move(g)), values(std::move(v)) {
  const Eigen::Index M = values.size();
  if (M != grid.size()) {
    throw std::invalid_argument("fine warp values do not match grid");
  }
  if (values[0] != 0.0 || values[M - 1] != 1.0) {
    throw std::invalid_argument("fine warp must run from 0 to 1");
  }
  for (Eigen::Index m = 1; m < M; ++m) {
    if (values[m] < values[m - 1]) {
      throw std::invalid_argument("fine warp must be nondecreasing");
    }
  }
}

Warp warp_from_knot_values(const Partition& p, const PiecewiseLinearMap& map) {
  const Eigen::Index L = p.segments();
  Eigen::VectorXd d(L);
  double prev = 0.0;
  for (Eigen::Index k = 0; k < L; ++k) {
    const double next = (k + 1 == L) ? 1.0 : map(p[k + 1]);
    d[k] = next - prev;
    prev = next;
  }
  return Warp(p, std::move(d));
}

Warp identity_warp(const Partition& p) {
  const Eigen::Index L = p.segments();
  Eigen::VectorXd d(L);
  for (Eigen::Index k = 0; k < L; ++k) d[k] = p[k + 1] - p[k];
  return Warp(p, std::move(d));
}

double eval_warp(const Warp& w, double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw std::invalid_argument("eval_warp: t outside [0, 1]");
  }
  if (t == 0.0) return 0.0;
  if (t == 1.0) return 1.0;
  return w.curve()(t);
}

Warp increments_of(const FineWarp& fw, const Partition& p) {
  const Eigen::Index Mg = p.size();
  const Eigen::Index n_free = Mg - 2;
  const auto& t = fw.grid.points();
  const auto& y = fw.values;

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n_free, n_free);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_free);
  // Hat-function coefficients: value(t) = (1-u) g_k + u g_{k+1}, with g_0 = 0
  // and g_{Mg-1} = 1 fixed.
  for (Eigen::Index m = 0; m < t.size(); ++m) {
    const Eigen::Index k = segment_of(p.knots(), t[m]);
    const double u = (t[m] - p[k]) / (p[k + 1] - p[k]);
    const double wl = 1.0 - u;
    const double wr = u;
    double target = y[m];
    if (k + 1 == Mg - 1) target -= wr;  // right endpoint fixed at 1
    const Eigen::Index il = k - 1;      // free index of left knot
    const Eigen::Index ir = k;          // free index of right knot
    const bool has_l = k >= 1;
    const bool has_r = k + 1 <= Mg - 2;
    if (has_l) {
      A(il, il) += wl * wl;
      rhs[il] += wl * target;
    }
    if (has_r) {
      A(ir, ir) += wr * wr;
      rhs[ir] += wr * target;
    }
    if (has_l && has_r) {
      A(il, ir) += wl * wr;
      A(ir, il) += wl * wr;
    }
  }
  // Tiny ridge toward the interpolated knot value keeps knots without
  // support points well defined.
  const double ridge = 1e-12;
  const PiecewiseLinearMap fine = fw.curve();
  for (Eigen::Index i = 0; i < n_free; ++i) {
    A(i, i) += ridge;
    rhs[i] += ridge * fine(p[i + 1]);
  }
  const Eigen::VectorXd g = A.ldlt().solve(rhs);

  Eigen::VectorXd d(Mg - 1);
  double prev = 0.0;
  for (Eigen::Index k = 0; k + 1 < Mg; ++k) {
    const double next = (k + 1 == Mg - 1) ? 1.0 : g[k];
    d[k] = next - prev;
    prev = next;
  }
  return Warp(p, std::move(d));
}

Warp compose(const Warp& w1, const PiecewiseLinearMap& w2) {
  const Partition& p = w1.partition();
  const PiecewiseLinearMap outer = w1.curve();
  const Eigen::Index L = p.segments();
  Eigen::VectorXd d(L);
  double prev = 0.0;
  for (Eigen::Index k = 0; k < L; ++k) {
    const double next = (k + 1 == L) ? 1.0 : outer(std::clamp(w2(p[k + 1]), 0.0, 1.0));
    d[k] = next - prev;
    prev = next;
  }
  return Warp(p, std::move(d));
}

Warp compose(const Warp& w1, const Warp& w2) {
  if (!(w1.partition() == w2.partition())) {
    throw std::invalid_argument("compose: warps live on different partitions");
  }
  return compose(w1, w2.curve());
}

Warp invert(const Warp& w) { return warp_from_knot_values(w.partition(), w.inverse_curve()); }

Warp karcher_mean_warps(std::span<const Warp> ws, const KarcherOptions& options) {
  if (ws.empty()) {
    throw std::invalid_argument("karcher_mean_warps: empty list");
  }
  const Partition& p = ws.front().partition();
  const Eigen::Index L = p.segments();
  Eigen::ArrayXd ds(L);
  for (Eigen::Index k = 0; k < L; ++k) ds[k] = p[k + 1] - p[k];

  // sqrt(gamma') is piecewise constant on the partition segments, so the
  // sphere computations are exact in this representation.
  const auto n = static_cast<Eigen::Index>(ws.size());
  Eigen::ArrayXXd psi(L, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Warp& w = ws[static_cast<std::size_t>(i)];
    if (!(w.partition() == p)) {
      throw std::invalid_argument("karcher_mean_warps: warps live on different partitions");
    }
    psi.col(i) = (w.increments().array() / ds).sqrt();
  }
  auto dot = [&](const Eigen::ArrayXd& a, const Eigen::ArrayXd& b) { return (ds * a * b).sum(); };

  Eigen::ArrayXd mu = psi.rowwise().mean();
  mu /= std::sqrt(dot(mu, mu));
  Eigen::ArrayXd vbar(L);
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    vbar.setZero();
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::ArrayXd psi_i = psi.col(i);
      const double c = dot(mu, psi_i);
      const Eigen::ArrayXd perp = psi_i - c * mu;
      const double s = std::sqrt(std::max(dot(perp, perp), 0.0));
      if (s > 0.0) vbar += (std::atan2(s, c) / s) * perp;
    }
    vbar /= static_cast<double>(n);
    const double nv = std::sqrt(dot(vbar, vbar));
    if (nv < options.tolerance) break;
    mu = std::cos(nv) * mu + (std::sin(nv) / nv) * vbar;
    mu /= std::sqrt(dot(mu, mu));
  }
  Eigen::VectorXd d = (ds * mu.square()).matrix();
  d /= d.sum();
  return Warp(p, std::move(d));
}

}  // namespace seqreg
