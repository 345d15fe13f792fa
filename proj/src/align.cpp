#include "seqreg/align.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace seqreg {

std::vector<DpStep> dp_steps(int max_step) {
  if (max_step < 1) {
    throw std::invalid_argument("dp_steps: max_step must be >= 1");
  }
  std::vector<DpStep> steps{{1, 1}};
  for (int a = 1; a <= max_step; ++a) {
    for (int b = 1; b <= max_step; ++b) {
      if ((a != 1 || b != 1) && std::gcd(a, b) == 1) steps.push_back({a, b});
    }
  }
  return steps;
}

namespace {

inline double edge_cost(const double* t, const double* qr, const double* qn, int k, int l, int i, int j) {
  const double span = t[i] - t[k];
  const double slope = (t[j] - t[l]) / span;
  const double rs = std::sqrt(slope);
  double sum = 0.0;
  double prev_f = 0.0;
  int c = l;
  for (int m = k; m <= i; ++m) {
    double qv;
    if (m == i) {
      qv = qn[j];
    } else {
      const double x = t[l] + slope * (t[m] - t[k]);
      while (c + 1 < j && t[c + 1] <= x) ++c;
      const double u = (x - t[c]) / (t[c + 1] - t[c]);
      qv = qn[c] + u * (qn[c + 1] - qn[c]);
    }
    const double r = qr[m] - qv * rs;
    const double f = r * r;
    if (m > k) sum += 0.5 * (t[m] - t[m - 1]) * (f + prev_f);
    prev_f = f;
  }
  return sum;
}

void check_pair(const Srvf& q_ref, const Srvf& q_new) {
  if (!(q_ref.grid == q_new.grid)) {
    throw std::invalid_argument("dp_align: functions live on different grids");
  }
}

}  // namespace

double dp_edge_cost(const Srvf& q_ref, const Srvf& q_new, int k, int l, int i, int j) {
  check_pair(q_ref, q_new);
  const int M = static_cast<int>(q_ref.grid.size());
  if (k < 0 || l < 0 || i >= M || j >= M || i <= k || j <= l) {
    throw std::invalid_argument("dp_edge_cost: invalid lattice segment");
  }
  return edge_cost(q_ref.grid.points().data(), q_ref.values.data(), q_new.values.data(), k, l, i, j);
}

DpResult dp_align_full(const Srvf& q_ref, const Srvf& q_new, int max_step) {
  check_pair(q_ref, q_new);
  const int M = static_cast<int>(q_ref.grid.size());
  const auto steps = dp_steps(max_step);
  const int S = max_step;
  const double* t = q_ref.grid.points().data();
  const double* qr = q_ref.values.data();
  const double* qn = q_new.values.data();

  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> E(static_cast<std::size_t>(M) * M, inf);
  std::vector<signed char> pred(static_cast<std::size_t>(M) * M, -1);
  auto at = [M](int i, int j) { return static_cast<std::size_t>(i) * M + j; };
  E[at(0, 0)] = 0.0;

  const int last = M - 1;
  for (int i = 1; i < M; ++i) {
    for (int j = 1; j < M; ++j) {
      // slope bounds: reachable from the start and able to reach the end
      if (j > S * i || i > S * j) continue;
      if (last - j > S * (last - i) || last - i > S * (last - j)) continue;
      double best = inf;
      int best_s = -1;
      for (int s = 0; s < static_cast<int>(steps.size()); ++s) {
        const int k = i - steps[s].a;
        const int l = j - steps[s].b;
        if (k < 0 || l < 0) continue;
        const double base = E[at(k, l)];
        if (base == inf) continue;
        const double cand = base + edge_cost(t, qr, qn, k, l, i, j);
        if (cand < best) {
          best = cand;
          best_s = s;
        }
      }
      E[at(i, j)] = best;
      pred[at(i, j)] = static_cast<signed char>(best_s);
    }
  }

  DpResult result;
  result.cost = E[at(last, last)];
  std::vector<std::pair<int, int>> path{{last, last}};
  int i = last;
  int j = last;
  while (i > 0 || j > 0) {
    const int s = pred[at(i, j)];
    if (s < 0) {
      throw std::logic_error("dp_align: broken back-pointer chain");
    }
    i -= steps[static_cast<std::size_t>(s)].a;
    j -= steps[static_cast<std::size_t>(s)].b;
    path.emplace_back(i, j);
  }
  std::reverse(path.begin(), path.end());

  Eigen::VectorXd gamma(M);
  for (std::size_t p = 0; p + 1 < path.size(); ++p) {
    const auto [k, l] = path[p];
    const auto [i1, j1] = path[p + 1];
    const double slope = (t[j1] - t[l]) / (t[i1] - t[k]);
    for (int m = k; m < i1; ++m) gamma[m] = t[l] + slope * (t[m] - t[k]);
  }
  gamma[0] = 0.0;
  gamma[last] = 1.0;
  for (int m = 1; m < M; ++m) gamma[m] = std::clamp(gamma[m], gamma[m - 1], 1.0);

  result.warp = FineWarp(q_ref.grid, std::move(gamma));
  result.path = std::move(path);
  return result;
}

FineWarp dp_align(const Srvf& q_ref, const Srvf& q_new, int max_step) {
  return dp_align_full(q_ref, q_new, max_step).warp;
}

}  // namespace seqreg
