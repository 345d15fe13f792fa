#pragma once

#include "seqreg/srvf.hpp"
#include "seqreg/warp.hpp"

#include <utility>
#include <vector>

namespace seqreg {

/// Lattice step (a, b): a cells along the reference grid, b along the new one.
struct DpStep {
  int a;
  int b;
};

/// All coprime steps with 1 <= a, b <= max_step, diagonal first.
std::vector<DpStep> dp_steps(int max_step);

/// Trapezoid cost of matching reference cells [k, i] to new cells [l, j]
/// along a straight segment.
double dp_edge_cost(const Srvf& q_ref, const Srvf& q_new, int k, int l, int i, int j);

struct DpResult {
  FineWarp warp;
  double cost = 0.0;
  std::vector<std::pair<int, int>> path;  // lattice vertices from (0,0) to (M-1,M-1)
};

DpResult dp_align_full(const Srvf& q_ref, const Srvf& q_new, int max_step = 3);

/// Warp gamma minimizing ||q_ref - (q_new o gamma) sqrt(gamma')||^2 over
/// monotone lattice paths, sampled on q_ref's grid.
FineWarp dp_align(const Srvf& q_ref, const Srvf& q_new, int max_step = 3);

}  // namespace seqreg
