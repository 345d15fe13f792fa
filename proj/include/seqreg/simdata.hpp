#pragma once

#include "seqreg/grid.hpp"
#include "seqreg/warp.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace seqreg {

enum class Scenario { example1, example2 };

struct SimSpec {
  Scenario scenario = Scenario::example1;
  int n = 100;
  int M = 101;
  int B_true = 8;
  int M_gamma_true = 5;
  double kappa_true = 50.0;
  double noise_sigma2 = 0.01;
  std::uint64_t seed = 0;
  /// Standard deviation of each true template coefficient.
  double c_scale = 1.0;
  /// Recenter the drawn warps so their Karcher mean is the identity, which
  /// puts the truth inside the identified parameterization.
  bool center_truth = true;
  /// Test hook: every warp is the identity.
  bool identity_warps = false;
};

/// Gaussian-bump shapes for the two-peak / one-peak scenario.
struct Example2Shape {
  int M = 101;
  int n_two_peak = 6;
  double left = 0.3;
  double right = 0.7;
  double single = 0.5;
  double width = 0.08;
  double height = 1.0;
  double kappa = 40.0;
  int M_gamma = 5;
};

struct SimTruth {
  Eigen::VectorXd c_true;  // empty when the data are not generated from a basis
  std::vector<Warp> warps;
  double sigma2_true = 0.0;
};

struct SimResult {
  std::vector<FunctionSample> functions;
  SimTruth truth;
};

void validate(const SimSpec& spec);

SimResult simulate_example1(const SimSpec& spec);
SimResult simulate_example2(std::uint64_t seed, const Example2Shape& shape = {});
SimResult simulate(const SimSpec& spec);

/// Number of strict interior local maxima (plateaus count once).
int count_local_maxima(const Eigen::Ref<const Eigen::VectorXd>& f);

}  // namespace seqreg
