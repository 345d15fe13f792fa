#pragma once

#include "seqreg/mcmc.hpp"
#include "seqreg/simdata.hpp"
#include "seqreg/smc.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace seqreg {

struct BenchmarkOptions {
  int n_init = 30;
  int n_from = 40;
  int n_to = 100;
  int n_stride = 10;
  int particles = 1000;
  int workers = 1;
  McmcSettings mcmc;
};

struct AccuracyMetrics {
  double c_mean = 0.0;  // ||posterior mean c - c_true||
  double c_mode = 0.0;
  double d_mean = 0.0;  // sum over functions of ||posterior mean d_i - d_i,true||
  double d_mode = 0.0;
};

struct BenchmarkRow {
  int n = 0;
  double smc_seconds = 0.0;
  double mcmc_seconds = 0.0;
  double ess = 0.0;
  std::optional<AccuracyMetrics> smc;
  std::optional<AccuracyMetrics> mcmc;
};

struct BenchmarkReport {
  std::vector<BenchmarkRow> rows;
  ParticleSystem final_system;
  double init_seconds = 0.0;
};

void validate(const BenchmarkOptions& opt, std::size_t available);

AccuracyMetrics accuracy(const ParticleSystem& sys, std::size_t mode_index, const SimTruth& truth);

/// Index of the highest-weight particle (first on ties).
std::size_t highest_weight_index(const ParticleSystem& sys);

/// Batch-initializes on the first n_init functions, then assimilates one
/// function at a time through n_to. At every n in the requested range the
/// SMC step is timed against a fresh MCMC run on the first n functions that
/// returns the same number of draws.
BenchmarkReport run_benchmark(std::span<const Srvf> data, const ModelConfig& cfg, const BenchmarkOptions& opt,
                              const SimTruth* truth = nullptr,
                              const std::function<void(const std::string&)>& log = {});

std::string benchmark_csv(const BenchmarkReport& report);

}  // namespace seqreg
