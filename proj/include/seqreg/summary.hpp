#pragma once

#include "seqreg/grid.hpp"
#include "seqreg/smc.hpp"

#include <Eigen/Core>

#include <filesystem>
#include <vector>

namespace seqreg {

/// Type-1 (inverse empirical CDF) weighted quantile: the smallest value whose
/// cumulative normalized weight reaches p (with a 1e-12 tolerance).
double weighted_quantile(const Eigen::Ref<const Eigen::VectorXd>& values,
                         const Eigen::Ref<const Eigen::VectorXd>& weights, double p);

struct SummaryBundle {
  Grid grid;
  Eigen::VectorXd template_mean;   // data units
  Eigen::VectorXd template_lower;  // 2.5%
  Eigen::VectorXd template_upper;  // 97.5%
  Eigen::MatrixXd phase_increments;  // n x L posterior means
  Eigen::MatrixXd phase_curves;      // M x n, mean warps on the grid
  Eigen::MatrixXd registered;        // M x n, f_i o mean gamma_i
  double sigma2_mean = 0.0;
  double sigma2_lower = 0.0;
  double sigma2_median = 0.0;
  double sigma2_upper = 0.0;
  std::vector<std::size_t> sample_index;  // particles exported for spaghetti plots
};

/// `functions` holds the n assimilated functions in data units.
SummaryBundle summarize(const ParticleSystem& sys, const std::vector<FunctionSample>& functions,
                        std::size_t max_sample = 200);

/// Writes template_band.csv, phase_means.csv, phase_curves.csv,
/// registered.csv, sigma2.csv, particles_sample.csv and diagnostics.csv.
void write_summary(const std::filesystem::path& dir, const ParticleSystem& sys, const SummaryBundle& bundle,
                   const std::vector<FunctionSample>& functions);

}  // namespace seqreg
