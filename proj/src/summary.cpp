#include "seqreg/summary.hpp"

#include "seqreg/io.hpp"
#include "seqreg/srvf.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace seqreg {

double weighted_quantile(const Eigen::Ref<const Eigen::VectorXd>& values,
                         const Eigen::Ref<const Eigen::VectorXd>& weights, double p) {
  if (values.size() == 0 || values.size() != weights.size()) {
    throw std::invalid_argument("weighted_quantile: values and weights must be nonempty and equal length");
  }
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("weighted_quantile: p must lie in [0, 1]");
  std::vector<Eigen::Index> order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return values[a] < values[b]; });
  const double total = weights.sum();
  double acc = 0.0;
  for (const auto k : order) {
    acc += weights[k] / total;
    if (acc >= p - 1e-12 && weights[k] > 0.0) return values[k];
  }
  return values[order.back()];
}

SummaryBundle summarize(const ParticleSystem& sys, const std::vector<FunctionSample>& functions,
                        std::size_t max_sample) {
  validate(sys);
  if (functions.size() < static_cast<std::size_t>(sys.n)) {
    throw std::invalid_argument("summarize needs the " + std::to_string(sys.n) + " assimilated functions");
  }
  const ModelConfig& cfg = sys.cfg;
  const Grid& grid = cfg.grid();
  const Eigen::Index M = grid.size();
  const std::size_t J = sys.size();

  SummaryBundle b;
  b.grid = grid;

  double f0 = 0.0;
  for (int i = 0; i < sys.n; ++i) f0 += functions[i].values[0];
  if (sys.n > 0) f0 /= sys.n;

  Eigen::MatrixXd templates(M, static_cast<Eigen::Index>(J));
  for (std::size_t j = 0; j < J; ++j) {
    templates.col(static_cast<Eigen::Index>(j)) = from_srvf(f0, Srvf(grid, cfg.basis.phi * sys.particles[j].c)).values;
  }
  b.template_mean = templates * sys.weights;
  b.template_lower.resize(M);
  b.template_upper.resize(M);
  for (Eigen::Index m = 0; m < M; ++m) {
    const Eigen::VectorXd row = templates.row(m).transpose();
    b.template_lower[m] = weighted_quantile(row, sys.weights, 0.025);
    b.template_upper[m] = weighted_quantile(row, sys.weights, 0.975);
  }

  b.phase_increments.resize(sys.n, cfg.L());
  b.phase_curves.resize(M, sys.n);
  b.registered.resize(M, sys.n);
  for (int i = 0; i < sys.n; ++i) {
    const Warp mean(cfg.partition, weighted_mean_increments(sys, static_cast<std::size_t>(i)));
    b.phase_increments.row(i) = mean.increments().transpose();
    const PiecewiseLinearMap curve = mean.curve();
    for (Eigen::Index m = 0; m < M; ++m) {
      const double g = std::clamp(curve(grid[m]), 0.0, 1.0);
      b.phase_curves(m, i) = g;
      b.registered(m, i) = interp_linear(functions[i].grid, functions[i].values, g);
    }
  }

  Eigen::VectorXd s2(static_cast<Eigen::Index>(J));
  for (std::size_t j = 0; j < J; ++j) s2[static_cast<Eigen::Index>(j)] = sys.particles[j].sigma2;
  b.sigma2_mean = weighted_mean_sigma2(sys);
  b.sigma2_lower = weighted_quantile(s2, sys.weights, 0.025);
  b.sigma2_median = weighted_quantile(s2, sys.weights, 0.5);
  b.sigma2_upper = weighted_quantile(s2, sys.weights, 0.975);

  const std::size_t count = std::min(max_sample, J);
  for (std::size_t k = 0; k < count; ++k) b.sample_index.push_back(k * J / count);
  return b;
}

void write_summary(const std::filesystem::path& dir, const ParticleSystem& sys, const SummaryBundle& b,
                   const std::vector<FunctionSample>& functions) {
  const Eigen::Index M = b.grid.size();
  const auto& F = format_double;

  std::string s = "t,mean,lower,upper\n";
  for (Eigen::Index m = 0; m < M; ++m) {
    s += F(b.grid[m]) + "," + F(b.template_mean[m]) + "," + F(b.template_lower[m]) + "," + F(b.template_upper[m]) + "\n";
  }
  write_text(dir / "template_band.csv", s);

  s = "function";
  for (Eigen::Index k = 0; k < b.phase_increments.cols(); ++k) s += ",d" + std::to_string(k + 1);
  s += "\n";
  for (Eigen::Index i = 0; i < b.phase_increments.rows(); ++i) {
    s += std::to_string(i + 1);
    for (Eigen::Index k = 0; k < b.phase_increments.cols(); ++k) s += "," + F(b.phase_increments(i, k));
    s += "\n";
  }
  write_text(dir / "phase_means.csv", s);

  auto grid_table = [&](const Eigen::MatrixXd& table, const char* prefix) {
    std::string out = "t";
    for (Eigen::Index i = 0; i < table.cols(); ++i) out += std::string(",") + prefix + std::to_string(i + 1);
    out += "\n";
    for (Eigen::Index m = 0; m < M; ++m) {
      out += F(b.grid[m]);
      for (Eigen::Index i = 0; i < table.cols(); ++i) out += "," + F(table(m, i));
      out += "\n";
    }
    return out;
  };
  write_text(dir / "phase_curves.csv", grid_table(b.phase_curves, "gamma"));
  write_text(dir / "registered.csv", grid_table(b.registered, "f"));

  s = "mean,q025,median,q975\n" + F(b.sigma2_mean) + "," + F(b.sigma2_lower) + "," + F(b.sigma2_median) + "," +
      F(b.sigma2_upper) + "\n";
  write_text(dir / "sigma2.csv", s);

  double f0 = 0.0;
  for (int i = 0; i < sys.n; ++i) f0 += functions[i].values[0];
  if (sys.n > 0) f0 /= sys.n;
  s = "particle,weight,sigma2,t,template\n";
  for (const auto j : b.sample_index) {
    const Particle& p = sys.particles[j];
    const FunctionSample f = from_srvf(f0, Srvf(b.grid, sys.cfg.basis.phi * p.c));
    const std::string head = std::to_string(j) + "," + F(sys.weights[static_cast<Eigen::Index>(j)]) + "," + F(p.sigma2) + ",";
    for (Eigen::Index m = 0; m < M; ++m) s += head + F(b.grid[m]) + "," + F(f.values[m]) + "\n";
  }
  write_text(dir / "particles_sample.csv", s);

  s = "n,ess_weighted,resampled,ess_final,accept_c,accept_warp\n";
  for (const auto& h : sys.history) {
    s += std::to_string(h.n) + "," + F(h.ess_weighted) + "," + (h.resampled ? "1" : "0") + "," + F(h.ess_final) + "," +
         F(h.accept_c) + "," + F(h.accept_warp) + "\n";
  }
  write_text(dir / "diagnostics.csv", s);
}

}  // namespace seqreg
