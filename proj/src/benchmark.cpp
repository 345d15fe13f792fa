#include "seqreg/benchmark.hpp"

#include "seqreg/io.hpp"

#include <chrono>
#include <stdexcept>

namespace seqreg {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

bool requested(const BenchmarkOptions& opt, int n) {
  return n >= opt.n_from && n <= opt.n_to && (n - opt.n_from) % opt.n_stride == 0;
}

}  // namespace

void validate(const BenchmarkOptions& opt, std::size_t available) {
  if (opt.n_init < 1) throw std::invalid_argument("n_init must be positive");
  if (opt.n_from <= opt.n_init) throw std::invalid_argument("benchmark range must start after n_init");
  if (opt.n_to < opt.n_from) throw std::invalid_argument("benchmark range is empty");
  if (opt.n_stride < 1) throw std::invalid_argument("stride must be positive");
  if (static_cast<std::size_t>(opt.n_to) > available) {
    throw std::invalid_argument("benchmark range ends at " + std::to_string(opt.n_to) + " but only " +
                                std::to_string(available) + " functions are available");
  }
  if (opt.particles < 1) throw std::invalid_argument("particle count must be positive");
  validate(opt.mcmc);
}

std::size_t highest_weight_index(const ParticleSystem& sys) {
  Eigen::Index best = 0;
  sys.weights.maxCoeff(&best);
  return static_cast<std::size_t>(best);
}

AccuracyMetrics accuracy(const ParticleSystem& sys, std::size_t mode_index, const SimTruth& truth) {
  if (truth.c_true.size() != sys.cfg.B()) throw std::invalid_argument("truth coefficients do not match the basis");
  if (truth.warps.size() < static_cast<std::size_t>(sys.n)) throw std::invalid_argument("truth has too few warps");
  AccuracyMetrics a;
  a.c_mean = (weighted_mean_coefficients(sys) - truth.c_true).norm();
  const Particle& mode = sys.particles.at(mode_index);
  a.c_mode = (mode.c - truth.c_true).norm();
  for (int i = 0; i < sys.n; ++i) {
    const Eigen::VectorXd& d = truth.warps[i].increments();
    a.d_mean += (weighted_mean_increments(sys, static_cast<std::size_t>(i)) - d).norm();
    a.d_mode += (mode.warps[i].increments() - d).norm();
  }
  return a;
}

BenchmarkReport run_benchmark(std::span<const Srvf> data, const ModelConfig& cfg, const BenchmarkOptions& opt,
                              const SimTruth* truth, const std::function<void(const std::string&)>& log) {
  validate(opt, data.size());
  auto say = [&](const std::string& s) {
    if (log) log(s);
  };

  BenchmarkReport report;
  auto start = std::chrono::steady_clock::now();
  McmcResult init = mcmc_batch(data.first(opt.n_init), cfg, opt.mcmc, opt.particles);
  report.init_seconds = seconds_since(start);
  say("initial MCMC on " + std::to_string(opt.n_init) + " functions: " + format_double(report.init_seconds) +
      " s, c acceptance " + format_double(init.accept_c));
  ParticleSystem sys = std::move(init.system);

  for (int n = opt.n_init + 1; n <= opt.n_to; ++n) {
    start = std::chrono::steady_clock::now();
    assimilate_srvf(sys, data.first(n), opt.workers);
    const double smc_seconds = seconds_since(start);
    if (!requested(opt, n)) continue;

    BenchmarkRow row;
    row.n = n;
    row.smc_seconds = smc_seconds;
    row.ess = sys.history.back().ess_final;
    start = std::chrono::steady_clock::now();
    const McmcResult batch = mcmc_batch(data.first(n), cfg, opt.mcmc, opt.particles);
    row.mcmc_seconds = seconds_since(start);
    if (truth) {
      row.smc = accuracy(sys, highest_weight_index(sys), *truth);
      std::size_t best = 0;
      for (std::size_t j = 1; j < batch.log_posterior.size(); ++j) {
        if (batch.log_posterior[j] > batch.log_posterior[best]) best = j;
      }
      row.mcmc = accuracy(batch.system, best, *truth);
    }
    say("n=" + std::to_string(n) + " smc " + format_double(row.smc_seconds) + " s, mcmc " +
        format_double(row.mcmc_seconds) + " s, ess " + format_double(row.ess));
    report.rows.push_back(row);
  }
  report.final_system = std::move(sys);
  return report;
}

std::string benchmark_csv(const BenchmarkReport& report) {
  const bool acc = !report.rows.empty() && report.rows.front().smc.has_value();
  std::string s = "n,smc_seconds,mcmc_seconds,ratio,ess";
  if (acc) {
    s += ",smc_c_mean_err,smc_c_mode_err,smc_d_mean_err,smc_d_mode_err";
    s += ",mcmc_c_mean_err,mcmc_c_mode_err,mcmc_d_mean_err,mcmc_d_mode_err";
  }
  s += "\n";
  const auto& F = format_double;
  for (const auto& r : report.rows) {
    s += std::to_string(r.n) + "," + F(r.smc_seconds) + "," + F(r.mcmc_seconds) + "," + F(r.mcmc_seconds / r.smc_seconds) +
         "," + F(r.ess);
    if (acc) {
      for (const auto* m : {&*r.smc, &*r.mcmc}) {
        s += "," + F(m->c_mean) + "," + F(m->c_mode) + "," + F(m->d_mean) + "," + F(m->d_mode);
      }
    }
    s += "\n";
  }
  return s;
}

}  // namespace seqreg
