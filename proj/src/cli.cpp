#include "seqreg/cli.hpp"

#include "seqreg/benchmark.hpp"
#include "seqreg/errors.hpp"
#include "seqreg/io.hpp"
#include "seqreg/mcmc.hpp"
#include "seqreg/simdata.hpp"
#include "seqreg/smc.hpp"
#include "seqreg/summary.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>

namespace seqreg {

namespace fs = std::filesystem;

namespace {

struct Globals {
  std::optional<std::uint64_t> seed;
  std::string config;
  std::string out;
  int workers = 1;
};

struct ModelFlags {
  std::optional<int> basis_count;
  std::optional<int> partition_size;
  std::optional<double> kappa;
  std::optional<double> alpha_sigma;
  std::optional<double> beta_sigma;
  std::optional<double> theta;
  std::optional<int> sweeps;

  void add(CLI::App* app) {
    app->add_option("--basis-count", basis_count, "number of template basis functions B");
    app->add_option("--partition-size", partition_size, "warp partition size");
    app->add_option("--kappa", kappa, "Dirichlet prior concentration");
    app->add_option("--alpha-sigma", alpha_sigma, "inverse-gamma shape");
    app->add_option("--beta-sigma", beta_sigma, "inverse-gamma scale");
    app->add_option("--theta", theta, "warp proposal concentration");
    app->add_option("--sweeps", sweeps, "MH steps per SMC update (K)");
  }
  void apply(ModelSettings& s) const {
    if (basis_count) s.basis_count = *basis_count;
    if (partition_size) s.partition_size = *partition_size;
    if (kappa) s.kappa = *kappa;
    if (alpha_sigma) s.alpha_sigma = *alpha_sigma;
    if (beta_sigma) s.beta_sigma = *beta_sigma;
    if (theta) s.theta_prop = *theta;
    if (sweeps) s.sweeps = *sweeps;
  }
};

struct McmcFlags {
  std::optional<int> iters;
  std::optional<int> burnin;
  std::optional<int> thin;

  void add(CLI::App* app) {
    app->add_option("--iters", iters, "total MCMC sweeps");
    app->add_option("--burnin", burnin, "discarded MCMC sweeps");
    app->add_option("--thin", thin, "keep every k-th post-burn-in sweep");
  }
  void apply(McmcSettings& s) const {
    if (iters) s.iterations = *iters;
    if (burnin) s.burn_in = *burnin;
    if (thin) s.thin = *thin;
  }
};

RunConfig load_config(const Globals& g) {
  RunConfig rc;
  if (!g.config.empty()) rc = read_config(g.config);
  if (g.seed) rc.mcmc.seed = *g.seed;
  return rc;
}

std::vector<Srvf> srvfs_of(const std::vector<FunctionSample>& fs, std::size_t count) {
  std::vector<Srvf> q;
  q.reserve(count);
  for (std::size_t i = 0; i < count; ++i) q.push_back(to_srvf(fs[i]));
  return q;
}

void check_grid(const std::vector<FunctionSample>& fs, const ModelConfig& cfg) {
  if (!(fs.front().grid == cfg.grid())) throw DataError("data grid differs from the grid stored in the state file");
}

int cmd_simulate(const Globals& g, const std::string& scenario, SimSpec spec, std::ostream& out) {
  if (scenario == "example1") {
    spec.scenario = Scenario::example1;
  } else if (scenario == "example2") {
    spec.scenario = Scenario::example2;
  } else {
    throw std::invalid_argument("unknown scenario '" + scenario + "' (expected example1 or example2)");
  }
  if (g.seed) spec.seed = *g.seed;
  const SimResult sim = simulate(spec);
  const fs::path dir = g.out.empty() ? fs::path(".") : fs::path(g.out);
  write_data_csv(dir / "data.csv", sim.functions);
  write_truth(dir / "truth.json", sim.truth);
  out << (dir / "data.csv").string() << "\n" << (dir / "truth.json").string() << "\n";
  return kExitOk;
}

int cmd_batch(const Globals& g, const std::string& data_path, std::optional<int> n_init, int particles,
              const ModelFlags& mf, const McmcFlags& cf, std::ostream& out) {
  RunConfig rc = load_config(g);
  mf.apply(rc.model);
  cf.apply(rc.mcmc);
  validate(rc.mcmc);
  const auto functions = read_data_csv(data_path);
  const int n = n_init.value_or(static_cast<int>(functions.size()));
  if (n < 1 || static_cast<std::size_t>(n) > functions.size()) {
    throw std::invalid_argument("--n-init must be between 1 and " + std::to_string(functions.size()));
  }
  const ModelConfig cfg = make_config(functions.front().grid, rc.model);
  const auto q = srvfs_of(functions, static_cast<std::size_t>(n));
  const McmcResult res = mcmc_batch(q, cfg, rc.mcmc, particles);
  const fs::path path = g.out.empty() ? fs::path("state.json") : fs::path(g.out);
  write_state(path, res.system);
  out << "mcmc: n=" << n << " J=" << particles << " accept_c=" << format_double(res.accept_c)
      << " accept_warp=" << format_double(res.accept_warp) << "\n"
      << path.string() << "\n";
  return kExitOk;
}

int cmd_assimilate(const Globals& g, const std::string& state_path, const std::string& data_path, int count,
                   std::string diag_path, std::ostream& out) {
  if (count < 1) throw std::invalid_argument("--count must be positive");
  ParticleSystem sys = read_state(state_path);
  const auto functions = read_data_csv(data_path);
  check_grid(functions, sys.cfg);
  if (static_cast<std::size_t>(sys.n + count) > functions.size()) {
    throw std::invalid_argument("state holds n=" + std::to_string(sys.n) + "; assimilating " + std::to_string(count) +
                                " more needs " + std::to_string(sys.n + count) + " columns but the data has " +
                                std::to_string(functions.size()));
  }
  if (g.workers < 1) throw std::invalid_argument("--workers must be positive");
  const fs::path out_path = g.out.empty() ? fs::path(state_path) : fs::path(g.out);
  if (diag_path.empty()) diag_path = out_path.string() + ".diagnostics.csv";

  const bool fresh = !fs::exists(diag_path);
  std::ofstream diag(diag_path, std::ios::app);
  if (!diag) throw DataError("cannot write " + diag_path);
  if (fresh) diag << "n,ess_weighted,resampled,ess_final,accept_c,accept_warp,wall_seconds\n";

  auto q = srvfs_of(functions, static_cast<std::size_t>(sys.n + count));
  for (int k = 0; k < count; ++k) {
    assimilate_srvf(sys, std::span<const Srvf>(q).first(static_cast<std::size_t>(sys.n) + 1), g.workers);
    write_state(out_path, sys);
    const auto& h = sys.history.back();
    diag << h.n << "," << format_double(h.ess_weighted) << "," << (h.resampled ? 1 : 0) << ","
         << format_double(h.ess_final) << "," << format_double(h.accept_c) << "," << format_double(h.accept_warp)
         << "," << format_double(h.wall_seconds) << "\n";
    diag.flush();
    out << "n=" << h.n << " ess=" << format_double(h.ess_final) << (h.resampled ? " resampled" : "") << "\n";
  }
  return kExitOk;
}

int cmd_summarize(const Globals& g, const std::string& state_path, const std::string& data_path, std::ostream& out) {
  const ParticleSystem sys = read_state(state_path);
  const auto functions = read_data_csv(data_path);
  check_grid(functions, sys.cfg);
  if (functions.size() < static_cast<std::size_t>(sys.n)) {
    throw std::invalid_argument("data has fewer functions than the state's n");
  }
  const SummaryBundle b = summarize(sys, functions);
  const fs::path dir = g.out.empty() ? fs::path("summary") : fs::path(g.out);
  write_summary(dir, sys, b, functions);
  out << dir.string() << "\n";
  return kExitOk;
}

int cmd_benchmark(const Globals& g, const std::string& data_path, const std::string& truth_path, BenchmarkOptions opt,
                  const ModelFlags& mf, const McmcFlags& cf, std::ostream& out, std::ostream& err) {
  RunConfig rc = load_config(g);
  mf.apply(rc.model);
  cf.apply(rc.mcmc);
  opt.mcmc = rc.mcmc;
  opt.workers = g.workers;
  const auto functions = read_data_csv(data_path);
  validate(opt, functions.size());
  const ModelConfig cfg = make_config(functions.front().grid, rc.model);
  std::optional<SimTruth> truth;
  if (!truth_path.empty()) {
    truth = read_truth(truth_path, cfg.partition);
  } else {
    err << "warning: no truth sidecar given; accuracy columns omitted\n";
  }
  const auto q = srvfs_of(functions, static_cast<std::size_t>(opt.n_to));
  const BenchmarkReport report =
      run_benchmark(q, cfg, opt, truth ? &*truth : nullptr, [&](const std::string& s) { err << s << "\n"; });
  const std::string csv = benchmark_csv(report);
  if (g.out.empty()) {
    out << csv;
  } else {
    write_text(g.out, csv);
    out << g.out << "\n";
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sequential Bayesian registration of functional data"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "master random seed");
  app.add_option("--config", g.config, "JSON config with model and mcmc sections");
  app.add_option("--out", g.out, "output path");
  app.add_option("--workers", g.workers, "worker threads for particle updates");
  app.fallthrough();

  auto* sim = app.add_subcommand("simulate", "write a simulated dataset and its ground truth");
  std::string scenario;
  SimSpec spec;
  sim->add_option("--scenario", scenario, "example1 or example2")->required();
  sim->add_option("--n", spec.n, "number of functions (example1)");
  sim->add_option("--M", spec.M, "grid size");
  sim->add_option("--kappa-true", spec.kappa_true, "warp concentration (example1)");
  sim->add_option("--noise", spec.noise_sigma2, "SRVF-space noise variance (example1)");

  auto* batch = app.add_subcommand("batch", "batch MCMC initialization");
  std::string data_path;
  std::optional<int> n_init;
  int particles = 1000;
  ModelFlags mf;
  McmcFlags cf;
  batch->add_option("--data", data_path, "data CSV")->required();
  batch->add_option("--n-init", n_init, "use the first n functions");
  batch->add_option("--particles", particles, "number of retained draws J");
  mf.add(batch);
  cf.add(batch);

  auto* assim = app.add_subcommand("assimilate", "sequentially add functions to a state");
  std::string state_path;
  int count = 1;
  std::string diag_path;
  assim->add_option("--state", state_path, "state file")->required();
  assim->add_option("--data", data_path, "data CSV")->required();
  assim->add_option("--count", count, "number of functions to add");
  assim->add_option("--diagnostics", diag_path, "diagnostics CSV to append to");

  auto* summ = app.add_subcommand("summarize", "write plot-ready posterior summaries");
  summ->add_option("--state", state_path, "state file")->required();
  summ->add_option("--data", data_path, "data CSV")->required();

  auto* bench = app.add_subcommand("benchmark", "time SMC updates against MCMC reruns");
  std::string truth_path;
  BenchmarkOptions opt;
  bench->add_option("--data", data_path, "data CSV")->required();
  bench->add_option("--truth", truth_path, "ground-truth sidecar");
  bench->add_option("--n-init", opt.n_init, "functions in the initial batch");
  bench->add_option("--from", opt.n_from, "first n to time");
  bench->add_option("--to", opt.n_to, "last n to time");
  bench->add_option("--stride", opt.n_stride, "step between timed n");
  bench->add_option("--particles", opt.particles, "particles / retained draws");
  mf.add(bench);
  cf.add(bench);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (sim->parsed()) return cmd_simulate(g, scenario, spec, out);
    if (batch->parsed()) return cmd_batch(g, data_path, n_init, particles, mf, cf, out);
    if (assim->parsed()) return cmd_assimilate(g, state_path, data_path, count, diag_path, out);
    if (summ->parsed()) return cmd_summarize(g, state_path, data_path, out);
    if (bench->parsed()) return cmd_benchmark(g, data_path, truth_path, opt, mf, cf, out, err);
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitUsage;
}

}  // namespace seqreg
