#include "seqreg/io.hpp"

#include "seqreg/errors.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace seqreg {

using nlohmann::json;

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
  if (!out) throw DataError("write failed for " + path.string());
}

void write_data_csv(const std::filesystem::path& path, const std::vector<FunctionSample>& fs) {
  if (fs.empty()) throw std::invalid_argument("no functions to write");
  const Grid& grid = fs.front().grid;
  std::string s = "t";
  for (std::size_t i = 0; i < fs.size(); ++i) {
    if (!(fs[i].grid == grid)) throw std::invalid_argument("functions must share one grid");
    s += ",f" + std::to_string(i + 1);
  }
  s += '\n';
  for (Eigen::Index m = 0; m < grid.size(); ++m) {
    s += format_double(grid[m]);
    for (const auto& f : fs) {
      s += ',';
      s += format_double(f.values[m]);
    }
    s += '\n';
  }
  write_text(path, s);
}

namespace {

double parse_double(std::string_view field, std::size_t line) {
  while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
  while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) field.remove_suffix(1);
  double v = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw DataError("line " + std::to_string(line) + ": cannot parse number '" + std::string(field) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

}  // namespace

std::vector<FunctionSample> read_data_csv(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw DataError(path.string() + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line);
  if (header.size() < 2 || header[0] != "t") {
    throw DataError(path.string() + ": header must be t,f1,... with at least one function column");
  }
  const std::size_t cols = header.size();
  std::vector<double> t;
  std::vector<std::vector<double>> values(cols - 1);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto fields = split(line);
    if (fields.size() != cols) {
      throw DataError(path.string() + ": line " + std::to_string(lineno) + " has " + std::to_string(fields.size()) +
                      " fields, expected " + std::to_string(cols));
    }
    t.push_back(parse_double(fields[0], lineno));
    for (std::size_t c = 1; c < cols; ++c) values[c - 1].push_back(parse_double(fields[c], lineno));
  }
  Grid grid;
  try {
    grid = Grid(Eigen::Map<const Eigen::VectorXd>(t.data(), static_cast<Eigen::Index>(t.size())));
  } catch (const std::invalid_argument& e) {
    throw DataError(path.string() + ": invalid grid: " + e.what());
  }
  std::vector<FunctionSample> fs;
  fs.reserve(values.size());
  for (auto& v : values) {
    try {
      fs.emplace_back(grid, Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
    } catch (const std::invalid_argument& e) {
      throw DataError(path.string() + ": " + e.what());
    }
  }
  return fs;
}

namespace {

json vec_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd json_vec(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

const char* correction_name(WarpCorrection c) { return c == WarpCorrection::literal ? "literal" : "jacobian"; }

WarpCorrection correction_from(const std::string& s) {
  if (s == "literal") return WarpCorrection::literal;
  if (s == "jacobian") return WarpCorrection::jacobian;
  throw DataError("unknown warp_correction '" + s + "'");
}

const char* proposal_name(CoeffProposal c) { return c == CoeffProposal::centered ? "centered" : "second_moment"; }

CoeffProposal proposal_from(const std::string& s) {
  if (s == "centered") return CoeffProposal::centered;
  if (s == "second_moment") return CoeffProposal::second_moment;
  throw DataError("unknown coeff_proposal '" + s + "'");
}

template <class T>
void take(const json& j, const char* key, T& field) {
  if (auto it = j.find(key); it != j.end()) field = it->get<T>();
}

void reject_unknown(const json& j, std::initializer_list<const char*> keys, const char* section) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : keys) known = known || it.key() == k;
    if (!known) throw DataError(std::string("unknown ") + section + " setting '" + it.key() + "'");
  }
}

}  // namespace

json to_json(const ModelSettings& s) {
  return {{"basis_count", s.basis_count},
          {"partition_size", s.partition_size},
          {"sigma_c", s.sigma_c},
          {"kappa", s.kappa},
          {"alpha_sigma", s.alpha_sigma},
          {"beta_sigma", s.beta_sigma},
          {"theta_prop", s.theta_prop},
          {"sweeps", s.sweeps},
          {"resample_fraction", s.resample_fraction},
          {"center_weights", s.center_weights},
          {"dp_max_step", s.dp_max_step},
          {"warp_correction", correction_name(s.warp_correction)},
          {"coeff_proposal", proposal_name(s.coeff_proposal)}};
}

json to_json(const McmcSettings& s) {
  return {{"iterations", s.iterations}, {"burn_in", s.burn_in}, {"thin", s.thin},     {"c_step", s.c_step},
          {"adapt", s.adapt},           {"seed", s.seed},       {"warp_steps", s.warp_steps},
          {"init_refinements", s.init_refinements}};
}

void update_from_json(ModelSettings& s, const json& j) {
  if (!j.is_object()) throw DataError("model settings must be a JSON object");
  reject_unknown(j,
                 {"basis_count", "partition_size", "sigma_c", "kappa", "alpha_sigma", "beta_sigma", "theta_prop",
                  "sweeps", "resample_fraction", "center_weights", "dp_max_step", "warp_correction",
                  "coeff_proposal"},
                 "model");
  try {
    take(j, "basis_count", s.basis_count);
    take(j, "partition_size", s.partition_size);
    take(j, "sigma_c", s.sigma_c);
    take(j, "kappa", s.kappa);
    take(j, "alpha_sigma", s.alpha_sigma);
    take(j, "beta_sigma", s.beta_sigma);
    take(j, "theta_prop", s.theta_prop);
    take(j, "sweeps", s.sweeps);
    take(j, "resample_fraction", s.resample_fraction);
    take(j, "center_weights", s.center_weights);
    take(j, "dp_max_step", s.dp_max_step);
    if (auto it = j.find("warp_correction"); it != j.end()) s.warp_correction = correction_from(it->get<std::string>());
    if (auto it = j.find("coeff_proposal"); it != j.end()) s.coeff_proposal = proposal_from(it->get<std::string>());
  } catch (const json::exception& e) {
    throw DataError(std::string("bad model setting: ") + e.what());
  }
}

void update_from_json(McmcSettings& s, const json& j) {
  if (!j.is_object()) throw DataError("mcmc settings must be a JSON object");
  reject_unknown(j, {"iterations", "burn_in", "thin", "c_step", "adapt", "seed", "warp_steps", "init_refinements"}, "mcmc");
  try {
    take(j, "iterations", s.iterations);
    take(j, "burn_in", s.burn_in);
    take(j, "thin", s.thin);
    take(j, "c_step", s.c_step);
    take(j, "adapt", s.adapt);
    take(j, "seed", s.seed);
    take(j, "warp_steps", s.warp_steps);
    take(j, "init_refinements", s.init_refinements);
  } catch (const json::exception& e) {
    throw DataError(std::string("bad mcmc setting: ") + e.what());
  }
}

RunConfig read_config(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  if (!j.is_object()) throw DataError(path.string() + ": config must be a JSON object");
  reject_unknown(j, {"model", "mcmc"}, "config");
  RunConfig rc;
  if (j.contains("model")) update_from_json(rc.model, j["model"]);
  if (j.contains("mcmc")) update_from_json(rc.mcmc, j["mcmc"]);
  return rc;
}

void write_truth(const std::filesystem::path& path, const SimTruth& truth) {
  json j;
  j["c_true"] = vec_json(truth.c_true);
  j["sigma2_true"] = truth.sigma2_true;
  json incs = json::array();
  for (const auto& w : truth.warps) incs.push_back(vec_json(w.increments()));
  j["increments"] = incs;
  write_text(path, j.dump(1) + "\n");
}

SimTruth read_truth(const std::filesystem::path& path, const Partition& partition) {
  SimTruth t;
  try {
    const json j = json::parse(read_text(path));
    t.c_true = json_vec(j.at("c_true"));
    t.sigma2_true = j.at("sigma2_true").get<double>();
    for (const auto& d : j.at("increments")) {
      const Eigen::VectorXd v = json_vec(d);
      if (v.size() != partition.segments()) throw DataError(path.string() + ": increment length does not match partition");
      t.warps.emplace_back(partition, v);
    }
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  return t;
}

std::string state_to_string(const ParticleSystem& sys) {
  validate(sys);
  json j;
  j["schema_version"] = kStateSchemaVersion;
  j["cfg"] = {{"settings", to_json(sys.cfg.settings)}, {"grid", vec_json(sys.cfg.grid().points())}};
  j["n"] = sys.n;
  j["J"] = sys.size();
  json ps = json::array();
  for (const auto& p : sys.particles) {
    json incs = json::array();
    for (const auto& w : p.warps) incs.push_back(vec_json(w.increments()));
    ps.push_back({{"c", vec_json(p.c)}, {"d", incs}, {"sigma2", p.sigma2}});
  }
  j["particles"] = ps;
  j["weights"] = vec_json(sys.weights);
  j["rng_state"] = {{"seed", sys.rng.seed}, {"update_index", sys.rng.update_index}};
  json hist = json::array();
  for (const auto& h : sys.history) {
    hist.push_back({{"n", h.n},
                    {"ess_weighted", h.ess_weighted},
                    {"resampled", h.resampled},
                    {"ess_final", h.ess_final},
                    {"accept_c", h.accept_c},
                    {"accept_warp", h.accept_warp}});
  }
  j["history"] = hist;
  return j.dump() + "\n";
}

ParticleSystem state_from_string(const std::string& text) {
  ParticleSystem sys;
  try {
    const json j = json::parse(text);
    const int version = j.at("schema_version").get<int>();
    if (version != kStateSchemaVersion) {
      throw DataError("state schema_version " + std::to_string(version) + " is not supported (reader expects " +
                      std::to_string(kStateSchemaVersion) + ")");
    }
    ModelSettings settings;
    update_from_json(settings, j.at("cfg").at("settings"));
    sys.cfg = make_config(Grid(json_vec(j.at("cfg").at("grid"))), settings);
    sys.n = j.at("n").get<int>();
    const auto J = j.at("J").get<std::size_t>();
    const auto& ps = j.at("particles");
    if (ps.size() != J) throw DataError("state particle count does not match J");
    sys.particles.reserve(J);
    for (const auto& pj : ps) {
      Particle p;
      p.c = json_vec(pj.at("c"));
      p.sigma2 = pj.at("sigma2").get<double>();
      for (const auto& d : pj.at("d")) p.warps.emplace_back(sys.cfg.partition, json_vec(d));
      sys.particles.push_back(std::move(p));
    }
    sys.weights = json_vec(j.at("weights"));
    sys.rng.seed = j.at("rng_state").at("seed").get<std::uint64_t>();
    sys.rng.update_index = j.at("rng_state").at("update_index").get<std::uint64_t>();
    for (const auto& h : j.at("history")) {
      UpdateDiagnostics d;
      d.n = h.at("n").get<int>();
      d.ess_weighted = h.at("ess_weighted").get<double>();
      d.resampled = h.at("resampled").get<bool>();
      d.ess_final = h.at("ess_final").get<double>();
      d.accept_c = h.at("accept_c").get<double>();
      d.accept_warp = h.at("accept_warp").get<double>();
      sys.history.push_back(d);
    }
    validate(sys);
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed state file: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("invalid state file: ") + e.what());
  }
  return sys;
}

void write_state(const std::filesystem::path& path, const ParticleSystem& sys) {
  write_text(path, state_to_string(sys));
}

ParticleSystem read_state(const std::filesystem::path& path) { return state_from_string(read_text(path)); }

}  // namespace seqreg
