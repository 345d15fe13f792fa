#include "seqreg/io.hpp"

#include "seqreg/errors.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

using namespace seqreg;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
  fs::path dir = fs::temp_directory_path() / "seqreg_io_tests" / (std::string(info->test_suite_name()) + "_" + info->name());
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

ParticleSystem sample_system() {
  ModelSettings ms;
  ms.basis_count = 6;
  ms.theta_prop = 1234.5;
  ParticleSystem sys;
  sys.cfg = make_config(make_uniform_grid(21), ms);
  sys.n = 2;
  sys.rng = {77, 3};
  Rng rng(1);
  for (int j = 0; j < 4; ++j) {
    Particle p;
    p.c = rng.standard_normal(6) / 3.0;
    p.warps.emplace_back(sys.cfg.partition, rng.dirichlet(4, 2.0));
    p.warps.emplace_back(sys.cfg.partition, rng.dirichlet(4, 2.0));
    p.sigma2 = 0.1 / 3.0 + j;
    sys.particles.push_back(p);
  }
  sys.weights = Eigen::Vector4d(0.1, 0.2, 0.3, 0.4);
  UpdateDiagnostics d;
  d.n = 2;
  d.ess_weighted = 3.3;
  d.resampled = true;
  d.ess_final = 3.9;
  d.accept_c = 0.25;
  d.accept_warp = 1.0 / 3.0;
  d.wall_seconds = 12.0;
  sys.history.push_back(d);
  return sys;
}

}  // namespace

TEST(FormatDouble, RoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 123456789.123456789, 0.0}) {
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
}

TEST(DataCsv, RoundTripIsExact) {
  const fs::path dir = scratch_dir();
  SimSpec s;
  s.n = 6;
  s.seed = 3;
  const SimResult sim = simulate(s);
  write_data_csv(dir / "data.csv", sim.functions);
  const std::vector<FunctionSample> back = read_data_csv(dir / "data.csv");
  ASSERT_EQ(back.size(), 6u);
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_EQ(back[i].values, sim.functions[i].values);
    EXPECT_EQ(back[i].grid.points(), sim.functions[i].grid.points());
  }
  std::ifstream in(dir / "data.csv");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "t,f1,f2,f3,f4,f5,f6");
}

TEST(DataCsv, MalformedInputsAreDataErrors) {
  const fs::path dir = scratch_dir();
  EXPECT_THROW(read_data_csv(dir / "missing.csv"), DataError);
  write_text(dir / "short.csv", "t,f1\n0,1\n0.5\n1,2\n");
  EXPECT_THROW(read_data_csv(dir / "short.csv"), DataError);
  write_text(dir / "text.csv", "t,f1\n0,1\n0.5,abc\n1,2\n");
  EXPECT_THROW(read_data_csv(dir / "text.csv"), DataError);
  write_text(dir / "grid.csv", "t,f1\n0,1\n0.7,1\n0.5,1\n1,2\n");
  EXPECT_THROW(read_data_csv(dir / "grid.csv"), DataError);
  write_text(dir / "nocols.csv", "t\n0\n0.5\n1\n");
  EXPECT_THROW(read_data_csv(dir / "nocols.csv"), DataError);
}

TEST(Truth, RoundTrip) {
  const fs::path dir = scratch_dir();
  SimSpec s;
  s.n = 3;
  s.seed = 4;
  const SimResult sim = simulate(s);
  write_truth(dir / "truth.json", sim.truth);
  const SimTruth back = read_truth(dir / "truth.json", sim.truth.warps[0].partition());
  EXPECT_EQ(back.c_true, sim.truth.c_true);
  EXPECT_EQ(back.sigma2_true, sim.truth.sigma2_true);
  ASSERT_EQ(back.warps.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_LT((back.warps[i].increments() - sim.truth.warps[i].increments()).cwiseAbs().maxCoeff(), 1e-15);
  }
  EXPECT_THROW(read_truth(dir / "truth.json", Partition::uniform(4)), DataError);
}

TEST(Config, OverlaysAndRejectsUnknownKeys) {
  const fs::path dir = scratch_dir();
  write_text(dir / "cfg.json",
             R"({"model": {"kappa": 7.5, "sweeps": 3, "warp_correction": "literal", "coeff_proposal": "second_moment"}, "mcmc": {"thin": 4}})");
  const RunConfig rc = read_config(dir / "cfg.json");
  EXPECT_DOUBLE_EQ(rc.model.kappa, 7.5);
  EXPECT_EQ(rc.model.sweeps, 3);
  EXPECT_EQ(rc.model.warp_correction, WarpCorrection::literal);
  EXPECT_EQ(rc.model.coeff_proposal, CoeffProposal::second_moment);
  EXPECT_EQ(rc.model.basis_count, ModelSettings{}.basis_count);
  EXPECT_EQ(rc.mcmc.thin, 4);

  write_text(dir / "bad.json", R"({"model": {"kapa": 1}})");
  EXPECT_THROW(read_config(dir / "bad.json"), DataError);
  write_text(dir / "broken.json", "{not json");
  EXPECT_THROW(read_config(dir / "broken.json"), DataError);

  ModelSettings m;
  update_from_json(m, to_json(rc.model));
  EXPECT_EQ(to_json(m), to_json(rc.model));
}

TEST(State, ByteIdenticalRoundTrip) {
  const ParticleSystem sys = sample_system();
  const std::string text = state_to_string(sys);
  const ParticleSystem back = state_from_string(text);
  EXPECT_EQ(state_to_string(back), text);
  EXPECT_EQ(back.n, 2);
  EXPECT_EQ(back.rng.seed, 77u);
  EXPECT_EQ(back.rng.update_index, 3u);
  EXPECT_DOUBLE_EQ(back.cfg.settings.theta_prop, 1234.5);
  EXPECT_EQ(back.cfg.B(), 6);
  EXPECT_EQ(back.particles[2].c, sys.particles[2].c);
  EXPECT_EQ(back.weights, sys.weights);
  ASSERT_EQ(back.history.size(), 1u);
  EXPECT_DOUBLE_EQ(back.history[0].accept_warp, 1.0 / 3.0);
  EXPECT_TRUE(back.history[0].resampled);
  EXPECT_EQ(text.find("wall"), std::string::npos);

  const fs::path dir = scratch_dir();
  write_state(dir / "state.json", sys);
  EXPECT_EQ(read_text(dir / "state.json"), text);
  EXPECT_EQ(state_to_string(read_state(dir / "state.json")), text);
}

TEST(State, SchemaAndConsistencyErrors) {
  const ParticleSystem sys = sample_system();
  auto j = nlohmann::json::parse(state_to_string(sys));
  j["schema_version"] = kStateSchemaVersion + 1;
  EXPECT_THROW(state_from_string(j.dump()), DataError);

  j = nlohmann::json::parse(state_to_string(sys));
  j["weights"][0] = 0.5;
  EXPECT_THROW(state_from_string(j.dump()), DataError);

  j = nlohmann::json::parse(state_to_string(sys));
  j["n"] = 3;
  EXPECT_THROW(state_from_string(j.dump()), DataError);

  EXPECT_THROW(state_from_string("[1, 2"), DataError);
}
