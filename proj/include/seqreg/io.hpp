#pragma once

#include "seqreg/grid.hpp"
#include "seqreg/mcmc.hpp"
#include "seqreg/model.hpp"
#include "seqreg/simdata.hpp"
#include "seqreg/smc.hpp"

#include "json.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace seqreg {

inline constexpr int kStateSchemaVersion = 1;

/// Shortest decimal that parses back to the same double ("%.17g").
std::string format_double(double v);

/// Data CSV: header `t,f1,...,fn`, first column the shared grid.
void write_data_csv(const std::filesystem::path& path, const std::vector<FunctionSample>& fs);
std::vector<FunctionSample> read_data_csv(const std::filesystem::path& path);

void write_truth(const std::filesystem::path& path, const SimTruth& truth);
SimTruth read_truth(const std::filesystem::path& path, const Partition& partition);

nlohmann::json to_json(const ModelSettings& s);
nlohmann::json to_json(const McmcSettings& s);
/// Overlays fields present in j; unknown keys raise DataError.
void update_from_json(ModelSettings& s, const nlohmann::json& j);
void update_from_json(McmcSettings& s, const nlohmann::json& j);

/// Config file layout: {"model": {...}, "mcmc": {...}}; both sections optional.
struct RunConfig {
  ModelSettings model;
  McmcSettings mcmc;
};
RunConfig read_config(const std::filesystem::path& path);

std::string state_to_string(const ParticleSystem& sys);
ParticleSystem state_from_string(const std::string& text);
void write_state(const std::filesystem::path& path, const ParticleSystem& sys);
ParticleSystem read_state(const std::filesystem::path& path);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace seqreg
