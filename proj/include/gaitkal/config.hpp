#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "gaitkal/fusion.hpp"
#include "gaitkal/stepper.hpp"
#include "gaitkal/synthwalk.hpp"
#include "gaitkal/velmodel.hpp"

namespace gaitkal {

/// One calibrated waveform template per model family. Calibration rewrites
/// the speed scales; localization picks a template by tag.
struct ModelSet {
  GaussianModel gaussian;
  SinusoidalModel sinusoidal;
  SawtoothModel sawtooth;
};

/// @throws ConfigError for a tag outside gaussian|sin|saw
VelocityModel model_from_set(const ModelSet& models, std::string_view tag);

struct SweepConfig {
  std::vector<double> pcts{0.0, 5.0, 10.0, 15.0, 20.0, 25.0};
  int n_seeds = 30;
  std::uint64_t test_seed_base = 1000;  ///< test walk k uses seed base + k
  std::vector<std::string> models{"gaussian", "sin", "saw"};
};

struct CalibrationConfig {
  int n_walks = 15;
  std::uint64_t seed_base = 1;  ///< must not collide with the test range
  ModelCalibration search;
};

/// Everything a run needs, round-trippable through one JSON document so a
/// result directory can archive the exact settings that produced it.
struct PipelineConfig {
  /// Name of the seedable generator; pinned so other implementations can
  /// match the distributions. Only mt19937_64 is accepted.
  std::string rng_algorithm = "mt19937_64";
  GaitProfile profile;
  SensorErrorModel errors;
  FilterConfig filter;
  FsmThresholds thresholds;  ///< zero (invalid) until calibrated
  double scarlet_k = 1.0;
  StepLimits limits;
  ModelSet models;
  SweepConfig sweep;
  CalibrationConfig calibration;
};

/// Conversion accepts partial documents (absent keys keep defaults) but
/// rejects unknown keys and wrong types with ConfigError naming the key.
nlohmann::json config_to_json(const PipelineConfig& cfg);
PipelineConfig config_from_json(const nlohmann::json& doc);

/// @throws ConfigError with file context on unreadable or invalid documents
PipelineConfig load_config(const std::filesystem::path& path);

/// Two-space indent, alphabetical keys; repeated saves are byte-identical.
void save_config(const std::filesystem::path& path, const PipelineConfig& cfg);

nlohmann::json profile_to_json(const GaitProfile& profile);
nlohmann::json errors_to_json(const SensorErrorModel& errs);
nlohmann::json model_to_json(const VelocityModel& model);
VelocityModel model_from_json(const nlohmann::json& doc);

}  // namespace gaitkal
