// Run configuration shared by every harness command, read from JSON.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qcorr/measurement.hpp"
#include "qcorr/ml/classifier.hpp"

namespace qcorr::lab {

struct GridSpec {
  double p_min = 0.02;
  double p_max = 0.98;
  int p_count = 19;
  /// Training theta values per allowed quarter-turn arc.
  int theta_per_quadrant = 6;
};

struct BenchConfig {
  int repetitions = 30;
  /// States timed per repetition for the fast inference paths.
  int batch = 200;
};

struct SdpRunConfig {
  std::size_t dim_a = 2;
  std::size_t dim_b = 2;
  int states = 500;
  int budget = 500;
  std::vector<int> budget_sweep = {50, 100, 250, 500};
};

struct RunConfig {
  std::uint64_t seed = 20190101;
  GridSpec grid;
  double exclusion_half_width = kDefaultExclusionHalfWidth;
  std::size_t train_size = 445;
  std::size_t test_size = 455;
  /// Test theta offset; unset means half the training theta spacing.
  std::optional<double> delta_theta;
  std::int64_t n0 = kDefaultPairsPerSetting;
  NoiseModel noise = NoiseModel::Poisson;
  ml::ModelConfig models;
  BenchConfig bench;
  SdpRunConfig sdp;
  /// 0 leaves the OpenMP default.
  int threads = 0;

  /// Throws std::invalid_argument on out-of-range values.
  void validate() const;
};

/// Missing keys keep their defaults; unknown keys are rejected.
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& config);
RunConfig load_config(const std::string& path);
/// FNV-1a of the canonical JSON dump, as 16 hex digits.
std::string config_hash(const RunConfig& config);

}  // namespace qcorr::lab
