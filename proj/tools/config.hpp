#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>

#include "evoter/dataset.hpp"
#include "evoter/environments.hpp"
#include "evoter/evolution.hpp"
#include "evoter/esp.hpp"

namespace evoter::cli {

/// One experiment, declaratively. Unknown keys anywhere in the JSON are
/// errors; relative paths resolve against the config file's directory.
struct RunConfig {
  std::string domain;  // cartpole | flappy | tabular | bp-synth
  std::uint64_t seed = 0;
  std::string output_dir = "runs";
  int workers = 1;

  // tabular
  std::optional<std::string> schema_path;
  std::optional<std::string> csv_path;
  std::optional<std::string> label_column;
  std::array<double, 3> split_fractions{0.6, 0.2, 0.2};

  // bp-synth
  SyntheticBpParams synthetic;
  WindowSpec window;

  // environments
  int env_episodes = 5;
  int env_max_frames = 200;
  int validation_episodes = 100;
  std::uint64_t validation_seed = 9001;
  double validation_threshold = 195.0;
  EvalMode action_mode = EvalMode::FirstMatch;

  EvoParams evolution;

  // esp
  int esp_k = 5;
  int esp_horizon = 20;
  int esp_samples = 100;
  int esp_n_prescriptors = 10;
  int esp_collect_episodes = 2;
  int esp_baseline_prescriptors = 20;
  EvalMode esp_mode = EvalMode::FirstMatch;
  OutcomeDirection esp_direction = OutcomeDirection::Maximize;
  OutcomeKind esp_outcome = OutcomeKind::SurvivalHorizon;
  std::string esp_predictor = "knn";  // knn | ridge
  int esp_rollout_horizon = 400;
  int esp_rollout_starts = 60;
  int esp_validate_top_k = 5;
  std::map<std::string, double> treated_levels;

  ScoreSpec scoring;

  std::string canonical_json;  // exactly what was read, for hashing/copying
};

RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& json_text, const std::string& base_dir);

/// FNV-1a over the canonical config text, hex, 16 chars.
std::string config_hash(const RunConfig& config);

}  // namespace evoter::cli
