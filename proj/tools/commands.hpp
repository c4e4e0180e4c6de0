#pragma once

#include <optional>
#include <string>

#include "config.hpp"

namespace evoter::cli {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::string> out_dir;
  std::optional<std::string> predictor_path;
  std::optional<int> generations;
};

int cmd_evolve(const std::string& config_path, const Overrides& overrides);
int cmd_esp(const std::string& config_path, const Overrides& overrides);

struct SimplifyArgs {
  std::string rules_path;
  std::string schema_path;
  std::size_t budget = 10000;
  std::uint64_t seed = 0;
  std::optional<std::string> corpus_csv;
  std::optional<std::string> out_path;
};
int cmd_simplify(const SimplifyArgs& args);

struct EvalArgs {
  std::string rules_path;
  std::optional<std::string> env_name;
  std::optional<std::string> data_csv;
  std::optional<std::string> schema_path;
  std::optional<std::string> label_column;
  std::optional<std::string> config_path;
  std::string mode = "first_match";
  int episodes = 100;
  int max_frames = 200;
  std::uint64_t seed = 9001;
};
int cmd_eval(const EvalArgs& args);

struct RenderArgs {
  std::string rules_path;
  std::string schema_path;
  std::optional<std::string> vocab_path;
};
int cmd_render(const RenderArgs& args);

struct SimulateArgs {
  std::string env_name;
  std::optional<std::string> rules_path;
  int episodes = 1;
  int max_frames = 500;
  std::uint64_t seed = 0;
  std::optional<std::string> trace_path;
};
int cmd_simulate(const SimulateArgs& args);

}  // namespace evoter::cli
