#include "config.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "evoter/errors.hpp"

namespace evoter::cli {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::string& where,
                    const std::set<std::string>& allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key()))
      throw ConfigError("unknown key \"" + (where.empty() ? it.key() : where + "." + it.key()) +
                        "\"");
  }
}

template <typename T>
T require(const json& obj, const std::string& where, const std::string& key) {
  if (!obj.contains(key))
    throw ConfigError("missing required key \"" + (where.empty() ? key : where + "." + key) +
                      "\"");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("key \"" + (where.empty() ? key : where + "." + key) +
                      "\" has the wrong type");
  }
}

template <typename T>
void maybe(const json& obj, const std::string& where, const std::string& key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("key \"" + (where.empty() ? key : where + "." + key) +
                      "\" has the wrong type");
  }
}

EvalMode parse_mode(const std::string& text, const std::string& where) {
  if (text == "first_match") return EvalMode::FirstMatch;
  if (text == "hard_max") return EvalMode::HardMax;
  if (text == "all_matched") return EvalMode::AllMatched;
  throw ConfigError("key \"" + where + "\" must be first_match, hard_max or all_matched");
}

std::string resolve(const std::string& path, const std::string& base_dir) {
  std::filesystem::path p(path);
  if (p.is_absolute() || base_dir.empty()) return path;
  return (std::filesystem::path(base_dir) / p).lexically_normal().string();
}

void parse_data_section(const json& data, const std::string& base_dir, RunConfig& config) {
  reject_unknown(data, "data", {"csv", "label", "split", "synthetic", "window"});
  if (data.contains("csv")) config.csv_path = resolve(data.at("csv").get<std::string>(), base_dir);
  if (data.contains("label")) config.label_column = data.at("label").get<std::string>();
  if (data.contains("split")) {
    const auto v = data.at("split").get<std::vector<double>>();
    if (v.size() != 3) throw ConfigError("key \"data.split\" needs exactly 3 fractions");
    std::copy(v.begin(), v.end(), config.split_fractions.begin());
  }
  if (data.contains("synthetic")) {
    const json& s = data.at("synthetic");
    reject_unknown(s, "data.synthetic",
                   {"base_mmHg", "drift_sd", "noise_sd", "episode_rate", "episode_depth",
                    "length", "seed"});
    maybe(s, "data.synthetic", "base_mmHg", config.synthetic.base_mmHg);
    maybe(s, "data.synthetic", "drift_sd", config.synthetic.drift_sd);
    maybe(s, "data.synthetic", "noise_sd", config.synthetic.noise_sd);
    maybe(s, "data.synthetic", "episode_rate", config.synthetic.episode_rate);
    maybe(s, "data.synthetic", "episode_depth", config.synthetic.episode_depth);
    maybe(s, "data.synthetic", "length", config.synthetic.length);
    maybe(s, "data.synthetic", "seed", config.synthetic.seed);
  }
  if (data.contains("window")) {
    const json& w = data.at("window");
    reject_unknown(w, "data.window",
                   {"window_len", "stats", "max_lag", "alpha", "beta", "ranges"});
    maybe(w, "data.window", "window_len", config.window.window_len);
    maybe(w, "data.window", "max_lag", config.window.max_lag);
    maybe(w, "data.window", "alpha", config.window.alpha);
    maybe(w, "data.window", "beta", config.window.beta);
    if (w.contains("stats")) {
      config.window.stats.clear();
      for (const auto& s : w.at("stats"))
        config.window.stats.push_back(stat_from_string(s.get<std::string>()));
    }
    if (w.contains("ranges")) {
      for (auto it = w.at("ranges").begin(); it != w.at("ranges").end(); ++it) {
        const auto pair = it.value().get<std::vector<double>>();
        if (pair.size() != 2) throw ConfigError("window.ranges entries need [min, max]");
        config.window.ranges[stat_from_string(it.key())] = {pair[0], pair[1]};
      }
    }
  }
}

void parse_env_section(const json& env, RunConfig& config) {
  reject_unknown(env, "env",
                 {"episodes", "max_frames", "validation_episodes", "validation_seed",
                  "validation_threshold", "action_mode"});
  maybe(env, "env", "episodes", config.env_episodes);
  maybe(env, "env", "max_frames", config.env_max_frames);
  maybe(env, "env", "validation_episodes", config.validation_episodes);
  maybe(env, "env", "validation_seed", config.validation_seed);
  maybe(env, "env", "validation_threshold", config.validation_threshold);
  if (env.contains("action_mode"))
    config.action_mode = parse_mode(env.at("action_mode").get<std::string>(), "env.action_mode");
}

void parse_evolution_section(const json& evo, RunConfig& config) {
  reject_unknown(evo, "evolution",
                 {"population_size", "generations", "tournament_size", "elitism_count",
                  "mutation_rate", "crossover_probability", "selection_objective", "max_rules",
                  "max_conditions", "initial_rules", "initial_conditions", "max_lag", "with_certainty"});
  maybe(evo, "evolution", "population_size", config.evolution.population_size);
  maybe(evo, "evolution", "generations", config.evolution.generations);
  maybe(evo, "evolution", "tournament_size", config.evolution.tournament_size);
  maybe(evo, "evolution", "elitism_count", config.evolution.elitism_count);
  maybe(evo, "evolution", "mutation_rate", config.evolution.mutation_rate);
  maybe(evo, "evolution", "crossover_probability", config.evolution.crossover_probability);
  maybe(evo, "evolution", "selection_objective", config.evolution.selection_objective);
  maybe(evo, "evolution", "max_rules", config.evolution.genome.max_rules);
  maybe(evo, "evolution", "max_conditions", config.evolution.genome.max_conditions);
  maybe(evo, "evolution", "initial_rules", config.evolution.genome.initial_rules);
  maybe(evo, "evolution", "initial_conditions", config.evolution.genome.initial_conditions);
  maybe(evo, "evolution", "max_lag", config.evolution.genome.max_lag);
  maybe(evo, "evolution", "with_certainty", config.evolution.genome.with_certainty);
}

void parse_esp_section(const json& esp, RunConfig& config) {
  reject_unknown(esp, "esp",
                 {"k", "horizon", "samples", "n_prescriptors", "episodes",
                  "baseline_prescriptors", "mode", "direction", "treated_levels", "outcome",
                  "predictor", "rollout_horizon", "rollout_starts", "validate_top_k"});
  maybe(esp, "esp", "k", config.esp_k);
  maybe(esp, "esp", "horizon", config.esp_horizon);
  maybe(esp, "esp", "samples", config.esp_samples);
  maybe(esp, "esp", "n_prescriptors", config.esp_n_prescriptors);
  maybe(esp, "esp", "episodes", config.esp_collect_episodes);
  maybe(esp, "esp", "baseline_prescriptors", config.esp_baseline_prescriptors);
  if (esp.contains("mode"))
    config.esp_mode = parse_mode(esp.at("mode").get<std::string>(), "esp.mode");
  if (esp.contains("direction")) {
    const auto d = esp.at("direction").get<std::string>();
    if (d == "maximize") config.esp_direction = OutcomeDirection::Maximize;
    else if (d == "minimize") config.esp_direction = OutcomeDirection::Minimize;
    else throw ConfigError("key \"esp.direction\" must be maximize or minimize");
  }
  if (esp.contains("outcome")) {
    const auto o = esp.at("outcome").get<std::string>();
    if (o == "survival") config.esp_outcome = OutcomeKind::SurvivalHorizon;
    else if (o == "next_state") config.esp_outcome = OutcomeKind::NextStateDelta;
    else throw ConfigError("key \"esp.outcome\" must be survival or next_state");
  }
  if (esp.contains("predictor")) {
    config.esp_predictor = esp.at("predictor").get<std::string>();
    if (config.esp_predictor != "knn" && config.esp_predictor != "ridge")
      throw ConfigError("key \"esp.predictor\" must be knn or ridge");
  }
  maybe(esp, "esp", "rollout_horizon", config.esp_rollout_horizon);
  maybe(esp, "esp", "rollout_starts", config.esp_rollout_starts);
  maybe(esp, "esp", "validate_top_k", config.esp_validate_top_k);
  if (esp.contains("treated_levels"))
    config.treated_levels =
        esp.at("treated_levels").get<std::map<std::string, double>>();
}

void parse_scoring_section(const json& scoring, RunConfig& config) {
  reject_unknown(scoring, "scoring", {"kind", "class_weights"});
  if (scoring.contains("kind")) {
    const auto k = scoring.at("kind").get<std::string>();
    if (k == "accuracy") config.scoring.kind = ScoreKind::Accuracy;
    else if (k == "weighted_error") config.scoring.kind = ScoreKind::WeightedError;
    else throw ConfigError("key \"scoring.kind\" must be accuracy or weighted_error");
  }
  if (scoring.contains("class_weights"))
    config.scoring.class_weights =
        scoring.at("class_weights")
            .get<std::map<std::string, std::map<std::string, double>>>();
}

}  // namespace

RunConfig parse_config(const std::string& json_text, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");

  reject_unknown(j, "",
                 {"domain", "seed", "output_dir", "workers", "schema", "data", "env",
                  "evolution", "esp", "scoring"});

  RunConfig config;
  config.domain = require<std::string>(j, "", "domain");
  if (config.domain != "cartpole" && config.domain != "flappy" && config.domain != "tabular" &&
      config.domain != "bp-synth")
    throw ConfigError("key \"domain\" must be cartpole, flappy, tabular or bp-synth");
  config.seed = require<std::uint64_t>(j, "", "seed");
  maybe(j, "", "output_dir", config.output_dir);
  maybe(j, "", "workers", config.workers);
  if (j.contains("schema"))
    config.schema_path = resolve(j.at("schema").get<std::string>(), base_dir);
  if (j.contains("data")) parse_data_section(j.at("data"), base_dir, config);
  if (j.contains("env")) parse_env_section(j.at("env"), config);
  if (j.contains("evolution")) parse_evolution_section(j.at("evolution"), config);
  if (j.contains("esp")) parse_esp_section(j.at("esp"), config);
  if (j.contains("scoring")) parse_scoring_section(j.at("scoring"), config);

  config.evolution.seed = config.seed;
  config.evolution.workers = config.workers;
  config.canonical_json = j.dump(2) + "\n";
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::filesystem::path(path).parent_path().string());
}

std::string config_hash(const RunConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : config.canonical_json) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace evoter::cli
