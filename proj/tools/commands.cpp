#include "commands.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "evoter/errors.hpp"
#include "evoter/parser.hpp"
#include "evoter/simplify.hpp"

namespace evoter::cli {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

RunConfig configure(const std::string& config_path, const Overrides& overrides) {
  RunConfig config = load_config(config_path);
  if (overrides.seed) config.seed = *overrides.seed;
  if (overrides.workers) config.workers = *overrides.workers;
  if (overrides.out_dir) config.output_dir = *overrides.out_dir;
  if (overrides.generations) config.evolution.generations = *overrides.generations;
  config.evolution.seed = config.seed;
  config.evolution.workers = config.workers;
  return config;
}

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

/// runs/<confighash>-<timestamp>[-n]; every artifact of the run lives here.
fs::path make_run_dir(const RunConfig& config) {
  const std::string base = config_hash(config) + "-" + timestamp_utc();
  fs::path dir = fs::path(config.output_dir) / base;
  for (int n = 2; fs::exists(dir); ++n)
    dir = fs::path(config.output_dir) / (base + "-" + std::to_string(n));
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

std::string champion_header(const RunConfig& config, const Candidate& champion) {
  std::string h = "# champion | config " + config_hash(config) + " | seed " +
                  std::to_string(config.seed) + " | born gen " +
                  std::to_string(champion.generation_born) + " | objectives [";
  for (std::size_t i = 0; i < champion.objectives.size(); ++i) {
    if (i) h += ", ";
    h += format_double(champion.objectives[i]);
  }
  h += "]\n";
  return h;
}

void write_candidate_file(const fs::path& path, const Candidate& c, const RunConfig& config) {
  write_text(path, champion_header(config, c) + render(c.genome));
}

void write_run_artifacts(const fs::path& dir, const RunConfig& config, const RunResult& result) {
  write_text(dir / "config.json", config.canonical_json);
  write_candidate_file(dir / "champion.rules", result.champion, config);
  fs::create_directories(dir / "population");
  char name[32];
  for (std::size_t i = 0; i < result.population.size(); ++i) {
    std::snprintf(name, sizeof(name), "%04zu.rules", i);
    write_candidate_file(dir / "population" / name, result.population[i], config);
  }
  fs::create_directories(dir / "archive");
  for (std::size_t i = 0; i < result.archive.members().size(); ++i) {
    std::snprintf(name, sizeof(name), "%04zu.rules", i);
    write_candidate_file(dir / "archive" / name, result.archive.members()[i], config);
  }
}

ordered_json jsonl_record(const GenRecord& record) {
  ordered_json j;
  j["gen"] = record.gen;
  j["best"] = record.best;
  j["mean"] = record.mean;
  j["size_best"] = record.size_best;
  j["archive_size"] = record.archive_size;
  return j;
}

struct TableBundle {
  Table train, validation, test;
  FeatureSchema schema;
};

TableBundle load_domain_tables(const RunConfig& config) {
  TableBundle bundle;
  if (config.domain == "tabular") {
    if (!config.schema_path) throw ConfigError("missing required key \"schema\"");
    if (!config.csv_path) throw ConfigError("missing required key \"data.csv\"");
    bundle.schema = FeatureSchema::load(*config.schema_path);
    const LoadedCsv loaded = load_csv(*config.csv_path, bundle.schema, config.label_column, true);
    if (loaded.report.out_of_range > 0)
      std::cerr << "note: " << loaded.report.out_of_range
                << " out-of-range values in " << *config.csv_path << "\n";
    const auto parts = split(loaded.table, config.split_fractions, config.seed);
    bundle.train = parts[0];
    bundle.validation = parts[1];
    bundle.test = parts[2];
  } else if (config.domain == "bp-synth") {
    const auto series = synthetic_bp_series(config.synthetic);
    const Table table = windowed_dataset(series, config.window);
    bundle.schema = table.schema;
    const auto parts = split(table, config.split_fractions, config.seed);
    bundle.train = parts[0];
    bundle.validation = parts[1];
    bundle.test = parts[2];
  } else {
    throw ConfigError("domain \"" + config.domain + "\" is not a tabular domain");
  }
  return bundle;
}

std::vector<std::string> predict_table(const RuleSet& rs, const Table& table, EvalMode mode,
                                       EvalCounters* counters = nullptr) {
  std::vector<std::string> preds;
  preds.reserve(table.rows.size());
  std::vector<std::vector<double>> history(1);
  for (const auto& row : table.rows) {
    history[0] = row;
    const InputFrame frame{history};
    preds.push_back(eval_ruleset(rs, frame, mode, counters).primary().name);
  }
  return preds;
}

ScoreSpec effective_scoring(const RunConfig& config) {
  ScoreSpec s = config.scoring;
  if (s.kind == ScoreKind::WeightedError && s.class_weights.empty())
    throw ConfigError("scoring.kind weighted_error needs scoring.class_weights");
  return s;
}

Evaluator make_table_evaluator(const TableBundle& bundle, const RunConfig& config,
                               const ScoreSpec& scoring) {
  const Table& train = bundle.train;
  const EvalMode mode = config.action_mode;
  return [&train, mode, scoring](const RuleSet& rs) {
    Evaluation ev;
    ev.counters.reset(rs.rules.size());
    const auto preds = predict_table(rs, train, mode, &ev.counters);
    ev.objectives = {score(preds, train.labels, scoring)};
    return ev;
  };
}

Evaluator make_env_evaluator(const RunConfig& config) {
  const std::string name = config.domain;
  EpisodeSpec spec;
  spec.episodes = config.env_episodes;
  spec.max_frames = config.env_max_frames;
  spec.seed = config.seed;
  spec.action_mode = config.action_mode;
  return [name, spec](const RuleSet& rs) {
    auto env = make_environment(name);
    const EpisodeResult r = run_episodes(*env, rs, spec);
    Evaluation ev;
    ev.objectives = {r.mean_reward};
    ev.counters = r.counters;
    return ev;
  };
}

double validate_on_env(const RunConfig& config, const RuleSet& rs) {
  auto env = make_environment(config.domain);
  EpisodeSpec spec;
  spec.episodes = config.validation_episodes;
  spec.max_frames = config.env_max_frames;
  spec.seed = config.validation_seed;
  spec.action_mode = config.action_mode;
  return run_episodes(*env, rs, spec).mean_reward;
}

InterventionMap build_interventions(const RunConfig& config, const FeatureSchema& schema) {
  InterventionMap map;
  for (const auto& action : schema.actions()) {
    auto level = config.treated_levels.find(action);
    if (level == config.treated_levels.end())
      throw ConfigError("esp.treated_levels has no entry for action \"" + action + "\"");
    auto idx = schema.index_of(action);
    if (!idx)
      throw ConfigError("intervention action \"" + action + "\" names no schema feature");
    map.by_action[action] = {*idx, level->second};
  }
  return map;
}

}  // namespace

int cmd_evolve(const std::string& config_path, const Overrides& overrides) {
  const RunConfig config = configure(config_path, overrides);
  const bool env_domain = config.domain == "cartpole" || config.domain == "flappy";
  const fs::path dir = make_run_dir(config);
  std::cout << "run dir: " << dir.string() << "\n";

  std::ofstream log(dir / "evolution.jsonl");
  if (!log) throw Error("cannot write evolution log");

  FeatureSchema schema;
  Evaluator evaluator;
  ScoreSpec scoring;
  TableBundle bundle;
  if (env_domain) {
    schema = make_environment(config.domain)->schema();
    evaluator = make_env_evaluator(config);
  } else {
    bundle = load_domain_tables(config);
    schema = bundle.schema;
    scoring = effective_scoring(config);
    evaluator = make_table_evaluator(bundle, config, scoring);
  }

  double best_validation = 0.0;
  int solved_at = -1;
  std::optional<Candidate> solver;
  const GenerationCallback callback = [&](const GenRecord& record,
                                          std::span<const Candidate> population) {
    log << jsonl_record(record).dump() << "\n";
    log.flush();
    if (env_domain) {
      // the validation set picks the champion among the generation's best few
      const std::size_t k = std::min<std::size_t>(5, population.size());
      for (std::size_t i = 0; i < k; ++i) {
        const double v = validate_on_env(config, population[i].genome);
        best_validation = std::max(best_validation, v);
        if (v >= config.validation_threshold) {
          solved_at = record.gen;
          solver = population[i];
          return false;
        }
      }
    }
    return true;
  };

  RunResult result = evolve(evaluator, config.evolution, schema, callback);
  if (solver) result.champion = *solver;
  write_run_artifacts(dir, config, result);

  ordered_json report;
  report["domain"] = config.domain;
  report["seed"] = config.seed;
  report["generations_run"] = result.records.back().gen;
  report["evaluations"] = result.evaluations;
  report["champion_objectives"] = result.champion.objectives;
  report["champion_rules"] = result.champion.genome.rules.size();
  if (env_domain) {
    report["validation_mean_reward"] = best_validation;
    report["validation_threshold"] = config.validation_threshold;
    report["solved"] = solved_at >= 0;
    if (solved_at >= 0) report["solved_at_generation"] = solved_at;
    std::cout << "champion fitness " << format_double(result.champion.objectives[0])
              << ", validation " << format_double(best_validation)
              << (solved_at >= 0 ? " (solved at gen " + std::to_string(solved_at) + ")" : "")
              << "\n";
  } else {
    const auto val_preds = predict_table(result.champion.genome, bundle.validation,
                                         config.action_mode);
    const auto test_preds = predict_table(result.champion.genome, bundle.test,
                                          config.action_mode);
    const double val_score =
        bundle.validation.rows.empty() ? 0.0 : score(val_preds, bundle.validation.labels, scoring);
    const double test_score =
        bundle.test.rows.empty() ? 0.0 : score(test_preds, bundle.test.labels, scoring);
    report["train_score"] = result.champion.objectives[0];
    report["validation_score"] = val_score;
    report["test_score"] = test_score;
    std::cout << "champion train score " << format_double(result.champion.objectives[0])
              << ", validation " << format_double(val_score) << ", test "
              << format_double(test_score) << "\n";
  }
  write_text(dir / "report.json", report.dump(2) + "\n");
  std::cout << "champion: " << (dir / "champion.rules").string() << "\n";
  return 0;
}

int cmd_esp(const std::string& config_path, const Overrides& overrides) {
  const RunConfig config = configure(config_path, overrides);
  const bool env_domain = config.domain == "cartpole" || config.domain == "flappy";
  const fs::path dir = make_run_dir(config);
  std::cout << "run dir: " << dir.string() << "\n";

  std::ofstream log(dir / "evolution.jsonl");
  if (!log) throw Error("cannot write evolution log");

  ordered_json report;
  report["domain"] = config.domain;
  report["seed"] = config.seed;
  report["k"] = config.esp_k;

  GenomeParams collect_genome = config.evolution.genome;

  if (env_domain) {
    auto env = make_environment(config.domain);
    const FeatureSchema schema = env->schema();

    CollectParams collect;
    collect.n_prescriptors = config.esp_n_prescriptors;
    collect.episodes = config.esp_collect_episodes;
    collect.max_frames = config.env_max_frames;
    collect.horizon = config.esp_horizon;
    collect.samples = config.esp_samples;
    collect.outcome = config.esp_outcome;
    collect.seed = config.seed;
    collect.genome = collect_genome;

    std::unique_ptr<Predictor> predictor;
    std::vector<DecisionSample> samples;
    if (overrides.predictor_path) {
      if (config.esp_predictor == "ridge") {
        predictor = std::make_unique<RidgePredictor>(RidgePredictor::load(*overrides.predictor_path));
      } else {
        auto knn = std::make_unique<KnnPredictor>(KnnPredictor::load(*overrides.predictor_path));
        samples = knn->samples();
        predictor = std::move(knn);
      }
      std::cout << "predictor: reusing " << *overrides.predictor_path << "\n";
    } else {
      samples = collect_env(*env, collect);
      if (config.esp_predictor == "ridge") {
        auto ridge = std::make_unique<RidgePredictor>(schema);
        ridge->fit(samples);
        ridge->save((dir / "predictor.json").string());
        predictor = std::move(ridge);
      } else {
        auto knn = std::make_unique<KnnPredictor>(schema, config.esp_k);
        knn->fit(samples);
        knn->save((dir / "predictor.json").string());
        predictor = std::move(knn);
      }
      write_samples_csv(samples, schema, (dir / "samples.csv").string());
      std::cout << "predictor: fitted on " << samples.size() << " collected samples ("
                << config.esp_predictor << ")\n";
    }
    report["samples"] = samples.size();
    report["predictor"] = config.esp_predictor;

    std::vector<std::vector<double>> contexts;
    for (const auto& s : samples) contexts.push_back(s.context);

    EspSetup setup;
    setup.mode = config.esp_mode;
    setup.direction = OutcomeDirection::Maximize;
    if (config.esp_outcome == OutcomeKind::NextStateDelta) {
      // evaluate candidates by rolling them out inside the learned model
      RolloutSpec rollout;
      rollout.horizon = config.esp_rollout_horizon;
      for (int i = 0; i < config.esp_rollout_starts; ++i) {
        env->reset(mix_seed(config.seed, 0x1217ULL + static_cast<std::uint64_t>(i)));
        rollout.starts.push_back(env->features());
      }
      setup.rollout = std::move(rollout);
    }

    double best_validation = 0.0;
    int solved_at = -1;
    std::optional<Candidate> solver;
    const GenerationCallback callback = [&](const GenRecord& record,
                                            std::span<const Candidate> population) {
      log << jsonl_record(record).dump() << "\n";
      log.flush();
      const std::size_t k =
          std::min<std::size_t>(config.esp_validate_top_k, population.size());
      for (std::size_t i = 0; i < k; ++i) {
        const double v = validate_on_env(config, population[i].genome);
        best_validation = std::max(best_validation, v);
        if (v >= config.validation_threshold) {
          solved_at = record.gen;
          solver = population[i];
          return false;
        }
      }
      return true;
    };

    RunResult result =
        esp_evolve(*predictor, contexts, config.evolution, schema, setup, callback);
    if (solver) result.champion = *solver;
    write_run_artifacts(dir, config, result);

    EpisodeSpec validation;
    validation.episodes = config.validation_episodes;
    validation.max_frames = config.env_max_frames;
    validation.seed = config.validation_seed;
    validation.action_mode = config.action_mode;
    auto fresh = make_environment(config.domain);
    const double surrogate_scale = config.esp_outcome == OutcomeKind::NextStateDelta
                                       ? static_cast<double>(config.esp_rollout_horizon)
                                       : static_cast<double>(config.esp_horizon);
    const ValidationReport vr = validate_env(result.champion.genome,
                                             result.champion.objectives[0], surrogate_scale,
                                             *fresh, validation);

    report["surrogate_fitness"] = vr.surrogate_value;
    report["validation_mean_reward"] = vr.real_value;
    report["surrogate_vs_real_gap"] = vr.gap;
    report["validation_threshold"] = config.validation_threshold;
    report["solved"] = solved_at >= 0;
    if (solved_at >= 0) report["solved_at_generation"] = solved_at;
    report["generations_run"] = result.records.back().gen;
    std::cout << "surrogate fitness " << format_double(vr.surrogate_value) << " ("
              << format_double(surrogate_scale) << "-frame horizon), validation "
              << format_double(vr.real_value)
              << (solved_at >= 0 ? " (solved at gen " + std::to_string(solved_at) + ")" : "")
              << "\n";
    std::cout << "champion: " << (dir / "champion.rules").string() << "\n";
  } else {
    const TableBundle bundle = load_domain_tables(config);
    const FeatureSchema& schema = bundle.schema;

    KnnPredictor predictor(schema, config.esp_k);
    if (overrides.predictor_path) {
      predictor = KnnPredictor::load(*overrides.predictor_path);
      std::cout << "predictor: reusing " << *overrides.predictor_path << "\n";
    } else {
      const auto samples = collect_table(bundle.train);
      predictor.fit(samples);
      write_samples_csv(samples, schema, (dir / "samples.csv").string());
      std::cout << "predictor: fitted on " << samples.size() << " historical rows\n";
    }
    predictor.save((dir / "predictor.json").string());
    report["samples"] = predictor.samples().size();

    EspSetup setup;
    setup.mode = config.esp_mode;
    setup.direction = config.esp_direction;
    setup.interventions = build_interventions(config, schema);

    std::vector<std::vector<double>> contexts = bundle.train.rows;
    const GenerationCallback callback = [&](const GenRecord& record,
                                            std::span<const Candidate>) {
      log << jsonl_record(record).dump() << "\n";
      log.flush();
      return true;
    };
    const RunResult result =
        esp_evolve(predictor, contexts, config.evolution, schema, setup, callback);
    write_run_artifacts(dir, config, result);

    const double champion_train =
        predicted_outcome(predictor, schema, bundle.train.rows, result.champion.genome, setup);
    std::vector<std::vector<double>> holdout = bundle.validation.rows;
    holdout.insert(holdout.end(), bundle.test.rows.begin(), bundle.test.rows.end());
    const double champion_holdout =
        holdout.empty() ? champion_train
                        : predicted_outcome(predictor, schema, holdout, result.champion.genome,
                                            setup);
    const double baseline = random_prescriptor_baseline(
        predictor, bundle.train.rows, schema, config.evolution.genome, setup,
        config.esp_baseline_prescriptors, mix_seed(config.seed, 0xba5e11));
    const double mcc =
        bundle.test.rows.empty() ? 0.0 : predictor_mcc(predictor, bundle.test);

    report["champion_predicted_outcome"] = champion_train;
    report["champion_predicted_outcome_holdout"] = champion_holdout;
    report["random_baseline_outcome"] = baseline;
    report["improvement_over_baseline"] = baseline - champion_train;
    report["predictor_mcc"] = mcc;
    report["generations_run"] = result.records.back().gen;
    std::cout << "champion predicted outcome " << format_double(champion_train)
              << " (holdout " << format_double(champion_holdout) << "), random baseline "
              << format_double(baseline) << ", predictor MCC " << format_double(mcc) << "\n";
    std::cout << "champion: " << (dir / "champion.rules").string() << "\n";
  }
  write_text(dir / "report.json", report.dump(2) + "\n");
  return 0;
}

int cmd_simplify(const SimplifyArgs& args) {
  const FeatureSchema schema = FeatureSchema::load(args.schema_path);
  const RuleSet rs = parse_file(args.rules_path, schema);

  std::optional<std::vector<std::vector<double>>> corpus;
  if (args.corpus_csv) {
    const LoadedCsv loaded = load_csv(*args.corpus_csv, schema);
    corpus = loaded.table.rows;
  }

  SimplifyStats stats;
  const RuleSet out =
      simplify(rs, schema, args.budget, args.seed, corpus ? &*corpus : nullptr, &stats);

  const std::string out_path = args.out_path.value_or(args.rules_path + ".simplified");
  write_text(out_path, render(out));

  std::printf("rules: %d -> %d   conditions: %d -> %d\n", stats.rules_before, stats.rules_after,
              stats.conditions_before, stats.conditions_after);
  std::printf(
      "removed: %d tautological conditions, %d falsehood rules, %d duplicates, %d subsumed "
      "conditions, %d unreachable rules, %d inactive rules (%d rolled back)\n",
      stats.removed_taut_conditions, stats.removed_false_rules, stats.removed_duplicates,
      stats.removed_subsumed_conditions, stats.removed_unreachable, stats.removed_inactive,
      stats.rolled_back);
  std::printf("output: %s\n", out_path.c_str());
  return 0;
}

namespace {

void print_counter_table(const RuleSet& rs, const EvalCounters& counters) {
  std::printf("%5s %15s  %s\n", "rule", "times_applied", "action");
  for (std::size_t i = 0; i < rs.rules.size(); ++i)
    std::printf("%5zu %15llu  %s\n", i + 1,
                static_cast<unsigned long long>(counters.rule_hits[i]),
                rs.rules[i].action.name.c_str());
  std::printf("%5s %15llu  %s\n", "DEF",
              static_cast<unsigned long long>(counters.default_hits),
              rs.default_action.name.c_str());
}

EvalMode mode_from_string(const std::string& text) {
  if (text == "first_match") return EvalMode::FirstMatch;
  if (text == "hard_max") return EvalMode::HardMax;
  if (text == "all_matched") return EvalMode::AllMatched;
  throw ConfigError("--mode must be first_match, hard_max or all_matched");
}

}  // namespace

int cmd_eval(const EvalArgs& args) {
  const EvalMode mode = mode_from_string(args.mode);

  if (args.env_name) {
    const auto env = make_environment(*args.env_name);
    const RuleSet rs = parse_file(args.rules_path, env->schema());
    EpisodeSpec spec;
    spec.episodes = args.episodes;
    spec.max_frames = args.max_frames;
    spec.seed = args.seed;
    spec.action_mode = mode;
    const EpisodeResult result = run_episodes(*env, rs, spec);
    std::printf("mean reward over %d episodes: %s\n", spec.episodes,
                format_double(result.mean_reward).c_str());
    print_counter_table(rs, result.counters);
    return 0;
  }

  Table table;
  ScoreSpec scoring;
  if (args.config_path) {
    const RunConfig config = load_config(*args.config_path);
    const TableBundle bundle = load_domain_tables(config);
    table = bundle.train;
    for (const auto& part : {bundle.validation, bundle.test}) {
      table.rows.insert(table.rows.end(), part.rows.begin(), part.rows.end());
      table.labels.insert(table.labels.end(), part.labels.begin(), part.labels.end());
    }
    if (!config.scoring.class_weights.empty() || config.scoring.kind == ScoreKind::Accuracy)
      scoring = config.scoring;
  } else if (args.data_csv && args.schema_path) {
    const FeatureSchema schema = FeatureSchema::load(*args.schema_path);
    table = load_csv(*args.data_csv, schema, args.label_column).table;
  } else {
    throw ConfigError("eval needs --env, --config, or --data with --schema");
  }

  const RuleSet rs = parse_file(args.rules_path, table.schema);
  EvalCounters counters;
  counters.reset(rs.rules.size());
  const auto preds = predict_table(rs, table, mode, &counters);
  if (table.has_labels()) {
    if (scoring.kind == ScoreKind::WeightedError && scoring.class_weights.empty())
      scoring.kind = ScoreKind::Accuracy;
    const double s = score(preds, table.labels, scoring);
    std::printf("%s over %zu rows: %s\n",
                scoring.kind == ScoreKind::Accuracy ? "accuracy" : "weighted-error score",
                table.rows.size(), format_double(s).c_str());
  } else {
    std::printf("evaluated %zu rows (no labels)\n", table.rows.size());
  }
  print_counter_table(rs, counters);
  return 0;
}

int cmd_render(const RenderArgs& args) {
  const FeatureSchema schema = FeatureSchema::load(args.schema_path);
  const RuleSet rs = parse_file(args.rules_path, schema);
  Vocabulary vocab;
  if (args.vocab_path) vocab = Vocabulary::load(*args.vocab_path);
  std::cout << render_plain(rs, schema, vocab);
  return 0;
}

int cmd_simulate(const SimulateArgs& args) {
  const auto env = make_environment(args.env_name);
  const FeatureSchema& schema = env->schema();
  RuleSet policy;
  const bool random_policy = !args.rules_path;
  if (args.rules_path) policy = parse_file(*args.rules_path, schema);

  std::ostream* out = &std::cout;
  std::ofstream file;
  if (args.trace_path) {
    file.open(*args.trace_path);
    if (!file) throw Error("cannot write " + *args.trace_path);
    out = &file;
  }

  RandomSource rng(args.seed);
  std::vector<std::vector<double>> history(1);
  for (int e = 0; e < args.episodes; ++e) {
    env->reset(mix_seed(args.seed, static_cast<std::uint64_t>(e)));
    for (int frame = 0; frame < args.max_frames && !env->done(); ++frame) {
      history[0] = env->features();
      std::string action;
      if (random_policy) {
        action = rng.pick(schema.actions());
      } else {
        const InputFrame input{history};
        action = eval_ruleset(policy, input, EvalMode::FirstMatch).primary().name;
      }
      const double reward = env->step(action);
      ordered_json j;
      j["episode"] = e;
      j["frame"] = frame;
      ordered_json feats;
      for (std::size_t i = 0; i < schema.width(); ++i)
        feats[schema.feature(i).name] = history[0][i];
      j["features"] = feats;
      j["action"] = action;
      j["reward"] = reward;
      j["done"] = env->done();
      *out << j.dump() << "\n";
    }
  }
  if (args.trace_path) std::cout << "trace: " << *args.trace_path << "\n";
  return 0;
}

}  // namespace evoter::cli
