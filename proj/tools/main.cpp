#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "evoter/errors.hpp"

using namespace evoter;
using namespace evoter::cli;

int main(int argc, char** argv) {
  CLI::App app{"evolve, inspect and deploy transparent rule-set models"};
  app.require_subcommand(1);

  Overrides overrides;
  std::string config_path;

  auto add_run_flags = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "experiment config (JSON)")->required();
    cmd->add_option("--seed", [&](const CLI::results_t& r) {
      overrides.seed = std::stoull(r[0]);
      return true;
    }, "override the config seed");
    cmd->add_option("--workers", [&](const CLI::results_t& r) {
      overrides.workers = std::stoi(r[0]);
      return true;
    }, "parallel evaluation width");
    cmd->add_option("--out", [&](const CLI::results_t& r) {
      overrides.out_dir = r[0];
      return true;
    }, "override output_dir");
    cmd->add_option("--generations", [&](const CLI::results_t& r) {
      overrides.generations = std::stoi(r[0]);
      return true;
    }, "override evolution.generations");
  };

  CLI::App* evolve = app.add_subcommand("evolve", "direct evolution on a dataset or environment");
  add_run_flags(evolve);

  CLI::App* esp = app.add_subcommand("esp", "collect, fit a predictor, evolve against it, validate");
  add_run_flags(esp);
  esp->add_option("--predictor", [&](const CLI::results_t& r) {
    overrides.predictor_path = r[0];
    return true;
  }, "reuse a saved predictor (skips collect/fit)");

  SimplifyArgs simplify_args;
  CLI::App* simplify = app.add_subcommand("simplify", "semantics-preserving rule-set cleanup");
  simplify->add_option("--rules", simplify_args.rules_path, "rule file")->required();
  simplify->add_option("--schema", simplify_args.schema_path, "schema JSON")->required();
  simplify->add_option("--budget", simplify_args.budget, "verification frames");
  simplify->add_option("--seed", simplify_args.seed, "verification seed");
  std::string corpus, simplify_out;
  simplify->add_option("--corpus", corpus, "CSV of frames; rules inactive on it are dropped");
  simplify->add_option("--out", simplify_out, "output path (default: <rules>.simplified)");

  EvalArgs eval_args;
  CLI::App* eval = app.add_subcommand("eval", "score a rule set, reporting per-rule activity");
  eval->add_option("--rules", eval_args.rules_path, "rule file")->required();
  std::string eval_env, eval_data, eval_schema, eval_label, eval_config;
  eval->add_option("--env", eval_env, "environment name (cartpole | flappy)");
  eval->add_option("--data", eval_data, "CSV to evaluate against");
  eval->add_option("--schema", eval_schema, "schema JSON for --data");
  eval->add_option("--label", eval_label, "label column name");
  eval->add_option("--config", eval_config, "experiment config providing the data pipeline");
  eval->add_option("--mode", eval_args.mode, "first_match | hard_max | all_matched");
  eval->add_option("--episodes", eval_args.episodes, "episodes for --env");
  eval->add_option("--frames", eval_args.max_frames, "frame cap for --env");
  eval->add_option("--seed", eval_args.seed, "episode seed for --env");

  RenderArgs render_args;
  CLI::App* render = app.add_subcommand("render", "plain-language rendering of a rule set");
  render->add_option("--rules", render_args.rules_path, "rule file")->required();
  render->add_option("--schema", render_args.schema_path, "schema JSON")->required();
  std::string vocab;
  render->add_option("--vocab", vocab, "vocabulary JSON (phrases per feature/action)");

  SimulateArgs sim_args;
  CLI::App* simulate = app.add_subcommand("simulate", "dump per-frame environment traces as JSONL");
  simulate->add_option("--env", sim_args.env_name, "environment name")->required();
  std::string sim_rules, sim_trace;
  simulate->add_option("--rules", sim_rules, "policy rule file (default: random actions)");
  simulate->add_option("--episodes", sim_args.episodes, "episode count");
  simulate->add_option("--frames", sim_args.max_frames, "frame cap per episode");
  simulate->add_option("--seed", sim_args.seed, "environment seed");
  simulate->add_option("--trace", sim_trace, "trace output path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    if (evolve->parsed()) return cmd_evolve(config_path, overrides);
    if (esp->parsed()) return cmd_esp(config_path, overrides);
    if (simplify->parsed()) {
      if (!corpus.empty()) simplify_args.corpus_csv = corpus;
      if (!simplify_out.empty()) simplify_args.out_path = simplify_out;
      return cmd_simplify(simplify_args);
    }
    if (eval->parsed()) {
      if (!eval_env.empty()) eval_args.env_name = eval_env;
      if (!eval_data.empty()) eval_args.data_csv = eval_data;
      if (!eval_schema.empty()) eval_args.schema_path = eval_schema;
      if (!eval_label.empty()) eval_args.label_column = eval_label;
      if (!eval_config.empty()) eval_args.config_path = eval_config;
      return cmd_eval(eval_args);
    }
    if (render->parsed()) {
      if (!vocab.empty()) render_args.vocab_path = vocab;
      return cmd_render(render_args);
    }
    if (simulate->parsed()) {
      if (!sim_rules.empty()) sim_args.rules_path = sim_rules;
      if (!sim_trace.empty()) sim_args.trace_path = sim_trace;
      return cmd_simulate(sim_args);
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
