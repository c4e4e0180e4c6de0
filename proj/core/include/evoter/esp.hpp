#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "evoter/dataset.hpp"
#include "evoter/environments.hpp"
#include "evoter/evolution.hpp"
#include "evoter/rules.hpp"
#include "evoter/schema.hpp"

namespace evoter {

/// One observed decision: what the world looked like, what was done, what came
/// of it. The action may be empty for purely observational (tabular) data.
struct DecisionSample {
  std::vector<double> context;
  std::string action;
  std::vector<double> outcome;
};

/// Surrogate model of (context, action) -> outcome. Deterministic after fit.
class Predictor {
public:
  virtual ~Predictor() = default;
  virtual void fit(const std::vector<DecisionSample>& samples) = 0;
  virtual std::vector<double> predict(const std::vector<double>& context,
                                      const std::string& action) const = 0;
};

/// Per-action ridge regression: outcome = W_action * [context, 1]. The right
/// tool when outcomes are near-linear in the context, as one-step dynamics
/// deltas are; deterministic and dependency-free like the kNN.
class RidgePredictor : public Predictor {
public:
  explicit RidgePredictor(FeatureSchema schema, double ridge = 1e-6);

  void fit(const std::vector<DecisionSample>& samples) override;
  std::vector<double> predict(const std::vector<double>& context,
                              const std::string& action) const override;

  std::string to_json_text() const;
  static RidgePredictor from_json_text(const std::string& text);
  void save(const std::string& path) const;
  static RidgePredictor load(const std::string& path);

private:
  FeatureSchema schema_;
  double ridge_;
  std::size_t outcome_width_ = 0;
  // action -> [outcome][context..., intercept]
  std::map<std::string, std::vector<std::vector<double>>> weights_;
};

/// k-nearest-neighbour predictor: Euclidean distance over range-normalized
/// context plus an action one-hot, prediction = unweighted mean outcome of the
/// k nearest stored samples (ties broken by insertion order).
class KnnPredictor : public Predictor {
public:
  KnnPredictor(FeatureSchema schema, int k = 5);

  void fit(const std::vector<DecisionSample>& samples) override;
  std::vector<double> predict(const std::vector<double>& context,
                              const std::string& action) const override;

  int k() const { return k_; }
  const std::vector<DecisionSample>& samples() const { return samples_; }

  std::string to_json_text() const;
  static KnnPredictor from_json_text(const std::string& text);
  void save(const std::string& path) const;
  static KnnPredictor load(const std::string& path);

private:
  std::vector<double> encode(const std::vector<double>& context, const std::string& action) const;

  FeatureSchema schema_;
  int k_;
  std::vector<DecisionSample> samples_;
  std::vector<std::vector<double>> encoded_;
  bool fitted_ = false;
};

// ---- data collection ----

/// What a recorded decision's outcome measures.
///   SurvivalHorizon: frames survived in the next `horizon` frames (scalar).
///   NextStateDelta: the observed feature-vector change, turning the fitted
///   predictor into a one-step dynamics model. Terminal transitions are
///   dropped — their next states are clamped at the failure boundary and
///   poison the fit.
enum class OutcomeKind { SurvivalHorizon, NextStateDelta };

struct CollectParams {
  int n_prescriptors = 10;
  int episodes = 2;
  int max_frames = 200;
  int horizon = 20;     // SurvivalHorizon only
  int samples = 100;    // uniform subsample of everything recorded
  OutcomeKind outcome = OutcomeKind::SurvivalHorizon;
  std::uint64_t seed = 0;
  GenomeParams genome;
};

/// Runs random rule-set prescriptors in the environment and records one
/// (context, action, outcome) sample per decision. Episodes that end at the
/// frame cap count as censored, not failed.
std::vector<DecisionSample> collect_env(Environment& env, const CollectParams& params);

/// One sample per historical row: context = features, no action, outcome =
/// numeric label. Labels must parse as numbers.
std::vector<DecisionSample> collect_table(const Table& table);

void write_samples_csv(const std::vector<DecisionSample>& samples, const FeatureSchema& schema,
                       const std::string& path);

// ---- surrogate-driven evolution ----

enum class OutcomeDirection { Maximize, Minimize };

/// Action encoding for tabular domains: prescribing an action pins one context
/// feature to a treated level before the predictor is queried.
struct InterventionMap {
  std::map<std::string, std::pair<std::size_t, double>> by_action;  // feature index, level
};

/// Candidate evaluation by rolling the policy out inside the fitted one-step
/// model (NextStateDelta outcomes): fitness = mean predicted frames before the
/// state leaves the declared feature ranges, from the given start states.
struct RolloutSpec {
  int horizon = 400;
  std::vector<std::vector<double>> starts;
};

struct EspSetup {
  EvalMode mode = EvalMode::FirstMatch;
  OutcomeDirection direction = OutcomeDirection::Maximize;
  std::optional<InterventionMap> interventions;  // absent: action one-hot query
  std::optional<RolloutSpec> rollout;            // absent: mean predicted outcome
};

/// Builds the surrogate evaluator: mean predicted outcome over the contexts
/// (or mean predicted episode length when a rollout is configured), negated
/// for minimization so the engine always maximizes objective 0.
Evaluator make_surrogate_evaluator(const Predictor& predictor, const FeatureSchema& schema,
                                   const std::vector<std::vector<double>>& contexts,
                                   const EspSetup& setup);

/// Evolves prescriptors against the fitted predictor.
RunResult esp_evolve(const Predictor& predictor, const std::vector<std::vector<double>>& contexts,
                     const EvoParams& params, const FeatureSchema& schema, const EspSetup& setup,
                     const GenerationCallback& on_generation = {});

/// Mean predicted outcome of a policy over a context set (raw, not negated);
/// mean predicted episode length in rollout mode.
double predicted_outcome(const Predictor& predictor, const FeatureSchema& schema,
                         const std::vector<std::vector<double>>& contexts, const RuleSet& rs,
                         const EspSetup& setup);

/// Mean predicted outcome of `n` random prescriptors, the no-skill baseline.
double random_prescriptor_baseline(const Predictor& predictor,
                                   const std::vector<std::vector<double>>& contexts,
                                   const FeatureSchema& schema, const GenomeParams& genome,
                                   const EspSetup& setup, int n, std::uint64_t seed);

/// Re-scores a champion in the real environment; gap = surrogate - real after
/// normalizing both to per-frame rates.
struct ValidationReport {
  double surrogate_value = 0.0;
  double real_value = 0.0;
  double gap = 0.0;
};

ValidationReport validate_env(const RuleSet& champion, double surrogate_value,
                              double surrogate_scale, Environment& env,
                              const EpisodeSpec& validation);

/// Matthews correlation coefficient of thresholded death predictions against
/// actual binary labels; reported, never gated.
double predictor_mcc(const Predictor& predictor, const Table& holdout, double threshold = 0.5);

}  // namespace evoter
