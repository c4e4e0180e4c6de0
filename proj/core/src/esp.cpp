#include "evoter/esp.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "evoter/errors.hpp"
#include "evoter/generate.hpp"

namespace evoter {

// ---- RidgePredictor ----

RidgePredictor::RidgePredictor(FeatureSchema schema, double ridge)
    : schema_(std::move(schema)), ridge_(ridge) {
  if (!(ridge_ >= 0.0)) throw InvalidParams("ridge must be >= 0");
}

void RidgePredictor::fit(const std::vector<DecisionSample>& samples) {
  if (samples.empty()) throw TooFewSamples(0, 1);
  outcome_width_ = samples.front().outcome.size();
  const std::size_t d = schema_.width();
  const std::size_t p = d + 1;  // context plus intercept
  weights_.clear();

  std::vector<std::string> actions = schema_.actions();
  if (actions.empty()) actions.push_back("");
  for (const auto& action : actions) {
    std::vector<std::vector<double>> ata(p, std::vector<double>(p, 0.0));
    std::vector<std::vector<double>> atb(p, std::vector<double>(outcome_width_, 0.0));
    std::size_t rows = 0;
    for (const auto& s : samples) {
      if (s.action != action) continue;
      ++rows;
      std::vector<double> x(s.context);
      x.push_back(1.0);
      for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = 0; j < p; ++j) ata[i][j] += x[i] * x[j];
        for (std::size_t o = 0; o < outcome_width_; ++o) atb[i][o] += x[i] * s.outcome[o];
      }
    }
    if (rows == 0) continue;  // no data for this action: predict() rejects it
    for (std::size_t i = 0; i < p; ++i) ata[i][i] += ridge_;

    // solve the normal equations by Gauss-Jordan; p is small
    std::vector<std::vector<double>> m(p, std::vector<double>(p + outcome_width_, 0.0));
    for (std::size_t i = 0; i < p; ++i) {
      for (std::size_t j = 0; j < p; ++j) m[i][j] = ata[i][j];
      for (std::size_t o = 0; o < outcome_width_; ++o) m[i][p + o] = atb[i][o];
    }
    for (std::size_t col = 0; col < p; ++col) {
      std::size_t pivot = col;
      for (std::size_t r = col + 1; r < p; ++r)
        if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
      std::swap(m[col], m[pivot]);
      const double diag = m[col][col] == 0.0 ? 1e-12 : m[col][col];
      for (auto& v : m[col]) v /= diag;
      for (std::size_t r = 0; r < p; ++r) {
        if (r == col) continue;
        const double f = m[r][col];
        if (f == 0.0) continue;
        for (std::size_t c = 0; c < p + outcome_width_; ++c) m[r][c] -= f * m[col][c];
      }
    }
    std::vector<std::vector<double>> w(outcome_width_, std::vector<double>(p, 0.0));
    for (std::size_t o = 0; o < outcome_width_; ++o)
      for (std::size_t i = 0; i < p; ++i) w[o][i] = m[i][p + o];
    weights_[action] = std::move(w);
  }
  if (weights_.empty()) throw TooFewSamples(samples.size(), samples.size() + 1);
}

std::vector<double> RidgePredictor::predict(const std::vector<double>& context,
                                            const std::string& action) const {
  if (weights_.empty()) throw NotFitted();
  auto it = weights_.find(action);
  if (it == weights_.end()) throw UnknownAction(action.empty() ? "<none>" : action);
  const auto& w = it->second;
  std::vector<double> out(outcome_width_, 0.0);
  for (std::size_t o = 0; o < outcome_width_; ++o) {
    double acc = w[o].back();
    for (std::size_t i = 0; i < context.size() && i < w[o].size() - 1; ++i)
      acc += w[o][i] * context[i];
    out[o] = acc;
  }
  return out;
}

std::string RidgePredictor::to_json_text() const {
  nlohmann::json j;
  j["kind"] = "ridge";
  j["ridge"] = ridge_;
  j["outcome_width"] = outcome_width_;
  j["schema"] = nlohmann::json::parse(schema_.to_json_text());
  j["weights"] = weights_;
  return j.dump(2) + "\n";
}

RidgePredictor RidgePredictor::from_json_text(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  RidgePredictor p(FeatureSchema::from_json_text(j.at("schema").dump()),
                   j.at("ridge").get<double>());
  p.outcome_width_ = j.at("outcome_width").get<std::size_t>();
  p.weights_ =
      j.at("weights").get<std::map<std::string, std::vector<std::vector<double>>>>();
  return p;
}

void RidgePredictor::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << to_json_text();
}

RidgePredictor RidgePredictor::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

// ---- KnnPredictor ----

KnnPredictor::KnnPredictor(FeatureSchema schema, int k) : schema_(std::move(schema)), k_(k) {
  if (k_ < 1) throw InvalidParams("k must be >= 1");
}

std::vector<double> KnnPredictor::encode(const std::vector<double>& context,
                                         const std::string& action) const {
  std::vector<double> v;
  v.reserve(schema_.width() + schema_.actions().size());
  for (std::size_t i = 0; i < schema_.width(); ++i) {
    const auto& f = schema_.feature(i);
    v.push_back((context.at(i) - f.min) / (f.max - f.min));
  }
  if (!action.empty()) {
    bool known = false;
    for (const auto& a : schema_.actions()) {
      v.push_back(a == action ? 1.0 : 0.0);
      known = known || a == action;
    }
    if (!known) throw UnknownAction(action);
  } else {
    for (std::size_t i = 0; i < schema_.actions().size(); ++i) v.push_back(0.0);
  }
  return v;
}

void KnnPredictor::fit(const std::vector<DecisionSample>& samples) {
  if (samples.size() < static_cast<std::size_t>(k_))
    throw TooFewSamples(samples.size(), static_cast<std::size_t>(k_));
  samples_ = samples;
  encoded_.clear();
  encoded_.reserve(samples_.size());
  for (const auto& s : samples_) encoded_.push_back(encode(s.context, s.action));
  fitted_ = true;
}

std::vector<double> KnnPredictor::predict(const std::vector<double>& context,
                                          const std::string& action) const {
  if (!fitted_) throw NotFitted();
  const std::vector<double> q = encode(context, action);

  // indices of the k smallest distances, insertion order breaking ties
  std::vector<std::pair<double, std::size_t>> best;
  best.reserve(static_cast<std::size_t>(k_) + 1);
  for (std::size_t i = 0; i < encoded_.size(); ++i) {
    double d2 = 0.0;
    for (std::size_t j = 0; j < q.size(); ++j) {
      const double d = encoded_[i][j] - q[j];
      d2 += d * d;
    }
    const std::pair<double, std::size_t> entry{d2, i};
    auto pos = std::upper_bound(best.begin(), best.end(), entry);
    if (pos != best.end() || best.size() < static_cast<std::size_t>(k_)) {
      best.insert(pos, entry);
      if (best.size() > static_cast<std::size_t>(k_)) best.pop_back();
    }
  }

  std::vector<double> mean(samples_.front().outcome.size(), 0.0);
  for (const auto& [d2, i] : best)
    for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += samples_[i].outcome[j];
  for (auto& m : mean) m /= static_cast<double>(best.size());
  return mean;
}

std::string KnnPredictor::to_json_text() const {
  nlohmann::json j;
  j["k"] = k_;
  j["schema"] = nlohmann::json::parse(schema_.to_json_text());
  j["samples"] = nlohmann::json::array();
  for (const auto& s : samples_)
    j["samples"].push_back(
        {{"context", s.context}, {"action", s.action}, {"outcome", s.outcome}});
  return j.dump(2) + "\n";
}

KnnPredictor KnnPredictor::from_json_text(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  KnnPredictor p(FeatureSchema::from_json_text(j.at("schema").dump()), j.at("k").get<int>());
  std::vector<DecisionSample> samples;
  for (const auto& s : j.at("samples")) {
    DecisionSample d;
    d.context = s.at("context").get<std::vector<double>>();
    d.action = s.at("action").get<std::string>();
    d.outcome = s.at("outcome").get<std::vector<double>>();
    samples.push_back(std::move(d));
  }
  if (!samples.empty()) p.fit(samples);
  return p;
}

void KnnPredictor::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << to_json_text();
}

KnnPredictor KnnPredictor::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

// ---- collection ----

std::vector<DecisionSample> collect_env(Environment& env, const CollectParams& params) {
  if (params.n_prescriptors < 1) throw InvalidParams("n_prescriptors must be >= 1");
  RandomSource rng(params.seed);

  std::vector<DecisionSample> pool;
  std::vector<std::vector<double>> history(1);
  for (int p = 0; p < params.n_prescriptors; ++p) {
    const RuleSet policy = random_ruleset(env.schema(), params.genome, rng);
    for (int e = 0; e < params.episodes; ++e) {
      env.reset(mix_seed(params.seed, static_cast<std::uint64_t>(p * 1000 + e)));
      std::vector<DecisionSample> episode;
      int frames = 0;
      while (!env.done() && frames < params.max_frames) {
        history[0] = env.features();
        const InputFrame input{history};
        const ActionOutcome outcome = eval_ruleset(policy, input, EvalMode::FirstMatch);
        DecisionSample s;
        s.context = history[0];
        s.action = outcome.primary().name;
        env.step(outcome.primary().name);
        ++frames;
        if (params.outcome == OutcomeKind::NextStateDelta) {
          if (env.done() && frames < params.max_frames) break;  // clamped terminal state
          const auto& next = env.features();
          s.outcome.resize(s.context.size());
          for (std::size_t i = 0; i < s.context.size(); ++i)
            s.outcome[i] = next[i] - s.context[i];
        }
        episode.push_back(std::move(s));
      }
      const int total = static_cast<int>(episode.size());
      if (params.outcome == OutcomeKind::SurvivalHorizon) {
        // an episode cut off at the frame cap is censored, not failed
        const bool died = env.done() && frames < params.max_frames;
        for (int t = 0; t < total; ++t) {
          const int after = total - t - 1;
          const int survived = died ? std::min(after, params.horizon) : params.horizon;
          episode[t].outcome = {static_cast<double>(survived)};
        }
      }
      for (int t = 0; t < total; ++t) pool.push_back(std::move(episode[t]));
    }
  }

  if (static_cast<int>(pool.size()) <= params.samples) return pool;
  // uniform subsample without replacement, original order kept
  std::vector<DecisionSample> out;
  std::size_t need = static_cast<std::size_t>(params.samples);
  for (std::size_t i = 0; i < pool.size() && need > 0; ++i) {
    if (rng.below(pool.size() - i) < need) {
      out.push_back(std::move(pool[i]));
      --need;
    }
  }
  return out;
}

std::vector<DecisionSample> collect_table(const Table& table) {
  if (!table.has_labels()) throw MissingLabel("tabular collection needs an outcome column");
  std::vector<DecisionSample> out;
  out.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    DecisionSample s;
    s.context = table.rows[i];
    double v = 0.0;
    const std::string& raw = table.labels[i];
    auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
    if (ec != std::errc() || ptr != raw.data() + raw.size())
      throw Error("outcome label '" + raw + "' is not numeric");
    s.outcome = {v};
    out.push_back(std::move(s));
  }
  return out;
}

void write_samples_csv(const std::vector<DecisionSample>& samples, const FeatureSchema& schema,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  for (std::size_t i = 0; i < schema.width(); ++i) out << schema.feature(i).name << ',';
  out << "action";
  const std::size_t width = samples.empty() ? 1 : samples.front().outcome.size();
  for (std::size_t i = 0; i < width; ++i) out << ",outcome" << i;
  out << '\n';
  for (const auto& s : samples) {
    for (double v : s.context) out << format_double(v) << ',';
    out << s.action;
    for (double v : s.outcome) out << ',' << format_double(v);
    out << '\n';
  }
}

// ---- surrogate-driven evolution ----

namespace {

double query(const Predictor& predictor, const std::vector<double>& context,
             const std::string& action, const EspSetup& setup) {
  if (setup.interventions) {
    auto it = setup.interventions->by_action.find(action);
    if (it == setup.interventions->by_action.end())
      throw ActionSetMismatch("no intervention mapping for action '" + action + "'");
    std::vector<double> treated = context;
    treated.at(it->second.first) = it->second.second;
    return predictor.predict(treated, "").at(0);
  }
  return predictor.predict(context, action).at(0);
}

/// Frames the policy keeps the model-predicted state inside the declared
/// feature ranges, starting from one state.
int model_rollout(const Predictor& model, const FeatureSchema& schema, const RuleSet& rs,
                  EvalMode mode, const std::vector<double>& start, int horizon,
                  EvalCounters* counters) {
  std::vector<std::vector<double>> history(1);
  std::vector<double> state = start;
  int frames = 0;
  while (frames < horizon) {
    for (std::size_t i = 0; i < schema.width(); ++i) {
      const auto& f = schema.feature(i);
      if (state[i] < f.min || state[i] > f.max) return frames;
    }
    history[0] = state;
    const InputFrame input{history};
    const ActionOutcome outcome = eval_ruleset(rs, input, mode, counters);
    const auto delta = model.predict(state, outcome.primary().name);
    for (std::size_t i = 0; i < schema.width(); ++i) state[i] += delta.at(i);
    ++frames;
  }
  return frames;
}

}  // namespace

double predicted_outcome(const Predictor& predictor, const FeatureSchema& schema,
                         const std::vector<std::vector<double>>& contexts, const RuleSet& rs,
                         const EspSetup& setup) {
  if (setup.rollout) {
    if (setup.rollout->starts.empty()) throw EmptyInput("no rollout start states");
    double total = 0.0;
    for (const auto& start : setup.rollout->starts)
      total += model_rollout(predictor, schema, rs, setup.mode, start, setup.rollout->horizon,
                             nullptr);
    return total / static_cast<double>(setup.rollout->starts.size());
  }
  if (contexts.empty()) throw EmptyInput("no contexts to prescribe for");
  double sum = 0.0;
  std::vector<std::vector<double>> history(1);
  for (const auto& ctx : contexts) {
    history[0] = ctx;
    const InputFrame input{history};
    const ActionOutcome outcome = eval_ruleset(rs, input, setup.mode);
    sum += query(predictor, ctx, outcome.primary().name, setup);
  }
  return sum / static_cast<double>(contexts.size());
}

Evaluator make_surrogate_evaluator(const Predictor& predictor, const FeatureSchema& schema,
                                   const std::vector<std::vector<double>>& contexts,
                                   const EspSetup& setup) {
  if (setup.rollout) {
    if (setup.rollout->starts.empty()) throw EmptyInput("no rollout start states");
    return [&predictor, schema, setup](const RuleSet& rs) {
      Evaluation ev;
      ev.counters.reset(rs.rules.size());
      double total = 0.0;
      for (const auto& start : setup.rollout->starts)
        total += model_rollout(predictor, schema, rs, setup.mode, start,
                               setup.rollout->horizon, &ev.counters);
      const double mean = total / static_cast<double>(setup.rollout->starts.size());
      ev.objectives = {setup.direction == OutcomeDirection::Maximize ? mean : -mean};
      return ev;
    };
  }
  if (contexts.empty()) throw EmptyInput("no contexts to prescribe for");
  return [&predictor, &contexts, setup](const RuleSet& rs) {
    Evaluation ev;
    ev.counters.reset(rs.rules.size());
    double sum = 0.0;
    std::vector<std::vector<double>> history(1);
    for (const auto& ctx : contexts) {
      history[0] = ctx;
      const InputFrame input{history};
      const ActionOutcome outcome = eval_ruleset(rs, input, setup.mode, &ev.counters);
      sum += query(predictor, ctx, outcome.primary().name, setup);
    }
    const double mean = sum / static_cast<double>(contexts.size());
    ev.objectives = {setup.direction == OutcomeDirection::Maximize ? mean : -mean};
    return ev;
  };
}

RunResult esp_evolve(const Predictor& predictor, const std::vector<std::vector<double>>& contexts,
                     const EvoParams& params, const FeatureSchema& schema, const EspSetup& setup,
                     const GenerationCallback& on_generation) {
  return evolve(make_surrogate_evaluator(predictor, schema, contexts, setup), params, schema,
                on_generation);
}

double random_prescriptor_baseline(const Predictor& predictor,
                                   const std::vector<std::vector<double>>& contexts,
                                   const FeatureSchema& schema, const GenomeParams& genome,
                                   const EspSetup& setup, int n, std::uint64_t seed) {
  if (n < 1) throw InvalidParams("baseline needs n >= 1");
  RandomSource rng(seed);
  double sum = 0.0;
  for (int i = 0; i < n; ++i)
    sum += predicted_outcome(predictor, schema, contexts, random_ruleset(schema, genome, rng),
                             setup);
  return sum / n;
}

ValidationReport validate_env(const RuleSet& champion, double surrogate_value,
                              double surrogate_scale, Environment& env,
                              const EpisodeSpec& validation) {
  ValidationReport report;
  report.surrogate_value = surrogate_value;
  report.real_value = run_episodes(env, champion, validation).mean_reward;
  const double real_rate = report.real_value / static_cast<double>(validation.max_frames);
  const double surrogate_rate = surrogate_scale > 0.0 ? surrogate_value / surrogate_scale : 0.0;
  report.gap = surrogate_rate - real_rate;
  return report;
}

double predictor_mcc(const Predictor& predictor, const Table& holdout, double threshold) {
  if (!holdout.has_labels()) throw MissingLabel("MCC needs labeled holdout rows");
  double tp = 0, tn = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < holdout.rows.size(); ++i) {
    const bool predicted = predictor.predict(holdout.rows[i], "").at(0) > threshold;
    const bool actual = holdout.labels[i] == "1";
    if (predicted && actual) ++tp;
    else if (predicted && !actual) ++fp;
    else if (!predicted && actual) ++fn;
    else ++tn;
  }
  const double denom = std::sqrt((tp + fp) * (tp + fn) * (tn + fp) * (tn + fn));
  return denom > 0.0 ? (tp * tn - fp * fn) / denom : 0.0;
}

}  // namespace evoter
