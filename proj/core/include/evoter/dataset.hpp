#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "evoter/schema.hpp"

namespace evoter {

/// Immutable tabular data: rows in schema feature order, optional class labels.
struct Table {
  FeatureSchema schema;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> labels;  // empty when unlabeled

  bool has_labels() const { return !labels.empty(); }
  std::size_t size() const { return rows.size(); }
};

struct LoadReport {
  std::size_t out_of_range = 0;
  std::map<std::string, std::size_t> per_feature;
};

struct LoadedCsv {
  Table table;
  LoadReport report;
};

/// Reads an RFC-4180-style CSV (header required, quotes supported). Header
/// columns map to schema features by name in any order; at most one extra
/// column is allowed and becomes the label column (or name it explicitly).
/// Binary features must be exactly 0 or 1; out-of-range continuous values are
/// accepted but counted in the report.
LoadedCsv load_csv(const std::string& path, const FeatureSchema& schema,
                   const std::optional<std::string>& label_column = std::nullopt,
                   bool require_labels = false,
                   const std::vector<std::string>& label_domain = {});

void write_csv(const Table& table, const std::string& path,
               const std::string& label_column = "label");

// ---- windowed aggregate features ----

enum class Stat { Mean, Std, Skew, Kurtosis };

const char* to_string(Stat s);
Stat stat_from_string(const std::string& s);

struct WindowSpec {
  int window_len = 60;  // frames per aggregate bucket
  std::vector<Stat> stats{Stat::Mean, Stat::Std, Stat::Skew, Stat::Kurtosis};
  int max_lag = 10;  // buckets back
  int alpha = 300;   // frames until the prediction window opens
  int beta = 300;    // frames the prediction window spans
  /// Declared feature ranges per statistic, grounding rule constants.
  std::map<Stat, std::pair<double, double>> ranges = {
      {Stat::Mean, {20.0, 200.0}},
      {Stat::Std, {0.0, 60.0}},
      {Stat::Skew, {-6.0, 6.0}},
      {Stat::Kurtosis, {0.0, 60.0}},
  };
  std::vector<std::string> actions{"Low", "Normal", "High"};
};

/// Feature space the windowing emits: one "Stat[lag]" feature per requested
/// statistic and lag, with the declared per-statistic ranges.
FeatureSchema window_schema(const WindowSpec& spec);

/// Window statistics over non-overlapping buckets. Row t carries, for every
/// requested statistic and lag l in [0, max_lag], the value over the bucket
/// ending l buckets earlier, named "Stat[l]". Std is the sample (n-1) form;
/// Skew is m3/m2^1.5 and Kurtosis m4/m2^2 (non-excess, ~3 for normal data),
/// both 0 for a spreadless window.
Table window_features(const std::vector<double>& series, const WindowSpec& spec);

/// Label for row t: the mean of frames [t+alpha, t+alpha+beta] mapped to
/// Low (<= 55), Normal (55, 85], High (> 85), in mmHg.
std::vector<std::string> label_map(const std::vector<double>& series, const WindowSpec& spec);

/// window_features + label_map on aligned rows.
Table windowed_dataset(const std::vector<double>& series, const WindowSpec& spec);

// ---- scoring ----

enum class ScoreKind { Accuracy, WeightedError };

struct ScoreSpec {
  ScoreKind kind = ScoreKind::Accuracy;
  /// cost[true_class][predicted_class]; diagonal conventionally 0.
  std::map<std::string, std::map<std::string, double>> class_weights;
};

/// Fitness to maximize: accuracy, or 1 - (total cost / worst-case cost).
double score(const std::vector<std::string>& predictions, const std::vector<std::string>& labels,
             const ScoreSpec& spec);

// ---- splitting ----

/// Deterministic shuffled partition, stratified by label when labels exist.
/// Sizes round half away from zero per class, remainder to the last part.
std::array<Table, 3> split(const Table& table, const std::array<double, 3>& fractions,
                           std::uint64_t seed);

// ---- synthetic data ----

/// Blood-pressure-like series: mean-reverting drift plus noise, with seeded
/// hypotension episodes dipping the level by episode_depth.
struct SyntheticBpParams {
  double base_mmHg = 78.0;
  double drift_sd = 0.8;
  double noise_sd = 3.0;
  double episode_rate = 0.004;  // episode starts per frame
  double episode_depth = 30.0;
  std::size_t length = 12000;
  std::uint64_t seed = 7;
};

std::vector<double> synthetic_bp_series(const SyntheticBpParams& params);

/// Clinical-records stand-in with the public heart-failure layout: 299 rows,
/// 12 features, a DEATH_EVENT label with exactly 96 positives. Death risk is
/// driven mainly by low ejection fraction and high serum creatinine.
Table make_heart_failure_table(std::uint64_t seed = 2020);

/// Schema of make_heart_failure_table (also usable against the real file).
FeatureSchema heart_failure_schema();

}  // namespace evoter
