#pragma once

#include <optional>
#include <string>
#include <vector>

namespace evoter {

enum class FeatureKind { Continuous, Binary };

struct FeatureSpec {
  std::string name;
  double min = 0.0;
  double max = 1.0;
  FeatureKind kind = FeatureKind::Continuous;
};

/// Declares the feature space, the action vocabulary and the lag budget of a
/// domain. Grounds parsing, random genome generation and interval pruning.
///
/// Feature names must match [A-Za-z][A-Za-z0-9._/\[\]\)-]* and be unique;
/// continuous features need min < max, binary features are fixed to {0, 1}.
/// "default" is reserved (it introduces the default rule in rule text).
class FeatureSchema {
public:
  FeatureSchema() = default;
  FeatureSchema(std::vector<FeatureSpec> features, std::vector<std::string> actions,
                int max_lag = 0);

  const std::vector<FeatureSpec>& features() const { return features_; }
  const std::vector<std::string>& actions() const { return actions_; }
  int max_lag() const { return max_lag_; }
  std::size_t width() const { return features_.size(); }

  const FeatureSpec& feature(std::size_t index) const { return features_.at(index); }

  /// Index of a feature by exact name; empty if not declared.
  std::optional<std::size_t> index_of(const std::string& name) const;
  bool has_action(const std::string& name) const;

  /// Throws InvalidSchema on any violated invariant. Called by the ctor.
  void validate() const;

  std::string to_json_text() const;
  static FeatureSchema from_json_text(const std::string& text);
  static FeatureSchema load(const std::string& path);
  void save(const std::string& path) const;

  static bool valid_feature_name(const std::string& name);

private:
  std::vector<FeatureSpec> features_;
  std::vector<std::string> actions_;
  int max_lag_ = 0;
};

}  // namespace evoter
