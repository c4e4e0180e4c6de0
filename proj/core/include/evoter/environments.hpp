#pragma once

#include <memory>
#include <string>
#include <vector>

#include "evoter/rng.hpp"
#include "evoter/rules.hpp"
#include "evoter/schema.hpp"

namespace evoter {

/// Episodic simulator exposing its state as a schema-ordered feature vector.
/// Instances are single-owner mutable state machines; parallel evaluation
/// constructs one per worker.
class Environment {
public:
  virtual ~Environment() = default;
  virtual const FeatureSchema& schema() const = 0;
  virtual void reset(std::uint64_t seed) = 0;
  /// Current features, clamped into the declared ranges.
  virtual const std::vector<double>& features() const = 0;
  /// Applies an action, returns the frame reward. Throws StepAfterDone.
  virtual double step(const std::string& action) = 0;
  virtual bool done() const = 0;
};

/// Cart-pole with the classic constants: force ±10 N, gravity 9.8, cart mass
/// 1.0, pole mass 0.1, half-length 0.5, Euler step 0.02 s. Alive while
/// |angle| <= 12 deg and |position| <= 2.4; reward 1 per surviving frame,
/// episodes cap at 200 frames. The positive axis points in the LEFT action's
/// push direction; the dynamics are mirror-symmetric so only the feature signs
/// pin the convention.
class CartPoleEnv : public Environment {
public:
  struct State {
    double position = 0.0, velocity = 0.0, angle = 0.0, rotation_rate = 0.0;
  };

  static constexpr double kForce = 10.0;
  static constexpr double kGravity = 9.8;
  static constexpr double kMassCart = 1.0;
  static constexpr double kMassPole = 0.1;
  static constexpr double kHalfLength = 0.5;
  static constexpr double kTau = 0.02;
  static constexpr double kAngleLimit = 12.0 * 3.14159265358979323846 / 180.0;
  static constexpr double kPositionLimit = 2.4;
  static constexpr int kFrameLimit = 200;

  CartPoleEnv();
  const FeatureSchema& schema() const override { return schema_; }
  void reset(std::uint64_t seed) override;
  const std::vector<double>& features() const override { return features_; }
  double step(const std::string& action) override;
  bool done() const override { return done_; }

  const State& state() const { return state_; }
  void set_state(const State& s);

  /// One Euler step of the dynamics under a raw force; pure.
  static State dynamics(const State& s, double force);

private:
  void refresh_features();

  FeatureSchema schema_;
  State state_;
  std::vector<double> features_;
  int frame_ = 0;
  bool done_ = false;
};

/// Side-scroller: gravity +1 px/frame^2 on the velocity (clamped to [-8, 10]),
/// FLAP sets it to -8, pipes scroll 4 px/frame with seeded uniform gap
/// positions. The bird collides as a point. Reward 1 per non-colliding frame.
class FlappyEnv : public Environment {
public:
  static constexpr double kGravity = 1.0;
  static constexpr double kFlapVelocity = -8.0;
  static constexpr double kMaxFall = 10.0;
  static constexpr double kScroll = 4.0;
  static constexpr double kGap = 60.0;
  static constexpr double kPipeWidth = 52.0;
  static constexpr double kPipeSpacing = 144.0;
  static constexpr double kBirdX = 60.0;
  static constexpr double kFloorY = 400.0;
  static constexpr double kGapTopMax = 192.0;

  FlappyEnv();
  const FeatureSchema& schema() const override { return schema_; }
  void reset(std::uint64_t seed) override;
  const std::vector<double>& features() const override { return features_; }
  double step(const std::string& action) override;
  bool done() const override { return done_; }

private:
  struct Pipe {
    double x = 0.0;      // leading (left) edge
    double gap_top = 0.0;
  };

  void spawn_pipes();
  void refresh_features();

  FeatureSchema schema_;
  RandomSource rng_;
  double y_ = 200.0;
  double vel_ = 0.0;
  std::vector<Pipe> pipes_;
  std::vector<double> features_;
  bool done_ = false;
};

std::unique_ptr<Environment> make_environment(const std::string& name);

struct EpisodeSpec {
  int episodes = 1;
  int max_frames = 200;
  std::uint64_t seed = 0;
  EvalMode action_mode = EvalMode::FirstMatch;
};

struct EpisodeResult {
  double mean_reward = 0.0;
  std::vector<double> per_episode;
  EvalCounters counters;
};

/// Scores a rule set as the mean episode reward. History has length 1 per
/// frame, so any lag > 0 in the rules is an evaluation error. Throws
/// ActionSetMismatch when the rules mention actions the environment lacks.
EpisodeResult run_episodes(Environment& env, const RuleSet& rs, const EpisodeSpec& spec);

}  // namespace evoter
