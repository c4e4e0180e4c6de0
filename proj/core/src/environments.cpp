#include "evoter/environments.hpp"

#include <algorithm>
#include <cmath>

#include "evoter/errors.hpp"

namespace evoter {

// ---- cart-pole ----

CartPoleEnv::CartPoleEnv()
    : schema_({{"position.of.cart", -2.4, 2.4, FeatureKind::Continuous},
               {"velocity.of.cart", -3.0, 3.0, FeatureKind::Continuous},
               {"angle.of.pole", -0.21, 0.21, FeatureKind::Continuous},
               {"rotation.rate.of.pole", -3.0, 3.0, FeatureKind::Continuous}},
              {"LEFT", "RIGHT"}, 0),
      features_(4, 0.0) {
  reset(0);
}

CartPoleEnv::State CartPoleEnv::dynamics(const State& s, double force) {
  const double total_mass = kMassCart + kMassPole;
  const double polemass_length = kMassPole * kHalfLength;
  const double cos_t = std::cos(s.angle);
  const double sin_t = std::sin(s.angle);
  const double temp =
      (force + polemass_length * s.rotation_rate * s.rotation_rate * sin_t) / total_mass;
  const double angle_acc =
      (kGravity * sin_t - cos_t * temp) /
      (kHalfLength * (4.0 / 3.0 - kMassPole * cos_t * cos_t / total_mass));
  const double pos_acc = temp - polemass_length * angle_acc * cos_t / total_mass;
  State n;
  n.position = s.position + kTau * s.velocity;
  n.velocity = s.velocity + kTau * pos_acc;
  n.angle = s.angle + kTau * s.rotation_rate;
  n.rotation_rate = s.rotation_rate + kTau * angle_acc;
  return n;
}

void CartPoleEnv::reset(std::uint64_t seed) {
  RandomSource rng(seed);
  state_.position = rng.uniform(-0.05, 0.05);
  state_.velocity = rng.uniform(-0.05, 0.05);
  state_.angle = rng.uniform(-0.05, 0.05);
  state_.rotation_rate = rng.uniform(-0.05, 0.05);
  frame_ = 0;
  done_ = false;
  refresh_features();
}

void CartPoleEnv::set_state(const State& s) {
  state_ = s;
  frame_ = 0;
  done_ = false;
  refresh_features();
}

void CartPoleEnv::refresh_features() {
  const auto& f = schema_.features();
  features_[0] = std::clamp(state_.position, f[0].min, f[0].max);
  features_[1] = std::clamp(state_.velocity, f[1].min, f[1].max);
  features_[2] = std::clamp(state_.angle, f[2].min, f[2].max);
  features_[3] = std::clamp(state_.rotation_rate, f[3].min, f[3].max);
}

double CartPoleEnv::step(const std::string& action) {
  if (done_) throw StepAfterDone();
  double force;
  if (action == "LEFT") force = kForce;
  else if (action == "RIGHT") force = -kForce;
  else throw ActionSetMismatch("cart-pole cannot apply '" + action + "'");

  state_ = dynamics(state_, force);
  ++frame_;
  refresh_features();
  if (std::abs(state_.angle) > kAngleLimit || std::abs(state_.position) > kPositionLimit ||
      frame_ >= kFrameLimit)
    done_ = true;
  return 1.0;
}

// ---- flappy ----

FlappyEnv::FlappyEnv()
    : schema_({{"player.y", 0.0, 400.0, FeatureKind::Continuous},
               {"player.vel", -8.0, 10.0, FeatureKind::Continuous},
               {"next.pipe.dist.to.player", -52.0, 240.0, FeatureKind::Continuous},
               {"next.pipe.top.y", 0.0, 192.0, FeatureKind::Continuous},
               {"next.pipe.bottom.y", 0.0, 292.0, FeatureKind::Continuous},
               {"next.next.pipe.dist.to.player", 0.0, 400.0, FeatureKind::Continuous},
               {"next.next.pipe.top.y", 0.0, 192.0, FeatureKind::Continuous},
               {"next.next.pipe.bottom.y", 0.0, 292.0, FeatureKind::Continuous}},
              {"FLAP", "NO FLAP"}, 0),
      features_(8, 0.0) {
  reset(0);
}

void FlappyEnv::reset(std::uint64_t seed) {
  rng_ = RandomSource(mix_seed(0x1f1a99ULL, seed));
  y_ = 200.0;
  vel_ = 0.0;
  done_ = false;
  pipes_.clear();
  pipes_.push_back({kBirdX + 180.0, rng_.uniform(0.0, kGapTopMax)});
  spawn_pipes();
  refresh_features();
}

void FlappyEnv::spawn_pipes() {
  while (pipes_.size() < 4)
    pipes_.push_back({pipes_.back().x + kPipeSpacing, rng_.uniform(0.0, kGapTopMax)});
}

void FlappyEnv::refresh_features() {
  // "next" = first pipe whose trailing edge has not passed the bird
  std::size_t next = 0;
  while (next < pipes_.size() && pipes_[next].x + kPipeWidth < kBirdX) ++next;
  const Pipe& p1 = pipes_[next];
  const Pipe& p2 = pipes_[next + 1];
  const auto& f = schema_.features();
  auto clamp_to = [&](double v, std::size_t i) { return std::clamp(v, f[i].min, f[i].max); };
  features_[0] = clamp_to(y_, 0);
  features_[1] = clamp_to(vel_, 1);
  features_[2] = clamp_to(p1.x - kBirdX, 2);
  features_[3] = clamp_to(p1.gap_top, 3);
  features_[4] = clamp_to(p1.gap_top + kGap, 4);
  features_[5] = clamp_to(p2.x - kBirdX, 5);
  features_[6] = clamp_to(p2.gap_top, 6);
  features_[7] = clamp_to(p2.gap_top + kGap, 7);
}

double FlappyEnv::step(const std::string& action) {
  if (done_) throw StepAfterDone();
  if (action == "FLAP") {
    vel_ = kFlapVelocity;
  } else if (action != "NO FLAP") {
    throw ActionSetMismatch("flappy cannot apply '" + action + "'");
  }
  vel_ = std::min(vel_ + kGravity, kMaxFall);
  y_ += vel_;
  for (auto& p : pipes_) p.x -= kScroll;
  if (pipes_.front().x + kPipeWidth < -kPipeSpacing)
    pipes_.erase(pipes_.begin());
  spawn_pipes();
  refresh_features();

  bool collided = y_ <= 0.0 || y_ >= kFloorY;
  if (!collided) {
    for (const auto& p : pipes_) {
      if (kBirdX >= p.x && kBirdX <= p.x + kPipeWidth &&
          (y_ < p.gap_top || y_ > p.gap_top + kGap)) {
        collided = true;
        break;
      }
    }
  }
  if (collided) {
    done_ = true;
    return 0.0;
  }
  return 1.0;
}

std::unique_ptr<Environment> make_environment(const std::string& name) {
  if (name == "cartpole") return std::make_unique<CartPoleEnv>();
  if (name == "flappy") return std::make_unique<FlappyEnv>();
  throw Error("unknown environment '" + name + "'");
}

EpisodeResult run_episodes(Environment& env, const RuleSet& rs, const EpisodeSpec& spec) {
  if (spec.episodes < 1) throw InvalidParams("episodes must be >= 1");
  for (const auto& used : rs.actions_used())
    if (!env.schema().has_action(used))
      throw ActionSetMismatch("rule set prescribes '" + used + "'");

  EpisodeResult result;
  result.counters.reset(rs.rules.size());
  std::vector<std::vector<double>> history(1);
  for (int e = 0; e < spec.episodes; ++e) {
    env.reset(mix_seed(spec.seed, static_cast<std::uint64_t>(e)));
    double reward = 0.0;
    for (int frame = 0; frame < spec.max_frames && !env.done(); ++frame) {
      history[0] = env.features();
      const InputFrame input{history};
      const ActionOutcome outcome = eval_ruleset(rs, input, spec.action_mode, &result.counters);
      reward += env.step(outcome.primary().name);
    }
    result.per_episode.push_back(reward);
    result.mean_reward += reward;
  }
  result.mean_reward /= static_cast<double>(spec.episodes);
  return result;
}

}  // namespace evoter
