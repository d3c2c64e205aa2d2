#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gld/rewards.hpp"
#include "gld/rng.hpp"
#include "gld/toy_world.hpp"

namespace gld {

enum class Objective {
  kMle,
  kCider,       // uniform per-word sequence score
  kGd,          // uniform score + ranking terms
  kLd,          // per-word fine-grained rewards
  kLdDiff,      // prefix-difference variant
  kGld,         // ranking terms + per-word rewards
  kStrengthen,  // kGld with base-2 idf in the reward table
};

std::string objective_name(Objective o);
Objective parse_objective(const std::string& name);  // throws ParseError

struct TrainConfig {
  Objective objective = Objective::kGld;
  uint64_t seed = 1;
  int batch_size = 16;
  double lr = 5e-4;
  double lr_decay = 0.8;
  int lr_decay_every = 3;  // epochs
  int mle_epochs = 20;
  int total_epochs = 120;
  int samples_per_image = 1;
  int beam_width = 3;
  bool use_baseline = true;  // subtract the greedy rollout's rewards
  GdConfig gd;
  LdConfig ld;
  CiderConfig cider_cfg;
};

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class Adam {
 public:
  Adam(int n_params, AdamConfig cfg = {});
  void step(std::vector<double>& params, const std::vector<double>& grad,
            double lr);

 private:
  AdamConfig cfg_;
  std::vector<double> m_, v_;
  int64_t t_ = 0;
};

// One self-critical gradient estimate over a batch: the per-step advantage is
// the sampled trace reward minus the greedy-baseline trace reward at the same
// step, and the returned gradient is for the minimized objective (negated
// expected reward), averaged over items and samples.
struct ReinforceStats {
  double mean_sample_reward = 0;
  double mean_baseline_reward = 0;
  double mean_advantage_sq = 0;  // across all (item, step) advantages
};

ReinforceStats reinforce_gradient(const ToyPolicy& policy, const ToyWorld& world,
                                  const std::vector<std::string>& image_ids,
                                  const TrainConfig& cfg,
                                  const NGramWeightTable& reward_table, Rng& rng,
                                  std::vector<double>& grad);

struct EpochLog {
  int epoch = 0;
  std::string phase;  // "mle" or "rl:<objective>"
  double objective_value = 0;
  double heldout_cider = 0;
  double unicap = 0;
  double avglen = 0;
};

struct TrainResult {
  ToyPolicy policy;
  std::vector<EpochLog> log;
};

TrainResult train(const ToyWorld& world, const TrainConfig& cfg);

std::string log_to_csv(const std::vector<EpochLog>& log);

// Checkpoint I/O: JSON with world config, vocabulary, dimensions, and theta.
std::string checkpoint_to_json(const ToyPolicy& policy, const ToyWorldConfig& world_cfg,
                               const TrainConfig& cfg);
struct Checkpoint {
  ToyWorldConfig world_cfg;
  TrainConfig train_cfg;
  std::vector<std::string> vocab;
  int attr_dim = 0;
  int max_len = 0;
  std::vector<double> theta;
};
Checkpoint checkpoint_from_json(const std::string& text);  // throws ParseError

}  // namespace gld
