#pragma once

#include <map>
#include <string>
#include <vector>

#include "gld/metrics.hpp"
#include "gld/training.hpp"

namespace gld {

// Caption-to-image self-retrieval. Caption i is scored against every image by
// policy log-probability; the rank counts every other image that scores at
// least as high as the true one, so ties rank pessimistically.
struct RetrievalResult {
  std::vector<int> ranks;                // one per image, 1-based
  std::map<int, double> recall_at;       // k -> fraction with rank <= k
};

RetrievalResult self_retrieval(const ToyPolicy& policy, const ToyWorld& world,
                               const std::vector<std::string>& image_ids,
                               const std::vector<Caption>& captions,
                               const std::vector<int>& ks);

// Greedy-decodes each image and evaluates metrics plus retrieval.
struct EvalSummary {
  double cider = 0;
  std::array<double, 4> bleu{};
  double rouge_l = 0;
  double unicap = 0;
  double avglen = 0;
  std::map<int, double> recall_at;
};

EvalSummary evaluate_policy(const ToyPolicy& policy, const ToyWorld& world,
                            Split split, const std::vector<int>& ks,
                            const CiderConfig& cider_cfg = {});

struct CompareConfig {
  ToyWorldConfig world;
  TrainConfig train;
  std::vector<Objective> objectives;
  std::vector<uint64_t> seeds;
  std::vector<int> ks = {1, 5, 10};
};

struct CompareRun {
  Objective objective = Objective::kCider;
  uint64_t seed = 0;
  EvalSummary summary;
  std::vector<EpochLog> log;
};

struct CompareReport {
  std::vector<Objective> objectives;  // as listed, duplicates kept
  std::vector<uint64_t> seeds;
  std::vector<CompareRun> runs;  // objective-major, seed-minor

  std::string runs_csv() const;
  // One row per listed objective with mean and sd columns per metric.
  std::string summary_csv() const;
};

// Requires at least two objectives and three seeds. A failing run rethrows
// with the objective and seed named.
CompareReport compare_objectives(const CompareConfig& cfg);

// Threshold sweep for the phrase gate: trains nothing, just reports how many
// words each setting flags and the resulting per-word reward mass on a split.
struct SweepRow {
  double lambda = 0;
  double eta = 0;
  double flagged_fraction = 0;
  double mean_increment = 0;
  double mean_word_reward = 0;
};

std::vector<SweepRow> lambda_sweep(const ToyWorld& world,
                                   const std::vector<double>& lambdas,
                                   double eta, const CiderConfig& cider_cfg = {});

std::string sweep_to_csv(const std::vector<SweepRow>& rows);

}  // namespace gld
