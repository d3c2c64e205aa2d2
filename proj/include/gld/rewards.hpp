#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gld/corpus.hpp"
#include "gld/embedding.hpp"
#include "gld/metrics.hpp"
#include "gld/ngram_stats.hpp"

namespace gld {

struct GdConfig {
  double epsilon = 0.2;
  bool use_hardest_global = true;  // whole-dataset nearest-image term
  bool use_minibatch = true;       // minibatch hard-negative term
};

// Resolved minibatch hard negatives for one item.
struct HardNegativePair {
  std::string image_id;
  Caption caption;
};

// Ranking reward against the precomputed nearest image:
//   -max(0, epsilon + s(I_nn, c) - s(I, c)).
double reward_h(const std::string& image_id, const Caption& c,
                const EmbeddingStore& store, const NearestNeighborTable& nn,
                const GdConfig& cfg);

// Ranking reward against the minibatch hard negatives:
//   -max(0, eps + s(I, c') - s(I, c)) - max(0, eps + s(I', c) - s(I, c)).
double reward_b(const std::string& image_id, const Caption& c,
                const HardNegativePair& negatives, const EmbeddingStore& store,
                const GdConfig& cfg);

// Sum of the enabled ranking terms; disabled terms contribute 0.
double reward_gd(const std::string& image_id, const Caption& c,
                 const EmbeddingStore& store, const NearestNeighborTable* nn,
                 const HardNegativePair* negatives, const GdConfig& cfg);

// Non-negative per-word boosts for flagged words: for each qualifying phrase
// covering the word, the clipped weight product against each reference,
// normalized by the order's weight-vector norms. Unflagged words get 0.
std::vector<double> ld_increments(const Caption& c,
                                  const std::vector<Caption>& refs,
                                  const NGramWeightTable& table,
                                  const LdConfig& cfg);

// Per-word reward: caption score plus the increment for flagged words; the
// caption score exactly for the rest.
std::vector<double> reward_ld(const Caption& c,
                              const std::vector<Caption>& refs,
                              const NGramWeightTable& table,
                              const LdConfig& cfg,
                              const CiderConfig& cider_cfg = {});

// Prefix-difference variant: score(c[1..t]) - score(c[1..t-1]) + score(c),
// with the empty prefix scoring 0. Differences may be negative.
std::vector<double> reward_ld_diff(const Caption& c,
                                   const std::vector<Caption>& refs,
                                   const NGramWeightTable& table,
                                   const CiderConfig& cider_cfg = {});

enum class WordRewardMode { kUniform, kLocal, kLocalDiff };

struct TraceSpec {
  WordRewardMode word_mode = WordRewardMode::kUniform;
  bool use_gd = false;
  GdConfig gd;
  LdConfig ld;
  CiderConfig cider_cfg;
};

struct RewardStep {
  std::string word;
  double r_c = 0;
  double ld_increment = 0;  // may be negative only in prefix-difference mode
  double r_gd = 0;
  double total = 0;  // r_c + ld_increment + r_gd
};

struct RewardTrace {
  std::vector<RewardStep> steps;
  double r_c = 0;
  double r_h = 0;
  double r_b = 0;
  double r_gd = 0;

  double total_sum() const;
  // t,word,r_c,ld_increment,r_gd,total
  std::string to_csv() const;
};

// Assembles the full per-word trace for one (image, caption) pair. store/nn
// are required only for the reward components enabled in the trace settings;
// negatives may be null when the minibatch term is disabled.
RewardTrace assemble(const TraceSpec& spec, const std::string& image_id,
                     const Caption& sampled, const std::vector<Caption>& refs,
                     const NGramWeightTable& table,
                     const EmbeddingStore* store, const NearestNeighborTable* nn,
                     const HardNegativePair* negatives);

}  // namespace gld
