#pragma once

#include <array>
#include <string>
#include <vector>

#include "gld/corpus.hpp"
#include "gld/ngram_stats.hpp"

namespace gld {

enum class CiderVariant {
  kCiderD,  // clipped vectors + gaussian length penalty
  kPlain,   // raw cosine, no penalty
};

struct CiderConfig {
  CiderVariant variant = CiderVariant::kCiderD;
  double sigma = 6.0;
  double scale = 10.0;
};

// Consensus score of a candidate against a reference set, averaged over the
// four n-gram orders. Orders where the candidate (or a reference) has a zero
// weight vector contribute 0 for that pairing.
double cider(const Caption& c, const std::vector<Caption>& refs,
             const NGramWeightTable& table, const CiderConfig& cfg = {});

// Sentence BLEU-1..4 with clipped precisions and the closest-reference-length
// brevity penalty. BLEU-k is 0 whenever some precision up to k is 0.
std::array<double, 4> bleu(const Caption& c, const std::vector<Caption>& refs);

// LCS F-score with beta = 1.2; precision/recall are each maxed over refs.
double rouge_l(const Caption& c, const std::vector<Caption>& refs);

struct FineGranularity {
  long unicap = 0;    // distinct token sequences
  double avglen = 0;  // mean token count
};

FineGranularity fine_granularity(const std::vector<Caption>& captions);

struct ImageScores {
  std::string id;
  double cider = 0;
  std::array<double, 4> bleu{};
  double rouge_l = 0;
};

struct MetricReport {
  std::vector<ImageScores> per_image;
  ImageScores mean;  // id "mean"

  // One row per image plus the summary row.
  std::string to_csv() const;
};

MetricReport score_candidates(
    const Corpus& corpus,
    const std::vector<std::pair<std::string, Caption>>& candidates,
    const NGramWeightTable& table, const CiderConfig& cfg = {});

}  // namespace gld
