#pragma once

#include <array>
#include <string>
#include <unordered_map>
#include <vector>

#include "gld/corpus.hpp"

namespace gld {

inline constexpr int kMaxNgramOrder = 4;
inline constexpr double kEulerBase = 2.718281828459045235;

// Word-level reweighting knobs: lambda gates phrases (orders 2..4), eta gates
// the word itself (order 1).
struct LdConfig {
  double lambda = 5.0;
  double eta = 1.0;
  double idf_log_base = kEulerBase;
  bool average_over_references = true;
};

// Per-order document frequencies over the pooled references of each image.
class NGramWeightTable {
 public:
  NGramWeightTable() = default;

  long total_images() const { return total_images_; }
  double idf_log_base() const { return idf_log_base_; }

  // Number of images whose reference set contains the n-gram at least once;
  // 0 when the n-gram never occurs in any reference.
  int document_count(const std::string& ngram, int n) const;

  // log(total / max(1, doc_count)) in the configured base. Finite for
  // n-grams absent from every reference.
  double idf(const std::string& ngram, int n) const;

  // n,ngram,doc_count,idf rows sorted by (n, ngram); byte-stable.
  std::string to_csv() const;

  friend NGramWeightTable build_weight_table(const Corpus& corpus,
                                             double idf_log_base);

 private:
  std::array<std::unordered_map<std::string, int>, kMaxNgramOrder> doc_count_;
  long total_images_ = 0;
  double idf_log_base_ = kEulerBase;
};

NGramWeightTable build_weight_table(const Corpus& corpus,
                                    double idf_log_base = kEulerBase);

// TF-IDF weight of one n-gram of order n within caption c: the n-gram's share
// of the caption's order-n instances times its idf. 0 when the caption has no
// order-n instances or does not contain the n-gram.
double tfidf(const Caption& c, const std::string& ngram, int n,
             const NGramWeightTable& table);

// Two-stage selection: position t is flagged iff some phrase (order 2..4)
// covering t has weight > lambda AND the word's own 1-gram weight > eta.
std::vector<bool> select_fine_grained(const Caption& c,
                                      const NGramWeightTable& table,
                                      const LdConfig& cfg);

}  // namespace gld
