#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gld/corpus.hpp"
#include "gld/embedding.hpp"
#include "gld/ngram_stats.hpp"
#include "gld/policy.hpp"

namespace gld {

// Synthetic captioning environment: each image is an attribute vector
// (object, color, optional scene), references come from a handful of
// templates, and a fixed fraction of images carry a rare object so that
// distinctive wording is measurably rewarded.
struct ToyWorldConfig {
  uint64_t seed = 7;
  int n_train = 200;
  int n_val = 50;
  int n_test = 200;
  double rare_fraction = 0.10;
  int min_refs = 2;
  int max_refs = 5;
  double scene_prob = 0.3;  // chance a reference mentions the scene
};

struct ToyImage {
  std::string id;
  int object = 0;
  int color = 0;
  int scene = -1;  // -1: no scene
  std::vector<double> attributes;
};

class ToyWorld {
 public:
  explicit ToyWorld(const ToyWorldConfig& cfg);

  const ToyWorldConfig& config() const { return cfg_; }
  const Corpus& corpus() const { return corpus_; }
  const std::vector<ToyImage>& images() const { return images_; }
  const ToyImage& image(const std::string& id) const;

  int attr_dim() const;
  const std::vector<std::string>& attribute_names() const { return attr_names_; }
  const std::vector<double>& attributes(const std::string& id) const;

  // Bag-of-attribute-words caption embedder (objects weighted above colors,
  // colors above scenes) over the same axes as the image vectors.
  CaptionEmbedder embedder() const;
  const EmbeddingStore& store() const { return store_; }
  const NearestNeighborTable& neighbors() const { return nn_; }

  // Per-order weight table built from the train split only.
  const NGramWeightTable& weights() const { return weights_; }
  NGramWeightTable weights_with_base(double idf_log_base) const;

  // Policy vocabulary: attribute words plus the template glue words.
  std::vector<std::string> policy_vocab() const;
  int policy_max_len() const { return 6; }
  ToyPolicy make_policy() const;

  static const std::vector<std::string>& objects();
  static const std::vector<std::string>& rare_objects();
  static const std::vector<std::string>& colors();
  static const std::vector<std::string>& scenes();

 private:
  ToyWorldConfig cfg_;
  std::vector<ToyImage> images_;
  std::vector<std::string> attr_names_;
  Corpus corpus_;
  EmbeddingStore store_;
  NearestNeighborTable nn_;
  NGramWeightTable weights_;
};

}  // namespace gld
