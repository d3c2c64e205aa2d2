#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "gld/corpus.hpp"

namespace gld {

using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b);
double norm(const Vec& v);
double euclidean_distance(const Vec& a, const Vec& b);

// Cosine similarity; 0 when either vector is all-zero.
double cosine(const Vec& a, const Vec& b);

using CaptionEmbedder = std::function<Vec(const Caption&)>;

// Embeds a caption as weighted token counts over a fixed axis vocabulary;
// tokens off the axes are ignored.
class TokenAxisEmbedder {
 public:
  explicit TokenAxisEmbedder(std::vector<std::string> axis_tokens,
                             std::vector<double> axis_weights = {});
  Vec operator()(const Caption& c) const;
  std::size_t dim() const { return axes_.size(); }

 private:
  std::vector<std::string> axes_;
  std::vector<double> weights_;
  std::map<std::string, std::size_t> index_;
};

// Fixed image vectors plus a deterministic caption embedder in the same
// space. Immutable once constructed.
class EmbeddingStore {
 public:
  EmbeddingStore() = default;  // empty store; any lookup throws
  EmbeddingStore(std::map<std::string, Vec> image_vectors,
                 CaptionEmbedder caption_embedder);

  std::size_t dim() const { return dim_; }
  bool has(const std::string& id) const;
  const Vec& image_vector(const std::string& id) const;  // MissingEmbedding
  Vec embed(const Caption& c) const;
  std::vector<std::string> ids() const;  // sorted

  // CSV with header "id,dim=<d>" and rows "id,v0,...,v{d-1}".
  static EmbeddingStore load_csv(const std::filesystem::path& path,
                                 CaptionEmbedder caption_embedder);
  std::string to_csv() const;

 private:
  std::map<std::string, Vec> image_vectors_;
  CaptionEmbedder caption_embedder_;
  std::size_t dim_ = 0;
};

double similarity(const std::string& image_id, const Caption& c,
                  const EmbeddingStore& store);

// Most similar other image by Euclidean distance between image vectors.
class NearestNeighborTable {
 public:
  const std::string& nearest(const std::string& id) const;  // MissingNeighbor
  double distance(const std::string& id) const;
  std::size_t size() const { return entries_.size(); }

  // id,nearest_id,distance sorted by id.
  std::string to_csv() const;

  friend NearestNeighborTable precompute_nearest(
      const EmbeddingStore& store, const std::vector<std::string>& ids);

 private:
  struct Entry {
    std::string nearest_id;
    double distance = 0;
  };
  std::map<std::string, Entry> entries_;
};

// Exhaustive pairwise scan; ties broken toward the lexicographically smallest
// id. Throws InsufficientImages for fewer than two ids.
NearestNeighborTable precompute_nearest(const EmbeddingStore& store,
                                        const std::vector<std::string>& ids);
NearestNeighborTable precompute_nearest(const EmbeddingStore& store);

struct BatchItem {
  std::string image_id;
  Caption caption;
};

// Positions into the batch of the hardest negative image for this item's
// caption and the hardest negative caption for this item's image.
struct HardNegatives {
  std::size_t image_pos = 0;
  std::size_t caption_pos = 0;
};

// Ties resolve to the earliest batch position. Throws InsufficientBatch for
// batches smaller than two.
std::vector<HardNegatives> mine_hard_negatives(
    const std::vector<BatchItem>& batch, const EmbeddingStore& store);

}  // namespace gld
