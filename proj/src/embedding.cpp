#include "gld/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gld/errors.hpp"
#include "gld/io.hpp"

namespace gld {

double dot(const Vec& a, const Vec& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const Vec& v) { return std::sqrt(dot(v, v)); }

double euclidean_distance(const Vec& a, const Vec& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

double cosine(const Vec& a, const Vec& b) {
  const double na = norm(a), nb = norm(b);
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot(a, b) / (na * nb);
}

TokenAxisEmbedder::TokenAxisEmbedder(std::vector<std::string> axis_tokens,
                                     std::vector<double> axis_weights)
    : axes_(std::move(axis_tokens)), weights_(std::move(axis_weights)) {
  if (weights_.empty()) weights_.assign(axes_.size(), 1.0);
  if (weights_.size() != axes_.size())
    throw ParseError("axis weight count does not match axis count");
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    if (!index_.emplace(axes_[i], i).second)
      throw DuplicateId("duplicate embedding axis '" + axes_[i] + "'");
  }
}

Vec TokenAxisEmbedder::operator()(const Caption& c) const {
  Vec v(axes_.size(), 0.0);
  for (const auto& tok : c.tokens) {
    auto it = index_.find(tok);
    if (it != index_.end()) v[it->second] += weights_[it->second];
  }
  return v;
}

EmbeddingStore::EmbeddingStore(std::map<std::string, Vec> image_vectors,
                               CaptionEmbedder caption_embedder)
    : image_vectors_(std::move(image_vectors)),
      caption_embedder_(std::move(caption_embedder)) {
  if (image_vectors_.empty()) throw InsufficientImages("no image vectors");
  dim_ = image_vectors_.begin()->second.size();
  for (const auto& [id, v] : image_vectors_) {
    if (v.size() != dim_)
      throw ParseError("vector for '" + id + "' has dimension " +
                       std::to_string(v.size()) + ", expected " +
                       std::to_string(dim_));
  }
}

bool EmbeddingStore::has(const std::string& id) const {
  return image_vectors_.count(id) != 0;
}

const Vec& EmbeddingStore::image_vector(const std::string& id) const {
  auto it = image_vectors_.find(id);
  if (it == image_vectors_.end())
    throw MissingEmbedding("no vector for image '" + id + "'");
  return it->second;
}

Vec EmbeddingStore::embed(const Caption& c) const {
  Vec v = caption_embedder_(c);
  if (v.size() != dim_)
    throw ParseError("caption embedder produced dimension " +
                     std::to_string(v.size()) + ", expected " +
                     std::to_string(dim_));
  return v;
}

std::vector<std::string> EmbeddingStore::ids() const {
  std::vector<std::string> out;
  out.reserve(image_vectors_.size());
  for (const auto& [id, v] : image_vectors_) out.push_back(id);
  return out;
}

EmbeddingStore EmbeddingStore::load_csv(const std::filesystem::path& path,
                                        CaptionEmbedder caption_embedder) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty embedding file");
  const auto pos = line.find(",dim=");
  if (line.rfind("id,", 0) != 0 || pos == std::string::npos)
    throw ParseError("embedding header must be 'id,dim=<d>'");
  const int dim = std::stoi(line.substr(pos + 5));
  if (dim <= 0) throw ParseError("embedding dimension must be positive");
  std::map<std::string, Vec> vectors;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string field;
    if (!std::getline(row, field, ',')) throw ParseError("bad embedding row");
    const std::string id = field;
    Vec v;
    while (std::getline(row, field, ',')) v.push_back(std::stod(field));
    if (static_cast<int>(v.size()) != dim)
      throw ParseError("row for '" + id + "' has " + std::to_string(v.size()) +
                       " values, expected " + std::to_string(dim));
    if (!vectors.emplace(id, std::move(v)).second)
      throw DuplicateId("duplicate embedding id '" + id + "'");
  }
  return EmbeddingStore(std::move(vectors), std::move(caption_embedder));
}

std::string EmbeddingStore::to_csv() const {
  std::string out = "id,dim=" + std::to_string(dim_) + "\n";
  for (const auto& [id, v] : image_vectors_) {
    out += id;
    for (double x : v) {
      out.push_back(',');
      out += format_double(x);
    }
    out.push_back('\n');
  }
  return out;
}

double similarity(const std::string& image_id, const Caption& c,
                  const EmbeddingStore& store) {
  return cosine(store.image_vector(image_id), store.embed(c));
}

const std::string& NearestNeighborTable::nearest(const std::string& id) const {
  auto it = entries_.find(id);
  if (it == entries_.end())
    throw MissingNeighbor("no neighbor entry for image '" + id + "'");
  return it->second.nearest_id;
}

double NearestNeighborTable::distance(const std::string& id) const {
  auto it = entries_.find(id);
  if (it == entries_.end())
    throw MissingNeighbor("no neighbor entry for image '" + id + "'");
  return it->second.distance;
}

std::string NearestNeighborTable::to_csv() const {
  std::string out = "id,nearest_id,distance\n";
  for (const auto& [id, e] : entries_) {
    out += id;
    out.push_back(',');
    out += e.nearest_id;
    out.push_back(',');
    out += format_double(e.distance);
    out.push_back('\n');
  }
  return out;
}

NearestNeighborTable precompute_nearest(const EmbeddingStore& store,
                                        const std::vector<std::string>& ids) {
  if (ids.size() < 2)
    throw InsufficientImages("need at least two images for neighbor search");
  NearestNeighborTable table;
  std::vector<const Vec*> vecs;
  vecs.reserve(ids.size());
  for (const auto& id : ids) vecs.push_back(&store.image_vector(id));
  std::vector<NearestNeighborTable::Entry> found(ids.size());
  parallel_for(ids.size(), [&](std::size_t i) {
    std::size_t best = ids.size();
    double best_d = 0;
    for (std::size_t j = 0; j < ids.size(); ++j) {
      if (j == i || ids[j] == ids[i]) continue;
      const double d = euclidean_distance(*vecs[i], *vecs[j]);
      if (best == ids.size() || d < best_d ||
          (d == best_d && ids[j] < ids[best])) {
        best = j;
        best_d = d;
      }
    }
    found[i] = {ids[best], best_d};
  });
  for (std::size_t i = 0; i < ids.size(); ++i) {
    table.entries_[ids[i]] = found[i];
  }
  return table;
}

NearestNeighborTable precompute_nearest(const EmbeddingStore& store) {
  return precompute_nearest(store, store.ids());
}

std::vector<HardNegatives> mine_hard_negatives(
    const std::vector<BatchItem>& batch, const EmbeddingStore& store) {
  if (batch.size() < 2)
    throw InsufficientBatch("need at least two items to mine negatives");
  std::vector<Vec> cap_vecs;
  cap_vecs.reserve(batch.size());
  for (const auto& item : batch) cap_vecs.push_back(store.embed(item.caption));
  std::vector<const Vec*> img_vecs;
  img_vecs.reserve(batch.size());
  for (const auto& item : batch)
    img_vecs.push_back(&store.image_vector(item.image_id));

  std::vector<HardNegatives> out(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    std::size_t best_img = i, best_cap = i;
    double best_img_s = 0, best_cap_s = 0;
    for (std::size_t j = 0; j < batch.size(); ++j) {
      if (j == i) continue;
      const double s_img = cosine(*img_vecs[j], cap_vecs[i]);
      if (best_img == i || s_img > best_img_s) {
        best_img = j;
        best_img_s = s_img;
      }
      const double s_cap = cosine(*img_vecs[i], cap_vecs[j]);
      if (best_cap == i || s_cap > best_cap_s) {
        best_cap = j;
        best_cap_s = s_cap;
      }
    }
    out[i] = {best_img, best_cap};
  }
  return out;
}

}  // namespace gld
