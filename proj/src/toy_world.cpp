#include "gld/toy_world.hpp"

#include <algorithm>
#include <cstdio>

#include "gld/errors.hpp"
#include "gld/rng.hpp"

namespace gld {

namespace {

const std::vector<std::string> kObjects = {"dog",   "cat",   "bird",  "horse",
                                           "truck", "boat",  "chair", "clock",
                                           "zebra", "kayak", "windmill", "tuba"};
constexpr int kCommonObjects = 8;
const std::vector<std::string> kColors = {"red",   "blue",  "green",
                                          "black", "white", "yellow"};
const std::vector<std::string> kScenes = {"grass", "snow",     "sand",
                                          "rocks", "pavement", "carpet"};

constexpr double kObjectWeight = 2.0;
constexpr double kColorWeight = 1.5;
constexpr double kSceneWeight = 1.0;

std::string pad4(int i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d", i);
  return buf;
}

}  // namespace

const std::vector<std::string>& ToyWorld::objects() { return kObjects; }
const std::vector<std::string>& ToyWorld::rare_objects() {
  static const std::vector<std::string> rare(kObjects.begin() + kCommonObjects,
                                             kObjects.end());
  return rare;
}
const std::vector<std::string>& ToyWorld::colors() { return kColors; }
const std::vector<std::string>& ToyWorld::scenes() { return kScenes; }

ToyWorld::ToyWorld(const ToyWorldConfig& cfg) : cfg_(cfg) {
  if (cfg.n_train < 2) throw InsufficientImages("need at least two train images");
  if (cfg.min_refs < 1 || cfg.max_refs < cfg.min_refs)
    throw ParseError("bad reference count range");

  attr_names_ = kObjects;
  attr_names_.insert(attr_names_.end(), kColors.begin(), kColors.end());
  attr_names_.insert(attr_names_.end(), kScenes.begin(), kScenes.end());
  const int n_obj = static_cast<int>(kObjects.size());
  const int n_col = static_cast<int>(kColors.size());
  const int dim = n_obj + n_col + static_cast<int>(kScenes.size());

  struct SplitPlan {
    Split split;
    const char* prefix;
    int count;
  };
  const SplitPlan plans[] = {{Split::kTrain, "tr", cfg.n_train},
                             {Split::kVal, "va", cfg.n_val},
                             {Split::kTest, "te", cfg.n_test}};

  std::vector<ImageRecord> records;
  for (int sp = 0; sp < 3; ++sp) {
    const auto& plan = plans[sp];
    Rng rng(derive_seed(cfg.seed, 100, sp));
    const int n_rare_obj = n_obj - kCommonObjects;
    const int rare_count =
        static_cast<int>(cfg.rare_fraction * static_cast<double>(plan.count));
    std::vector<int> order(static_cast<std::size_t>(plan.count));
    for (int i = 0; i < plan.count; ++i) order[static_cast<std::size_t>(i)] = i;
    shuffle_in_place(order, rng);
    std::vector<bool> is_rare(static_cast<std::size_t>(plan.count), false);
    for (int k = 0; k < rare_count; ++k)
      is_rare[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = true;

    int rare_seen = 0;
    for (int i = 0; i < plan.count; ++i) {
      ToyImage img;
      img.id = std::string(plan.prefix) + pad4(i);
      if (is_rare[static_cast<std::size_t>(i)]) {
        img.object = kCommonObjects + rare_seen % n_rare_obj;
        ++rare_seen;
      } else {
        img.object = static_cast<int>(rng.next_index(kCommonObjects));
      }
      img.color = static_cast<int>(rng.next_index(kColors.size()));
      img.scene = rng.next_unit() < 0.8
                      ? static_cast<int>(rng.next_index(kScenes.size()))
                      : -1;
      img.attributes.assign(static_cast<std::size_t>(dim), 0.0);
      img.attributes[static_cast<std::size_t>(img.object)] = kObjectWeight;
      img.attributes[static_cast<std::size_t>(n_obj + img.color)] = kColorWeight;
      if (img.scene >= 0)
        img.attributes[static_cast<std::size_t>(n_obj + n_col + img.scene)] =
            kSceneWeight;

      ImageRecord rec;
      rec.id = img.id;
      rec.split = plan.split;
      const int n_refs =
          cfg.min_refs +
          static_cast<int>(rng.next_index(
              static_cast<std::size_t>(cfg.max_refs - cfg.min_refs + 1)));
      for (int r = 0; r < n_refs; ++r) {
        std::vector<std::string> toks;
        toks.push_back(rng.next_unit() < 0.5 ? "a" : "the");
        if (rng.next_unit() < 0.7)
          toks.push_back(kColors[static_cast<std::size_t>(img.color)]);
        toks.push_back(kObjects[static_cast<std::size_t>(img.object)]);
        if (img.scene >= 0 && rng.next_unit() < cfg.scene_prob) {
          toks.push_back("on");
          toks.push_back(kScenes[static_cast<std::size_t>(img.scene)]);
        }
        Caption ref;
        ref.tokens = std::move(toks);
        ref.raw = join_tokens(ref.tokens);
        rec.references.push_back(std::move(ref));
      }
      records.push_back(std::move(rec));
      images_.push_back(std::move(img));
    }
  }
  corpus_ = make_corpus(std::move(records));

  std::map<std::string, Vec> vectors;
  for (const auto& img : images_) vectors.emplace(img.id, img.attributes);
  store_ = EmbeddingStore(std::move(vectors), embedder());

  std::vector<std::string> train_ids;
  for (const auto* rec : corpus_.split_images(Split::kTrain))
    train_ids.push_back(rec->id);
  nn_ = precompute_nearest(store_, train_ids);

  std::vector<ImageRecord> train_records;
  for (const auto* rec : corpus_.split_images(Split::kTrain))
    train_records.push_back(*rec);
  weights_ = build_weight_table(make_corpus(std::move(train_records)));
}

const ToyImage& ToyWorld::image(const std::string& id) const {
  for (const auto& img : images_) {
    if (img.id == id) return img;
  }
  throw MissingEmbedding("no such image '" + id + "'");
}

int ToyWorld::attr_dim() const { return static_cast<int>(attr_names_.size()); }

const std::vector<double>& ToyWorld::attributes(const std::string& id) const {
  return image(id).attributes;
}

CaptionEmbedder ToyWorld::embedder() const {
  std::vector<double> weights;
  weights.insert(weights.end(), kObjects.size(), kObjectWeight);
  weights.insert(weights.end(), kColors.size(), kColorWeight);
  weights.insert(weights.end(), kScenes.size(), kSceneWeight);
  return TokenAxisEmbedder(attr_names_, std::move(weights));
}

NGramWeightTable ToyWorld::weights_with_base(double idf_log_base) const {
  std::vector<ImageRecord> train_records;
  for (const auto* rec : corpus_.split_images(Split::kTrain))
    train_records.push_back(*rec);
  return build_weight_table(make_corpus(std::move(train_records)), idf_log_base);
}

std::vector<std::string> ToyWorld::policy_vocab() const {
  std::vector<std::string> vocab = {"a", "the", "on"};
  vocab.insert(vocab.end(), attr_names_.begin(), attr_names_.end());
  return vocab;
}

ToyPolicy ToyWorld::make_policy() const {
  return ToyPolicy(policy_vocab(), attr_dim(), policy_max_len());
}

}  // namespace gld
