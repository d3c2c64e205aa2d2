#pragma once

#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

namespace gld {

enum class Split { kTrain, kVal, kTest };

Split split_from_string(const std::string& s);
std::string to_string(Split split);

struct Caption {
  std::vector<std::string> tokens;  // lowercase, no whitespace, non-empty
  std::string raw;

  std::size_t length() const { return tokens.size(); }
  bool operator==(const Caption& other) const { return tokens == other.tokens; }
};

struct ImageRecord {
  std::string id;
  Split split = Split::kTrain;
  std::vector<Caption> references;  // non-empty
};

struct Corpus {
  std::vector<ImageRecord> images;               // file order
  std::unordered_map<std::string, int> vocab;    // token -> dense id

  const ImageRecord* find(const std::string& id) const;
  std::vector<const ImageRecord*> split_images(Split split) const;
};

// Lowercases, strips the sentence punctuation set {.,!?;:"()}, splits on
// whitespace. Apostrophes and hyphens are kept.
std::vector<std::string> tokenize(const std::string& raw);

// tokenize() + retained raw text; throws EmptyCaption when nothing survives.
Caption make_caption(const std::string& raw);

// Builds the vocab and checks invariants (unique ids, non-empty references).
Corpus make_corpus(std::vector<ImageRecord> images);

// Dataset JSON: {"images":[{"id":..., "split":"train|val|test",
// "captions":[...]}]}. Image order is preserved.
Corpus parse_dataset_json(const std::string& bytes);
Corpus load_dataset(const std::filesystem::path& path);

std::string join_tokens(const std::vector<std::string>& tokens);

// Contiguous n-token windows keyed by their space-joined form. Tokens never
// contain whitespace, so the joined key is unambiguous.
std::unordered_map<std::string, int> ngram_counts(const Caption& c, int n);

// Number of n-gram instances: max(0, T-n+1).
int ngram_total(const Caption& c, int n);

}  // namespace gld
