#include "gld/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

#include <json.hpp>

#include "gld/errors.hpp"
#include "gld/io.hpp"

namespace gld {

Split split_from_string(const std::string& s) {
  if (s == "train") return Split::kTrain;
  if (s == "val") return Split::kVal;
  if (s == "test") return Split::kTest;
  throw ParseError("unknown split '" + s + "'");
}

std::string to_string(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  return "?";
}

const ImageRecord* Corpus::find(const std::string& id) const {
  for (const auto& img : images) {
    if (img.id == id) return &img;
  }
  return nullptr;
}

std::vector<const ImageRecord*> Corpus::split_images(Split split) const {
  std::vector<const ImageRecord*> out;
  for (const auto& img : images) {
    if (img.split == split) out.push_back(&img);
  }
  return out;
}

std::vector<std::string> tokenize(const std::string& raw) {
  static const std::string kStrip = ".,!?;:\"()";
  std::vector<std::string> tokens;
  std::string cur;
  for (char ch : raw) {
    if (std::isspace(static_cast<unsigned char>(ch))) {
      if (!cur.empty()) tokens.push_back(cur);
      cur.clear();
      continue;
    }
    if (kStrip.find(ch) != std::string::npos) continue;
    cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  }
  if (!cur.empty()) tokens.push_back(cur);
  return tokens;
}

Caption make_caption(const std::string& raw) {
  Caption c;
  c.raw = raw;
  c.tokens = tokenize(raw);
  if (c.tokens.empty()) throw EmptyCaption("caption has no tokens: '" + raw + "'");
  return c;
}

Corpus make_corpus(std::vector<ImageRecord> images) {
  Corpus corpus;
  std::unordered_set<std::string> seen;
  for (const auto& img : images) {
    if (img.id.empty()) throw ParseError("image with empty id");
    if (!seen.insert(img.id).second) throw DuplicateId("duplicate image id '" + img.id + "'");
    if (img.references.empty())
      throw ParseError("image '" + img.id + "' has no references");
    for (const auto& ref : img.references) {
      if (ref.tokens.empty())
        throw EmptyCaption("empty reference for image '" + img.id + "'");
      for (const auto& tok : ref.tokens) {
        if (!corpus.vocab.count(tok)) {
          int id = static_cast<int>(corpus.vocab.size());
          corpus.vocab.emplace(tok, id);
        }
      }
    }
  }
  corpus.images = std::move(images);
  return corpus;
}

Corpus parse_dataset_json(const std::string& bytes) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(bytes);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad dataset json: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("images") || !doc["images"].is_array())
    throw ParseError("dataset json must be an object with an 'images' array");
  std::vector<ImageRecord> images;
  for (const auto& item : doc["images"]) {
    if (!item.is_object()) throw ParseError("image entry is not an object");
    ImageRecord rec;
    if (!item.contains("id") || !item["id"].is_string())
      throw ParseError("image entry missing string 'id'");
    rec.id = item["id"].get<std::string>();
    if (!item.contains("split") || !item["split"].is_string())
      throw ParseError("image '" + rec.id + "' missing string 'split'");
    rec.split = split_from_string(item["split"].get<std::string>());
    if (!item.contains("captions") || !item["captions"].is_array())
      throw ParseError("image '" + rec.id + "' missing 'captions' array");
    for (const auto& cap : item["captions"]) {
      if (!cap.is_string())
        throw ParseError("caption for image '" + rec.id + "' is not a string");
      rec.references.push_back(make_caption(cap.get<std::string>()));
    }
    images.push_back(std::move(rec));
  }
  return make_corpus(std::move(images));
}

Corpus load_dataset(const std::filesystem::path& path) {
  return parse_dataset_json(read_file(path));
}

std::string join_tokens(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

std::unordered_map<std::string, int> ngram_counts(const Caption& c, int n) {
  std::unordered_map<std::string, int> counts;
  const auto T = static_cast<int>(c.tokens.size());
  for (int i = 0; i + n <= T; ++i) {
    std::string key = c.tokens[static_cast<std::size_t>(i)];
    for (int j = 1; j < n; ++j) {
      key.push_back(' ');
      key += c.tokens[static_cast<std::size_t>(i + j)];
    }
    ++counts[key];
  }
  return counts;
}

int ngram_total(const Caption& c, int n) {
  const auto T = static_cast<int>(c.tokens.size());
  return std::max(0, T - n + 1);
}

}  // namespace gld
