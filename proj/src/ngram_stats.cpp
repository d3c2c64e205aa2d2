#include "gld/ngram_stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_set>

#include "gld/io.hpp"

namespace gld {

int NGramWeightTable::document_count(const std::string& ngram, int n) const {
  if (n < 1 || n > kMaxNgramOrder) return 0;
  const auto& m = doc_count_[static_cast<std::size_t>(n - 1)];
  auto it = m.find(ngram);
  return it == m.end() ? 0 : it->second;
}

double NGramWeightTable::idf(const std::string& ngram, int n) const {
  const int df = document_count(ngram, n);
  const double ratio =
      static_cast<double>(total_images_) / static_cast<double>(std::max(1, df));
  const double raw = std::log(ratio);
  if (idf_log_base_ == kEulerBase) return raw;
  return raw / std::log(idf_log_base_);
}

std::string NGramWeightTable::to_csv() const {
  std::string out = "n,ngram,doc_count,idf\n";
  for (int n = 1; n <= kMaxNgramOrder; ++n) {
    const auto& m = doc_count_[static_cast<std::size_t>(n - 1)];
    std::map<std::string, int> sorted(m.begin(), m.end());
    for (const auto& [key, df] : sorted) {
      out += std::to_string(n);
      out.push_back(',');
      out += key;
      out.push_back(',');
      out += std::to_string(df);
      out.push_back(',');
      out += format_double(idf(key, n));
      out.push_back('\n');
    }
  }
  return out;
}

NGramWeightTable build_weight_table(const Corpus& corpus, double idf_log_base) {
  NGramWeightTable table;
  table.idf_log_base_ = idf_log_base;
  table.total_images_ = static_cast<long>(corpus.images.size());
  for (const auto& img : corpus.images) {
    for (int n = 1; n <= kMaxNgramOrder; ++n) {
      std::unordered_set<std::string> present;
      for (const auto& ref : img.references) {
        for (const auto& [key, cnt] : ngram_counts(ref, n)) present.insert(key);
      }
      auto& m = table.doc_count_[static_cast<std::size_t>(n - 1)];
      for (const auto& key : present) ++m[key];
    }
  }
  return table;
}

double tfidf(const Caption& c, const std::string& ngram, int n,
             const NGramWeightTable& table) {
  const int total = ngram_total(c, n);
  if (total <= 0) return 0.0;
  int count = 0;
  const auto T = static_cast<int>(c.tokens.size());
  for (int i = 0; i + n <= T; ++i) {
    std::string key = c.tokens[static_cast<std::size_t>(i)];
    for (int j = 1; j < n; ++j) {
      key.push_back(' ');
      key += c.tokens[static_cast<std::size_t>(i + j)];
    }
    if (key == ngram) ++count;
  }
  if (count == 0) return 0.0;
  return (static_cast<double>(count) / static_cast<double>(total)) *
         table.idf(ngram, n);
}

std::vector<bool> select_fine_grained(const Caption& c,
                                      const NGramWeightTable& table,
                                      const LdConfig& cfg) {
  const auto T = c.tokens.size();
  std::vector<bool> covered(T, false);
  for (int n = 2; n <= kMaxNgramOrder; ++n) {
    for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= T; ++i) {
      std::string key = c.tokens[i];
      for (int j = 1; j < n; ++j) {
        key.push_back(' ');
        key += c.tokens[i + static_cast<std::size_t>(j)];
      }
      if (tfidf(c, key, n, table) > cfg.lambda) {
        for (int j = 0; j < n; ++j) covered[i + static_cast<std::size_t>(j)] = true;
      }
    }
  }
  std::vector<bool> flags(T, false);
  for (std::size_t t = 0; t < T; ++t) {
    if (!covered[t]) continue;
    if (tfidf(c, c.tokens[t], 1, table) > cfg.eta) flags[t] = true;
  }
  return flags;
}

}  // namespace gld
