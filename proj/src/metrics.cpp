#include "gld/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

#include "gld/errors.hpp"
#include "gld/io.hpp"

namespace gld {

namespace {

// Order-n TF-IDF weight vector of a caption, keyed by n-gram.
std::unordered_map<std::string, double> weight_vector(
    const Caption& c, int n, const NGramWeightTable& table) {
  std::unordered_map<std::string, double> w;
  const int total = ngram_total(c, n);
  if (total <= 0) return w;
  for (const auto& [key, cnt] : ngram_counts(c, n)) {
    w.emplace(key, (static_cast<double>(cnt) / total) * table.idf(key, n));
  }
  return w;
}

double vector_norm(const std::unordered_map<std::string, double>& w) {
  double s = 0;
  for (const auto& [key, v] : w) s += v * v;
  return std::sqrt(s);
}

}  // namespace

double cider(const Caption& c, const std::vector<Caption>& refs,
             const NGramWeightTable& table, const CiderConfig& cfg) {
  if (refs.empty()) return 0.0;
  double total = 0;
  for (int n = 1; n <= kMaxNgramOrder; ++n) {
    const auto wc = weight_vector(c, n, table);
    const double nc = vector_norm(wc);
    double order_sum = 0;
    for (const auto& ref : refs) {
      const auto wr = weight_vector(ref, n, table);
      const double nr = vector_norm(wr);
      if (nc == 0.0 || nr == 0.0) continue;
      double num = 0;
      for (const auto& [key, v] : wc) {
        auto it = wr.find(key);
        if (it == wr.end()) continue;
        if (cfg.variant == CiderVariant::kCiderD) {
          num += std::min(v, it->second) * it->second;
        } else {
          num += v * it->second;
        }
      }
      double sim = num / (nc * nr);
      if (cfg.variant == CiderVariant::kCiderD) {
        const double dl =
            static_cast<double>(c.length()) - static_cast<double>(ref.length());
        sim *= std::exp(-(dl * dl) / (2.0 * cfg.sigma * cfg.sigma));
      }
      order_sum += sim;
    }
    total += order_sum / static_cast<double>(refs.size());
  }
  return cfg.scale * total / static_cast<double>(kMaxNgramOrder);
}

std::array<double, 4> bleu(const Caption& c, const std::vector<Caption>& refs) {
  std::array<double, 4> out{};
  if (refs.empty() || c.length() == 0) return out;

  // brevity penalty against the closest reference length (ties toward shorter)
  const auto clen = static_cast<long>(c.length());
  long rlen = static_cast<long>(refs[0].length());
  for (const auto& ref : refs) {
    const auto l = static_cast<long>(ref.length());
    const long d0 = std::labs(l - clen);
    const long d1 = std::labs(rlen - clen);
    if (d0 < d1 || (d0 == d1 && l < rlen)) rlen = l;
  }
  const double bp =
      clen >= rlen ? 1.0
                   : std::exp(1.0 - static_cast<double>(rlen) / clen);

  std::array<double, 4> precision{};
  for (int n = 1; n <= 4; ++n) {
    const auto counts = ngram_counts(c, n);
    const int total = ngram_total(c, n);
    if (total <= 0) {
      precision[static_cast<std::size_t>(n - 1)] = 0;
      continue;
    }
    std::unordered_map<std::string, int> max_ref;
    for (const auto& ref : refs) {
      for (const auto& [key, cnt] : ngram_counts(ref, n)) {
        auto& slot = max_ref[key];
        slot = std::max(slot, cnt);
      }
    }
    int clipped = 0;
    for (const auto& [key, cnt] : counts) {
      auto it = max_ref.find(key);
      if (it != max_ref.end()) clipped += std::min(cnt, it->second);
    }
    precision[static_cast<std::size_t>(n - 1)] =
        static_cast<double>(clipped) / total;
  }

  for (int k = 1; k <= 4; ++k) {
    double logsum = 0;
    bool zero = false;
    for (int i = 0; i < k; ++i) {
      const double p = precision[static_cast<std::size_t>(i)];
      if (p <= 0) {
        zero = true;
        break;
      }
      logsum += std::log(p);
    }
    out[static_cast<std::size_t>(k - 1)] =
        zero ? 0.0 : bp * std::exp(logsum / k);
  }
  return out;
}

namespace {

std::size_t lcs_length(const std::vector<std::string>& a,
                       const std::vector<std::string>& b) {
  const std::size_t na = a.size(), nb = b.size();
  std::vector<std::size_t> prev(nb + 1, 0), cur(nb + 1, 0);
  for (std::size_t i = 1; i <= na; ++i) {
    for (std::size_t j = 1; j <= nb; ++j) {
      if (a[i - 1] == b[j - 1]) {
        cur[j] = prev[j - 1] + 1;
      } else {
        cur[j] = std::max(prev[j], cur[j - 1]);
      }
    }
    std::swap(prev, cur);
  }
  return prev[nb];
}

}  // namespace

double rouge_l(const Caption& c, const std::vector<Caption>& refs) {
  if (refs.empty() || c.length() == 0) return 0.0;
  const double beta = 1.2;
  double pmax = 0, rmax = 0;
  for (const auto& ref : refs) {
    if (ref.length() == 0) continue;
    const auto lcs = static_cast<double>(lcs_length(c.tokens, ref.tokens));
    pmax = std::max(pmax, lcs / static_cast<double>(c.length()));
    rmax = std::max(rmax, lcs / static_cast<double>(ref.length()));
  }
  if (pmax == 0.0 || rmax == 0.0) return 0.0;
  return (1 + beta * beta) * pmax * rmax / (rmax + beta * beta * pmax);
}

FineGranularity fine_granularity(const std::vector<Caption>& captions) {
  FineGranularity fg;
  std::set<std::vector<std::string>> distinct;
  double len_sum = 0;
  for (const auto& c : captions) {
    distinct.insert(c.tokens);
    len_sum += static_cast<double>(c.length());
  }
  fg.unicap = static_cast<long>(distinct.size());
  fg.avglen = captions.empty() ? 0.0 : len_sum / captions.size();
  return fg;
}

std::string MetricReport::to_csv() const {
  std::string out = "id,cider,bleu1,bleu2,bleu3,bleu4,rouge_l\n";
  auto row = [&out](const ImageScores& s) {
    out += s.id;
    out.push_back(',');
    out += format_double(s.cider);
    for (double b : s.bleu) {
      out.push_back(',');
      out += format_double(b);
    }
    out.push_back(',');
    out += format_double(s.rouge_l);
    out.push_back('\n');
  };
  for (const auto& s : per_image) row(s);
  row(mean);
  return out;
}

MetricReport score_candidates(
    const Corpus& corpus,
    const std::vector<std::pair<std::string, Caption>>& candidates,
    const NGramWeightTable& table, const CiderConfig& cfg) {
  MetricReport report;
  report.mean.id = "mean";
  for (const auto& [id, cand] : candidates) {
    const ImageRecord* img = corpus.find(id);
    if (!img) throw ParseError("unknown image id '" + id + "'");
    ImageScores s;
    s.id = id;
    s.cider = cider(cand, img->references, table, cfg);
    s.bleu = bleu(cand, img->references);
    s.rouge_l = rouge_l(cand, img->references);
    report.per_image.push_back(std::move(s));
  }
  if (!report.per_image.empty()) {
    const auto n = static_cast<double>(report.per_image.size());
    for (const auto& s : report.per_image) {
      report.mean.cider += s.cider / n;
      for (std::size_t i = 0; i < 4; ++i) report.mean.bleu[i] += s.bleu[i] / n;
      report.mean.rouge_l += s.rouge_l / n;
    }
  }
  return report;
}

}  // namespace gld
