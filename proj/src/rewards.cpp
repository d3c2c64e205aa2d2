#include "gld/rewards.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "gld/errors.hpp"
#include "gld/io.hpp"

namespace gld {

double reward_h(const std::string& image_id, const Caption& c,
                const EmbeddingStore& store, const NearestNeighborTable& nn,
                const GdConfig& cfg) {
  const double s_pos = similarity(image_id, c, store);
  const double s_neg = similarity(nn.nearest(image_id), c, store);
  return -std::max(0.0, cfg.epsilon + s_neg - s_pos);
}

double reward_b(const std::string& image_id, const Caption& c,
                const HardNegativePair& negatives, const EmbeddingStore& store,
                const GdConfig& cfg) {
  const double s_pos = similarity(image_id, c, store);
  const double s_neg_cap = similarity(image_id, negatives.caption, store);
  const double s_neg_img = similarity(negatives.image_id, c, store);
  return -std::max(0.0, cfg.epsilon + s_neg_cap - s_pos) -
         std::max(0.0, cfg.epsilon + s_neg_img - s_pos);
}

double reward_gd(const std::string& image_id, const Caption& c,
                 const EmbeddingStore& store, const NearestNeighborTable* nn,
                 const HardNegativePair* negatives, const GdConfig& cfg) {
  double r = 0;
  if (cfg.use_hardest_global && nn) r += reward_h(image_id, c, store, *nn, cfg);
  if (cfg.use_minibatch && negatives)
    r += reward_b(image_id, c, *negatives, store, cfg);
  return r;
}

namespace {

struct OrderVectors {
  std::unordered_map<std::string, double> weights;
  double norm = 0;
};

OrderVectors order_vectors(const Caption& c, int n,
                           const NGramWeightTable& table) {
  OrderVectors ov;
  const int total = ngram_total(c, n);
  if (total <= 0) return ov;
  double s = 0;
  for (const auto& [key, cnt] : ngram_counts(c, n)) {
    const double w = (static_cast<double>(cnt) / total) * table.idf(key, n);
    ov.weights.emplace(key, w);
    s += w * w;
  }
  ov.norm = std::sqrt(s);
  return ov;
}

}  // namespace

std::vector<double> ld_increments(const Caption& c,
                                  const std::vector<Caption>& refs,
                                  const NGramWeightTable& table,
                                  const LdConfig& cfg) {
  const auto T = c.tokens.size();
  std::vector<double> incs(T, 0.0);
  if (refs.empty() || std::isinf(cfg.lambda)) return incs;

  const auto flags = select_fine_grained(c, table, cfg);
  bool any = false;
  for (bool f : flags) any = any || f;
  if (!any) return incs;

  std::array<OrderVectors, kMaxNgramOrder + 1> cand;
  for (int n = 2; n <= kMaxNgramOrder; ++n)
    cand[static_cast<std::size_t>(n)] = order_vectors(c, n, table);
  std::vector<std::array<OrderVectors, kMaxNgramOrder + 1>> ref_vecs(refs.size());
  for (std::size_t j = 0; j < refs.size(); ++j) {
    for (int n = 2; n <= kMaxNgramOrder; ++n)
      ref_vecs[j][static_cast<std::size_t>(n)] =
          order_vectors(refs[j], n, table);
  }

  for (int n = 2; n <= kMaxNgramOrder; ++n) {
    const auto& cv = cand[static_cast<std::size_t>(n)];
    if (cv.norm == 0.0) continue;
    for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= T; ++i) {
      std::string key = c.tokens[i];
      for (int j = 1; j < n; ++j) {
        key.push_back(' ');
        key += c.tokens[i + static_cast<std::size_t>(j)];
      }
      auto wit = cv.weights.find(key);
      if (wit == cv.weights.end() || wit->second <= cfg.lambda) continue;
      double contrib = 0;
      for (const auto& rv_all : ref_vecs) {
        const auto& rv = rv_all[static_cast<std::size_t>(n)];
        if (rv.norm == 0.0) continue;
        auto rit = rv.weights.find(key);
        if (rit == rv.weights.end()) continue;
        contrib +=
            std::min(wit->second, rit->second) * rit->second / (cv.norm * rv.norm);
      }
      if (cfg.average_over_references)
        contrib /= static_cast<double>(refs.size());
      for (int j = 0; j < n; ++j) {
        const std::size_t t = i + static_cast<std::size_t>(j);
        if (flags[t]) incs[t] += contrib;
      }
    }
  }
  return incs;
}

std::vector<double> reward_ld(const Caption& c, const std::vector<Caption>& refs,
                              const NGramWeightTable& table, const LdConfig& cfg,
                              const CiderConfig& cider_cfg) {
  const double r_c = cider(c, refs, table, cider_cfg);
  const auto incs = ld_increments(c, refs, table, cfg);
  std::vector<double> out(c.tokens.size(), r_c);
  for (std::size_t t = 0; t < out.size(); ++t) out[t] = r_c + incs[t];
  return out;
}

std::vector<double> reward_ld_diff(const Caption& c,
                                   const std::vector<Caption>& refs,
                                   const NGramWeightTable& table,
                                   const CiderConfig& cider_cfg) {
  const double full = cider(c, refs, table, cider_cfg);
  std::vector<double> out(c.tokens.size(), 0.0);
  double prev_score = 0;
  Caption prefix;
  for (std::size_t t = 0; t < c.tokens.size(); ++t) {
    prefix.tokens.push_back(c.tokens[t]);
    const double score = cider(prefix, refs, table, cider_cfg);
    out[t] = score - prev_score + full;
    prev_score = score;
  }
  return out;
}

double RewardTrace::total_sum() const {
  double s = 0;
  for (const auto& step : steps) s += step.total;
  return s;
}

std::string RewardTrace::to_csv() const {
  std::string out = "t,word,r_c,ld_increment,r_gd,total\n";
  for (std::size_t t = 0; t < steps.size(); ++t) {
    const auto& s = steps[t];
    out += std::to_string(t + 1);
    out.push_back(',');
    out += s.word;
    out.push_back(',');
    out += format_double(s.r_c);
    out.push_back(',');
    out += format_double(s.ld_increment);
    out.push_back(',');
    out += format_double(s.r_gd);
    out.push_back(',');
    out += format_double(s.total);
    out.push_back('\n');
  }
  return out;
}

RewardTrace assemble(const TraceSpec& spec, const std::string& image_id,
                     const Caption& sampled, const std::vector<Caption>& refs,
                     const NGramWeightTable& table, const EmbeddingStore* store,
                     const NearestNeighborTable* nn,
                     const HardNegativePair* negatives) {
  RewardTrace trace;
  trace.r_c = cider(sampled, refs, table, spec.cider_cfg);
  if (spec.use_gd) {
    if (!store)
      throw MissingEmbedding("ranking rewards require an embedding store");
    if (spec.gd.use_hardest_global && nn)
      trace.r_h = reward_h(image_id, sampled, *store, *nn, spec.gd);
    if (spec.gd.use_minibatch && negatives)
      trace.r_b = reward_b(image_id, sampled, *negatives, *store, spec.gd);
    trace.r_gd = trace.r_h + trace.r_b;
  }

  std::vector<double> word_extra(sampled.tokens.size(), 0.0);
  if (spec.word_mode == WordRewardMode::kLocal) {
    word_extra = ld_increments(sampled, refs, table, spec.ld);
  } else if (spec.word_mode == WordRewardMode::kLocalDiff) {
    const auto words = reward_ld_diff(sampled, refs, table, spec.cider_cfg);
    for (std::size_t t = 0; t < words.size(); ++t)
      word_extra[t] = words[t] - trace.r_c;
  }

  trace.steps.resize(sampled.tokens.size());
  for (std::size_t t = 0; t < sampled.tokens.size(); ++t) {
    auto& step = trace.steps[t];
    step.word = sampled.tokens[t];
    step.r_c = trace.r_c;
    step.ld_increment = word_extra[t];
    step.r_gd = trace.r_gd;
    step.total = step.r_c + step.ld_increment + step.r_gd;
  }
  return trace;
}

}  // namespace gld
