#pragma once

// Brute-force reference implementations used only by tests. These deliberately
// avoid the library's data structures: n-grams are token vectors compared
// elementwise, counts come from linear scans, and gradients come from the
// softmax Jacobian with the product rule rather than the score-function form.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "gld/corpus.hpp"
#include "gld/policy.hpp"

namespace oracle {

using Tokens = std::vector<std::string>;
using RefSet = std::vector<Tokens>;     // references of one image
using RefPool = std::vector<RefSet>;    // all images

inline std::vector<Tokens> windows(const Tokens& toks, int n) {
  std::vector<Tokens> out;
  for (int i = 0; i + n <= static_cast<int>(toks.size()); ++i) {
    out.emplace_back(toks.begin() + i, toks.begin() + i + n);
  }
  return out;
}

inline int count_window(const Tokens& toks, const Tokens& gram) {
  int c = 0;
  for (const auto& w : windows(toks, static_cast<int>(gram.size()))) {
    if (w == gram) ++c;
  }
  return c;
}

inline int doc_frequency(const RefPool& pool, const Tokens& gram) {
  int df = 0;
  for (const auto& refs : pool) {
    bool present = false;
    for (const auto& ref : refs) {
      if (count_window(ref, gram) > 0) present = true;
    }
    if (present) ++df;
  }
  return df;
}

inline double idf(const RefPool& pool, const Tokens& gram, double log_base) {
  const double n = static_cast<double>(pool.size());
  const double df = static_cast<double>(std::max(1, doc_frequency(pool, gram)));
  return std::log(n / df) / std::log(log_base);
}

struct Term {
  Tokens gram;
  double weight = 0;
};

inline std::vector<Term> tfidf_vector(const Tokens& toks, int n,
                                      const RefPool& pool, double log_base) {
  std::vector<Term> terms;
  const auto ws = windows(toks, n);
  for (const auto& w : ws) {
    bool seen = false;
    for (const auto& t : terms) {
      if (t.gram == w) seen = true;
    }
    if (seen) continue;
    const double tf = static_cast<double>(count_window(toks, w)) /
                      static_cast<double>(ws.size());
    terms.push_back({w, tf * idf(pool, w, log_base)});
  }
  return terms;
}

inline double vec_norm(const std::vector<Term>& v) {
  double s = 0;
  for (const auto& t : v) s += t.weight * t.weight;
  return std::sqrt(s);
}

inline double find_weight(const std::vector<Term>& v, const Tokens& gram) {
  for (const auto& t : v) {
    if (t.gram == gram) return t.weight;
  }
  return 0.0;
}

inline double cider_d(const Tokens& cand, const RefSet& refs,
                      const RefPool& pool, double sigma, double scale,
                      bool clipped_with_penalty, double log_base = 2.718281828459045235) {
  double order_mean = 0;
  for (int n = 1; n <= 4; ++n) {
    const auto vc = tfidf_vector(cand, n, pool, log_base);
    const double nc = vec_norm(vc);
    double ref_sum = 0;
    for (const auto& ref : refs) {
      const auto vr = tfidf_vector(ref, n, pool, log_base);
      const double nr = vec_norm(vr);
      if (nc == 0.0 || nr == 0.0) continue;
      double num = 0;
      for (const auto& t : vc) {
        const double wr = find_weight(vr, t.gram);
        if (clipped_with_penalty) {
          num += std::min(t.weight, wr) * wr;
        } else {
          num += t.weight * wr;
        }
      }
      double sim = num / (nc * nr);
      if (clipped_with_penalty) {
        const double dl = static_cast<double>(cand.size()) -
                          static_cast<double>(ref.size());
        sim *= std::exp(-(dl * dl) / (2.0 * sigma * sigma));
      }
      ref_sum += sim;
    }
    order_mean += ref_sum / static_cast<double>(refs.size());
  }
  return scale * order_mean / 4.0;
}

// Word-level boosts: position t earns, for every phrase window of order 2..4
// covering it whose caption weight beats lambda, the clipped weight product
// against each reference, provided the word's own unigram weight beats eta.
inline std::vector<double> word_increments(const Tokens& cand, const RefSet& refs,
                                           const RefPool& pool, double lambda,
                                           double eta, bool average_refs,
                                           double log_base = 2.718281828459045235) {
  const int len = static_cast<int>(cand.size());
  std::vector<double> incs(cand.size(), 0.0);
  for (int t = 0; t < len; ++t) {
    const auto v1 = tfidf_vector(cand, 1, pool, log_base);
    if (find_weight(v1, {cand[static_cast<std::size_t>(t)]}) <= eta) continue;
    double total = 0;
    for (int n = 2; n <= 4; ++n) {
      const auto vc = tfidf_vector(cand, n, pool, log_base);
      const double nc = vec_norm(vc);
      for (int s = t - n + 1; s <= t; ++s) {
        if (s < 0 || s + n > len) continue;
        const Tokens gram(cand.begin() + s, cand.begin() + s + n);
        const double wc = find_weight(vc, gram);
        if (wc <= lambda) continue;
        double ref_sum = 0;
        for (const auto& ref : refs) {
          const auto vr = tfidf_vector(ref, n, pool, log_base);
          const double nr = vec_norm(vr);
          if (nc == 0.0 || nr == 0.0) continue;
          const double wr = find_weight(vr, gram);
          ref_sum += std::min(wc, wr) * wr / (nc * nr);
        }
        if (average_refs) ref_sum /= static_cast<double>(refs.size());
        total += ref_sum;
      }
    }
    incs[static_cast<std::size_t>(t)] = total;
  }
  return incs;
}

// d p(action | attrs, prev, pos) / d theta via the softmax Jacobian:
// dp_a/dz_b = p_a (1[a=b] - p_b), dz_b/dtheta[b][f] = x_f.
inline std::vector<double> step_prob_grad(const gld::ToyPolicy& policy,
                                          const std::vector<double>& attrs,
                                          int prev, int pos, int action) {
  const auto probs = policy.step_probs(attrs, prev, pos);
  const int F = policy.feature_dim();
  std::vector<double> x(static_cast<std::size_t>(F), 0.0);
  for (int i = 0; i < policy.attr_dim(); ++i) x[static_cast<std::size_t>(i)] = attrs[static_cast<std::size_t>(i)];
  const int prev_slot = prev < 0 ? policy.vocab_size() : prev;
  x[static_cast<std::size_t>(policy.attr_dim() + prev_slot)] = 1.0;
  x[static_cast<std::size_t>(policy.attr_dim() + policy.vocab_size() + 1 + pos)] = 1.0;

  std::vector<double> grad(static_cast<std::size_t>(policy.n_params()), 0.0);
  const double pa = probs[static_cast<std::size_t>(action)];
  for (int b = 0; b <= policy.vocab_size(); ++b) {
    const double jac = pa * ((b == action ? 1.0 : 0.0) - probs[static_cast<std::size_t>(b)]);
    for (int f = 0; f < F; ++f) {
      grad[static_cast<std::size_t>(b) * static_cast<std::size_t>(F) + static_cast<std::size_t>(f)] +=
          jac * x[static_cast<std::size_t>(f)];
    }
  }
  return grad;
}

// d p(sequence) / d theta by the product rule over per-step factors.
// token_ids are word actions; a terminating stop action is appended when the
// sequence is shorter than the policy limit.
inline std::vector<double> seq_prob_grad(const gld::ToyPolicy& policy,
                                         const std::vector<double>& attrs,
                                         const std::vector<int>& token_ids,
                                         double* prob_out = nullptr) {
  std::vector<int> actions = token_ids;
  if (static_cast<int>(token_ids.size()) < policy.max_len())
    actions.push_back(policy.eos_id());

  std::vector<double> step_p;
  int prev = -1;
  for (std::size_t pos = 0; pos < actions.size(); ++pos) {
    const auto probs = policy.step_probs(attrs, prev, static_cast<int>(pos));
    step_p.push_back(probs[static_cast<std::size_t>(actions[pos])]);
    if (actions[pos] != policy.eos_id()) prev = actions[pos];
  }

  std::vector<double> grad(static_cast<std::size_t>(policy.n_params()), 0.0);
  prev = -1;
  for (std::size_t t = 0; t < actions.size(); ++t) {
    double rest = 1.0;
    for (std::size_t s = 0; s < actions.size(); ++s) {
      if (s != t) rest *= step_p[s];
    }
    const auto g = step_prob_grad(policy, attrs, prev, static_cast<int>(t), actions[t]);
    for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += rest * g[i];
    if (actions[t] != policy.eos_id()) prev = actions[t];
  }
  if (prob_out) {
    double p = 1.0;
    for (double v : step_p) p *= v;
    *prob_out = p;
  }
  return grad;
}

// Pessimistic-tie ranks recovered from a full score matrix by sorting each row
// and locating the last slot holding the true image's score.
inline std::vector<int> ranks_from_matrix(
    const std::vector<std::vector<double>>& scores) {
  std::vector<int> ranks;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    std::vector<double> row = scores[i];
    std::sort(row.begin(), row.end(), std::greater<double>());
    int rank = 0;
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (row[j] == scores[i][i]) rank = static_cast<int>(j) + 1;
    }
    ranks.push_back(rank);
  }
  return ranks;
}

// Shared handcrafted corpus: four images, two short references each, chosen so
// document frequencies span 1..4 and one token ("zebra") is unique.
inline gld::Corpus fixture_corpus() {
  auto img = [](const std::string& id, gld::Split split,
                std::initializer_list<const char*> caps) {
    gld::ImageRecord rec;
    rec.id = id;
    rec.split = split;
    for (const char* c : caps) rec.references.push_back(gld::make_caption(c));
    return rec;
  };
  std::vector<gld::ImageRecord> images;
  images.push_back(img("img1", gld::Split::kTrain, {"a zebra stands", "the zebra"}));
  images.push_back(img("img2", gld::Split::kTrain, {"a dog runs", "the dog"}));
  images.push_back(img("img3", gld::Split::kTrain, {"a cat sits", "a red cat"}));
  images.push_back(img("img4", gld::Split::kTrain, {"a dog sleeps", "the red dog"}));
  return gld::make_corpus(std::move(images));
}

inline RefPool fixture_pool() {
  RefPool pool;
  for (const auto& img : fixture_corpus().images) {
    RefSet refs;
    for (const auto& ref : img.references) refs.push_back(ref.tokens);
    pool.push_back(refs);
  }
  return pool;
}

}  // namespace oracle
