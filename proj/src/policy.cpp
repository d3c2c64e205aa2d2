#include "gld/policy.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "gld/errors.hpp"

namespace gld {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

ToyPolicy::ToyPolicy(std::vector<std::string> vocab, int attr_dim, int max_len)
    : vocab_(std::move(vocab)), attr_dim_(attr_dim), max_len_(max_len) {
  if (vocab_.empty()) throw ParseError("policy vocabulary is empty");
  if (attr_dim_ <= 0) throw ParseError("attribute dimension must be positive");
  if (max_len_ <= 0) throw ParseError("max length must be positive");
  feature_dim_ = attr_dim_ + (vocab_size() + 1) + max_len_;
  theta_.assign(static_cast<std::size_t>(vocab_size() + 1) *
                    static_cast<std::size_t>(feature_dim_),
                0.0);
}

int ToyPolicy::token_id(const std::string& word) const {
  for (std::size_t i = 0; i < vocab_.size(); ++i) {
    if (vocab_[i] == word) return static_cast<int>(i);
  }
  throw UnknownToken("word '" + word + "' is not in the policy vocabulary");
}

const std::string& ToyPolicy::token(int id) const {
  if (id < 0 || id >= vocab_size())
    throw UnknownToken("token id " + std::to_string(id) + " out of range");
  return vocab_[static_cast<std::size_t>(id)];
}

int ToyPolicy::feature_index_prev(int prev_id) const {
  // slot vocab_size() is the begin marker
  const int slot = prev_id < 0 ? vocab_size() : prev_id;
  return attr_dim_ + slot;
}

int ToyPolicy::feature_index_pos(int pos) const {
  return attr_dim_ + vocab_size() + 1 + pos;
}

void ToyPolicy::fill_features(const std::vector<double>& attrs, int prev_id,
                              int pos, std::vector<double>& x) const {
  x.assign(static_cast<std::size_t>(feature_dim_), 0.0);
  for (int i = 0; i < attr_dim_; ++i) x[static_cast<std::size_t>(i)] = attrs[static_cast<std::size_t>(i)];
  x[static_cast<std::size_t>(feature_index_prev(prev_id))] = 1.0;
  x[static_cast<std::size_t>(feature_index_pos(pos))] = 1.0;
}

std::vector<double> ToyPolicy::step_probs(const std::vector<double>& attrs,
                                          int prev_id, int pos) const {
  if (static_cast<int>(attrs.size()) != attr_dim_)
    throw ParseError("attribute vector has wrong dimension");
  if (pos < 0 || pos >= max_len_)
    throw TraceLengthError("step position " + std::to_string(pos) +
                           " out of range");
  std::vector<double> x;
  fill_features(attrs, prev_id, pos, x);
  const int n_actions = vocab_size() + 1;
  std::vector<double> logits(static_cast<std::size_t>(n_actions), 0.0);
  for (int a = 0; a < n_actions; ++a) {
    const double* row =
        theta_.data() + static_cast<std::size_t>(a) * static_cast<std::size_t>(feature_dim_);
    double z = 0;
    for (int f = 0; f < feature_dim_; ++f) z += row[f] * x[static_cast<std::size_t>(f)];
    logits[static_cast<std::size_t>(a)] = z;
  }
  if (pos == 0) logits[static_cast<std::size_t>(eos_id())] = kNegInf;
  double zmax = kNegInf;
  for (double z : logits) zmax = std::max(zmax, z);
  double denom = 0;
  std::vector<double> probs(logits.size(), 0.0);
  for (std::size_t a = 0; a < logits.size(); ++a) {
    if (logits[a] == kNegInf) continue;
    probs[a] = std::exp(logits[a] - zmax);
    denom += probs[a];
  }
  for (auto& p : probs) p /= denom;
  return probs;
}

void ToyPolicy::accumulate_logprob_grad(const std::vector<double>& attrs,
                                        int prev_id, int pos, int action,
                                        double coeff,
                                        std::vector<double>& grad) const {
  const auto probs = step_probs(attrs, prev_id, pos);
  std::vector<double> x;
  fill_features(attrs, prev_id, pos, x);
  const int n_actions = vocab_size() + 1;
  for (int a = 0; a < n_actions; ++a) {
    const double w = coeff * ((a == action ? 1.0 : 0.0) - probs[static_cast<std::size_t>(a)]);
    if (w == 0.0) continue;
    double* row =
        grad.data() + static_cast<std::size_t>(a) * static_cast<std::size_t>(feature_dim_);
    for (int f = 0; f < feature_dim_; ++f) row[f] += w * x[static_cast<std::size_t>(f)];
  }
}

ToyPolicy::Sample ToyPolicy::sample(const std::vector<double>& attrs,
                                    Rng& rng) const {
  Sample s;
  int prev = -1;
  for (int pos = 0; pos < max_len_; ++pos) {
    const auto probs = step_probs(attrs, prev, pos);
    const double u = rng.next_unit();
    double acc = 0;
    int action = static_cast<int>(probs.size()) - 1;
    for (std::size_t a = 0; a < probs.size(); ++a) {
      acc += probs[a];
      if (u < acc) {
        action = static_cast<int>(a);
        break;
      }
    }
    s.step_actions.push_back(action);
    s.step_logps.push_back(std::log(probs[static_cast<std::size_t>(action)]));
    if (action == eos_id()) {
      s.ended_with_eos = true;
      break;
    }
    s.token_ids.push_back(action);
    prev = action;
  }
  return s;
}

ToyPolicy::Sample ToyPolicy::greedy_decode(const std::vector<double>& attrs) const {
  Sample s;
  int prev = -1;
  for (int pos = 0; pos < max_len_; ++pos) {
    const auto probs = step_probs(attrs, prev, pos);
    int action = 0;
    for (std::size_t a = 1; a < probs.size(); ++a) {
      if (probs[a] > probs[static_cast<std::size_t>(action)]) action = static_cast<int>(a);
    }
    s.step_actions.push_back(action);
    s.step_logps.push_back(std::log(probs[static_cast<std::size_t>(action)]));
    if (action == eos_id()) {
      s.ended_with_eos = true;
      break;
    }
    s.token_ids.push_back(action);
    prev = action;
  }
  return s;
}

ToyPolicy::Sample ToyPolicy::beam_decode(const std::vector<double>& attrs,
                                         int beam_width) const {
  if (beam_width < 1) beam_width = 1;
  struct Beam {
    std::vector<int> tokens;
    double logp = 0;
    bool done = false;
    bool eos = false;
  };
  std::vector<Beam> beams{{}};
  for (int pos = 0; pos < max_len_; ++pos) {
    std::vector<Beam> next;
    bool expanded = false;
    for (const auto& b : beams) {
      if (b.done) {
        next.push_back(b);
        continue;
      }
      expanded = true;
      const int prev = b.tokens.empty() ? -1 : b.tokens.back();
      const auto probs = step_probs(attrs, prev, pos);
      for (std::size_t a = 0; a < probs.size(); ++a) {
        if (probs[a] <= 0.0) continue;
        Beam nb = b;
        nb.logp += std::log(probs[a]);
        if (static_cast<int>(a) == eos_id()) {
          nb.done = true;
          nb.eos = true;
        } else {
          nb.tokens.push_back(static_cast<int>(a));
        }
        next.push_back(std::move(nb));
      }
    }
    if (!expanded) break;
    std::sort(next.begin(), next.end(), [](const Beam& x, const Beam& y) {
      if (x.logp != y.logp) return x.logp > y.logp;
      return x.tokens < y.tokens;
    });
    if (static_cast<int>(next.size()) > beam_width) next.resize(static_cast<std::size_t>(beam_width));
    beams = std::move(next);
  }
  for (auto& b : beams) b.done = true;

  // The greedy rollout is kept as a floor candidate.
  const Sample greedy = greedy_decode(attrs);
  Beam gb;
  gb.tokens = greedy.token_ids;
  for (double lp : greedy.step_logps) gb.logp += lp;
  gb.done = true;
  gb.eos = greedy.ended_with_eos;
  beams.push_back(std::move(gb));

  const Beam* best = &beams[0];
  for (const auto& b : beams) {
    if (b.logp > best->logp ||
        (b.logp == best->logp && b.tokens < best->tokens)) {
      best = &b;
    }
  }

  Sample s;
  s.token_ids = best->tokens;
  int prev = -1;
  for (std::size_t pos = 0; pos < best->tokens.size(); ++pos) {
    const auto probs = step_probs(attrs, prev, static_cast<int>(pos));
    const int action = best->tokens[pos];
    s.step_actions.push_back(action);
    s.step_logps.push_back(std::log(probs[static_cast<std::size_t>(action)]));
    prev = action;
  }
  if (best->eos) {
    const auto probs = step_probs(attrs, prev, static_cast<int>(best->tokens.size()));
    s.step_actions.push_back(eos_id());
    s.step_logps.push_back(std::log(probs[static_cast<std::size_t>(eos_id())]));
    s.ended_with_eos = true;
  }
  return s;
}

double ToyPolicy::log_prob(const std::vector<double>& attrs,
                           const std::vector<int>& token_ids) const {
  if (static_cast<int>(token_ids.size()) > max_len_)
    throw TraceLengthError("sequence longer than the policy limit");
  double total = 0;
  int prev = -1;
  for (std::size_t pos = 0; pos < token_ids.size(); ++pos) {
    const int a = token_ids[pos];
    if (a < 0 || a >= vocab_size())
      throw UnknownToken("token id " + std::to_string(a) + " out of range");
    const auto probs = step_probs(attrs, prev, static_cast<int>(pos));
    total += std::log(probs[static_cast<std::size_t>(a)]);
    prev = a;
  }
  if (static_cast<int>(token_ids.size()) < max_len_) {
    const auto probs = step_probs(attrs, prev, static_cast<int>(token_ids.size()));
    total += std::log(probs[static_cast<std::size_t>(eos_id())]);
  }
  return total;
}

ToyPolicy::Sample ToyPolicy::replay(const std::vector<double>& attrs,
                                    const std::vector<int>& step_actions) const {
  Sample s;
  int prev = -1;
  for (std::size_t pos = 0; pos < step_actions.size(); ++pos) {
    if (static_cast<int>(pos) >= max_len_)
      throw TraceLengthError("recorded trace longer than the policy limit");
    const int a = step_actions[pos];
    const auto probs = step_probs(attrs, prev, static_cast<int>(pos));
    if (a < 0 || a > eos_id() || probs[static_cast<std::size_t>(a)] <= 0.0)
      throw UnknownToken("invalid recorded action " + std::to_string(a));
    s.step_actions.push_back(a);
    s.step_logps.push_back(std::log(probs[static_cast<std::size_t>(a)]));
    if (a == eos_id()) {
      if (pos + 1 != step_actions.size())
        throw TraceLengthError("actions continue past the stop symbol");
      s.ended_with_eos = true;
      break;
    }
    s.token_ids.push_back(a);
    prev = a;
  }
  return s;
}

void ToyPolicy::accumulate_sequence_grad(const std::vector<double>& attrs,
                                         const Sample& s,
                                         const std::vector<double>& step_coeffs,
                                         std::vector<double>& grad) const {
  if (step_coeffs.size() != s.step_actions.size())
    throw TraceLengthError("coefficient count does not match step count");
  int prev = -1;
  for (std::size_t pos = 0; pos < s.step_actions.size(); ++pos) {
    const int a = s.step_actions[pos];
    if (step_coeffs[pos] != 0.0) {
      accumulate_logprob_grad(attrs, prev, static_cast<int>(pos), a,
                              step_coeffs[pos], grad);
    }
    if (a != eos_id()) prev = a;
  }
}

Caption ToyPolicy::to_caption(const Sample& s) const {
  Caption c;
  for (int id : s.token_ids) c.tokens.push_back(token(id));
  c.raw = join_tokens(c.tokens);
  return c;
}

std::vector<ToyPolicy::Outcome> ToyPolicy::enumerate(
    const std::vector<double>& attrs, int max_words) const {
  max_words = std::min(max_words, max_len_);
  std::vector<Outcome> out;
  std::vector<int> tokens;
  // Depth-first expansion in action order keeps the listing deterministic.
  std::function<void(int, double)> expand = [&](int pos, double prob) {
    if (pos == max_words) {
      out.push_back({tokens, prob});
      return;
    }
    const int prev = tokens.empty() ? -1 : tokens.back();
    const auto probs = step_probs(attrs, prev, pos);
    const double p_eos = probs[static_cast<std::size_t>(eos_id())];
    if (p_eos > 0.0) out.push_back({tokens, prob * p_eos});
    for (int a = 0; a < vocab_size(); ++a) {
      const double p = probs[static_cast<std::size_t>(a)];
      if (p <= 0.0) continue;
      tokens.push_back(a);
      expand(pos + 1, prob * p);
      tokens.pop_back();
    }
  };
  expand(0, 1.0);
  return out;
}

}  // namespace gld
