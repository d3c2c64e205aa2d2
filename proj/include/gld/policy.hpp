#pragma once

#include <string>
#include <vector>

#include "gld/corpus.hpp"
#include "gld/rng.hpp"

namespace gld {

// Linear-softmax word policy over a small closed vocabulary. Features for a
// step are the image attribute vector, a one-hot of the previous token (with
// a dedicated begin slot), and a one-hot of the position. Token id V is the
// end-of-sequence action; it is masked out at position 0 so every caption has
// at least one word.
class ToyPolicy {
 public:
  ToyPolicy(std::vector<std::string> vocab, int attr_dim, int max_len);

  int vocab_size() const { return static_cast<int>(vocab_.size()); }
  int eos_id() const { return vocab_size(); }
  int attr_dim() const { return attr_dim_; }
  int max_len() const { return max_len_; }
  int feature_dim() const { return feature_dim_; }
  int n_params() const { return static_cast<int>(theta_.size()); }
  const std::vector<std::string>& vocab() const { return vocab_; }

  const std::vector<double>& theta() const { return theta_; }
  std::vector<double>& theta() { return theta_; }

  int token_id(const std::string& word) const;  // throws UnknownToken
  const std::string& token(int id) const;

  // Step distribution over vocab_size()+1 actions. prev_id -1 means the
  // begin slot; pos counts emitted words so far.
  std::vector<double> step_probs(const std::vector<double>& attrs, int prev_id,
                                 int pos) const;

  // Adds coeff * d(log p(action | attrs, prev, pos))/d(theta) into grad.
  void accumulate_logprob_grad(const std::vector<double>& attrs, int prev_id,
                               int pos, int action, double coeff,
                               std::vector<double>& grad) const;

  struct Sample {
    std::vector<int> token_ids;     // words only, EOS excluded
    std::vector<int> step_actions;  // every action taken, EOS included
    std::vector<double> step_logps;
    bool ended_with_eos = false;
  };

  Sample sample(const std::vector<double>& attrs, Rng& rng) const;
  Sample greedy_decode(const std::vector<double>& attrs) const;
  // Width-k beam search over total log-probability. The greedy sequence is
  // always kept as a candidate, so the result never scores below it.
  Sample beam_decode(const std::vector<double>& attrs, int beam_width) const;

  // Total log-probability of emitting exactly these words then stopping
  // (EOS if the sequence is shorter than max_len()).
  double log_prob(const std::vector<double>& attrs,
                  const std::vector<int>& token_ids) const;

  // Rebuilds the per-step log-probs for a recorded action sequence.
  Sample replay(const std::vector<double>& attrs,
                const std::vector<int>& step_actions) const;

  // Adds coeff_t * grad log p(a_t | ...) for each step into grad.
  void accumulate_sequence_grad(const std::vector<double>& attrs,
                                const Sample& s,
                                const std::vector<double>& step_coeffs,
                                std::vector<double>& grad) const;

  Caption to_caption(const Sample& s) const;

  // All action sequences with at most max_words words, paired with their
  // exact probabilities. Feasible only for tiny vocabularies.
  struct Outcome {
    std::vector<int> token_ids;
    double prob = 0;
  };
  std::vector<Outcome> enumerate(const std::vector<double>& attrs,
                                 int max_words) const;

 private:
  int feature_index_prev(int prev_id) const;
  int feature_index_pos(int pos) const;
  void fill_features(const std::vector<double>& attrs, int prev_id, int pos,
                     std::vector<double>& x) const;

  std::vector<std::string> vocab_;
  int attr_dim_ = 0;
  int max_len_ = 0;
  int feature_dim_ = 0;
  std::vector<double> theta_;  // (vocab+1) x feature_dim, row-major
};

}  // namespace gld
