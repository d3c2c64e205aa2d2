#include "gld/training.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "gld/errors.hpp"
#include "gld/evaluation.hpp"
#include "gld/io.hpp"

namespace gld {

std::string objective_name(Objective o) {
  switch (o) {
    case Objective::kMle: return "mle";
    case Objective::kCider: return "cider";
    case Objective::kGd: return "gd";
    case Objective::kLd: return "ld";
    case Objective::kLdDiff: return "ld_diff";
    case Objective::kGld: return "gld";
    case Objective::kStrengthen: return "strengthen";
  }
  return "?";
}

Objective parse_objective(const std::string& name) {
  for (Objective o : {Objective::kMle, Objective::kCider, Objective::kGd,
                      Objective::kLd, Objective::kLdDiff, Objective::kGld,
                      Objective::kStrengthen}) {
    if (objective_name(o) == name) return o;
  }
  throw ParseError("unknown objective '" + name + "'");
}

Adam::Adam(int n_params, AdamConfig cfg)
    : cfg_(cfg),
      m_(static_cast<std::size_t>(n_params), 0.0),
      v_(static_cast<std::size_t>(n_params), 0.0) {}

void Adam::step(std::vector<double>& params, const std::vector<double>& grad,
                double lr) {
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * grad[i];
    v_[i] = cfg_.beta2 * v_[i] + (1.0 - cfg_.beta2) * grad[i] * grad[i];
    const double mhat = m_[i] / bc1;
    const double vhat = v_[i] / bc2;
    params[i] -= lr * mhat / (std::sqrt(vhat) + cfg_.eps);
  }
}

namespace {

TraceSpec trace_spec_for(const TrainConfig& cfg) {
  TraceSpec spec;
  spec.gd = cfg.gd;
  spec.ld = cfg.ld;
  spec.cider_cfg = cfg.cider_cfg;
  switch (cfg.objective) {
    case Objective::kCider:
      spec.word_mode = WordRewardMode::kUniform;
      spec.use_gd = false;
      break;
    case Objective::kGd:
      spec.word_mode = WordRewardMode::kUniform;
      spec.use_gd = true;
      break;
    case Objective::kLd:
      spec.word_mode = WordRewardMode::kLocal;
      spec.use_gd = false;
      break;
    case Objective::kLdDiff:
      spec.word_mode = WordRewardMode::kLocalDiff;
      spec.use_gd = false;
      break;
    case Objective::kGld:
    case Objective::kStrengthen:
      spec.word_mode = WordRewardMode::kLocal;
      spec.use_gd = true;
      break;
    case Objective::kMle:
      throw ParseError("likelihood training has no reward trace");
  }
  return spec;
}

// Per-action rewards aligned with step_actions: one entry per word, plus the
// caption-level terms again for the stop action when present.
std::vector<double> step_rewards(const RewardTrace& trace, bool has_eos) {
  std::vector<double> out;
  out.reserve(trace.steps.size() + 1);
  for (const auto& s : trace.steps) out.push_back(s.total);
  if (has_eos) out.push_back(trace.r_c + trace.r_gd);
  return out;
}

}  // namespace

ReinforceStats reinforce_gradient(const ToyPolicy& policy, const ToyWorld& world,
                                  const std::vector<std::string>& image_ids,
                                  const TrainConfig& cfg,
                                  const NGramWeightTable& reward_table, Rng& rng,
                                  std::vector<double>& grad) {
  grad.assign(static_cast<std::size_t>(policy.n_params()), 0.0);
  const TraceSpec spec = trace_spec_for(cfg);
  const int M = std::max(1, cfg.samples_per_image);

  struct Item {
    std::string image_id;
    ToyPolicy::Sample sampled;
    Caption caption;
  };
  std::vector<Item> items;
  for (const auto& id : image_ids) {
    const auto& attrs = world.attributes(id);
    for (int m = 0; m < M; ++m) {
      Item item;
      item.image_id = id;
      item.sampled = policy.sample(attrs, rng);
      item.caption = policy.to_caption(item.sampled);
      items.push_back(std::move(item));
    }
  }

  std::vector<HardNegatives> negatives;
  if (spec.use_gd && spec.gd.use_minibatch && items.size() >= 2) {
    std::vector<BatchItem> batch;
    for (const auto& item : items) batch.push_back({item.image_id, item.caption});
    negatives = mine_hard_negatives(batch, world.store());
  }

  ReinforceStats stats;
  long advantage_terms = 0;
  const double inv_items = 1.0 / static_cast<double>(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& item = items[i];
    const auto& attrs = world.attributes(item.image_id);
    const auto& refs = world.corpus().find(item.image_id)->references;

    HardNegativePair pair;
    const HardNegativePair* pair_ptr = nullptr;
    if (!negatives.empty()) {
      pair.image_id = items[negatives[i].image_pos].image_id;
      pair.caption = items[negatives[i].caption_pos].caption;
      pair_ptr = &pair;
    }

    const RewardTrace sampled_trace =
        assemble(spec, item.image_id, item.caption, refs, reward_table,
                 &world.store(), &world.neighbors(), pair_ptr);
    const auto r_s = step_rewards(sampled_trace, item.sampled.ended_with_eos);

    std::vector<double> r_b;
    double baseline_total = 0;
    if (cfg.use_baseline) {
      const auto greedy = policy.greedy_decode(attrs);
      const RewardTrace baseline_trace =
          assemble(spec, item.image_id, policy.to_caption(greedy), refs,
                   reward_table, &world.store(), &world.neighbors(), pair_ptr);
      r_b = step_rewards(baseline_trace, greedy.ended_with_eos);
      baseline_total = baseline_trace.total_sum();
    }

    std::vector<double> coeffs(item.sampled.step_actions.size(), 0.0);
    for (std::size_t t = 0; t < coeffs.size(); ++t) {
      const double base =
          r_b.empty() ? 0.0 : (t < r_b.size() ? r_b[t] : r_b.back());
      const double adv = r_s[t] - base;
      coeffs[t] = -adv * inv_items;
      stats.mean_advantage_sq += adv * adv;
      ++advantage_terms;
    }
    policy.accumulate_sequence_grad(attrs, item.sampled, coeffs, grad);

    stats.mean_sample_reward += sampled_trace.total_sum() * inv_items;
    stats.mean_baseline_reward += baseline_total * inv_items;
  }
  if (advantage_terms > 0)
    stats.mean_advantage_sq /= static_cast<double>(advantage_terms);
  return stats;
}

TrainResult train(const ToyWorld& world, const TrainConfig& cfg) {
  if (cfg.batch_size < 1) throw ParseError("batch size must be at least 1");
  ToyPolicy policy = world.make_policy();
  Adam adam(policy.n_params());
  std::vector<std::string> train_ids;
  for (const auto* rec : world.corpus().split_images(Split::kTrain))
    train_ids.push_back(rec->id);

  const NGramWeightTable reward_table =
      cfg.objective == Objective::kStrengthen ? world.weights_with_base(2.0)
                                              : world.weights();

  TrainResult result{std::move(policy), {}};
  std::vector<double> grad;
  for (int epoch = 1; epoch <= cfg.total_epochs; ++epoch) {
    const bool mle_phase =
        cfg.objective == Objective::kMle || epoch <= cfg.mle_epochs;
    const double lr =
        cfg.lr * std::pow(cfg.lr_decay, (epoch - 1) / cfg.lr_decay_every);
    Rng rng(derive_seed(cfg.seed, 200, epoch));

    std::vector<std::string> order = train_ids;
    shuffle_in_place(order, rng);

    double objective_value = 0;
    long batches = 0;
    for (std::size_t lo = 0; lo < order.size(); lo += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t hi =
          std::min(order.size(), lo + static_cast<std::size_t>(cfg.batch_size));
      std::vector<std::string> batch(order.begin() + static_cast<std::ptrdiff_t>(lo),
                                     order.begin() + static_cast<std::ptrdiff_t>(hi));
      if (mle_phase) {
        grad.assign(static_cast<std::size_t>(result.policy.n_params()), 0.0);
        double ll = 0;
        const double inv = 1.0 / static_cast<double>(batch.size());
        for (const auto& id : batch) {
          const auto& refs = world.corpus().find(id)->references;
          const auto& ref = refs[rng.next_index(refs.size())];
          const auto& attrs = world.attributes(id);
          std::vector<int> ids;
          for (const auto& tok : ref.tokens)
            ids.push_back(result.policy.token_id(tok));
          ll += result.policy.log_prob(attrs, ids) * inv;
          int prev = -1;
          for (std::size_t pos = 0; pos < ids.size(); ++pos) {
            result.policy.accumulate_logprob_grad(attrs, prev, static_cast<int>(pos),
                                                  ids[pos], -inv, grad);
            prev = ids[pos];
          }
          if (static_cast<int>(ids.size()) < result.policy.max_len()) {
            result.policy.accumulate_logprob_grad(attrs, prev,
                                                  static_cast<int>(ids.size()),
                                                  result.policy.eos_id(), -inv,
                                                  grad);
          }
        }
        objective_value += ll;
      } else {
        const auto stats = reinforce_gradient(result.policy, world, batch, cfg,
                                              reward_table, rng, grad);
        objective_value += stats.mean_sample_reward;
      }
      adam.step(result.policy.theta(), grad, lr);
      ++batches;
    }

    EpochLog log;
    log.epoch = epoch;
    log.phase = mle_phase ? "mle" : "rl:" + objective_name(cfg.objective);
    log.objective_value = batches ? objective_value / static_cast<double>(batches) : 0;
    const auto eval =
        evaluate_policy(result.policy, world, Split::kVal, {}, cfg.cider_cfg);
    log.heldout_cider = eval.cider;
    log.unicap = eval.unicap;
    log.avglen = eval.avglen;
    result.log.push_back(log);
  }
  return result;
}

std::string log_to_csv(const std::vector<EpochLog>& log) {
  std::string out = "epoch,phase,objective_value,heldout_cider,unicap,avglen\n";
  for (const auto& e : log) {
    out += std::to_string(e.epoch);
    out.push_back(',');
    out += e.phase;
    out.push_back(',');
    out += format_double(e.objective_value);
    out.push_back(',');
    out += format_double(e.heldout_cider);
    out.push_back(',');
    out += format_double(e.unicap);
    out.push_back(',');
    out += format_double(e.avglen);
    out.push_back('\n');
  }
  return out;
}

std::string checkpoint_to_json(const ToyPolicy& policy,
                               const ToyWorldConfig& world_cfg,
                               const TrainConfig& cfg) {
  nlohmann::ordered_json j;
  j["format"] = "gld-toy-policy";
  j["version"] = 1;
  j["world"] = {{"seed", world_cfg.seed},
                {"n_train", world_cfg.n_train},
                {"n_val", world_cfg.n_val},
                {"n_test", world_cfg.n_test},
                {"rare_fraction", world_cfg.rare_fraction},
                {"min_refs", world_cfg.min_refs},
                {"max_refs", world_cfg.max_refs},
                {"scene_prob", world_cfg.scene_prob}};
  j["train"] = {{"objective", objective_name(cfg.objective)},
                {"seed", cfg.seed},
                {"batch_size", cfg.batch_size},
                {"lr", cfg.lr},
                {"lr_decay", cfg.lr_decay},
                {"lr_decay_every", cfg.lr_decay_every},
                {"mle_epochs", cfg.mle_epochs},
                {"total_epochs", cfg.total_epochs},
                {"samples_per_image", cfg.samples_per_image},
                {"beam_width", cfg.beam_width},
                {"epsilon", cfg.gd.epsilon},
                {"lambda", cfg.ld.lambda},
                {"eta", cfg.ld.eta}};
  j["vocab"] = policy.vocab();
  j["attr_dim"] = policy.attr_dim();
  j["max_len"] = policy.max_len();
  j["theta"] = policy.theta();
  return j.dump(2) + "\n";
}

Checkpoint checkpoint_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad checkpoint json: ") + e.what());
  }
  if (!j.is_object() || j.value("format", "") != "gld-toy-policy")
    throw ParseError("not a policy checkpoint");
  Checkpoint ck;
  try {
    const auto& w = j.at("world");
    ck.world_cfg.seed = w.at("seed").get<uint64_t>();
    ck.world_cfg.n_train = w.at("n_train").get<int>();
    ck.world_cfg.n_val = w.at("n_val").get<int>();
    ck.world_cfg.n_test = w.at("n_test").get<int>();
    ck.world_cfg.rare_fraction = w.at("rare_fraction").get<double>();
    ck.world_cfg.min_refs = w.at("min_refs").get<int>();
    ck.world_cfg.max_refs = w.at("max_refs").get<int>();
    ck.world_cfg.scene_prob = w.at("scene_prob").get<double>();
    const auto& t = j.at("train");
    ck.train_cfg.objective = parse_objective(t.at("objective").get<std::string>());
    ck.train_cfg.seed = t.at("seed").get<uint64_t>();
    ck.train_cfg.batch_size = t.at("batch_size").get<int>();
    ck.train_cfg.lr = t.at("lr").get<double>();
    ck.train_cfg.lr_decay = t.at("lr_decay").get<double>();
    ck.train_cfg.lr_decay_every = t.at("lr_decay_every").get<int>();
    ck.train_cfg.mle_epochs = t.at("mle_epochs").get<int>();
    ck.train_cfg.total_epochs = t.at("total_epochs").get<int>();
    ck.train_cfg.samples_per_image = t.at("samples_per_image").get<int>();
    ck.train_cfg.beam_width = t.at("beam_width").get<int>();
    ck.train_cfg.gd.epsilon = t.at("epsilon").get<double>();
    ck.train_cfg.ld.lambda = t.at("lambda").get<double>();
    ck.train_cfg.ld.eta = t.at("eta").get<double>();
    ck.vocab = j.at("vocab").get<std::vector<std::string>>();
    ck.attr_dim = j.at("attr_dim").get<int>();
    ck.max_len = j.at("max_len").get<int>();
    ck.theta = j.at("theta").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("incomplete checkpoint: ") + e.what());
  }
  const auto expected = static_cast<std::size_t>(ck.vocab.size() + 1) *
                        static_cast<std::size_t>(ck.attr_dim + static_cast<int>(ck.vocab.size()) + 1 +
                                                 ck.max_len);
  if (ck.theta.size() != expected)
    throw ParseError("parameter count does not match the declared shape");
  return ck;
}

}  // namespace gld
