#include "gld/evaluation.hpp"

#include <algorithm>
#include <cmath>

#include "gld/errors.hpp"
#include "gld/io.hpp"

namespace gld {

RetrievalResult self_retrieval(const ToyPolicy& policy, const ToyWorld& world,
                               const std::vector<std::string>& image_ids,
                               const std::vector<Caption>& captions,
                               const std::vector<int>& ks) {
  if (image_ids.size() != captions.size())
    throw ParseError("retrieval needs one caption per image");
  const std::size_t n = image_ids.size();
  RetrievalResult result;
  result.ranks.assign(n, 1);
  if (n == 0) return result;

  std::vector<std::vector<int>> token_ids(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& tok : captions[i].tokens)
      token_ids[i].push_back(policy.token_id(tok));
  }

  // scores[i][j] = log p(caption i | image j)
  std::vector<std::vector<double>> scores(n, std::vector<double>(n, 0.0));
  parallel_for(n, [&](std::size_t i) {
    for (std::size_t j = 0; j < n; ++j) {
      scores[i][j] = policy.log_prob(world.attributes(image_ids[j]), token_ids[i]);
    }
  });

  for (std::size_t i = 0; i < n; ++i) {
    int rank = 1;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i && scores[i][j] >= scores[i][i]) ++rank;
    }
    result.ranks[i] = rank;
  }
  for (int k : ks) {
    long hits = 0;
    for (int r : result.ranks) {
      if (r <= k) ++hits;
    }
    result.recall_at[k] = static_cast<double>(hits) / static_cast<double>(n);
  }
  return result;
}

EvalSummary evaluate_policy(const ToyPolicy& policy, const ToyWorld& world,
                            Split split, const std::vector<int>& ks,
                            const CiderConfig& cider_cfg) {
  EvalSummary out;
  const auto images = world.corpus().split_images(split);
  if (images.empty()) return out;

  std::vector<std::string> ids;
  std::vector<Caption> captions;
  ids.reserve(images.size());
  captions.reserve(images.size());
  for (const auto* rec : images) {
    ids.push_back(rec->id);
    captions.push_back(
        policy.to_caption(policy.greedy_decode(world.attributes(rec->id))));
  }

  const double inv = 1.0 / static_cast<double>(images.size());
  for (std::size_t i = 0; i < images.size(); ++i) {
    const auto& refs = images[i]->references;
    out.cider += cider(captions[i], refs, world.weights(), cider_cfg) * inv;
    const auto b = bleu(captions[i], refs);
    for (std::size_t k = 0; k < 4; ++k) out.bleu[k] += b[k] * inv;
    out.rouge_l += rouge_l(captions[i], refs) * inv;
  }
  const auto fg = fine_granularity(captions);
  out.unicap = static_cast<double>(fg.unicap);
  out.avglen = fg.avglen;
  if (!ks.empty()) {
    const auto retrieval = self_retrieval(policy, world, ids, captions, ks);
    out.recall_at = retrieval.recall_at;
  }
  return out;
}

namespace {

std::vector<std::pair<std::string, double>> metric_values(
    const EvalSummary& s, const std::vector<int>& ks) {
  std::vector<std::pair<std::string, double>> out = {
      {"cider", s.cider},   {"bleu4", s.bleu[3]}, {"rouge_l", s.rouge_l},
      {"unicap", s.unicap}, {"avglen", s.avglen}};
  for (int k : ks) {
    auto it = s.recall_at.find(k);
    out.emplace_back("r@" + std::to_string(k),
                     it == s.recall_at.end() ? 0.0 : it->second);
  }
  return out;
}

}  // namespace

std::string CompareReport::runs_csv() const {
  std::vector<int> ks;
  if (!runs.empty()) {
    for (const auto& [k, v] : runs[0].summary.recall_at) ks.push_back(k);
  }
  std::string out = "objective,seed";
  if (!runs.empty()) {
    for (const auto& [name, v] : metric_values(runs[0].summary, ks))
      out += "," + name;
  }
  out.push_back('\n');
  for (const auto& run : runs) {
    out += objective_name(run.objective);
    out.push_back(',');
    out += std::to_string(run.seed);
    for (const auto& [name, v] : metric_values(run.summary, ks)) {
      out.push_back(',');
      out += format_double(v);
    }
    out.push_back('\n');
  }
  return out;
}

std::string CompareReport::summary_csv() const {
  std::vector<int> ks;
  if (!runs.empty()) {
    for (const auto& [k, v] : runs[0].summary.recall_at) ks.push_back(k);
  }
  std::string out = "objective";
  if (!runs.empty()) {
    for (const auto& [name, v] : metric_values(runs[0].summary, ks))
      out += "," + name + "_mean," + name + "_sd";
  }
  out.push_back('\n');
  const std::size_t block = seeds.size();
  for (std::size_t oi = 0; oi < objectives.size(); ++oi) {
    std::vector<std::vector<double>> cols;
    for (std::size_t si = 0; si < block; ++si) {
      const auto& run = runs[oi * block + si];
      const auto vals = metric_values(run.summary, ks);
      if (cols.empty()) cols.resize(vals.size());
      for (std::size_t i = 0; i < vals.size(); ++i)
        cols[i].push_back(vals[i].second);
    }
    out += objective_name(objectives[oi]);
    for (const auto& col : cols) {
      const double n = static_cast<double>(col.size());
      double mean = 0;
      for (double v : col) mean += v / n;
      double var = 0;
      for (double v : col) var += (v - mean) * (v - mean);
      const double sd = col.size() > 1 ? std::sqrt(var / (n - 1)) : 0.0;
      out.push_back(',');
      out += format_double(mean);
      out.push_back(',');
      out += format_double(sd);
    }
    out.push_back('\n');
  }
  return out;
}

CompareReport compare_objectives(const CompareConfig& cfg) {
  if (cfg.objectives.size() < 2)
    throw ParseError("comparison needs at least two objectives");
  if (cfg.seeds.size() < 3) throw ParseError("comparison needs at least three seeds");
  CompareReport report;
  report.objectives = cfg.objectives;
  report.seeds = cfg.seeds;
  const ToyWorld world(cfg.world);
  for (Objective o : cfg.objectives) {
    for (uint64_t seed : cfg.seeds) {
      TrainConfig tc = cfg.train;
      tc.objective = o;
      tc.seed = seed;
      CompareRun run;
      run.objective = o;
      run.seed = seed;
      try {
        auto trained = train(world, tc);
        run.summary = evaluate_policy(trained.policy, world, Split::kTest,
                                      cfg.ks, tc.cider_cfg);
        run.log = std::move(trained.log);
      } catch (const Error& e) {
        throw Error(e.kind(), "objective " + objective_name(o) + ", seed " +
                                  std::to_string(seed) + ": " + e.what());
      }
      report.runs.push_back(std::move(run));
    }
  }
  return report;
}

std::vector<SweepRow> lambda_sweep(const ToyWorld& world,
                                   const std::vector<double>& lambdas,
                                   double eta, const CiderConfig& cider_cfg) {
  std::vector<SweepRow> rows;
  const auto train_images = world.corpus().split_images(Split::kTrain);
  for (double lambda : lambdas) {
    LdConfig cfg;
    cfg.lambda = lambda;
    cfg.eta = eta;
    SweepRow row;
    row.lambda = lambda;
    row.eta = eta;
    long words = 0, flagged = 0;
    double inc_sum = 0, reward_sum = 0;
    for (const auto* img : train_images) {
      for (const auto& ref : img->references) {
        const auto flags = select_fine_grained(ref, world.weights(), cfg);
        const auto incs = ld_increments(ref, img->references, world.weights(), cfg);
        const double r_c = cider(ref, img->references, world.weights(), cider_cfg);
        for (std::size_t t = 0; t < flags.size(); ++t) {
          ++words;
          if (flags[t]) ++flagged;
          inc_sum += incs[t];
          reward_sum += r_c + incs[t];
        }
      }
    }
    if (words > 0) {
      row.flagged_fraction =
          static_cast<double>(flagged) / static_cast<double>(words);
      row.mean_increment = inc_sum / static_cast<double>(words);
      row.mean_word_reward = reward_sum / static_cast<double>(words);
    }
    rows.push_back(row);
  }
  return rows;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::string out = "lambda,eta,flagged_fraction,mean_increment,mean_word_reward\n";
  for (const auto& r : rows) {
    out += format_double(r.lambda);
    out.push_back(',');
    out += format_double(r.eta);
    out.push_back(',');
    out += format_double(r.flagged_fraction);
    out.push_back(',');
    out += format_double(r.mean_increment);
    out.push_back(',');
    out += format_double(r.mean_word_reward);
    out.push_back('\n');
  }
  return out;
}

}  // namespace gld
