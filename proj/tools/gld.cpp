// Command-line front end: dataset ingestion, weight tables, scoring, reward
// traces, neighbor tables, toy training, evaluation, and objective comparison.
// Every subcommand is a pure function of its inputs, flags, and seed; a run
// manifest with input digests is written before any other output.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gld/corpus.hpp"
#include "gld/embedding.hpp"
#include "gld/errors.hpp"
#include "gld/evaluation.hpp"
#include "gld/io.hpp"
#include "gld/manifest.hpp"
#include "gld/metrics.hpp"
#include "gld/ngram_stats.hpp"
#include "gld/rewards.hpp"
#include "gld/svg.hpp"
#include "gld/toy_world.hpp"
#include "gld/training.hpp"

namespace fs = std::filesystem;

namespace {

gld::Corpus subcorpus(const gld::Corpus& corpus, gld::Split split) {
  std::vector<gld::ImageRecord> records;
  for (const auto* rec : corpus.split_images(split)) records.push_back(*rec);
  if (records.empty())
    throw gld::ParseError("dataset has no '" + gld::to_string(split) + "' images");
  return gld::make_corpus(std::move(records));
}

double parse_log_base(const std::string& s) {
  if (s == "e") return gld::kEulerBase;
  double base = 0;
  try {
    base = std::stod(s);
  } catch (const std::exception&) {
    throw gld::ParseError("log base must be 'e' or a number, got '" + s + "'");
  }
  if (!(base > 0) || base == 1.0)
    throw gld::ParseError("log base must be positive and not 1");
  return base;
}

std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto pos = s.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(s.substr(start));
      break;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::vector<int> parse_ks(const std::string& s) {
  std::vector<int> ks;
  for (const auto& part : split_on(s, ',')) {
    if (part.empty()) continue;
    int k = 0;
    try {
      k = std::stoi(part);
    } catch (const std::exception&) {
      throw gld::ParseError("bad recall cutoff '" + part + "'");
    }
    if (k < 1) throw gld::ParseError("recall cutoffs must be at least 1");
    ks.push_back(k);
  }
  if (ks.empty()) throw gld::ParseError("no recall cutoffs given");
  return ks;
}

std::vector<uint64_t> parse_seeds(const std::string& s) {
  std::vector<uint64_t> seeds;
  for (const auto& part : split_on(s, ',')) {
    if (part.empty()) continue;
    try {
      seeds.push_back(std::stoull(part));
    } catch (const std::exception&) {
      throw gld::ParseError("bad seed '" + part + "'");
    }
  }
  return seeds;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  const std::string text = gld::read_file(path.string());
  std::vector<std::vector<std::string>> rows;
  for (const auto& line : split_on(text, '\n')) {
    if (line.empty()) continue;
    rows.push_back(split_on(line, ','));
  }
  return rows;
}

gld::WordRewardMode parse_mode(const std::string& s) {
  if (s == "uniform") return gld::WordRewardMode::kUniform;
  if (s == "local") return gld::WordRewardMode::kLocal;
  if (s == "local_diff") return gld::WordRewardMode::kLocalDiff;
  throw gld::ParseError("mode must be uniform, local, or local_diff");
}

// ---- ingest ----------------------------------------------------------------

struct IngestOpts {
  std::string dataset;
  std::string out_dir;
};

void run_ingest(const IngestOpts& opt) {
  const gld::Corpus corpus = gld::load_dataset(opt.dataset);

  gld::RunManifest manifest;
  manifest.command = "ingest";
  manifest.set("dataset", opt.dataset);
  manifest.set("out_dir", opt.out_dir);
  manifest.add_input(opt.dataset);
  manifest.write((fs::path(opt.out_dir) / "manifest.json").string());

  nlohmann::ordered_json images = nlohmann::ordered_json::array();
  for (const auto& rec : corpus.images) {
    nlohmann::ordered_json captions = nlohmann::ordered_json::array();
    for (const auto& ref : rec.references)
      captions.push_back(gld::join_tokens(ref.tokens));
    images.push_back({{"id", rec.id},
                      {"split", gld::to_string(rec.split)},
                      {"captions", std::move(captions)}});
  }
  nlohmann::ordered_json root;
  root["images"] = std::move(images);
  gld::write_file_atomic((fs::path(opt.out_dir) / "normalized.json").string(),
                         root.dump(2) + "\n");

  std::string stats = "split,images,references,tokens,vocab\n";
  long all_images = 0, all_refs = 0, all_tokens = 0;
  std::set<std::string> all_vocab;
  for (gld::Split split : {gld::Split::kTrain, gld::Split::kVal, gld::Split::kTest}) {
    long n_refs = 0, n_tokens = 0;
    std::set<std::string> vocab;
    const auto records = corpus.split_images(split);
    for (const auto* rec : records) {
      n_refs += static_cast<long>(rec->references.size());
      for (const auto& ref : rec->references) {
        n_tokens += static_cast<long>(ref.tokens.size());
        for (const auto& tok : ref.tokens) {
          vocab.insert(tok);
          all_vocab.insert(tok);
        }
      }
    }
    all_images += static_cast<long>(records.size());
    all_refs += n_refs;
    all_tokens += n_tokens;
    stats += gld::to_string(split) + "," + std::to_string(records.size()) + "," +
             std::to_string(n_refs) + "," + std::to_string(n_tokens) + "," +
             std::to_string(vocab.size()) + "\n";
  }
  stats += "all," + std::to_string(all_images) + "," + std::to_string(all_refs) +
           "," + std::to_string(all_tokens) + "," +
           std::to_string(all_vocab.size()) + "\n";
  gld::write_file_atomic((fs::path(opt.out_dir) / "stats.csv").string(), stats);
}

// ---- tfidf -----------------------------------------------------------------

struct TfidfOpts {
  std::string dataset;
  std::string split = "train";
  std::string log_base = "e";
  std::string out;
};

void run_tfidf(const TfidfOpts& opt) {
  const gld::Corpus corpus = gld::load_dataset(opt.dataset);
  const auto sub = subcorpus(corpus, gld::split_from_string(opt.split));
  const auto table = gld::build_weight_table(sub, parse_log_base(opt.log_base));

  gld::RunManifest manifest;
  manifest.command = "tfidf";
  manifest.set("dataset", opt.dataset);
  manifest.set("split", opt.split);
  manifest.set("log_base", opt.log_base);
  manifest.set("out", opt.out);
  manifest.add_input(opt.dataset);
  manifest.write(opt.out + ".manifest.json");

  gld::write_file_atomic(opt.out, table.to_csv());
}

// ---- score -----------------------------------------------------------------

struct ScoreOpts {
  std::string dataset;
  std::string candidates;
  std::string split = "train";
  bool plain = false;
  double sigma = 6.0;
  double scale = 10.0;
  std::string out;
};

void run_score(const ScoreOpts& opt) {
  const gld::Corpus corpus = gld::load_dataset(opt.dataset);
  const auto table =
      gld::build_weight_table(subcorpus(corpus, gld::split_from_string(opt.split)));

  const auto rows = read_csv(opt.candidates);
  if (rows.empty() || rows[0].size() < 2 || rows[0][0] != "id" ||
      rows[0][1] != "caption")
    throw gld::ParseError("candidates file must start with an id,caption header");
  std::vector<std::pair<std::string, gld::Caption>> candidates;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].size() < 2)
      throw gld::ParseError("candidates row " + std::to_string(i + 1) +
                            " has no caption");
    std::string text = rows[i][1];
    for (std::size_t j = 2; j < rows[i].size(); ++j) text += "," + rows[i][j];
    candidates.emplace_back(rows[i][0], gld::make_caption(text));
  }

  gld::CiderConfig cfg;
  cfg.variant = opt.plain ? gld::CiderVariant::kPlain : gld::CiderVariant::kCiderD;
  cfg.sigma = opt.sigma;
  cfg.scale = opt.scale;
  const auto report = gld::score_candidates(corpus, candidates, table, cfg);

  gld::RunManifest manifest;
  manifest.command = "score";
  manifest.set("dataset", opt.dataset);
  manifest.set("candidates", opt.candidates);
  manifest.set("split", opt.split);
  manifest.set("variant", opt.plain ? "plain" : "cider-d");
  manifest.set("sigma", opt.sigma);
  manifest.set("scale", opt.scale);
  manifest.set("out", opt.out);
  manifest.add_input(opt.dataset);
  manifest.add_input(opt.candidates);
  manifest.write(opt.out + ".manifest.json");

  gld::write_file_atomic(opt.out, report.to_csv());
}

// ---- reward ----------------------------------------------------------------

struct RewardOpts {
  std::string dataset;
  std::string image_id;
  std::string caption;
  std::string mode = "local";
  double lambda = 5.0;
  double eta = 1.0;
  double epsilon = 0.2;
  std::string log_base = "e";
  std::string embeddings;
  std::string embed_vocab;
  std::string out;
};

void run_reward(const RewardOpts& opt) {
  const gld::Corpus corpus = gld::load_dataset(opt.dataset);
  const auto* rec = corpus.find(opt.image_id);
  if (!rec)
    throw gld::ParseError("image id '" + opt.image_id + "' not in the dataset");

  const auto table = gld::build_weight_table(subcorpus(corpus, gld::Split::kTrain),
                                             parse_log_base(opt.log_base));

  gld::TraceSpec spec;
  spec.word_mode = parse_mode(opt.mode);
  spec.use_gd = !opt.embeddings.empty();
  spec.gd.epsilon = opt.epsilon;
  spec.gd.use_minibatch = false;  // no minibatch here, just the global term
  spec.ld.lambda = opt.lambda;
  spec.ld.eta = opt.eta;
  spec.ld.idf_log_base = parse_log_base(opt.log_base);

  gld::EmbeddingStore store;
  gld::NearestNeighborTable nn;
  if (spec.use_gd) {
    if (opt.embed_vocab.empty())
      throw gld::ParseError(
          "--embeddings needs --embed-vocab to place captions in the same space");
    std::vector<std::string> axes;
    for (const auto& line : split_on(gld::read_file(opt.embed_vocab), '\n')) {
      if (!line.empty()) axes.push_back(line);
    }
    store = gld::EmbeddingStore::load_csv(opt.embeddings,
                                          gld::TokenAxisEmbedder(axes));
    nn = gld::precompute_nearest(store);
  }

  gld::RunManifest manifest;
  manifest.command = "reward";
  manifest.set("dataset", opt.dataset);
  manifest.set("image_id", opt.image_id);
  manifest.set("caption", opt.caption);
  manifest.set("mode", opt.mode);
  manifest.set("lambda", opt.lambda);
  manifest.set("eta", opt.eta);
  manifest.set("epsilon", opt.epsilon);
  manifest.set("log_base", opt.log_base);
  manifest.set("out", opt.out);
  manifest.add_input(opt.dataset);
  if (!opt.embeddings.empty()) {
    manifest.add_input(opt.embeddings);
    manifest.add_input(opt.embed_vocab);
  }
  manifest.write(opt.out + ".manifest.json");

  const auto trace = gld::assemble(spec, opt.image_id, gld::make_caption(opt.caption),
                                   rec->references, table,
                                   spec.use_gd ? &store : nullptr,
                                   spec.use_gd ? &nn : nullptr, nullptr);
  gld::write_file_atomic(opt.out, trace.to_csv());
}

// ---- nn --------------------------------------------------------------------

struct NnOpts {
  std::string embeddings;
  std::string out;
};

void run_nn(const NnOpts& opt) {
  const auto store = gld::EmbeddingStore::load_csv(
      opt.embeddings, [](const gld::Caption&) { return gld::Vec{}; });
  const auto nn = gld::precompute_nearest(store);

  gld::RunManifest manifest;
  manifest.command = "nn";
  manifest.set("embeddings", opt.embeddings);
  manifest.set("out", opt.out);
  manifest.add_input(opt.embeddings);
  manifest.write(opt.out + ".manifest.json");

  gld::write_file_atomic(opt.out, nn.to_csv());
}

// ---- train-toy -------------------------------------------------------------

struct TrainOpts {
  std::string out_dir;
  std::string objective = "gld";
  uint64_t seed = 1;
  int epochs = 40;
  int mle_epochs = 10;
  int batch_size = 16;
  double lr = 5e-4;
  int samples = 1;
  double lambda = 1.0;
  double eta = 0.3;
  double epsilon = 0.2;
  uint64_t world_seed = 7;
  int n_train = 200;
  int n_val = 50;
  int n_test = 200;
  double rare_fraction = 0.10;
};

gld::ToyWorldConfig world_config(uint64_t seed, int n_train, int n_val, int n_test,
                                 double rare_fraction) {
  gld::ToyWorldConfig cfg;
  cfg.seed = seed;
  cfg.n_train = n_train;
  cfg.n_val = n_val;
  cfg.n_test = n_test;
  cfg.rare_fraction = rare_fraction;
  return cfg;
}

gld::TrainConfig train_config(const TrainOpts& opt) {
  gld::TrainConfig cfg;
  cfg.objective = gld::parse_objective(opt.objective);
  cfg.seed = opt.seed;
  cfg.batch_size = opt.batch_size;
  cfg.lr = opt.lr;
  cfg.mle_epochs = opt.mle_epochs;
  cfg.total_epochs = opt.epochs;
  cfg.samples_per_image = opt.samples;
  cfg.ld.lambda = opt.lambda;
  cfg.ld.eta = opt.eta;
  cfg.gd.epsilon = opt.epsilon;
  return cfg;
}

void fill_manifest(gld::RunManifest& manifest, const TrainOpts& opt) {
  manifest.seed = opt.seed;
  manifest.set("objective", opt.objective);
  manifest.set("epochs", static_cast<int64_t>(opt.epochs));
  manifest.set("mle_epochs", static_cast<int64_t>(opt.mle_epochs));
  manifest.set("batch_size", static_cast<int64_t>(opt.batch_size));
  manifest.set("lr", opt.lr);
  manifest.set("samples", static_cast<int64_t>(opt.samples));
  manifest.set("lambda", opt.lambda);
  manifest.set("eta", opt.eta);
  manifest.set("epsilon", opt.epsilon);
  manifest.set("world_seed", static_cast<int64_t>(opt.world_seed));
  manifest.set("n_train", static_cast<int64_t>(opt.n_train));
  manifest.set("n_val", static_cast<int64_t>(opt.n_val));
  manifest.set("n_test", static_cast<int64_t>(opt.n_test));
  manifest.set("rare_fraction", opt.rare_fraction);
}

void run_train_toy(const TrainOpts& opt) {
  gld::RunManifest manifest;
  manifest.command = "train-toy";
  fill_manifest(manifest, opt);
  manifest.set("out_dir", opt.out_dir);
  manifest.write((fs::path(opt.out_dir) / "manifest.json").string());

  const gld::ToyWorldConfig wcfg = world_config(
      opt.world_seed, opt.n_train, opt.n_val, opt.n_test, opt.rare_fraction);
  const gld::ToyWorld world(wcfg);
  const gld::TrainConfig tcfg = train_config(opt);
  const auto result = gld::train(world, tcfg);

  gld::write_file_atomic((fs::path(opt.out_dir) / "checkpoint.json").string(),
                         gld::checkpoint_to_json(result.policy, wcfg, tcfg));
  gld::write_file_atomic((fs::path(opt.out_dir) / "log.csv").string(),
                         gld::log_to_csv(result.log));
}

// ---- eval ------------------------------------------------------------------

struct EvalOpts {
  std::string checkpoint;
  std::string ks = "1,5,10";
  std::string split = "test";
  std::string log;
  int pool = 0;
  std::string out_dir;
};

void run_eval(const EvalOpts& opt) {
  const auto ck = gld::checkpoint_from_json(gld::read_file(opt.checkpoint));
  const fs::path log_path = opt.log.empty()
                                ? fs::path(opt.checkpoint).parent_path() / "log.csv"
                                : fs::path(opt.log);
  if (!fs::exists(log_path))
    throw gld::ParseError("training log not found at " + log_path.string() +
                          " (--log to locate it)");

  gld::ToyWorldConfig wcfg = ck.world_cfg;
  if (opt.pool > 0) wcfg.n_test = opt.pool;
  const gld::ToyWorld world(wcfg);
  if (world.policy_vocab() != ck.vocab || world.attr_dim() != ck.attr_dim)
    throw gld::ParseError("checkpoint does not match the world it names");
  gld::ToyPolicy policy(ck.vocab, ck.attr_dim, ck.max_len);
  policy.theta() = ck.theta;

  const auto ks = parse_ks(opt.ks);
  const gld::Split split = gld::split_from_string(opt.split);

  gld::RunManifest manifest;
  manifest.command = "eval";
  manifest.set("checkpoint", opt.checkpoint);
  manifest.set("ks", opt.ks);
  manifest.set("split", opt.split);
  manifest.set("pool", static_cast<int64_t>(opt.pool));
  manifest.set("out_dir", opt.out_dir);
  manifest.add_input(opt.checkpoint);
  manifest.add_input(log_path.string());
  manifest.write((fs::path(opt.out_dir) / "manifest.json").string());

  const auto summary =
      gld::evaluate_policy(policy, world, split, ks, ck.train_cfg.cider_cfg);

  std::vector<std::string> ids;
  std::vector<gld::Caption> captions;
  for (const auto* rec : world.corpus().split_images(split)) {
    ids.push_back(rec->id);
    captions.push_back(
        policy.to_caption(policy.greedy_decode(world.attributes(rec->id))));
  }
  const auto retrieval = gld::self_retrieval(policy, world, ids, captions, ks);

  std::string retrieval_csv = "k,recall\n";
  for (const auto& [k, r] : retrieval.recall_at)
    retrieval_csv += std::to_string(k) + "," + gld::format_double(r) + "\n";
  gld::write_file_atomic((fs::path(opt.out_dir) / "retrieval.csv").string(),
                         retrieval_csv);

  std::string ranks_csv = "id,rank\n";
  for (std::size_t i = 0; i < ids.size(); ++i)
    ranks_csv += ids[i] + "," + std::to_string(retrieval.ranks[i]) + "\n";
  gld::write_file_atomic((fs::path(opt.out_dir) / "ranks.csv").string(), ranks_csv);

  gld::write_file_atomic(
      (fs::path(opt.out_dir) / "granularity.csv").string(),
      "unicap,avglen\n" + gld::format_double(summary.unicap) + "," +
          gld::format_double(summary.avglen) + "\n");

  std::string metrics_csv = "cider,bleu1,bleu2,bleu3,bleu4,rouge_l\n";
  metrics_csv += gld::format_double(summary.cider);
  for (double b : summary.bleu) metrics_csv += "," + gld::format_double(b);
  metrics_csv += "," + gld::format_double(summary.rouge_l) + "\n";
  gld::write_file_atomic((fs::path(opt.out_dir) / "metrics.csv").string(),
                         metrics_csv);

  const auto log_rows = read_csv(log_path);
  gld::ChartSeries series;
  series.label = gld::objective_name(ck.train_cfg.objective);
  for (std::size_t i = 1; i < log_rows.size(); ++i) {
    if (log_rows[i].size() < 4) continue;
    series.x.push_back(std::stod(log_rows[i][0]));
    series.y.push_back(std::stod(log_rows[i][3]));
  }
  gld::ChartConfig chart;
  chart.title = "held-out consensus score by epoch";
  chart.x_label = "epoch";
  chart.y_label = "cider";
  gld::write_file_atomic((fs::path(opt.out_dir) / "curves.svg").string(),
                         gld::render_line_chart({series}, chart));
}

// ---- compare ---------------------------------------------------------------

struct CompareOpts {
  std::string objectives = "cider,gld";
  std::string seeds = "1,2,3,4,5";
  std::string ks = "1,5,10";
  std::string out_dir;
  TrainOpts train;  // shared training and world knobs
};

void run_compare(const CompareOpts& opt) {
  gld::CompareConfig cfg;
  cfg.world = world_config(opt.train.world_seed, opt.train.n_train,
                           opt.train.n_val, opt.train.n_test,
                           opt.train.rare_fraction);
  cfg.train = train_config(opt.train);
  for (const auto& name : split_on(opt.objectives, ',')) {
    if (!name.empty()) cfg.objectives.push_back(gld::parse_objective(name));
  }
  cfg.seeds = parse_seeds(opt.seeds);
  cfg.ks = parse_ks(opt.ks);

  gld::RunManifest manifest;
  manifest.command = "compare";
  fill_manifest(manifest, opt.train);
  manifest.set("objectives", opt.objectives);
  manifest.set("seeds", opt.seeds);
  manifest.set("ks", opt.ks);
  manifest.set("out_dir", opt.out_dir);
  manifest.write((fs::path(opt.out_dir) / "manifest.json").string());

  const auto report = gld::compare_objectives(cfg);

  std::string comparison = report.summary_csv();
  comparison +=
      "# reference, full-scale run (tda+gld, attention decoder on real images, "
      "not computed here): cider=121.1 r@1=76.24\n";
  gld::write_file_atomic((fs::path(opt.out_dir) / "comparison.csv").string(),
                         comparison);
  gld::write_file_atomic((fs::path(opt.out_dir) / "runs.csv").string(),
                         report.runs_csv());

  std::vector<gld::ChartSeries> series;
  const std::size_t block = report.seeds.size();
  for (std::size_t oi = 0; oi < report.objectives.size(); ++oi) {
    gld::ChartSeries s;
    s.label = gld::objective_name(report.objectives[oi]);
    const std::size_t epochs = report.runs[oi * block].log.size();
    for (std::size_t e = 0; e < epochs; ++e) {
      double mean = 0;
      for (std::size_t si = 0; si < block; ++si)
        mean += report.runs[oi * block + si].log[e].heldout_cider /
                static_cast<double>(block);
      s.x.push_back(static_cast<double>(e + 1));
      s.y.push_back(mean);
    }
    series.push_back(std::move(s));
  }
  gld::ChartConfig chart;
  chart.title = "held-out consensus score by epoch";
  chart.x_label = "epoch";
  chart.y_label = "cider";
  gld::write_file_atomic((fs::path(opt.out_dir) / "curves.svg").string(),
                         gld::render_line_chart(series, chart));
}

void add_world_and_train_flags(CLI::App* cmd, TrainOpts& opt) {
  cmd->add_option("--objective", opt.objective,
                  "mle, cider, gd, ld, ld_diff, gld, or strengthen");
  cmd->add_option("--seed", opt.seed, "training seed");
  cmd->add_option("--epochs", opt.epochs, "total epochs");
  cmd->add_option("--mle-epochs", opt.mle_epochs, "likelihood warmup epochs");
  cmd->add_option("--batch-size", opt.batch_size);
  cmd->add_option("--lr", opt.lr, "learning rate");
  cmd->add_option("--samples", opt.samples, "rollouts per image");
  cmd->add_option("--lambda", opt.lambda, "phrase gate threshold");
  cmd->add_option("--eta", opt.eta, "word gate threshold");
  cmd->add_option("--epsilon", opt.epsilon, "ranking margin");
  cmd->add_option("--world-seed", opt.world_seed);
  cmd->add_option("--n-train", opt.n_train);
  cmd->add_option("--n-val", opt.n_val);
  cmd->add_option("--rare-fraction", opt.rare_fraction);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fine-grained caption rewards and toy training"};
  app.require_subcommand(1);
  app.set_version_flag("--version", gld::kToolVersion);

  IngestOpts ingest;
  auto* c_ingest = app.add_subcommand("ingest", "validate and normalize a dataset");
  c_ingest->add_option("--dataset", ingest.dataset, "dataset json")->required();
  c_ingest->add_option("--out-dir", ingest.out_dir)->required();
  c_ingest->callback([&] { run_ingest(ingest); });

  TfidfOpts tfidf;
  auto* c_tfidf = app.add_subcommand("tfidf", "write the n-gram weight table");
  c_tfidf->add_option("--dataset", tfidf.dataset)->required();
  c_tfidf->add_option("--split", tfidf.split, "split to count over");
  c_tfidf->add_option("--log-base", tfidf.log_base, "'e' or a number");
  c_tfidf->add_option("--out", tfidf.out)->required();
  c_tfidf->callback([&] { run_tfidf(tfidf); });

  ScoreOpts score;
  auto* c_score = app.add_subcommand("score", "score candidate captions");
  c_score->add_option("--dataset", score.dataset)->required();
  c_score->add_option("--candidates", score.candidates, "csv with id,caption rows")
      ->required();
  c_score->add_option("--split", score.split, "split the weight table counts over");
  c_score->add_flag("--plain", score.plain, "raw cosine, no length penalty");
  c_score->add_option("--sigma", score.sigma, "length penalty width");
  c_score->add_option("--scale", score.scale, "score scale");
  c_score->add_option("--out", score.out)->required();
  c_score->callback([&] { run_score(score); });

  RewardOpts reward;
  auto* c_reward = app.add_subcommand("reward", "per-word reward trace");
  c_reward->add_option("--dataset", reward.dataset)->required();
  c_reward->add_option("--image-id", reward.image_id)->required();
  c_reward->add_option("--caption", reward.caption)->required();
  c_reward->add_option("--mode", reward.mode, "uniform, local, or local_diff");
  c_reward->add_option("--lambda", reward.lambda, "phrase gate threshold");
  c_reward->add_option("--eta", reward.eta, "word gate threshold");
  c_reward->add_option("--epsilon", reward.epsilon, "ranking margin");
  c_reward->add_option("--log-base", reward.log_base);
  c_reward->add_option("--embeddings", reward.embeddings,
                       "image vectors csv; enables the ranking terms");
  c_reward->add_option("--embed-vocab", reward.embed_vocab,
                       "axis tokens, one per line");
  c_reward->add_option("--out", reward.out)->required();
  c_reward->callback([&] { run_reward(reward); });

  NnOpts nn;
  auto* c_nn = app.add_subcommand("nn", "nearest image per image");
  c_nn->add_option("--embeddings", nn.embeddings)->required();
  c_nn->add_option("--out", nn.out)->required();
  c_nn->callback([&] { run_nn(nn); });

  TrainOpts train;
  auto* c_train = app.add_subcommand("train-toy", "train a policy on the toy world");
  c_train->add_option("--out-dir", train.out_dir)->required();
  c_train->add_option("--n-test", train.n_test);
  add_world_and_train_flags(c_train, train);
  c_train->callback([&] { run_train_toy(train); });

  EvalOpts eval;
  auto* c_eval = app.add_subcommand("eval", "evaluate a trained checkpoint");
  c_eval->add_option("--checkpoint", eval.checkpoint)->required();
  c_eval->add_option("--ks", eval.ks, "recall cutoffs");
  c_eval->add_option("--split", eval.split);
  c_eval->add_option("--log", eval.log, "training log (default: next to checkpoint)");
  c_eval->add_option("--pool", eval.pool, "retrieval pool size (0 keeps the split)");
  c_eval->add_option("--out", eval.out_dir, "output directory")->required();
  c_eval->callback([&] { run_eval(eval); });

  CompareOpts compare;
  auto* c_compare = app.add_subcommand("compare", "train and compare objectives");
  c_compare->add_option("--objectives", compare.objectives, "comma-separated list");
  c_compare->add_option("--seeds", compare.seeds, "comma-separated list");
  c_compare->add_option("--ks", compare.ks, "recall cutoffs");
  c_compare->add_option("--out-dir", compare.out_dir)->required();
  c_compare->add_option("--pool", compare.train.n_test,
                        "retrieval pool size (the toy test split)");
  add_world_and_train_flags(c_compare, compare.train);
  c_compare->callback([&] { run_compare(compare); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const gld::Error& e) {
    nlohmann::json err = {{"error", e.kind()}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    nlohmann::json err = {{"error", "internal"}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return 1;
  }
  return 0;
}
