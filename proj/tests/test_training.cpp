#include <doctest.h>

#include <cmath>

#include "gld/errors.hpp"
#include "gld/metrics.hpp"
#include "gld/training.hpp"

using namespace gld;

namespace {

ToyWorldConfig tiny_world_cfg() {
  ToyWorldConfig cfg;
  cfg.seed = 3;
  cfg.n_train = 20;
  cfg.n_val = 8;
  cfg.n_test = 8;
  cfg.min_refs = 2;
  cfg.max_refs = 3;
  return cfg;
}

TrainConfig tiny_train_cfg() {
  TrainConfig cfg;
  cfg.objective = Objective::kGld;
  cfg.seed = 9;
  cfg.batch_size = 8;
  cfg.mle_epochs = 1;
  cfg.total_epochs = 3;
  cfg.ld.lambda = 1.0;
  cfg.ld.eta = 0.3;
  return cfg;
}

}  // namespace

TEST_CASE("objective names round trip") {
  for (Objective o : {Objective::kMle, Objective::kCider, Objective::kGd,
                      Objective::kLd, Objective::kLdDiff, Objective::kGld,
                      Objective::kStrengthen}) {
    CHECK(parse_objective(objective_name(o)) == o);
  }
  CHECK_THROWS_AS(parse_objective("nope"), ParseError);
}

TEST_CASE("adam takes bias-corrected steps and minimizes a quadratic") {
  Adam adam(1);
  std::vector<double> x = {3.0};
  std::vector<double> g = {6.0};
  adam.step(x, g, 0.1);
  // first bias-corrected step is lr * g / (|g| + eps), about lr
  CHECK(x[0] == doctest::Approx(2.9).epsilon(1e-6));
  for (int i = 0; i < 2000; ++i) {
    g[0] = 2.0 * x[0];
    adam.step(x, g, 0.1);
  }
  CHECK(std::fabs(x[0]) < 1e-3);
}

TEST_CASE("reinforce gradient equals the hand-built estimator for one sample") {
  const ToyWorld world(tiny_world_cfg());
  TrainConfig cfg = tiny_train_cfg();
  cfg.objective = Objective::kCider;  // uniform word rewards, no ranking terms
  cfg.use_baseline = false;

  const auto policy = world.make_policy();
  const std::string id = world.corpus().images[0].id;

  std::vector<double> grad;
  Rng rng(derive_seed(77, 1));
  reinforce_gradient(policy, world, {id}, cfg, world.weights(), rng, grad);

  // replicate: same stream, same single rollout
  Rng rng2(derive_seed(77, 1));
  const auto sampled = policy.sample(world.attributes(id), rng2);
  const auto caption = policy.to_caption(sampled);
  const auto& refs = world.corpus().find(id)->references;
  const double r = cider(caption, refs, world.weights(), cfg.cider_cfg);

  std::vector<double> coeffs(sampled.step_actions.size(), -r);
  std::vector<double> expect(static_cast<std::size_t>(policy.n_params()), 0.0);
  policy.accumulate_sequence_grad(world.attributes(id), sampled, coeffs, expect);

  REQUIRE(grad.size() == expect.size());
  for (std::size_t i = 0; i < grad.size(); ++i) {
    CHECK(grad[i] == doctest::Approx(expect[i]).epsilon(1e-12));
  }
}

TEST_CASE("baseline subtraction changes coefficients but not the sampled path") {
  const ToyWorld world(tiny_world_cfg());
  TrainConfig cfg = tiny_train_cfg();
  cfg.objective = Objective::kCider;

  const auto policy = world.make_policy();
  std::vector<std::string> batch;
  for (int i = 0; i < 4; ++i) batch.push_back(world.corpus().images[static_cast<std::size_t>(i)].id);

  std::vector<double> with_base, without_base;
  Rng r1(42), r2(42);
  cfg.use_baseline = true;
  const auto s1 = reinforce_gradient(policy, world, batch, cfg, world.weights(), r1,
                                     with_base);
  cfg.use_baseline = false;
  const auto s2 = reinforce_gradient(policy, world, batch, cfg, world.weights(), r2,
                                     without_base);
  // same rollouts, so the sample reward statistics agree
  CHECK(s1.mean_sample_reward == doctest::Approx(s2.mean_sample_reward));
  CHECK(s2.mean_baseline_reward == 0.0);
  // but the advantages differ whenever the baseline is nonzero
  CHECK(s1.mean_advantage_sq != s2.mean_advantage_sq);
}

TEST_CASE("training runs, logs every epoch, and is deterministic") {
  const ToyWorld world(tiny_world_cfg());
  const TrainConfig cfg = tiny_train_cfg();
  const auto a = train(world, cfg);
  const auto b = train(world, cfg);
  REQUIRE(a.log.size() == 3);
  CHECK(a.log[0].phase == "mle");
  CHECK(a.log[1].phase == "rl:gld");
  CHECK(a.log[2].phase == "rl:gld");
  for (const auto& e : a.log) {
    CHECK(std::isfinite(e.objective_value));
    CHECK(std::isfinite(e.heldout_cider));
    CHECK(e.avglen > 0.0);
  }
  CHECK(a.policy.theta() == b.policy.theta());
  CHECK(log_to_csv(a.log) == log_to_csv(b.log));
  CHECK(log_to_csv(a.log).rfind(
            "epoch,phase,objective_value,heldout_cider,unicap,avglen\n", 0) == 0);
}

TEST_CASE("likelihood-only training improves the likelihood objective") {
  const ToyWorld world(tiny_world_cfg());
  TrainConfig cfg = tiny_train_cfg();
  cfg.objective = Objective::kMle;
  cfg.total_epochs = 8;
  cfg.lr = 0.05;
  const auto result = train(world, cfg);
  for (const auto& e : result.log) CHECK(e.phase == "mle");
  CHECK(result.log.back().objective_value > result.log.front().objective_value);
}

TEST_CASE("checkpoint json round trip") {
  const ToyWorldConfig wcfg = tiny_world_cfg();
  const ToyWorld world(wcfg);
  auto policy = world.make_policy();
  Rng rng(5);
  for (auto& w : policy.theta()) w = rng.next_uniform(-0.5, 0.5);

  TrainConfig tcfg = tiny_train_cfg();
  const auto text = checkpoint_to_json(policy, wcfg, tcfg);
  const auto ck = checkpoint_from_json(text);
  CHECK(ck.world_cfg.seed == wcfg.seed);
  CHECK(ck.world_cfg.n_train == wcfg.n_train);
  CHECK(ck.world_cfg.rare_fraction == wcfg.rare_fraction);
  CHECK(ck.train_cfg.objective == tcfg.objective);
  CHECK(ck.train_cfg.lr == tcfg.lr);
  CHECK(ck.train_cfg.ld.lambda == tcfg.ld.lambda);
  CHECK(ck.vocab == policy.vocab());
  CHECK(ck.attr_dim == policy.attr_dim());
  CHECK(ck.max_len == policy.max_len());
  CHECK(ck.theta == policy.theta());

  CHECK_THROWS_AS(checkpoint_from_json("{}"), ParseError);
  CHECK_THROWS_AS(checkpoint_from_json("not json"), ParseError);
  // declared shape must match the parameter count
  auto broken = text;
  const auto pos = broken.find("\"max_len\": 6");
  REQUIRE(pos != std::string::npos);
  broken.replace(pos, 12, "\"max_len\": 7");
  CHECK_THROWS_AS(checkpoint_from_json(broken), ParseError);
}
