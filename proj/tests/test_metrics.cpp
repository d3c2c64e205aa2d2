#include <doctest.h>

#include <cmath>

#include "gld/errors.hpp"
#include "gld/metrics.hpp"
#include "oracles.hpp"

using namespace gld;

TEST_CASE("clipped consensus score matches the brute-force oracle") {
  const auto corpus = oracle::fixture_corpus();
  const auto table = build_weight_table(corpus);
  const auto pool = oracle::fixture_pool();
  const std::vector<std::string> candidates = {
      "a zebra stands", "the zebra", "a dog", "the red dog runs",
      "a cat sits on a red dog", "zebra zebra zebra", "stands"};
  for (const auto& text : candidates) {
    const auto cand = make_caption(text);
    for (const auto& img : corpus.images) {
      oracle::RefSet refs;
      for (const auto& r : img.references) refs.push_back(r.tokens);
      const double got = cider(cand, img.references, table);
      const double expect = oracle::cider_d(cand.tokens, refs, pool, 6.0, 10.0, true);
      CHECK(got == doctest::Approx(expect).epsilon(1e-12));

      CiderConfig plain;
      plain.variant = CiderVariant::kPlain;
      const double got_plain = cider(cand, img.references, table, plain);
      const double expect_plain =
          oracle::cider_d(cand.tokens, refs, pool, 6.0, 10.0, false);
      CHECK(got_plain == doctest::Approx(expect_plain).epsilon(1e-12));
    }
  }
}

TEST_CASE("self-consensus saturates for captions with weight in every order") {
  const auto corpus = oracle::fixture_corpus();
  const auto table = build_weight_table(corpus);
  // four tokens so orders 1..4 all have instances; distinctive words keep
  // every order's weight vector nonzero
  const auto c = make_caption("the red dog sleeps");
  CHECK(cider(c, {c}, table) == doctest::Approx(10.0).epsilon(1e-12));
  CiderConfig plain;
  plain.variant = CiderVariant::kPlain;
  CHECK(cider(c, {c}, table, plain) == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("length penalty discounts mismatched candidates") {
  const auto corpus = oracle::fixture_corpus();
  const auto table = build_weight_table(corpus);
  const auto ref = make_caption("the red dog sleeps");
  const auto long_cand = make_caption("the red dog sleeps the red dog sleeps");
  const double same = cider(ref, {ref}, table);
  const double stretched = cider(long_cand, {ref}, table);
  CHECK(stretched < same);
}

TEST_CASE("sentence bleu hand values") {
  const auto refs = std::vector<Caption>{make_caption("the cat is on the mat")};
  const auto cand = make_caption("the cat the cat");
  const auto b = bleu(cand, refs);
  // unigrams: the*2 (clip 2) + cat*2 (clip 1) -> 3/4; bigrams: "the cat"*2
  // clip 1 -> 1/3; "cat the" unmatched; bp = exp(1 - 6/4)
  const double bp = std::exp(1.0 - 6.0 / 4.0);
  CHECK(b[0] == doctest::Approx(bp * 0.75).epsilon(1e-12));
  CHECK(b[1] == doctest::Approx(bp * std::sqrt(0.75 * (1.0 / 3.0))).epsilon(1e-12));
  CHECK(b[2] == 0.0);  // no trigram match
  CHECK(b[3] == 0.0);

  const auto perfect = bleu(refs[0], refs);
  CHECK(perfect[3] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("bleu brevity ties go to the shorter reference") {
  const std::vector<Caption> refs = {make_caption("a b c"),
                                     make_caption("a b c d e")};
  const auto cand = make_caption("a b c d");  // distance 1 to both refs
  const auto b = bleu(cand, refs);
  // r = 3 (shorter of the tied lengths), c = 4 >= r, so no penalty
  CHECK(b[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("lcs f-score hand values") {
  const auto cand = make_caption("the dog runs fast");
  const std::vector<Caption> refs = {make_caption("the dog walks fast"),
                                     make_caption("a dog runs")};
  // lcs vs ref1 = 3 (the dog fast), vs ref2 = 2 (dog runs)
  // P max = 3/4; R max = 3/4
  const double beta = 1.2;
  const double p = 0.75, r = 0.75;
  const double expect = (1 + beta * beta) * p * r / (r + beta * beta * p);
  CHECK(rouge_l(cand, refs) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(rouge_l(cand, {cand}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rouge_l(cand, {make_caption("zzz")}) == 0.0);
}

TEST_CASE("caption set granularity") {
  const std::vector<Caption> caps = {make_caption("a dog"), make_caption("a dog"),
                                     make_caption("a cat sits")};
  const auto fg = fine_granularity(caps);
  CHECK(fg.unicap == 2);
  CHECK(fg.avglen == doctest::Approx(7.0 / 3.0));
  const auto empty = fine_granularity({});
  CHECK(empty.unicap == 0);
  CHECK(empty.avglen == 0.0);
}

TEST_CASE("candidate scoring report") {
  const auto corpus = oracle::fixture_corpus();
  const auto table = build_weight_table(corpus);
  std::vector<std::pair<std::string, Caption>> cands = {
      {"img1", make_caption("a zebra stands")},
      {"img2", make_caption("a cat")},
  };
  const auto report = score_candidates(corpus, cands, table);
  REQUIRE(report.per_image.size() == 2);
  CHECK(report.per_image[0].cider > report.per_image[1].cider);
  CHECK(report.mean.cider ==
        doctest::Approx((report.per_image[0].cider + report.per_image[1].cider) / 2));
  const auto csv = report.to_csv();
  CHECK(csv.rfind("id,cider,bleu1,bleu2,bleu3,bleu4,rouge_l\n", 0) == 0);
  CHECK(csv.find("\nmean,") != std::string::npos);

  cands.push_back({"nope", make_caption("a dog")});
  CHECK_THROWS_AS(score_candidates(corpus, cands, table), ParseError);
}
