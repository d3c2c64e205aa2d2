#include <doctest.h>

#include "gld/corpus.hpp"
#include "gld/errors.hpp"

using namespace gld;

TEST_CASE("tokenize lowercases and strips sentence punctuation") {
  CHECK(tokenize("A Zebra stands.") == std::vector<std::string>{"a", "zebra", "stands"});
  CHECK(tokenize("Hello, world! (yes)") == std::vector<std::string>{"hello", "world", "yes"});
  CHECK(tokenize("it's  a red-ish dog") ==
        std::vector<std::string>{"it's", "a", "red-ish", "dog"});
  CHECK(tokenize("\"quoted\"; stuff:") == std::vector<std::string>{"quoted", "stuff"});
  CHECK(tokenize("   ").empty());
}

TEST_CASE("make_caption rejects empty captions") {
  CHECK_THROWS_AS(make_caption(""), EmptyCaption);
  CHECK_THROWS_AS(make_caption(" .,! "), EmptyCaption);
  const auto c = make_caption("The dog.");
  CHECK(c.length() == 2);
  CHECK(c.raw == "The dog.");
}

TEST_CASE("make_corpus builds a vocab and validates records") {
  std::vector<ImageRecord> images;
  ImageRecord a;
  a.id = "a";
  a.references.push_back(make_caption("a dog"));
  images.push_back(a);
  ImageRecord b;
  b.id = "b";
  b.references.push_back(make_caption("the dog runs"));
  images.push_back(b);
  const auto corpus = make_corpus(images);
  CHECK(corpus.vocab.size() == 4);
  CHECK(corpus.find("b") != nullptr);
  CHECK(corpus.find("missing") == nullptr);

  images.push_back(a);  // duplicate id
  CHECK_THROWS_AS(make_corpus(images), DuplicateId);

  ImageRecord empty;
  empty.id = "c";
  CHECK_THROWS_AS(make_corpus({empty}), ParseError);
}

TEST_CASE("dataset json round trip") {
  const std::string text = R"({"images":[
    {"id":"x","split":"train","captions":["A dog runs.","the dog"]},
    {"id":"y","split":"val","captions":["a cat"]}
  ]})";
  const auto corpus = parse_dataset_json(text);
  REQUIRE(corpus.images.size() == 2);
  CHECK(corpus.images[0].id == "x");
  CHECK(corpus.images[0].split == Split::kTrain);
  CHECK(corpus.images[0].references[0].tokens ==
        std::vector<std::string>{"a", "dog", "runs"});
  CHECK(corpus.images[1].split == Split::kVal);
  CHECK(corpus.split_images(Split::kVal).size() == 1);
  CHECK(corpus.split_images(Split::kTest).empty());

  CHECK_THROWS_AS(parse_dataset_json("not json"), ParseError);
  CHECK_THROWS_AS(parse_dataset_json(R"({"images":[{"id":"x"}]})"), ParseError);
  CHECK_THROWS_AS(
      parse_dataset_json(
          R"({"images":[{"id":"x","split":"nope","captions":["a"]}]})"),
      ParseError);
}

TEST_CASE("ngram counting") {
  const auto c = make_caption("the dog saw the dog");
  auto uni = ngram_counts(c, 1);
  CHECK(uni["the"] == 2);
  CHECK(uni["dog"] == 2);
  CHECK(uni["saw"] == 1);
  CHECK(ngram_total(c, 1) == 5);

  auto bi = ngram_counts(c, 2);
  CHECK(bi["the dog"] == 2);
  CHECK(bi["dog saw"] == 1);
  CHECK(ngram_total(c, 2) == 4);

  CHECK(ngram_counts(c, 6).empty());
  CHECK(ngram_total(c, 6) == 0);
}
