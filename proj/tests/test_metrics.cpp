#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "stylometer/errors.hpp"
#include "stylometer/lm_scoring.hpp"
#include "stylometer/metrics.hpp"
#include "stylometer/overlap.hpp"

using namespace stylometer;

namespace {

// Embedder with hand-set vectors per sentence text, for exact oracle values.
class FixedEmbedder final : public Embedder {
 public:
  explicit FixedEmbedder(std::map<std::string, std::vector<double>> vectors)
      : vectors_(std::move(vectors)) {}
  std::vector<double> embed(std::string_view sentence) const override {
    return vectors_.at(std::string(sentence));
  }
  std::size_t dimension() const override { return vectors_.begin()->second.size(); }

 private:
  std::map<std::string, std::vector<double>> vectors_;
};

class FlagNothingChecker final : public GrammarChecker {
 public:
  bool check(std::string_view) const override { return false; }
};

}  // namespace

TEST_CASE("burstiness as perplexity variance") {
  CHECK(burstiness_pp_var({10.0, 10.0, 10.0}) == 0.0);
  CHECK(burstiness_pp_var({10.0, 20.0}) == 25.0);
  CHECK_THROWS_WITH_AS(burstiness_pp_var({12.0}), doctest::Contains("TooFewSentences"), Error);
}

TEST_CASE("burstiness as sentence-length CV") {
  CHECK(burstiness_len_cv(std::vector<std::size_t>{5, 5, 5}) == 0.0);
  CHECK(burstiness_len_cv(std::vector<std::size_t>{4, 8}) == 1.0 / 3.0);
  CHECK_THROWS_WITH_AS(burstiness_len_cv(std::vector<std::size_t>{7}),
                       doctest::Contains("TooFewSentences"), Error);

  const SentenceList two = split_sentences("One two three four. Five six seven eight nine ten eleven twelve.");
  REQUIRE(two.size() == 2);
  REQUIRE(two.sentences[0].tokens.size() == 4);
  REQUIRE(two.sentences[1].tokens.size() == 8);
  CHECK(burstiness_len_cv(two) == 1.0 / 3.0);
}

TEST_CASE("duplicating every sentence length leaves CV unchanged") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<std::size_t> lengths;
    const std::size_t n = 2 + rng() % 8;
    for (std::size_t i = 0; i < n; ++i) lengths.push_back(1 + rng() % 30);
    std::vector<std::size_t> doubled = lengths;
    doubled.insert(doubled.end(), lengths.begin(), lengths.end());
    CHECK(burstiness_len_cv(doubled) ==
          doctest::Approx(burstiness_len_cv(lengths)).epsilon(1e-12));
  }
}

TEST_CASE("type-token ratio") {
  CHECK(ttr(tokenize("a a a")) == 1.0 / 3.0);
  CHECK(ttr(tokenize("the cat sat")) == 1.0);
  CHECK(ttr(tokenize("a b a c")) == 0.75);
  CHECK_THROWS_WITH_AS(ttr(TokenSequence{}), doctest::Contains("EmptyInput"), Error);
}

TEST_CASE("ttr is 1 exactly when all tokens are distinct") {
  std::mt19937_64 rng(17);
  const char* words[] = {"w0", "w1", "w2", "w3", "w4", "w5"};
  for (int trial = 0; trial < 50; ++trial) {
    TokenSequence seq;
    const std::size_t n = 1 + rng() % 10;
    bool all_distinct = true;
    std::vector<std::string> seen;
    for (std::size_t i = 0; i < n; ++i) {
      std::string w = words[rng() % 6];
      if (std::find(seen.begin(), seen.end(), w) != seen.end()) all_distinct = false;
      seen.push_back(w);
      seq.tokens.push_back({std::move(w), 0, 0});
    }
    const double value = ttr(seq);
    CHECK(value > 0.0);
    CHECK(value <= 1.0);
    CHECK((value == 1.0) == all_distinct);
  }
}

TEST_CASE("rule grammar checker") {
  const RuleGrammarChecker checker;
  CHECK(checker.check("The the cat sat."));        // doubled word
  CHECK(checker.check("lowercase start here."));   // no leading capital
  CHECK(checker.check("The set (a, b is open."));  // unmatched bracket
  CHECK(checker.check("Mismatched ) here."));
  CHECK_FALSE(checker.check("The cat sat (on a mat)."));
  CHECK_FALSE(checker.check("42 is a number."));  // digits are not lowercase letters
}

TEST_CASE("grammar error rate") {
  const RuleGrammarChecker checker;
  SUBCASE("nothing flagged") {
    const SentenceList sents = split_sentences("The cat sat. The dog ran.");
    CHECK(grammar_error_rate(sents, checker) == 0.0);
  }
  SUBCASE("one of four flagged") {
    const FlagNothingChecker nothing;
    const SentenceList sents = split_sentences("A one. B two. C three. D four.");
    REQUIRE(sents.size() == 4);
    CHECK(grammar_error_rate(sents, nothing) == 0.0);
    // rule checker: exactly one sentence has a doubled word
    const SentenceList mixed = split_sentences("A one. B two two. C three. D four.");
    CHECK(grammar_error_rate(mixed, checker) == 0.25);
  }
  SUBCASE("doubled word in one of two sentences") {
    const SentenceList sents = split_sentences("The cat sat. The the dog ran.");
    REQUIRE(sents.size() == 2);
    CHECK(grammar_error_rate(sents, checker) == 0.5);
  }
  SUBCASE("empty input") {
    CHECK_THROWS_WITH_AS(grammar_error_rate(SentenceList{}, checker),
                         doctest::Contains("EmptyInput"), Error);
  }
}

TEST_CASE("cosine similarity") {
  const std::vector<double> a = {1.0, 0.0};
  const std::vector<double> b = {0.6, 0.8};
  CHECK(cosine_similarity(a, b) == doctest::Approx(0.6).epsilon(1e-12));
  SUBCASE("positive scaling invariance") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> coord(-1.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
      std::vector<double> x(4), y(4), y_scaled(4);
      for (int i = 0; i < 4; ++i) {
        x[static_cast<std::size_t>(i)] = coord(rng) + 1.5;
        y[static_cast<std::size_t>(i)] = coord(rng) + 1.5;
        y_scaled[static_cast<std::size_t>(i)] = 37.5 * y[static_cast<std::size_t>(i)];
      }
      CHECK(std::abs(cosine_similarity(x, y) - cosine_similarity(x, y_scaled)) <= 1e-12);
    }
  }
  SUBCASE("zero vector") {
    CHECK_THROWS_WITH_AS(cosine_similarity(std::vector<double>{0.0, 0.0}, a),
                         doctest::Contains("ZeroVector"), Error);
  }
  SUBCASE("dimension mismatch") {
    CHECK_THROWS_WITH_AS(cosine_similarity(std::vector<double>{1.0}, a),
                         doctest::Contains("DimensionMismatch"), Error);
  }
}

TEST_CASE("semantic coherence") {
  SUBCASE("identical sentences embed identically, coherence 1") {
    const HashEmbedder embedder(32);
    const SentenceList sents = split_sentences("Same words here. Same words here. Same words here.");
    REQUIRE(sents.size() == 3);
    CHECK(semantic_coherence(sents, embedder) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("hand-set adjacent embeddings") {
    const SentenceList sents = split_sentences("First one. Second one.");
    REQUIRE(sents.size() == 2);
    const FixedEmbedder embedder({{"First one.", {1.0, 0.0}}, {"Second one.", {0.6, 0.8}}});
    CHECK(semantic_coherence(sents, embedder) == doctest::Approx(0.6).epsilon(1e-12));
  }
  SUBCASE("orthogonal adjacent embeddings give 0") {
    const SentenceList sents = split_sentences("First one. Second two. Third three.");
    REQUIRE(sents.size() == 3);
    const FixedEmbedder embedder({{"First one.", {1.0, 0.0}},
                                  {"Second two.", {0.0, 2.0}},
                                  {"Third three.", {3.0, 0.0}}});
    CHECK(std::abs(semantic_coherence(sents, embedder)) <= 1e-12);
  }
  SUBCASE("single sentence") {
    const HashEmbedder embedder(32);
    CHECK_THROWS_WITH_AS(semantic_coherence(split_sentences("Only one."), embedder),
                         doctest::Contains("TooFewSentences"), Error);
  }
}

TEST_CASE("hash embedder is deterministic with fixed dimension") {
  const HashEmbedder embedder(16);
  const auto a = embedder.embed("Adaptive refinement helps a lot.");
  const auto b = embedder.embed("Adaptive refinement helps a lot.");
  CHECK(a == b);
  CHECK(a.size() == 16);
  double norm = 0.0;
  for (const double v : a) norm += v * v;
  CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("compute_metric_vector") {
  const UniformScorer scorer(50);
  const HashEmbedder embedder(32);
  const RuleGrammarChecker checker;

  SUBCASE("single-sentence sample marks burstiness absent") {
    TextSample sample;
    sample.id = "s1";
    sample.origin = "human";
    sample.task = "source";
    sample.text = "Just one sentence here.";
    const MetricVector mv = compute_metric_vector(sample, scorer, embedder, checker);
    CHECK(mv.perplexity.has_value());
    CHECK(mv.ttr.has_value());
    CHECK(mv.grammar_error_rate.has_value());
    CHECK_FALSE(mv.burstiness_pp_var.has_value());
    CHECK_FALSE(mv.burstiness_len_cv.has_value());
    CHECK_FALSE(mv.semantic_coherence.has_value());
    CHECK(mv.absent.at("burstiness_pp_var") == "TooFewSentences");
    CHECK(mv.absent.at("burstiness_len_cv") == "TooFewSentences");
    CHECK(mv.absent.at("semantic_coherence") == "TooFewSentences");
    CHECK(mv.absent.at("bleu") == "NoReference");
  }

  SUBCASE("reference sample carries overlap metrics") {
    TextSample sample;
    sample.id = "s2";
    sample.origin = "llada";
    sample.task = "rephrase";
    sample.text = "The model works well. It runs fast on all nine benchmark tasks we tried.";
    sample.reference = "The model works well. It runs quickly on most benchmarks.";
    const MetricVector mv = compute_metric_vector(sample, scorer, embedder, checker);
    CHECK(mv.bleu.has_value());
    CHECK(mv.rouge1_f1.has_value());
    CHECK(mv.rouge2_f1.has_value());
    CHECK(mv.rougeL_f1.has_value());
    CHECK(mv.absent.count("bleu") == 0);
  }

  SUBCASE("equals composition of the individual operations") {
    TextSample sample;
    sample.id = "s3";
    sample.origin = "llama";
    sample.task = "rephrase";
    sample.text = "The big cat sat down. The small dog ran far away today.";
    sample.reference = "A big cat sat. A small dog ran away.";
    const MetricVector mv = compute_metric_vector(sample, scorer, embedder, checker);

    const TokenSequence tokens = tokenize(sample.text);
    const SentenceList sentences = split_sentences(sample.text);
    const PerplexityResult pp = sentence_perplexities(scorer, sentences);
    double mean_pp = 0.0;
    for (const double v : pp.sentence_pps) mean_pp += v;
    mean_pp /= static_cast<double>(pp.sentence_pps.size());
    const TokenSequence reference = tokenize(*sample.reference);

    CHECK(*mv.perplexity == pp.document_pp);
    CHECK(*mv.mean_sentence_pp == mean_pp);
    CHECK(*mv.burstiness_pp_var == burstiness_pp_var(pp.sentence_pps));
    CHECK(*mv.burstiness_len_cv == burstiness_len_cv(sentences));
    CHECK(*mv.ttr == ttr(tokens));
    CHECK(*mv.grammar_error_rate == grammar_error_rate(sentences, checker));
    CHECK(*mv.semantic_coherence == semantic_coherence(sentences, embedder));
    CHECK(*mv.bleu == bleu(tokens, reference));
    CHECK(*mv.rouge1_f1 == rouge_n(tokens, reference, 1).f1);
    CHECK(*mv.rouge2_f1 == rouge_n(tokens, reference, 2).f1);
    CHECK(*mv.rougeL_f1 == rouge_l(tokens, reference).f1);
  }

  SUBCASE("empty text throws") {
    TextSample sample;
    sample.id = "s4";
    sample.text = "";
    CHECK_THROWS_WITH_AS(compute_metric_vector(sample, scorer, embedder, checker),
                         doctest::Contains("EmptyInput"), Error);
  }

  SUBCASE("bounded fields stay within their ranges") {
    TextSample sample;
    sample.id = "s5";
    sample.origin = "llada";
    sample.task = "rephrase";
    sample.text = "The model works well today. It runs fast. We verified it twice on real data.";
    sample.reference = "The model works. We verified it.";
    const MetricVector mv = compute_metric_vector(sample, scorer, embedder, checker);
    CHECK(*mv.perplexity >= 1.0);
    CHECK(*mv.burstiness_pp_var >= 0.0);
    CHECK(*mv.burstiness_len_cv >= 0.0);
    CHECK(*mv.ttr > 0.0);
    CHECK(*mv.ttr <= 1.0);
    CHECK(*mv.grammar_error_rate >= 0.0);
    CHECK(*mv.grammar_error_rate <= 1.0);
    CHECK(*mv.semantic_coherence >= -1.0);
    CHECK(*mv.semantic_coherence <= 1.0);
    for (const char* f : {"bleu", "rouge1_f1", "rouge2_f1", "rougeL_f1"}) {
      CHECK(*mv.get(f) >= 0.0);
      CHECK(*mv.get(f) <= 1.0);
    }
  }
}

namespace {

class DownChecker final : public GrammarChecker {
 public:
  bool check(std::string_view) const override {
    throw Error("CheckerUnavailable", "remote checker unreachable", ErrorKind::Endpoint);
  }
};

class DownEmbedder final : public Embedder {
 public:
  std::vector<double> embed(std::string_view) const override {
    throw Error("EmbedderUnavailable", "remote embedder unreachable", ErrorKind::Endpoint);
  }
  std::size_t dimension() const override { return 0; }
};

class DownScorer final : public TokenLmScorer {
 public:
  std::vector<double> score_tokens(const std::vector<std::string>&) const override {
    throw Error("ScorerUnavailable", "remote scorer unreachable", ErrorKind::Endpoint);
  }
  std::string id() const override { return "down"; }
};

}  // namespace

TEST_CASE("capability failures: secondary metrics go absent, scorer failures propagate") {
  TextSample sample;
  sample.id = "cap";
  sample.origin = "human";
  sample.task = "source";
  sample.text = "The first sentence stands here. The second one follows it.";

  const UniformScorer scorer(50);
  const HashEmbedder embedder(16);
  const RuleGrammarChecker checker;

  SUBCASE("unreachable checker marks the rate absent, not zero") {
    const DownChecker down;
    const MetricVector mv = compute_metric_vector(sample, scorer, embedder, down);
    CHECK_FALSE(mv.grammar_error_rate.has_value());
    CHECK(mv.absent.at("grammar_error_rate") == "CheckerUnavailable");
    CHECK(mv.perplexity.has_value());
  }
  SUBCASE("unreachable embedder marks coherence absent") {
    const DownEmbedder down;
    const MetricVector mv = compute_metric_vector(sample, scorer, down, checker);
    CHECK_FALSE(mv.semantic_coherence.has_value());
    CHECK(mv.absent.at("semantic_coherence") == "EmbedderUnavailable");
  }
  SUBCASE("unreachable scorer fails the sample") {
    const DownScorer down;
    CHECK_THROWS_WITH_AS(compute_metric_vector(sample, down, embedder, checker),
                         doctest::Contains("ScorerUnavailable"), Error);
  }
}
