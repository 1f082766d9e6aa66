#include "doctest.h"

#include <algorithm>

#include "stylereward/error.hpp"
#include "stylereward/search.hpp"

#include "../support.hpp"

using namespace stylereward;

namespace {

struct Yelp {
  IntensityScale scale = IntensityScale::sentiment();
  std::vector<Corpus> corpora = srt::fixture_corpora("sentiment", 5);
  PivotModel pivots = PivotModel::fit(corpora, scale);
  ClassifierJudge judge{
      std::make_shared<NaiveBayesClassifier>(train_classifier(corpora))};
  EmbeddingTable emb = EmbeddingTable::load(srt::fixture("embeddings.txt"));
  RewardConfig cfg = [] {
    RewardConfig c;
    c.mode = JudgeMode::Classification;
    return c;
  }();

  RewardContext ctx() const { return {&scale, &pivots, &judge, &emb}; }
};

}  // namespace

TEST_CASE("rerank a single candidate") {
  const Yelp y;
  const std::vector<std::string> c = {"good food"};
  const auto out = rerank(c, tokenize("good food"), 5, y.ctx(), y.cfg);
  REQUIRE(out.size() == 1);
  CHECK(out[0].text == "good food");
  CHECK_THROWS_AS(rerank({}, tokenize("x"), 5, y.ctx(), y.cfg), Error);
}

TEST_CASE("consistency-dominant weights put the copy first") {
  Yelp y;
  y.cfg.lambda_sent = 0.0;
  y.cfg.lambda_lex = 0.0;
  y.cfg.lambda_cons = 1.0;
  const std::vector<std::string> c = {"absolutely amazing staff",
                                      "the food was okay"};
  const auto out = rerank(c, tokenize("the food was okay"), 5, y.ctx(), y.cfg);
  CHECK(out[0].input_index == 1);
  CHECK(out[0].reward.consistency == 1.0);
}

TEST_CASE("rerank order equals the reward oracle, ties stable") {
  const Yelp y;
  const auto src = tokenize("The food was okay and the service was fine.");
  srt::Rng rng(37);
  const std::vector<std::string> pool = {
      "The food was okay and the service was fine.",
      "Amazing food and outstanding service.",
      "Terrible food and rude service.",
      "Good food and friendly service.",
      "Good food and friendly service.",
      "The food was bland.",
      "Absolutely perfect evening."};
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::string> cands;
    for (int i = rng.between(1, 5); i > 0; --i) cands.push_back(rng.pick(pool));
    const int target = rng.between(1, 5);
    const auto out = rerank(cands, src, target, y.ctx(), y.cfg);
    // Oracle: score each candidate directly and pick the first maximum.
    std::vector<double> totals;
    for (const auto& c : cands) {
      totals.push_back(
          total_reward(src, tokenize(c), target, y.ctx(), y.cfg).total);
    }
    const auto best = static_cast<std::size_t>(
        std::max_element(totals.begin(), totals.end()) - totals.begin());
    CHECK(out[0].input_index == best);
    for (std::size_t i = 1; i < out.size(); ++i) {
      CHECK(out[i - 1].reward.total >= out[i].reward.total);
      if (out[i - 1].reward.total == out[i].reward.total) {
        CHECK(out[i - 1].input_index < out[i].input_index);
      }
    }
  }
}

TEST_CASE("hill climbing toward five stars swaps in style vocabulary") {
  const Yelp y;
  const auto src = tokenize("good food");
  HillClimbOptions opt;
  opt.budget = 1;
  const auto r = hill_climb(src, 5, y.ctx(), y.cfg, opt);
  REQUIRE(r.trace.steps.size() == 1);
  const auto& step = r.trace.steps[0];
  CHECK(step.from == "good");
  const auto& vocab = y.pivots.style_vocab(5);
  CHECK(std::find(vocab.begin(), vocab.end(), step.to) != vocab.end());
  CHECK(r.trace.final_reward.total > r.trace.initial.total);
  CHECK(r.trace.final_reward.lexicon > r.trace.initial.lexicon);
  // Same numbers as a direct reward call on the rewritten text.
  CHECK(total_reward(src, r.rewritten, 5, y.ctx(), y.cfg) == r.trace.final_reward);
}

TEST_CASE("no strictly improving edit means no edits") {
  Yelp y;
  y.cfg.lambda_sent = 0.0;
  y.cfg.lambda_lex = 0.0;
  y.cfg.lambda_cons = 1.0;
  const auto src = tokenize("good food");
  const auto r = hill_climb(src, 5, y.ctx(), y.cfg);
  CHECK(r.trace.initial.total == doctest::Approx(1.0));
  CHECK(r.trace.steps.empty());
  CHECK(r.text == "good food");
}

TEST_CASE("budget contract and monotone traces") {
  const Yelp y;
  CHECK_THROWS_AS(hill_climb(tokenize("good food"), 5, y.ctx(), y.cfg, {0, 1}),
                  Error);
  const auto src = tokenize("The food was okay and the service was fine.");
  for (int budget : {1, 2, 5}) {
    for (int target = 1; target <= 5; ++target) {
      const auto r = hill_climb(src, target, y.ctx(), y.cfg, {budget, 2});
      CHECK(static_cast<int>(r.trace.steps.size()) <= budget);
      double prev = r.trace.initial.total;
      for (const auto& s : r.trace.steps) {
        CHECK(s.reward.total > prev);
        prev = s.reward.total;
        for (double c : {s.reward.sentence, s.reward.lexicon,
                         s.reward.consistency, s.reward.total}) {
          CHECK(c >= 0.0);
          CHECK(c <= 1.0 + 1e-12);
        }
      }
      CHECK(r.trace.final_reward.total == prev);
    }
  }
}
