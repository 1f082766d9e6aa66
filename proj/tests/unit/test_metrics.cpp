#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <functional>

#include "stylereward/error.hpp"
#include "stylereward/metrics.hpp"

#include "../support.hpp"

using namespace stylereward;

namespace {

using Seq = std::vector<std::string>;

// Longest common subsequence by enumerating every subsequence of `a`.
std::size_t brute_lcs(const Seq& a, const Seq& b) {
  std::size_t best = 0;
  const std::size_t n = a.size();
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    Seq sub;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (std::size_t{1} << i)) sub.push_back(a[i]);
    }
    if (sub.size() <= best) continue;
    std::size_t j = 0;
    for (const auto& t : b) {
      if (j < sub.size() && sub[j] == t) ++j;
    }
    if (j == sub.size()) best = sub.size();
  }
  return best;
}

struct Readability {
  IntensityScale scale = IntensityScale::readability();
  RegressionJudge judge{scale};
  std::vector<Corpus> corpora = srt::fixture_corpora("readability", 4);
  PivotModel pivots = PivotModel::fit(corpora, scale);
  RewardContext ctx() const { return {&scale, &pivots, &judge, nullptr}; }
};

}  // namespace

TEST_CASE("RG-L examples") {
  const auto x = tokenize("The scientist did careful tests to get correct results.");
  CHECK(rouge_l(x, x) == 100.0);
  const auto y1 = tokenize(
      "The scientist did careful experiments to obtain precise results.");
  CHECK(lcs_length(x.tokens, y1.tokens) == 6);
  CHECK(rouge_l(x, y1) == doctest::Approx(66.67).epsilon(1e-4));
  CHECK(rouge_l(from_sentences({{"a", "b", "c", "d"}}),
                from_sentences({{"a", "c", "d", "e"}})) == 75.0);
  CHECK(rouge_l(tokenize("a b"), tokenize("c d")) == 0.0);
  CHECK_THROWS_AS(rouge_l(x, tokenize("")), Error);
}

TEST_CASE("LCS matches exhaustive enumeration for all short sequences") {
  // Alphabet of 3 over lengths 0..7 on one side; random partners up to 7.
  const Seq alphabet = {"a", "b", "c"};
  srt::Rng rng(23);
  std::function<void(Seq&, std::size_t)> walk = [&](Seq& a, std::size_t len) {
    if (a.size() == len) {
      for (int r = 0; r < 3; ++r) {
        Seq b;
        const int m = rng.between(0, 7);
        for (int i = 0; i < m; ++i) b.push_back(rng.pick(alphabet));
        CHECK(lcs_length(a, b) == brute_lcs(a, b));
        CHECK(lcs_length(b, a) == brute_lcs(a, b));
      }
      return;
    }
    for (const auto& s : alphabet) {
      a.push_back(s);
      walk(a, len);
      a.pop_back();
    }
  };
  for (std::size_t len = 0; len <= 7; ++len) {
    Seq a;
    walk(a, len);
  }
}

TEST_CASE("RG-L bounds") {
  srt::Rng rng(29);
  const Seq alphabet = {"a", "b", "c", "d", "e"};
  for (int i = 0; i < 1000; ++i) {
    Seq a, b;
    for (int j = rng.between(1, 8); j > 0; --j) a.push_back(rng.pick(alphabet));
    for (int j = rng.between(1, 8); j > 0; --j) b.push_back(rng.pick(alphabet));
    const double r = rouge_l(from_sentences({a}), from_sentences({b}));
    const bool shared = std::any_of(b.begin(), b.end(), [&](const auto& t) {
      return std::find(a.begin(), a.end(), t) != a.end();
    });
    if (shared) {
      CHECK(r > 0.0);
      CHECK(r <= 100.0);
    } else {
      CHECK(r == 0.0);
    }
    CHECK(rouge_l(from_sentences({a}), from_sentences({a})) == 100.0);
  }
}

TEST_CASE("STAR delta") {
  CHECK(star_delta(4, 5) == 1);
  CHECK(star_delta(3, 3) == 0);
  const auto s = IntensityScale::readability();
  CHECK(star_delta(level_of(47.42, s), 4) == 1);
  for (int a = 1; a <= 5; ++a) {
    for (int b = 1; b <= 5; ++b) {
      for (int c = 1; c <= 5; ++c) {
        CHECK(star_delta(a, c) <= star_delta(a, b) + star_delta(b, c));
      }
    }
  }
}

TEST_CASE("H-Re composition") {
  CHECK(h_re(1.0, 1.0) == 1.0);
  CHECK(h_re(0.5, 0.3) == doctest::Approx(0.4));
  const Readability r;
  const auto doc = tokenize("The cat sat on the mat.");
  const RewardConfig cfg;
  const double expect =
      0.5 * regression_reward(fre_score(doc), 1, r.scale, cfg.sigma) +
      0.5 * lexicon_reward(doc, 1, r.pivots, cfg.temperature);
  CHECK(h_re(doc, 1, r.ctx(), cfg) == doctest::Approx(expect).epsilon(1e-15));
}

TEST_CASE("prediction parsing") {
  const auto pairs = read_predictions(srt::fixture("predictions.jsonl"));
  CHECK(pairs.size() == 4);
  CHECK(pairs[3].target_level == 4);
  try {
    parse_predictions("{\"source\":\"a\",\"generated\":\"b\",\"target_level\":1}\n"
                      "\n{\"source\":\"a\",\"generated\":\"b\"}\n");
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MalformedRecord);
    CHECK(e.line() == 3u);
  }
}

TEST_CASE("four-pair toy report") {
  const Readability r;
  const auto pairs = read_predictions(srt::fixture("predictions.jsonl"));
  const auto report = evaluate(pairs, r.ctx(), RewardConfig{});
  // Hand tally of the judge: FRE 116.15, 63.49, 11.36, 118.18 map to
  // levels 1, 2, 4, 1.
  const std::vector<std::vector<std::size_t>> expect = {
      {1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 0, 1}, {1, 0, 0, 0}};
  CHECK(report.confusion == expect);
  CHECK(report.per_level[1].mean_score == doctest::Approx(63.486).epsilon(1e-4));
  CHECK(report.per_level[2].mean_delta == doctest::Approx(50 - 11.355).epsilon(1e-3));
  CHECK(report.per_level[3].mean_star_delta == 3.0);
  const std::string csv = report.confusion_csv();
  CHECK(csv.rfind("target,predicted_1,predicted_2,predicted_3,predicted_4\n", 0) == 0);
  CHECK(csv.find("3,0,0,0,1\n") != std::string::npos);
  const std::string table = report.format_table(r.scale);
  CHECK(table.find("elementary school") != std::string::npos);
  CHECK(table.find("average") != std::string::npos);
}

TEST_CASE("report aggregation invariants") {
  const Readability r;
  auto pairs = read_predictions(srt::fixture("predictions.jsonl"));
  SUBCASE("single pair equals its own metrics") {
    const std::vector<PredictionRecord> one = {pairs[1]};
    const auto report = evaluate(one, r.ctx(), RewardConfig{});
    const auto m = score_pair(pairs[1], r.ctx(), RewardConfig{});
    CHECK(report.per_level[1].mean_rouge_l == m.rouge_l);
    CHECK(report.per_level[1].mean_h_re == m.h_re);
    CHECK(report.per_level[1].mean_delta == m.delta);
    CHECK(report.average.mean_delta == m.delta);
  }
  SUBCASE("duplicated pair keeps the means") {
    const std::vector<PredictionRecord> two = {pairs[0], pairs[0]};
    const auto report = evaluate(two, r.ctx(), RewardConfig{});
    const auto m = score_pair(pairs[0], r.ctx(), RewardConfig{});
    CHECK(report.per_level[0].n == 2);
    CHECK(report.per_level[0].mean_h_re == doctest::Approx(m.h_re).epsilon(1e-15));
  }
  SUBCASE("rows sum to n, macro average, permutation invariance") {
    srt::Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<PredictionRecord> many;
      for (int i = rng.between(1, 12); i > 0; --i) many.push_back(rng.pick(pairs));
      const auto a = evaluate(many, r.ctx(), RewardConfig{});
      double macro = 0;
      int filled = 0;
      for (std::size_t l = 0; l < a.per_level.size(); ++l) {
        std::size_t row = 0;
        for (auto c : a.confusion[l]) row += c;
        CHECK(row == a.per_level[l].n);
        if (a.per_level[l].n > 0) {
          macro += a.per_level[l].mean_delta;
          ++filled;
        }
      }
      CHECK(a.average.mean_delta == doctest::Approx(macro / filled).epsilon(1e-12));
      auto shuffled = many;
      for (std::size_t i = shuffled.size(); i > 1; --i) {
        std::swap(shuffled[i - 1], shuffled[rng.below(i)]);
      }
      const auto b = evaluate(shuffled, r.ctx(), RewardConfig{});
      CHECK(b.confusion == a.confusion);
      CHECK(b.average.mean_delta == doctest::Approx(a.average.mean_delta).epsilon(1e-12));
      CHECK(b.average.mean_h_re == doctest::Approx(a.average.mean_h_re).epsilon(1e-12));
      CHECK(b.average.mean_rouge_l == doctest::Approx(a.average.mean_rouge_l).epsilon(1e-12));
    }
  }
}

TEST_CASE("evaluation errors carry the pair index") {
  const Readability r;
  CHECK_THROWS_AS(evaluate({}, r.ctx(), RewardConfig{}), Error);
  const std::vector<PredictionRecord> bad = {
      {"a", "The cat sat.", 1}, {"a", "...", 2}};
  try {
    evaluate(bad, r.ctx(), RewardConfig{});
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptyGenerated);
    CHECK(e.line() == 1u);
  }
}
