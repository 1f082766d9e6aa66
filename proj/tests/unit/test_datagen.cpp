#include "doctest.h"

#include <atomic>
#include <cstdlib>
#include <mutex>
#include <thread>

#include "httplib.h"

#include "stylereward/datagen.hpp"
#include "stylereward/error.hpp"

#include "../support.hpp"

using namespace stylereward;

namespace {

// One known-good rewrite per readability level (FRE checked by the judge).
const char* const kLevelText[] = {
    "",
    "The cat sat on the mat. It was a nice day.",
    "Our team practiced every day because the big game was coming soon.",
    "Researchers found that regular exercise improved the attention of most "
    "people who took part in the study.",
    "Interdisciplinary collaboration facilitates sophisticated theoretical "
    "reconceptualization of organizational accountability.",
};

int target_of(const std::string& prompt, const IntensityScale& scale) {
  for (int l = 1; l <= scale.size(); ++l) {
    if (prompt.find("match the " + scale.level(l).prompt_name + " readability") !=
        std::string::npos) {
      return l;
    }
  }
  return 0;
}

ScriptedGenerator perfect(const IntensityScale& scale) {
  return ScriptedGenerator([&scale](const GeneratorRequest& r) {
    return std::string(kLevelText[target_of(r.prompt, scale)]);
  });
}

std::vector<Corpus> one_per_level() {
  return {srt::corpus(1, {"The dog ran to the park."}),
          srt::corpus(2, {"She borrowed a book about volcanoes and read it "
                          "over the weekend."}),
          srt::corpus(3, {"Local officials promised openness while they "
                          "looked into the details of the building contract."}),
          srt::corpus(4, {"Macroeconomic stabilization necessitates "
                          "coordinated fiscal consolidation."})};
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::Io;
}

}  // namespace

TEST_CASE("readability prompt") {
  const auto scale = IntensityScale::readability();
  const auto p = render_prompt("Some text.", 1, 4, scale, Style::Readability);
  CHECK(p.find("College") != std::string::npos);
  CHECK(p.find("0 ≤ FRE < 40") != std::string::npos);
  CHECK(p.rfind("Rewrite the following text to match the College readability "
                "level\n(Flesch Reading Ease score 0 ≤ FRE < 40).",
                0) == 0);
  CHECK(p.find("Input: Some text.\nOutput:") != std::string::npos);
  CHECK(p == render_prompt("Some text.", 1, 4, scale, Style::Readability));
}

TEST_CASE("sentiment prompt") {
  const auto scale = IntensityScale::sentiment();
  const auto p = render_prompt("Meh.", 2, 5, scale, Style::Sentiment);
  CHECK(p.rfind("Rewrite the following 2 Stars Yelp review into an 5 Stars "
                "review.",
                0) == 0);
  CHECK(p.find("5 Stars") != std::string::npos);
  CHECK(kind_of([&] { render_prompt("x", 3, 3, scale, Style::Sentiment); }) ==
        ErrorKind::InvalidConfig);
  CHECK(kind_of([&] { render_prompt("x", 3, 7, scale, Style::Sentiment); }) ==
        ErrorKind::UnknownLevel);
  CHECK(kind_of([] { parse_style("poetry"); }) == ErrorKind::UnknownStyle);
}

TEST_CASE("synthesize_pair attempt accounting") {
  const auto scale = IntensityScale::readability();
  const RegressionJudge judge(scale);

  SUBCASE("correct on the first attempt") {
    auto gen = perfect(scale);
    const auto out = synthesize_pair("The dog ran.", 1, 4, scale,
                                     Style::Readability, gen, judge);
    const auto* t = std::get_if<ParallelTriple>(&out);
    REQUIRE(t != nullptr);
    CHECK(t->attempts == 1);
    CHECK(t->verdict->predicted_level == 4);
  }
  SUBCASE("correct only on the third attempt") {
    std::vector<GeneratorRequest> seen;
    ScriptedGenerator gen([&](const GeneratorRequest& r) {
      seen.push_back(r);
      return std::string(r.attempt == 3 ? kLevelText[2] : kLevelText[1]);
    });
    const auto out = synthesize_pair("The dog ran.", 1, 2, scale,
                                     Style::Readability, gen, judge);
    REQUIRE(std::holds_alternative<ParallelTriple>(out));
    CHECK(std::get<ParallelTriple>(out).attempts == 3);
    REQUIRE(seen.size() == 3);
    CHECK(seen[0].prompt == seen[2].prompt);
    CHECK(seen[0].max_attempts_remaining == 10);
    CHECK(seen[2].max_attempts_remaining == 8);
    CHECK(seen[0].temperature == 0.7);
  }
  SUBCASE("never correct: discarded after exactly ten attempts") {
    int calls = 0;
    ScriptedGenerator gen([&](const GeneratorRequest&) {
      ++calls;
      return std::string(kLevelText[1]);
    });
    const auto out = synthesize_pair("The dog ran.", 1, 3, scale,
                                     Style::Readability, gen, judge);
    REQUIRE(std::holds_alternative<Discarded>(out));
    CHECK(calls == 10);
    CHECK(std::get<Discarded>(out).attempts == 10);
    CHECK(std::get<Discarded>(out).transcripts.size() == 10);
  }
  SUBCASE("empty generations count as failed attempts") {
    ScriptedGenerator gen([](const GeneratorRequest&) { return std::string(); });
    const auto out = synthesize_pair("The dog ran.", 1, 3, scale,
                                     Style::Readability, gen, judge, 4);
    CHECK(std::get<Discarded>(out).attempts == 4);
  }
  SUBCASE("transport failures propagate") {
    ScriptedGenerator gen([](const GeneratorRequest&) -> std::string {
      throw Error(ErrorKind::GeneratorUnavailable, "down");
    });
    CHECK(kind_of([&] {
            synthesize_pair("The dog ran.", 1, 3, scale, Style::Readability,
                            gen, judge);
          }) == ErrorKind::GeneratorUnavailable);
  }
}

TEST_CASE("synthesize_dataset with a perfect generator") {
  const auto scale = IntensityScale::readability();
  const RegressionJudge judge(scale);
  auto gen = perfect(scale);
  const auto dir = srt::scratch("synth-perfect");
  SynthesisOptions o;
  o.dataset_path = dir / "d.jsonl";
  const auto corpora = one_per_level();
  const auto stats = synthesize_dataset(corpora, scale, gen, judge, o);
  CHECK(stats.tasks_total == 12);
  CHECK(stats.total_accepted() == 12);
  CHECK(stats.total_discarded() == 0);
  CHECK(stats.attempts_histogram[1] == 12);
  const auto triples = read_dataset(o.dataset_path);
  REQUIRE(triples.size() == 12);
  for (const auto& t : triples) {
    CHECK(t.source_level != t.target_level);
    CHECK(judge.judge(tokenize(t.generated)).predicted_level == t.target_level);
  }
  // Finished runs are idempotent: the cursor says everything is done.
  const auto again = synthesize_dataset(corpora, scale, gen, judge, o);
  CHECK(again.resumed_from == 12);
  CHECK(read_dataset(o.dataset_path) == triples);
}

TEST_CASE("college targets always fail") {
  const auto scale = IntensityScale::readability();
  const RegressionJudge judge(scale);
  ScriptedGenerator gen([&scale](const GeneratorRequest& r) {
    const int t = target_of(r.prompt, scale);
    return std::string(kLevelText[t == 4 ? 1 : t]);
  });
  const auto dir = srt::scratch("synth-college");
  SynthesisOptions o;
  o.dataset_path = dir / "d.jsonl";
  const auto corpora = one_per_level();
  const auto stats = synthesize_dataset(corpora, scale, gen, judge, o);
  for (int s = 0; s < 4; ++s) {
    for (int t = 0; t < 4; ++t) {
      if (s == t) continue;
      if (t == 3) {
        CHECK(stats.discarded[s][t] == 1);
        CHECK(stats.accepted[s][t] == 0);
      } else {
        CHECK(stats.accepted[s][t] == 1);
      }
    }
  }
  CHECK(read_dataset(o.dataset_path).size() == 9);
  const auto log = read_file(dir / "d.jsonl.discarded.jsonl");
  CHECK(std::count(log.begin(), log.end(), '\n') == 3);
  CHECK(nlohmann::json::parse(log.substr(0, log.find('\n')))
            .at("transcripts")
            .size() == 10);
}

TEST_CASE("resume after an interrupt") {
  const auto scale = IntensityScale::readability();
  const RegressionJudge judge(scale);
  const auto corpora = one_per_level();

  const auto ref_dir = srt::scratch("synth-ref");
  SynthesisOptions ref;
  ref.dataset_path = ref_dir / "d.jsonl";
  auto good = perfect(scale);
  synthesize_dataset(corpora, scale, good, judge, ref);

  const auto dir = srt::scratch("synth-resume");
  SynthesisOptions o;
  o.dataset_path = dir / "d.jsonl";
  int calls = 0;
  ScriptedGenerator flaky([&](const GeneratorRequest& r) {
    if (++calls == 8) throw Error(ErrorKind::GeneratorUnavailable, "cut");
    return std::string(kLevelText[target_of(r.prompt, scale)]);
  });
  CHECK(kind_of([&] { synthesize_dataset(corpora, scale, flaky, judge, o); }) ==
        ErrorKind::GeneratorUnavailable);
  CHECK(read_dataset(o.dataset_path).size() == 7);

  // A torn append past the cursor is dropped on resume.
  {
    std::ofstream out(o.dataset_path, std::ios::app);
    out << "{\"source\": \"half";
  }
  const auto stats = synthesize_dataset(corpora, scale, good, judge, o);
  CHECK(stats.resumed_from == 7);
  CHECK(stats.total_accepted() == 12);
  CHECK(read_file(o.dataset_path) == read_file(ref.dataset_path));
}

TEST_CASE("a cursor from a different run is refused") {
  const auto scale = IntensityScale::readability();
  const RegressionJudge judge(scale);
  auto gen = perfect(scale);
  const auto dir = srt::scratch("synth-mismatch");
  SynthesisOptions o;
  o.dataset_path = dir / "d.jsonl";
  const auto corpora = one_per_level();
  synthesize_dataset(corpora, scale, gen, judge, o);
  o.seed = 7;
  o.quota_per_level = 1;
  auto other = corpora;
  other[0] = srt::corpus(1, {"A different dog ran to the park."});
  CHECK(kind_of([&] { synthesize_dataset(other, scale, gen, judge, o); }) ==
        ErrorKind::InvalidConfig);
}

TEST_CASE("bit-reproducible output, with and without concurrency") {
  const auto scale = IntensityScale::sentiment();
  const auto corpora = srt::fixture_corpora("sentiment", 5);
  const ClassifierJudge judge(
      std::make_shared<NaiveBayesClassifier>(train_classifier(corpora)));
  // Deterministic but imperfect: right on every third attempt per prompt.
  std::mutex mu;
  ScriptedGenerator gen([&](const GeneratorRequest& r) {
    std::lock_guard lock(mu);
    for (int l = 5; l >= 1; --l) {
      if (r.prompt.find("into an " + scale.level(l).prompt_name) !=
          std::string::npos) {
        const int use = r.attempt % 3 == 0 ? l : (l % 5) + 1;
        return corpora[use - 1].documents[r.attempt % 5].raw;
      }
    }
    return std::string();
  });
  std::string first;
  for (std::size_t conc : {1u, 1u, 4u}) {
    const auto dir = srt::scratch("synth-repro-" + std::to_string(conc));
    SynthesisOptions o;
    o.style = Style::Sentiment;
    o.dataset_path = dir / "d.jsonl";
    o.quota_per_level = 3;
    o.concurrency = conc;
    const auto stats = synthesize_dataset(corpora, scale, gen, judge, o);
    CHECK(stats.tasks_total == 5 * 3 * 4);
    for (std::size_t a = 11; a < stats.attempts_histogram.size(); ++a) {
      CHECK(stats.attempts_histogram[a] == 0);
    }
    CHECK(stats.attempts_histogram[0] == 0);
    const auto bytes = read_file(o.dataset_path);
    if (first.empty()) first = bytes;
    CHECK(bytes == first);
    for (const auto& t : read_dataset(o.dataset_path)) {
      CHECK(t.attempts >= 1);
      CHECK(t.attempts <= 10);
      CHECK(judge.judge(tokenize(t.generated)).predicted_level == t.target_level);
    }
  }
}

TEST_CASE("dataset files") {
  const auto dir = srt::scratch("dataset-io");
  JudgeVerdict v;
  v.mode = JudgeMode::Classification;
  v.distribution = {0.1, 0.9};
  v.predicted_level = 2;
  const std::vector<ParallelTriple> triples = {
      {"src one", 1, 2, "gen one", 1, v},
      {"src \"two\"\nline", 2, 1, "gen two ✓", 3, std::nullopt},
      {"three", 1, 2, "gen", 10, std::nullopt}};
  write_dataset(dir / "d.jsonl", triples);
  CHECK(read_dataset(dir / "d.jsonl") == triples);

  write_file_atomic(dir / "empty.jsonl", "");
  CHECK(read_dataset(dir / "empty.jsonl").empty());

  write_file_atomic(dir / "bad.jsonl",
                    to_record(triples[0]) +
                        "\n{\"source\":\"a\",\"source_level\":1,"
                        "\"generated\":\"b\",\"attempts\":1}\n");
  try {
    read_dataset(dir / "bad.jsonl");
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MalformedRecord);
    CHECK(e.line() == 2u);
  }
}

TEST_CASE("chat-completions client against a local server") {
  httplib::Server server;
  std::string seen_auth;
  nlohmann::json seen_body;
  std::atomic<int> mode{0};
  server.Post("/v1/chat/completions", [&](const httplib::Request& req,
                                          httplib::Response& res) {
    seen_auth = req.get_header_value("Authorization");
    seen_body = nlohmann::json::parse(req.body);
    if (mode == 1) {
      res.status = 500;
      return;
    }
    if (mode == 2) {
      res.set_content("{\"choices\": []}", "application/json");
      return;
    }
    nlohmann::json reply{
        {"choices", {{{"message", {{"role", "assistant"}, {"content", "hi"}}}}}}};
    res.set_content(reply.dump(), "application/json");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread th([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  ::setenv("SR_TEST_KEY", "sekret", 1);
  ChatCompletionsGenerator::Options opt;
  opt.base_url = "http://127.0.0.1:" + std::to_string(port);
  opt.model = "test-model";
  opt.api_key_env = "SR_TEST_KEY";
  ChatCompletionsGenerator gen(opt);
  GeneratorRequest req;
  req.prompt = "Say hi";
  CHECK(gen.generate(req) == "hi");
  CHECK(seen_auth == "Bearer sekret");
  CHECK(seen_body.at("model") == "test-model");
  CHECK(seen_body.at("temperature") == 0.7);
  CHECK(seen_body.at("messages").at(0).at("content") == "Say hi");

  mode = 1;
  CHECK(kind_of([&] { gen.generate(req); }) == ErrorKind::GeneratorUnavailable);
  mode = 2;
  CHECK(kind_of([&] { gen.generate(req); }) == ErrorKind::GeneratorUnavailable);

  server.stop();
  th.join();
  CHECK(kind_of([&] { gen.generate(req); }) == ErrorKind::GeneratorUnavailable);
}
