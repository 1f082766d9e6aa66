#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

#include "stylereward/corpus_model.hpp"
#include "stylereward/judges.hpp"
#include "stylereward/readability.hpp"

namespace stylereward {

enum class Style { Readability, Sentiment };

// Throws UnknownStyle.
Style parse_style(std::string_view name);
const char* to_string(Style style);

inline constexpr int kDefaultMaxAttempts = 10;
inline constexpr double kDefaultGeneratorTemperature = 0.7;

struct GeneratorRequest {
  std::string prompt;
  double temperature = kDefaultGeneratorTemperature;
  int attempt = 1;                 // 1-based
  int max_attempts_remaining = 1;  // including this one
};

// Text-generation backend. Implementations used with concurrency > 1 must be
// safe to call from several threads. Transport failures throw
// GeneratorUnavailable.
class Generator {
 public:
  virtual ~Generator() = default;
  virtual std::string generate(const GeneratorRequest& request) = 0;
};

// Deterministic in-process generator driven by a callback.
class ScriptedGenerator final : public Generator {
 public:
  using Script = std::function<std::string(const GeneratorRequest&)>;
  explicit ScriptedGenerator(Script script) : script_(std::move(script)) {}
  std::string generate(const GeneratorRequest& request) override {
    return script_(request);
  }

 private:
  Script script_;
};

// Chat-completions style JSON endpoint:
//   POST {path} {"model", "messages": [{"role": "user", ...}], "temperature"}
// and reads choices[0].message.content. The bearer token comes only from the
// environment variable named in `api_key_env`.
class ChatCompletionsGenerator final : public Generator {
 public:
  struct Options {
    std::string base_url = "https://api.openai.com";
    std::string path = "/v1/chat/completions";
    std::string model = "gpt-4o-mini";
    std::string api_key_env = "STYLEREWARD_API_KEY";
    int timeout_seconds = 60;
  };

  explicit ChatCompletionsGenerator(Options options);
  std::string generate(const GeneratorRequest& request) override;

 private:
  Options options_;
  std::string api_key_;
};

// Instantiates the readability or sentiment rewriting prompt. Readability
// prompts name the target level and its score band; sentiment prompts name
// both ratings and need source != target.
std::string render_prompt(std::string_view source, int source_level,
                          int target_level, const IntensityScale& scale,
                          Style style);

struct ParallelTriple {
  std::string source;
  int source_level = 0;
  int target_level = 0;
  std::string generated;
  int attempts = 0;
  std::optional<JudgeVerdict> verdict;

  bool operator==(const ParallelTriple&) const = default;
};

struct Discarded {
  std::string source;
  int source_level = 0;
  int target_level = 0;
  int attempts = 0;
  std::vector<std::string> transcripts;  // one rejected generation per attempt
};

using SynthesisOutcome = std::variant<ParallelTriple, Discarded>;

// Generate, judge, accept iff the judge predicts the target; otherwise retry
// with the same prompt until `max_attempts` generations were rejected.
SynthesisOutcome synthesize_pair(std::string_view source, int source_level,
                                 int target_level, const IntensityScale& scale,
                                 Style style, Generator& generator,
                                 const Judge& judge,
                                 int max_attempts = kDefaultMaxAttempts,
                                 double temperature =
                                     kDefaultGeneratorTemperature);

struct SynthesisOptions {
  Style style = Style::Readability;
  std::filesystem::path dataset_path;
  // Defaults: dataset_path + ".cursor" and + ".discarded.jsonl".
  std::filesystem::path cursor_path;
  std::filesystem::path discard_log_path;
  std::size_t quota_per_level = 0;  // 0 = every document
  std::uint64_t seed = 42;
  int max_attempts = kDefaultMaxAttempts;
  std::size_t concurrency = 1;
  double temperature = kDefaultGeneratorTemperature;
};

struct SynthesisStats {
  int levels = 0;
  int max_attempts = kDefaultMaxAttempts;
  std::size_t tasks_total = 0;
  std::size_t tasks_done = 0;
  std::size_t resumed_from = 0;
  // [source-1][target-1]
  std::vector<std::vector<std::size_t>> accepted;
  std::vector<std::vector<std::size_t>> discarded;
  // attempts_histogram[a] counts accepted triples that needed `a` attempts.
  std::vector<std::size_t> attempts_histogram;

  std::size_t total_accepted() const;
  std::size_t total_discarded() const;
  nlohmann::json to_json() const;
  static SynthesisStats from_json(const nlohmann::json& j);
};

// For each sampled source document (uniform without replacement, up to the
// per-level quota) and each target level != its own, run synthesize_pair and
// append accepted triples to the dataset. Progress is committed in task order
// through an on-disk cursor, so an aborted run resumes without duplicates.
SynthesisStats synthesize_dataset(std::span<const Corpus> corpora,
                                  const IntensityScale& scale,
                                  Generator& generator, const Judge& judge,
                                  const SynthesisOptions& options);

std::string to_record(const ParallelTriple& triple);
// Throws MalformedRecord(line_no).
ParallelTriple parse_record(std::string_view line, std::size_t line_no);

void write_dataset(const std::filesystem::path& path,
                   std::span<const ParallelTriple> triples);
std::vector<ParallelTriple> read_dataset(const std::filesystem::path& path);

}  // namespace stylereward
