#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "stylereward/corpus_model.hpp"
#include "stylereward/datagen.hpp"
#include "stylereward/embeddings.hpp"
#include "stylereward/judges.hpp"
#include "stylereward/readability.hpp"
#include "stylereward/rewards.hpp"

namespace stylereward {

enum class JudgeKind { Fre, NaiveBayes };

struct StyleConfig {
  // "readability", "sentiment" or a path to a scale JSON file.
  std::string scale = "readability";
  std::vector<std::filesystem::path> corpora;  // level 1..k in order
  std::filesystem::path pivots;
  JudgeKind judge = JudgeKind::Fre;
  std::filesystem::path judge_path;  // naive_bayes model file
};

struct SynthesisConfig {
  std::size_t quota = 0;
  int max_attempts = kDefaultMaxAttempts;
  std::size_t concurrency = 1;
  std::uint64_t seed = 42;
  std::filesystem::path output;
};

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::size_t batch_limit = 64;
};

// Engine-wide settings. Relative paths are resolved against the directory of
// the config file.
struct EngineConfig {
  std::filesystem::path embeddings;
  OovOptions oov;
  RewardConfig reward;
  std::map<Style, StyleConfig> styles;
  ChatCompletionsGenerator::Options generator;
  double generator_temperature = kDefaultGeneratorTemperature;
  SynthesisConfig synthesis;
  ServiceConfig service;

  // Throws InvalidConfig.
  static EngineConfig from_json(const nlohmann::json& j,
                                const std::filesystem::path& base_dir = {});
  static EngineConfig load(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  const StyleConfig& style(Style s) const;  // throws UnknownStyle
};

IntensityScale resolve_scale(const std::string& name);

// Reward settings for one style: the judge decides regression vs
// classification.
RewardConfig reward_config_for(const EngineConfig& cfg, Style style);

// Immutable models for one style, shared read-only across threads.
struct StyleModels {
  Style style = Style::Readability;
  IntensityScale scale = IntensityScale::readability();
  std::shared_ptr<const PivotModel> pivots;
  std::shared_ptr<const Judge> judge;
  std::shared_ptr<const EmbeddingTable> embeddings;
  RewardConfig reward;

  RewardContext context() const {
    return {&scale, pivots.get(), judge.get(), embeddings.get()};
  }
};

std::shared_ptr<const Judge> load_judge(const StyleConfig& sc,
                                        const IntensityScale& scale);

// Loads scale, pivots, judge and the shared embedding table.
StyleModels load_style(const EngineConfig& cfg, Style style,
                       std::shared_ptr<const EmbeddingTable> embeddings);

std::vector<Corpus> load_corpora(const StyleConfig& sc);

// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);
std::string sha256_hex(std::string_view bytes);

}  // namespace stylereward
