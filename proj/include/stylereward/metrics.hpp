#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "stylereward/rewards.hpp"

namespace stylereward {

// Word-level longest common subsequence, O(|a|·|b|) time, O(|b|) memory.
std::size_t lcs_length(std::span<const std::string> a,
                       std::span<const std::string> b);

// 100 · LCS(source, generated) / |generated|. Throws EmptyGenerated.
double rouge_l(const Document& source, const Document& generated);

int star_delta(int predicted, int target);

double h_re(double sentence_reward, double lexicon_reward);
// 0.5 · R_sent + 0.5 · R_lex with the reward module's component definitions.
double h_re(const Document& generated, int target_level,
            const RewardContext& ctx, const RewardConfig& cfg);

struct PredictionRecord {
  std::string source;
  std::string generated;
  int target_level = 0;
};

// JSONL: {"source": ..., "generated": ..., "target_level": n} per line.
std::vector<PredictionRecord> read_predictions(const std::filesystem::path& path);
std::vector<PredictionRecord> parse_predictions(std::string_view text);

// Per-pair metrics, exposed so callers can audit a report.
struct PairMetrics {
  int target_level = 0;
  int predicted_level = 0;
  double score = 0.0;  // FRE (regression) or predicted STAR (classification)
  double delta = 0.0;  // FRE_Δ or STAR_Δ
  int star_delta = 0;
  double rouge_l = 0.0;
  double h_re = 0.0;
};

PairMetrics score_pair(const PredictionRecord& pair, const RewardContext& ctx,
                       const RewardConfig& cfg);

struct LevelSummary {
  int level = 0;  // 0 for the macro-average row
  std::size_t n = 0;
  double mean_score = 0.0;
  double mean_delta = 0.0;
  double mean_star = 0.0;
  double mean_star_delta = 0.0;
  double mean_rouge_l = 0.0;
  double mean_h_re = 0.0;
};

struct EvaluationReport {
  JudgeMode mode = JudgeMode::Regression;
  std::string metric;  // "FRE" or "STAR"
  std::vector<LevelSummary> per_level;  // one row per level 1..k
  LevelSummary average;  // macro-average over levels with n > 0
  std::vector<std::vector<std::size_t>> confusion;  // [target-1][predicted-1]

  std::string format_table(const IntensityScale& scale) const;
  std::string confusion_csv() const;
  nlohmann::json to_json() const;
};

// Per-level means, macro averages and the target × predicted confusion
// matrix. Pair failures are rethrown with the pair index in Error::line().
EvaluationReport evaluate(std::span<const PredictionRecord> pairs,
                          const RewardContext& ctx, const RewardConfig& cfg);

}  // namespace stylereward
