#pragma once

#include <span>

#include "json.hpp"

#include "stylereward/corpus_model.hpp"
#include "stylereward/embeddings.hpp"
#include "stylereward/judges.hpp"
#include "stylereward/readability.hpp"
#include "stylereward/text.hpp"

namespace stylereward {

struct RewardConfig {
  double lambda_sent = 0.5;
  double lambda_lex = 0.3;
  double lambda_cons = 0.2;
  double temperature = 0.01;  // lexicon softmax
  double sigma = 10.0;        // Gaussian width of the regression reward
  JudgeMode mode = JudgeMode::Regression;

  // Throws InvalidConfig unless T > 0, sigma > 0, lambdas >= 0 with a
  // positive sum.
  void validate() const;
  nlohmann::json to_json() const;
  // Missing fields keep their defaults.
  static RewardConfig from_json(const nlohmann::json& j);
  static RewardConfig from_json(const nlohmann::json& j,
                                RewardConfig defaults);
};

struct RewardBreakdown {
  double sentence = 0.0;
  double lexicon = 0.0;
  double consistency = 0.0;
  double total = 0.0;

  nlohmann::json to_json() const;
  bool operator==(const RewardBreakdown&) const = default;
};

// Borrowed dependencies for reward evaluation. The scale is always needed;
// the other members only by the components that use them.
struct RewardContext {
  const IntensityScale* scale = nullptr;
  const PivotModel* pivots = nullptr;
  const Judge* judge = nullptr;
  const EmbeddingTable* embeddings = nullptr;
};

// exp(-(observed - midpoint)^2 / (2 sigma^2)), the Gaussian density ratio
// f(observed) / f(midpoint).
double regression_reward(double observed, int target_level,
                         const IntensityScale& scale, double sigma);

// Probability the verdict assigns to the target. Throws ModeMismatch for a
// regression verdict.
double classification_reward(const JudgeVerdict& verdict, int target_level);

// softmax_j(sim_j / T) at the target, stabilized by subtracting the max.
double lexicon_reward_from_similarities(std::span<const double> similarities,
                                        int target_level, double temperature);

// Cosine of the document's TF-IDF vector to every pivot, then the softmax
// above. A zero document vector gives 1/k.
double lexicon_reward(const Document& doc, int target_level,
                      const PivotModel& model, double temperature);

// Mean over generated tokens of the best clamped dot product against any
// source token. Throws EmptySource / EmptyGenerated.
double consistency_reward(const Document& source, const Document& generated,
                          const EmbeddingTable& table);

// Sentence reward from a verdict under the configured mode.
double sentence_reward(const JudgeVerdict& verdict, int target_level,
                       const IntensityScale& scale, const RewardConfig& cfg);

// lambda-weighted sum of the three components.
double combine(const RewardConfig& cfg, double sentence, double lexicon,
               double consistency);

RewardBreakdown total_reward(const Document& source, const Document& generated,
                             int target_level, const RewardContext& ctx,
                             const RewardConfig& cfg);

// Same, reusing a verdict already computed for `generated`.
RewardBreakdown total_reward(const Document& source, const Document& generated,
                             const JudgeVerdict& verdict, int target_level,
                             const RewardContext& ctx, const RewardConfig& cfg);

}  // namespace stylereward
