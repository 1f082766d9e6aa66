#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "stylereward/rewards.hpp"
#include "stylereward/text.hpp"

namespace stylereward {

struct RankedCandidate {
  std::size_t input_index = 0;
  std::string text;
  RewardBreakdown reward;
};

// Scores every candidate against `source` and sorts by total reward,
// descending. Equal totals keep input order.
std::vector<RankedCandidate> rerank(std::span<const std::string> candidates,
                                    const Document& source, int target_level,
                                    const RewardContext& ctx,
                                    const RewardConfig& cfg);

struct EditStep {
  std::size_t position = 0;
  std::string from;
  std::string to;
  int predicted_level = 0;
  RewardBreakdown reward;  // after the edit

  std::string describe() const;
};

struct EditTrace {
  RewardBreakdown initial;
  RewardBreakdown final_reward;
  int initial_level = 0;
  int final_level = 0;
  std::vector<EditStep> steps;

  nlohmann::json to_json() const;
};

struct HillClimbOptions {
  int budget = 10;  // max accepted edits, >= 1
  // Style-vocabulary tokens tried per position, most similar first.
  std::size_t proposals_per_position = 1;
};

struct HillClimbResult {
  Document rewritten;
  std::string text;
  EditTrace trace;
};

// Greedy single-token substitution toward the target level. Each round
// proposes, for every position, the target style-vocabulary tokens closest in
// embedding space to the current token, and applies the best proposal only if
// it strictly raises the total reward. Needs scale, pivots, judge and
// embeddings in `ctx`.
HillClimbResult hill_climb(const Document& source, int target_level,
                           const RewardContext& ctx, const RewardConfig& cfg,
                           const HillClimbOptions& options = {});

}  // namespace stylereward
