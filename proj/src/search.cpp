#include "stylereward/search.hpp"

#include <algorithm>
#include <numeric>

#include "stylereward/error.hpp"

namespace stylereward {

std::vector<RankedCandidate> rerank(std::span<const std::string> candidates,
                                    const Document& source, int target_level,
                                    const RewardContext& ctx,
                                    const RewardConfig& cfg) {
  if (candidates.empty()) {
    throw Error(ErrorKind::InvalidConfig, "rerank needs at least one candidate");
  }
  std::vector<RankedCandidate> out;
  out.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const Document doc = tokenize(candidates[i]);
    out.push_back({i, candidates[i],
                   total_reward(source, doc, target_level, ctx, cfg)});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const RankedCandidate& a, const RankedCandidate& b) {
                     return a.reward.total > b.reward.total;
                   });
  return out;
}

std::string EditStep::describe() const {
  return "replace '" + from + "' with '" + to + "' at " +
         std::to_string(position);
}

nlohmann::json EditTrace::to_json() const {
  nlohmann::json steps_json = nlohmann::json::array();
  for (const auto& s : steps) {
    steps_json.push_back({{"edit", s.describe()},
                          {"position", s.position},
                          {"from", s.from},
                          {"to", s.to},
                          {"predicted_level", s.predicted_level},
                          {"reward", s.reward.to_json()}});
  }
  return {{"initial", initial.to_json()},
          {"initial_level", initial_level},
          {"final", final_reward.to_json()},
          {"final_level", final_level},
          {"steps", std::move(steps_json)}};
}

namespace {

struct Scored {
  RewardBreakdown reward;
  int level = 0;
};

Scored score(const Document& source, const Document& doc, int target,
             const RewardContext& ctx, const RewardConfig& cfg) {
  const JudgeVerdict verdict = ctx.judge->judge(doc);
  return {total_reward(source, doc, verdict, target, ctx, cfg),
          verdict.predicted_level};
}

}  // namespace

HillClimbResult hill_climb(const Document& source, int target_level,
                           const RewardContext& ctx, const RewardConfig& cfg,
                           const HillClimbOptions& options) {
  if (!ctx.scale || !ctx.pivots || !ctx.judge || !ctx.embeddings) {
    throw Error(ErrorKind::InvalidConfig, "hill climbing needs a full context");
  }
  if (options.budget < 1) {
    throw Error(ErrorKind::InvalidConfig, "budget must be at least 1");
  }
  if (source.empty()) {
    throw Error(ErrorKind::EmptySource, "nothing to rewrite");
  }
  const auto& vocab = ctx.pivots->style_vocab(target_level);
  std::vector<std::vector<double>> vocab_vecs;
  vocab_vecs.reserve(vocab.size());
  for (const auto& t : vocab) vocab_vecs.push_back(ctx.embeddings->lookup(t));
  const std::size_t per_position =
      std::max<std::size_t>(1, options.proposals_per_position);

  HillClimbResult result;
  result.rewritten = source;
  Scored current = score(source, source, target_level, ctx, cfg);
  result.trace.initial = current.reward;
  result.trace.initial_level = current.level;

  std::vector<std::size_t> order(vocab.size());
  for (int round = 0; round < options.budget; ++round) {
    bool found = false;
    EditStep best_step;
    Scored best = current;
    Document best_doc;
    for (std::size_t pos = 0; pos < result.rewritten.size(); ++pos) {
      const std::string& here = result.rewritten.tokens[pos];
      const auto v = ctx.embeddings->lookup(here);
      std::vector<double> sims(vocab.size());
      for (std::size_t i = 0; i < vocab.size(); ++i) {
        sims[i] = vocab[i] == here ? -2.0 : dot(v, vocab_vecs[i]);
      }
      std::iota(order.begin(), order.end(), std::size_t{0});
      const std::size_t m = std::min(per_position, order.size());
      std::partial_sort(order.begin(), order.begin() + static_cast<long>(m),
                        order.end(), [&](std::size_t a, std::size_t b) {
                          return sims[a] != sims[b] ? sims[a] > sims[b] : a < b;
                        });
      for (std::size_t r = 0; r < m; ++r) {
        const std::size_t cand = order[r];
        if (vocab[cand] == here) continue;
        Document doc = result.rewritten;
        doc.tokens[pos] = vocab[cand];
        const Scored s = score(source, doc, target_level, ctx, cfg);
        if (s.reward.total > best.reward.total) {
          found = true;
          best = s;
          best_step = {pos, here, vocab[cand], s.level, s.reward};
          best_doc = std::move(doc);
        }
      }
    }
    if (!found) break;
    best_doc.raw = detokenize(best_doc);
    result.rewritten = std::move(best_doc);
    current = best;
    result.trace.steps.push_back(std::move(best_step));
  }
  result.trace.final_reward = current.reward;
  result.trace.final_level = current.level;
  result.text = result.trace.steps.empty() ? source.raw
                                           : detokenize(result.rewritten);
  return result;
}

}  // namespace stylereward
