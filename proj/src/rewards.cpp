#include "stylereward/rewards.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "stylereward/error.hpp"

namespace stylereward {
namespace {

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorKind::InvalidConfig, what);
}

void check_target(int target_level, int k) {
  if (target_level < 1 || target_level > k) {
    throw Error(ErrorKind::UnknownLevel,
                "target level " + std::to_string(target_level) +
                    " is not in 1.." + std::to_string(k));
  }
}

}  // namespace

void RewardConfig::validate() const {
  require(std::isfinite(temperature) && temperature > 0.0,
          "temperature must be positive");
  require(std::isfinite(sigma) && sigma > 0.0, "sigma must be positive");
  require(lambda_sent >= 0.0 && lambda_lex >= 0.0 && lambda_cons >= 0.0,
          "reward weights must be non-negative");
  require(lambda_sent + lambda_lex + lambda_cons > 0.0,
          "reward weights must not all be zero");
}

nlohmann::json RewardConfig::to_json() const {
  return {{"weights", {lambda_sent, lambda_lex, lambda_cons}},
          {"temperature", temperature},
          {"sigma", sigma},
          {"mode", to_string(mode)}};
}

RewardConfig RewardConfig::from_json(const nlohmann::json& j) {
  return from_json(j, RewardConfig{});
}

RewardConfig RewardConfig::from_json(const nlohmann::json& j,
                                     RewardConfig defaults) {
  RewardConfig cfg = defaults;
  try {
    if (j.contains("weights")) {
      const auto w = j.at("weights").get<std::vector<double>>();
      require(w.size() == 3, "weights must have three entries");
      cfg.lambda_sent = w[0];
      cfg.lambda_lex = w[1];
      cfg.lambda_cons = w[2];
    }
    cfg.temperature = j.value("temperature", cfg.temperature);
    cfg.sigma = j.value("sigma", cfg.sigma);
    if (j.contains("mode")) {
      const auto mode = j.at("mode").get<std::string>();
      if (mode == "regression") {
        cfg.mode = JudgeMode::Regression;
      } else if (mode == "classification") {
        cfg.mode = JudgeMode::Classification;
      } else {
        throw Error(ErrorKind::InvalidConfig, "unknown reward mode " + mode);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidConfig,
                std::string("malformed reward config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

nlohmann::json RewardBreakdown::to_json() const {
  return {{"r_sent", sentence},
          {"r_lex", lexicon},
          {"r_cons", consistency},
          {"total", total}};
}

double regression_reward(double observed, int target_level,
                         const IntensityScale& scale, double sigma) {
  if (!(sigma > 0.0)) {
    throw Error(ErrorKind::InvalidConfig, "sigma must be positive");
  }
  const double d = observed - scale.midpoint(target_level);
  return std::exp(-(d * d) / (2.0 * sigma * sigma));
}

double classification_reward(const JudgeVerdict& verdict, int target_level) {
  if (verdict.mode != JudgeMode::Classification) {
    throw Error(ErrorKind::ModeMismatch,
                "classification reward needs a classification verdict");
  }
  check_target(target_level, static_cast<int>(verdict.distribution.size()));
  return std::clamp(
      verdict.distribution[static_cast<std::size_t>(target_level - 1)], 0.0,
      1.0);
}

double lexicon_reward_from_similarities(std::span<const double> similarities,
                                        int target_level, double temperature) {
  if (!(temperature > 0.0)) {
    throw Error(ErrorKind::InvalidConfig, "temperature must be positive");
  }
  check_target(target_level, static_cast<int>(similarities.size()));
  const double peak = *std::max_element(similarities.begin(), similarities.end());
  double z = 0.0;
  double target = 0.0;
  for (std::size_t j = 0; j < similarities.size(); ++j) {
    const double e = std::exp((similarities[j] - peak) / temperature);
    z += e;
    if (static_cast<int>(j) + 1 == target_level) target = e;
  }
  return target / z;
}

double lexicon_reward(const Document& doc, int target_level,
                      const PivotModel& model, double temperature) {
  const auto sims = model.similarities(model.doc_vector(doc));
  return lexicon_reward_from_similarities(sims, target_level, temperature);
}

double consistency_reward(const Document& source, const Document& generated,
                          const EmbeddingTable& table) {
  if (source.empty()) {
    throw Error(ErrorKind::EmptySource, "consistency needs a source text");
  }
  if (generated.empty()) {
    throw Error(ErrorKind::EmptyGenerated,
                "consistency needs a generated text");
  }
  const auto src = table.embed(source);
  double sum = 0.0;
  for (const auto& token : generated.tokens) {
    const auto y = table.lookup(token);
    double best = 0.0;
    for (const auto& x : src) best = std::max(best, dot(y, x));
    sum += std::min(best, 1.0);
  }
  return sum / static_cast<double>(generated.size());
}

double sentence_reward(const JudgeVerdict& verdict, int target_level,
                       const IntensityScale& scale, const RewardConfig& cfg) {
  if (verdict.mode != cfg.mode) {
    throw Error(ErrorKind::ModeMismatch,
                std::string("reward mode is ") + to_string(cfg.mode) +
                    " but the judge is " + to_string(verdict.mode));
  }
  if (cfg.mode == JudgeMode::Regression) {
    return regression_reward(verdict.score, target_level, scale, cfg.sigma);
  }
  return classification_reward(verdict, target_level);
}

double combine(const RewardConfig& cfg, double sentence, double lexicon,
               double consistency) {
  return cfg.lambda_sent * sentence + cfg.lambda_lex * lexicon +
         cfg.lambda_cons * consistency;
}

RewardBreakdown total_reward(const Document& source, const Document& generated,
                             const JudgeVerdict& verdict, int target_level,
                             const RewardContext& ctx, const RewardConfig& cfg) {
  if (!ctx.scale || !ctx.pivots || !ctx.embeddings) {
    throw Error(ErrorKind::InvalidConfig, "reward context is incomplete");
  }
  cfg.validate();
  check_target(target_level, ctx.scale->size());
  RewardBreakdown r;
  r.sentence = sentence_reward(verdict, target_level, *ctx.scale, cfg);
  r.lexicon = lexicon_reward(generated, target_level, *ctx.pivots,
                             cfg.temperature);
  r.consistency = consistency_reward(source, generated, *ctx.embeddings);
  r.total = combine(cfg, r.sentence, r.lexicon, r.consistency);
  return r;
}

RewardBreakdown total_reward(const Document& source, const Document& generated,
                             int target_level, const RewardContext& ctx,
                             const RewardConfig& cfg) {
  if (!ctx.judge) {
    throw Error(ErrorKind::InvalidConfig, "reward context has no judge");
  }
  if (generated.empty()) {
    throw Error(ErrorKind::EmptyGenerated, "generated text is empty");
  }
  const JudgeVerdict verdict = ctx.judge->judge(generated);
  return total_reward(source, generated, verdict, target_level, ctx, cfg);
}

}  // namespace stylereward
