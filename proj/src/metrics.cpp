#include "stylereward/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "stylereward/error.hpp"

namespace stylereward {

std::size_t lcs_length(std::span<const std::string> a,
                       std::span<const std::string> b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<std::size_t> prev(b.size() + 1, 0);
  std::vector<std::size_t> curr(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      curr[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1
                                     : std::max(prev[j], curr[j - 1]);
    }
    std::swap(prev, curr);
  }
  return prev[b.size()];
}

double rouge_l(const Document& source, const Document& generated) {
  if (generated.empty()) {
    throw Error(ErrorKind::EmptyGenerated, "RG-L needs a generated text");
  }
  const auto lcs = lcs_length(source.tokens, generated.tokens);
  return 100.0 * static_cast<double>(lcs) /
         static_cast<double>(generated.size());
}

int star_delta(int predicted, int target) { return std::abs(predicted - target); }

double h_re(double sentence_reward, double lexicon_reward) {
  return 0.5 * sentence_reward + 0.5 * lexicon_reward;
}

double h_re(const Document& generated, int target_level,
            const RewardContext& ctx, const RewardConfig& cfg) {
  if (!ctx.scale || !ctx.pivots || !ctx.judge) {
    throw Error(ErrorKind::InvalidConfig, "H-Re needs scale, pivots and judge");
  }
  const auto verdict = ctx.judge->judge(generated);
  return h_re(sentence_reward(verdict, target_level, *ctx.scale, cfg),
              lexicon_reward(generated, target_level, *ctx.pivots,
                             cfg.temperature));
}

std::vector<PredictionRecord> parse_predictions(std::string_view text) {
  std::vector<PredictionRecord> out;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      out.push_back({j.at("source").get<std::string>(),
                     j.at("generated").get<std::string>(),
                     j.at("target_level").get<int>()});
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::MalformedRecord, e.what(), line_no);
    }
  }
  return out;
}

std::vector<PredictionRecord> read_predictions(
    const std::filesystem::path& path) {
  return parse_predictions(read_file(path));
}

PairMetrics score_pair(const PredictionRecord& pair, const RewardContext& ctx,
                       const RewardConfig& cfg) {
  if (!ctx.scale || !ctx.pivots || !ctx.judge) {
    throw Error(ErrorKind::InvalidConfig,
                "evaluation needs scale, pivots and judge");
  }
  if (!ctx.scale->contains_level(pair.target_level)) {
    throw Error(ErrorKind::UnknownLevel,
                "target level " + std::to_string(pair.target_level));
  }
  const Document source = tokenize(pair.source);
  const Document generated = tokenize(pair.generated);
  if (generated.empty()) {
    throw Error(ErrorKind::EmptyGenerated, "generated text is empty");
  }
  const auto verdict = ctx.judge->judge(generated);

  PairMetrics m;
  m.target_level = pair.target_level;
  m.predicted_level = verdict.predicted_level;
  m.star_delta = star_delta(verdict.predicted_level, pair.target_level);
  if (verdict.mode == JudgeMode::Regression) {
    m.score = verdict.score;
    m.delta = fre_delta(verdict.score, pair.target_level, *ctx.scale);
  } else {
    m.score = verdict.predicted_level;
    m.delta = m.star_delta;
  }
  m.rouge_l = rouge_l(source, generated);
  m.h_re = h_re(sentence_reward(verdict, pair.target_level, *ctx.scale, cfg),
                lexicon_reward(generated, pair.target_level, *ctx.pivots,
                               cfg.temperature));
  return m;
}

EvaluationReport evaluate(std::span<const PredictionRecord> pairs,
                          const RewardContext& ctx, const RewardConfig& cfg) {
  if (pairs.empty()) {
    throw Error(ErrorKind::EmptyCorpus, "no prediction pairs to evaluate");
  }
  if (!ctx.scale || !ctx.judge) {
    throw Error(ErrorKind::InvalidConfig, "evaluation needs scale and judge");
  }
  const int k = ctx.scale->size();
  EvaluationReport report;
  report.mode = ctx.judge->mode();
  report.metric = report.mode == JudgeMode::Regression ? ctx.scale->metric()
                                                       : std::string("STAR");
  report.confusion.assign(static_cast<std::size_t>(k),
                          std::vector<std::size_t>(static_cast<std::size_t>(k)));
  report.per_level.resize(static_cast<std::size_t>(k));
  for (int l = 1; l <= k; ++l) report.per_level[l - 1].level = l;

  for (std::size_t i = 0; i < pairs.size(); ++i) {
    PairMetrics m;
    try {
      m = score_pair(pairs[i], ctx, cfg);
    } catch (const Error& e) {
      throw Error(e.kind(), "pair " + std::to_string(i) + ": " + e.what(), i);
    }
    auto& row = report.per_level[static_cast<std::size_t>(m.target_level - 1)];
    ++row.n;
    row.mean_score += m.score;
    row.mean_delta += m.delta;
    row.mean_star += m.predicted_level;
    row.mean_star_delta += m.star_delta;
    row.mean_rouge_l += m.rouge_l;
    row.mean_h_re += m.h_re;
    ++report.confusion[static_cast<std::size_t>(m.target_level - 1)]
                      [static_cast<std::size_t>(m.predicted_level - 1)];
  }

  std::size_t filled = 0;
  for (auto& row : report.per_level) {
    if (row.n == 0) continue;
    const double n = static_cast<double>(row.n);
    row.mean_score /= n;
    row.mean_delta /= n;
    row.mean_star /= n;
    row.mean_star_delta /= n;
    row.mean_rouge_l /= n;
    row.mean_h_re /= n;
    ++filled;
    report.average.n += row.n;
    report.average.mean_score += row.mean_score;
    report.average.mean_delta += row.mean_delta;
    report.average.mean_star += row.mean_star;
    report.average.mean_star_delta += row.mean_star_delta;
    report.average.mean_rouge_l += row.mean_rouge_l;
    report.average.mean_h_re += row.mean_h_re;
  }
  const double f = static_cast<double>(filled);
  report.average.mean_score /= f;
  report.average.mean_delta /= f;
  report.average.mean_star /= f;
  report.average.mean_star_delta /= f;
  report.average.mean_rouge_l /= f;
  report.average.mean_h_re /= f;
  return report;
}

std::string EvaluationReport::format_table(const IntensityScale& scale) const {
  std::ostringstream out;
  char buf[256];
  const std::string delta = metric + "_delta";
  std::snprintf(buf, sizeof buf, "%-20s %6s %10s %10s %8s %8s\n", "level", "n",
                metric.c_str(), delta.c_str(), "RG-L", "H-Re");
  out << buf;
  for (const auto& row : per_level) {
    const std::string& label = scale.level(row.level).label;
    if (row.n == 0) {
      std::snprintf(buf, sizeof buf, "%-20s %6zu %10s %10s %8s %8s\n",
                    label.c_str(), row.n, "-", "-", "-", "-");
    } else {
      std::snprintf(buf, sizeof buf,
                    "%-20s %6zu %10.2f %10.2f %8.2f %8.2f\n", label.c_str(),
                    row.n, row.mean_score, row.mean_delta, row.mean_rouge_l,
                    row.mean_h_re);
    }
    out << buf;
  }
  std::snprintf(buf, sizeof buf, "%-20s %6zu %10s %10.2f %8.2f %8.2f\n",
                "average", average.n, "-", average.mean_delta,
                average.mean_rouge_l, average.mean_h_re);
  out << buf;
  return out.str();
}

std::string EvaluationReport::confusion_csv() const {
  std::ostringstream out;
  out << "target";
  for (std::size_t p = 0; p < confusion.size(); ++p) {
    out << ",predicted_" << (p + 1);
  }
  out << '\n';
  for (std::size_t t = 0; t < confusion.size(); ++t) {
    out << (t + 1);
    for (auto c : confusion[t]) out << ',' << c;
    out << '\n';
  }
  return out.str();
}

namespace {

nlohmann::json summary_json(const LevelSummary& row) {
  nlohmann::json j{{"level", row.level}, {"n", row.n}};
  if (row.n > 0) {
    j["mean_score"] = row.mean_score;
    j["mean_delta"] = row.mean_delta;
    j["mean_star"] = row.mean_star;
    j["mean_star_delta"] = row.mean_star_delta;
    j["mean_rouge_l"] = row.mean_rouge_l;
    j["mean_h_re"] = row.mean_h_re;
  }
  return j;
}

}  // namespace

nlohmann::json EvaluationReport::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : per_level) rows.push_back(summary_json(row));
  return {{"mode", to_string(mode)},
          {"metric", metric},
          {"per_level", std::move(rows)},
          {"average", summary_json(average)},
          {"confusion", confusion}};
}

}  // namespace stylereward
