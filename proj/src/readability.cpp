#include "stylereward/readability.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "stylereward/error.hpp"

namespace stylereward {
namespace {

constexpr int kScaleVersion = 1;

std::string format_bound(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

double ScoreBand::distance(double score) const noexcept {
  if (contains(score)) return 0.0;
  if (score < low) return low - score;
  return score - high;
}

std::string ScoreBand::render(const std::string& metric) const {
  return format_bound(low) + " ≤ " + metric +
         (high_inclusive ? " ≤ " : " < ") + format_bound(high);
}

IntensityScale::IntensityScale(std::string name,
                               std::vector<IntensityLevel> levels,
                               std::string metric)
    : name_(std::move(name)), metric_(std::move(metric)),
      levels_(std::move(levels)) {
  if (levels_.size() < 2) {
    throw Error(ErrorKind::SingleLevel,
                "an intensity scale needs at least two levels");
  }
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    if (levels_[i].index != static_cast<int>(i) + 1) {
      throw Error(ErrorKind::InvalidConfig,
                  "level indices must be contiguous 1..k");
    }
    const auto& lvl = levels_[i];
    if (lvl.band && !(lvl.band->low < lvl.band->high)) {
      throw Error(ErrorKind::InvalidConfig,
                  "band of level " + std::to_string(lvl.index) + " is empty");
    }
    if (lvl.band && lvl.midpoint && !lvl.band->contains(*lvl.midpoint)) {
      throw Error(ErrorKind::InvalidConfig,
                  "midpoint of level " + std::to_string(lvl.index) +
                      " lies outside its band");
    }
  }
  if (has_bands()) {
    // Bands must be disjoint and monotone in the level index, either way.
    const bool descending = levels_[0].band->low > levels_[1].band->low;
    for (std::size_t i = 1; i < levels_.size(); ++i) {
      const auto& a = descending ? *levels_[i].band : *levels_[i - 1].band;
      const auto& b = descending ? *levels_[i - 1].band : *levels_[i].band;
      const bool ordered =
          a.high < b.low || (a.high == b.low && !a.high_inclusive);
      if (!ordered) {
        throw Error(ErrorKind::InvalidConfig,
                    "bands must be disjoint and ordered by level");
      }
    }
  }
}

IntensityScale IntensityScale::readability() {
  return IntensityScale(
      "readability",
      {
          {1, "elementary school", "Elementary", ScoreBand{80, 100, true}, 90},
          {2, "middle school", "Middle School", ScoreBand{60, 80, false}, 70},
          {3, "high school", "High School", ScoreBand{40, 60, false}, 50},
          {4, "college", "College", ScoreBand{0, 40, false}, 20},
      },
      "FRE");
}

IntensityScale IntensityScale::sentiment() {
  return IntensityScale("sentiment",
                        {
                            {1, "very negative", "1 Star", {}, {}},
                            {2, "negative", "2 Stars", {}, {}},
                            {3, "neutral", "3 Stars", {}, {}},
                            {4, "positive", "4 Stars", {}, {}},
                            {5, "very positive", "5 Stars", {}, {}},
                        },
                        "STAR");
}

const IntensityLevel& IntensityScale::level(int index) const {
  if (!contains_level(index)) {
    throw Error(ErrorKind::UnknownLevel,
                "level " + std::to_string(index) + " is not in 1.." +
                    std::to_string(size()));
  }
  return levels_[static_cast<std::size_t>(index - 1)];
}

bool IntensityScale::has_bands() const noexcept {
  for (const auto& lvl : levels_) {
    if (!lvl.band) return false;
  }
  return true;
}

double IntensityScale::midpoint(int index) const {
  const auto& lvl = level(index);
  if (!lvl.midpoint) {
    throw Error(ErrorKind::MissingMidpoint,
                "level " + std::to_string(index) + " of scale '" + name_ +
                    "' has no midpoint");
  }
  return *lvl.midpoint;
}

IntensityScale IntensityScale::from_json(const nlohmann::json& j) {
  try {
    if (j.value("version", 0) != kScaleVersion) {
      throw Error(ErrorKind::VersionMismatch,
                  "unsupported scale version " +
                      std::to_string(j.value("version", 0)));
    }
    std::vector<IntensityLevel> levels;
    for (const auto& jl : j.at("levels")) {
      IntensityLevel lvl;
      lvl.index = jl.at("index").get<int>();
      lvl.label = jl.at("label").get<std::string>();
      lvl.prompt_name = jl.value("prompt_name", lvl.label);
      if (jl.contains("band") && !jl.at("band").is_null()) {
        const auto& jb = jl.at("band");
        lvl.band = ScoreBand{jb.at("low").get<double>(),
                             jb.at("high").get<double>(),
                             jb.value("high_inclusive", false)};
      }
      if (jl.contains("midpoint") && !jl.at("midpoint").is_null()) {
        lvl.midpoint = jl.at("midpoint").get<double>();
      }
      levels.push_back(std::move(lvl));
    }
    return IntensityScale(j.value("name", std::string("custom")),
                          std::move(levels),
                          j.value("metric", std::string("FRE")));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidConfig,
                std::string("malformed scale definition: ") + e.what());
  }
}

IntensityScale IntensityScale::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open scale " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidConfig,
                "scale " + path.string() + " is not valid JSON: " + e.what());
  }
  return from_json(j);
}

nlohmann::json IntensityScale::to_json() const {
  nlohmann::json levels = nlohmann::json::array();
  for (const auto& lvl : levels_) {
    nlohmann::json jl{{"index", lvl.index},
                      {"label", lvl.label},
                      {"prompt_name", lvl.prompt_name}};
    if (lvl.band) {
      jl["band"] = {{"low", lvl.band->low},
                    {"high", lvl.band->high},
                    {"high_inclusive", lvl.band->high_inclusive}};
    }
    if (lvl.midpoint) jl["midpoint"] = *lvl.midpoint;
    levels.push_back(std::move(jl));
  }
  return {{"schema", "stylereward.scale"},
          {"version", kScaleVersion},
          {"name", name_},
          {"metric", metric_},
          {"levels", std::move(levels)}};
}

double fre_score(const TextCounts& counts) {
  if (counts.words == 0 || counts.sentences == 0) {
    throw Error(ErrorKind::EmptyDocument, "FRE needs at least one word");
  }
  const double words = static_cast<double>(counts.words);
  return 206.835 - 1.015 * (words / static_cast<double>(counts.sentences)) -
         84.6 * (static_cast<double>(counts.syllables) / words);
}

double fre_score(const Document& doc) { return fre_score(count_text(doc)); }

int level_of(double score, const IntensityScale& scale) {
  if (!scale.has_bands()) {
    throw Error(ErrorKind::InvalidConfig,
                "scale '" + scale.name() + "' has no score bands");
  }
  int best = 1;
  double best_distance = std::numeric_limits<double>::infinity();
  for (const auto& lvl : scale.levels()) {
    const double d = lvl.band->distance(score);
    if (d < best_distance) {
      best = lvl.index;
      best_distance = d;
    }
  }
  return best;
}

double fre_delta(double score, int target, const IntensityScale& scale) {
  return std::abs(score - scale.midpoint(target));
}

}  // namespace stylereward
