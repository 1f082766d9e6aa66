#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "stylereward/text.hpp"

namespace stylereward {

// Score range [low, high), or [low, high] when high_inclusive.
struct ScoreBand {
  double low = 0.0;
  double high = 0.0;
  bool high_inclusive = false;

  bool contains(double score) const noexcept {
    return score >= low && (high_inclusive ? score <= high : score < high);
  }
  double distance(double score) const noexcept;
  // "0 ≤ FRE < 40" style rendering, `metric` names the score.
  std::string render(const std::string& metric) const;
  bool operator==(const ScoreBand&) const = default;
};

struct IntensityLevel {
  int index = 0;
  std::string label;        // "elementary school", "very positive"
  std::string prompt_name;  // "Elementary", "5 Stars"
  std::optional<ScoreBand> band;
  std::optional<double> midpoint;

  bool operator==(const IntensityLevel&) const = default;
};

// Ordered set of k >= 2 intensity levels indexed 1..k.
class IntensityScale {
 public:
  IntensityScale(std::string name, std::vector<IntensityLevel> levels,
                 std::string metric = "FRE");

  // CNN/DM readability bands: 80-100, 60-80, 40-60, 0-40 with midpoints
  // 90/70/50/20.
  static IntensityScale readability();
  // Yelp 1..5 stars, classification only (no bands or midpoints).
  static IntensityScale sentiment();

  static IntensityScale from_json(const nlohmann::json& j);
  static IntensityScale load(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  const std::string& name() const noexcept { return name_; }
  const std::string& metric() const noexcept { return metric_; }
  int size() const noexcept { return static_cast<int>(levels_.size()); }
  const std::vector<IntensityLevel>& levels() const noexcept { return levels_; }
  // Throws UnknownLevel outside 1..k.
  const IntensityLevel& level(int index) const;
  bool contains_level(int index) const noexcept {
    return index >= 1 && index <= size();
  }
  bool has_bands() const noexcept;
  // Throws MissingMidpoint.
  double midpoint(int index) const;

  bool operator==(const IntensityScale&) const = default;

 private:
  std::string name_;
  std::string metric_;
  std::vector<IntensityLevel> levels_;
};

// 206.835 - 1.015 * words/sentences - 84.6 * syllables/words, unclamped.
// Throws EmptyDocument when the document has no tokens.
double fre_score(const Document& doc);
double fre_score(const TextCounts& counts);

// Level whose band holds `score`; out-of-band scores go to the nearest band
// (ties to the lower index), so the mapping is total over finite scores.
int level_of(double score, const IntensityScale& scale);

// |score - midpoint(target)|.
double fre_delta(double score, int target, const IntensityScale& scale);

}  // namespace stylereward
