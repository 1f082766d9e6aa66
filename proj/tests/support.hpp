#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "stylereward/corpus_model.hpp"
#include "stylereward/embeddings.hpp"
#include "stylereward/judges.hpp"
#include "stylereward/readability.hpp"
#include "stylereward/text.hpp"

namespace srt {

namespace sr = stylereward;

inline std::filesystem::path fixture(const std::string& rel) {
  return std::filesystem::path(SR_FIXTURES) / rel;
}

// Fresh scratch directory under the build tree.
inline std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() /
             ("stylereward-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline sr::Corpus corpus(int level, const std::vector<std::string>& docs) {
  sr::Corpus c;
  c.level = level;
  for (const auto& d : docs) c.documents.push_back(sr::tokenize(d));
  return c;
}

// The two-level good/bad fixture shared with the Python oracles.
inline std::vector<sr::Corpus> toy_corpora() {
  return {corpus(1, {"good food", "good service good food", "great food"}),
          corpus(2, {"bad food", "bad bad service", "slow food"})};
}

inline sr::IntensityScale toy_scale() {
  return sr::IntensityScale(
      "toy",
      {{1, "positive", "Positive", std::nullopt, std::nullopt},
       {2, "negative", "Negative", std::nullopt, std::nullopt}},
      "STAR");
}

inline sr::EmbeddingTable toy_embeddings() {
  return sr::EmbeddingTable::parse(
      "good 1 0 0\n"
      "great 0.8 0.6 0\n"
      "food 0 0 1\n"
      "bad -1 0 0\n"
      "service 0 1 0\n"
      "slow -0.6 0.8 0\n");
}

inline std::vector<sr::Corpus> fixture_corpora(const std::string& dir, int k) {
  std::vector<sr::Corpus> out;
  for (int l = 1; l <= k; ++l) {
    out.push_back(
        sr::load_corpus(fixture(dir + "/" + std::to_string(l) + ".txt"), l));
  }
  return out;
}

// splitmix64: small, seedable, and stable across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  // [0, n)
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(next() % n); }
  int between(int lo, int hi) {
    return lo + static_cast<int>(below(static_cast<std::size_t>(hi - lo + 1)));
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  template <class T>
  const T& pick(const std::vector<T>& v) { return v[below(v.size())]; }

 private:
  std::uint64_t state_;
};

}  // namespace srt
