#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"

#include "stylereward/corpus_model.hpp"
#include "stylereward/readability.hpp"
#include "stylereward/text.hpp"

namespace stylereward {

enum class JudgeMode { Regression, Classification };

const char* to_string(JudgeMode mode);

// Output of the intensity judge. Regression verdicts carry a score;
// classification verdicts carry a distribution over levels 1..k (index 0 is
// level 1).
struct JudgeVerdict {
  JudgeMode mode = JudgeMode::Regression;
  double score = 0.0;
  std::vector<double> distribution;
  int predicted_level = 1;

  nlohmann::json to_json() const;
  static JudgeVerdict from_json(const nlohmann::json& j);
  bool operator==(const JudgeVerdict&) const = default;
};

class Judge {
 public:
  virtual ~Judge() = default;
  virtual JudgeVerdict judge(const Document& doc) const = 0;
  virtual JudgeMode mode() const noexcept = 0;
  virtual int levels() const noexcept = 0;
};

// value = fre_score(doc), predicted level by band. Throws EmptyDocument.
JudgeVerdict judge_regression(const Document& doc, const IntensityScale& scale);

class RegressionJudge final : public Judge {
 public:
  explicit RegressionJudge(IntensityScale scale);
  JudgeVerdict judge(const Document& doc) const override;
  JudgeMode mode() const noexcept override { return JudgeMode::Regression; }
  int levels() const noexcept override { return scale_.size(); }
  const IntensityScale& scale() const noexcept { return scale_; }

 private:
  IntensityScale scale_;
};

// Multinomial naive Bayes with add-one smoothing over the training vocabulary.
// Stores raw counts so persistence is exact; log-probabilities are derived.
class NaiveBayesClassifier {
 public:
  static NaiveBayesClassifier train(std::span<const Corpus> corpora);

  // P(level | doc), normalized; OOV tokens are ignored, so a fully-OOV
  // document gets the class priors.
  std::vector<double> posterior(const Document& doc) const;

  int levels() const noexcept { return static_cast<int>(doc_counts_.size()); }
  const std::vector<std::string>& vocabulary() const noexcept {
    return vocabulary_;
  }
  double log_prior(int level) const;
  double log_likelihood(int level, std::string_view token) const;

  std::string serialize() const;
  static NaiveBayesClassifier deserialize(std::string_view payload);
  void save(const std::filesystem::path& path) const;
  static NaiveBayesClassifier load(const std::filesystem::path& path);

  bool operator==(const NaiveBayesClassifier& other) const;

 private:
  void derive();

  std::vector<std::string> vocabulary_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::uint64_t> doc_counts_;
  std::vector<std::vector<std::uint64_t>> token_counts_;
  std::vector<double> log_priors_;
  std::vector<std::vector<double>> log_likelihoods_;
};

NaiveBayesClassifier train_classifier(std::span<const Corpus> corpora);

// Posterior distribution; argmax with lowest-index tie-break.
JudgeVerdict classify(const Document& doc, const NaiveBayesClassifier& clf);

class ClassifierJudge final : public Judge {
 public:
  explicit ClassifierJudge(std::shared_ptr<const NaiveBayesClassifier> clf);
  JudgeVerdict judge(const Document& doc) const override;
  JudgeMode mode() const noexcept override {
    return JudgeMode::Classification;
  }
  int levels() const noexcept override { return clf_->levels(); }
  const NaiveBayesClassifier& classifier() const noexcept { return *clf_; }

 private:
  std::shared_ptr<const NaiveBayesClassifier> clf_;
};

}  // namespace stylereward
