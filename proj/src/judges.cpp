#include "stylereward/judges.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "stylereward/error.hpp"

namespace stylereward {
namespace {

constexpr int kClassifierVersion = 1;
constexpr const char* kClassifierFormat = "stylereward.naive_bayes";

int argmax_lowest(const std::vector<double>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return static_cast<int>(best) + 1;
}

}  // namespace

const char* to_string(JudgeMode mode) {
  return mode == JudgeMode::Regression ? "regression" : "classification";
}

nlohmann::json JudgeVerdict::to_json() const {
  nlohmann::json j{{"mode", to_string(mode)},
                   {"predicted_level", predicted_level}};
  if (mode == JudgeMode::Regression) {
    j["score"] = score;
  } else {
    j["distribution"] = distribution;
  }
  return j;
}

JudgeVerdict JudgeVerdict::from_json(const nlohmann::json& j) {
  JudgeVerdict v;
  const auto mode = j.at("mode").get<std::string>();
  if (mode == "regression") {
    v.mode = JudgeMode::Regression;
    v.score = j.at("score").get<double>();
  } else if (mode == "classification") {
    v.mode = JudgeMode::Classification;
    v.distribution = j.at("distribution").get<std::vector<double>>();
  } else {
    throw Error(ErrorKind::JudgeError, "unknown verdict mode '" + mode + "'");
  }
  v.predicted_level = j.at("predicted_level").get<int>();
  return v;
}

JudgeVerdict judge_regression(const Document& doc,
                              const IntensityScale& scale) {
  if (doc.empty()) {
    throw Error(ErrorKind::EmptyDocument, "cannot judge an empty document");
  }
  JudgeVerdict v;
  v.mode = JudgeMode::Regression;
  v.score = fre_score(doc);
  v.predicted_level = level_of(v.score, scale);
  return v;
}

RegressionJudge::RegressionJudge(IntensityScale scale)
    : scale_(std::move(scale)) {
  if (!scale_.has_bands()) {
    throw Error(ErrorKind::InvalidConfig,
                "a regression judge needs a banded scale");
  }
}

JudgeVerdict RegressionJudge::judge(const Document& doc) const {
  return judge_regression(doc, scale_);
}

NaiveBayesClassifier NaiveBayesClassifier::train(
    std::span<const Corpus> corpora) {
  if (corpora.size() < 2) {
    throw Error(ErrorKind::SingleLevel,
                "a classifier needs at least two labeled corpora");
  }
  const int k = static_cast<int>(corpora.size());
  std::vector<const Corpus*> by_level(corpora.size(), nullptr);
  for (const auto& c : corpora) {
    if (c.level < 1 || c.level > k ||
        by_level[static_cast<std::size_t>(c.level - 1)] != nullptr) {
      throw Error(ErrorKind::InvalidConfig,
                  "corpus levels must cover 1.." + std::to_string(k));
    }
    by_level[static_cast<std::size_t>(c.level - 1)] = &c;
  }

  NaiveBayesClassifier clf;
  std::set<std::string> vocab;
  for (const auto* c : by_level) {
    bool any = false;
    for (const auto& doc : c->documents) {
      if (doc.empty()) continue;
      any = true;
      vocab.insert(doc.tokens.begin(), doc.tokens.end());
    }
    if (!any) {
      throw Error(ErrorKind::EmptyCorpus,
                  "corpus for level " + std::to_string(c->level) +
                      " has no documents");
    }
  }
  clf.vocabulary_.assign(vocab.begin(), vocab.end());
  for (std::size_t i = 0; i < clf.vocabulary_.size(); ++i) {
    clf.index_.emplace(clf.vocabulary_[i], i);
  }
  clf.doc_counts_.assign(corpora.size(), 0);
  clf.token_counts_.assign(corpora.size(),
                           std::vector<std::uint64_t>(vocab.size(), 0));
  for (std::size_t l = 0; l < by_level.size(); ++l) {
    for (const auto& doc : by_level[l]->documents) {
      if (doc.empty()) continue;
      ++clf.doc_counts_[l];
      for (const auto& t : doc.tokens) ++clf.token_counts_[l][clf.index_.at(t)];
    }
  }
  clf.derive();
  return clf;
}

void NaiveBayesClassifier::derive() {
  const std::size_t k = doc_counts_.size();
  const std::size_t v = vocabulary_.size();
  std::uint64_t total_docs = 0;
  for (auto c : doc_counts_) total_docs += c;
  log_priors_.resize(k);
  log_likelihoods_.assign(k, std::vector<double>(v, 0.0));
  for (std::size_t l = 0; l < k; ++l) {
    log_priors_[l] = std::log(static_cast<double>(doc_counts_[l]) /
                              static_cast<double>(total_docs));
    std::uint64_t total_tokens = 0;
    for (auto c : token_counts_[l]) total_tokens += c;
    const double denom = static_cast<double>(total_tokens + v);
    for (std::size_t t = 0; t < v; ++t) {
      log_likelihoods_[l][t] =
          std::log(static_cast<double>(token_counts_[l][t] + 1) / denom);
    }
  }
}

std::vector<double> NaiveBayesClassifier::posterior(const Document& doc) const {
  std::vector<double> logp = log_priors_;
  for (const auto& t : doc.tokens) {
    const auto it = index_.find(t);
    if (it == index_.end()) continue;
    for (std::size_t l = 0; l < logp.size(); ++l) {
      logp[l] += log_likelihoods_[l][it->second];
    }
  }
  const double peak = *std::max_element(logp.begin(), logp.end());
  double z = 0.0;
  for (double& x : logp) {
    x = std::exp(x - peak);
    z += x;
  }
  for (double& x : logp) x /= z;
  return logp;
}

double NaiveBayesClassifier::log_prior(int level) const {
  if (level < 1 || level > levels()) {
    throw Error(ErrorKind::UnknownLevel, "level out of range");
  }
  return log_priors_[static_cast<std::size_t>(level - 1)];
}

double NaiveBayesClassifier::log_likelihood(int level,
                                            std::string_view token) const {
  if (level < 1 || level > levels()) {
    throw Error(ErrorKind::UnknownLevel, "level out of range");
  }
  const auto it = index_.find(std::string(token));
  if (it == index_.end()) return 0.0;
  return log_likelihoods_[static_cast<std::size_t>(level - 1)][it->second];
}

std::string NaiveBayesClassifier::serialize() const {
  nlohmann::json j{{"format", kClassifierFormat},
                   {"version", kClassifierVersion},
                   {"levels", doc_counts_.size()},
                   {"vocabulary", vocabulary_},
                   {"doc_counts", doc_counts_},
                   {"token_counts", token_counts_}};
  return j.dump() + "\n";
}

NaiveBayesClassifier NaiveBayesClassifier::deserialize(
    std::string_view payload) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(payload);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::CorruptPayload,
                std::string("classifier is not valid JSON: ") + e.what());
  }
  try {
    if (!j.is_object() || j.value("format", "") != kClassifierFormat) {
      throw Error(ErrorKind::CorruptPayload, "not a classifier payload");
    }
    const int version = j.at("version").get<int>();
    if (version != kClassifierVersion) {
      throw Error(ErrorKind::VersionMismatch,
                  "classifier version " + std::to_string(version) +
                      ", expected " + std::to_string(kClassifierVersion));
    }
    NaiveBayesClassifier clf;
    clf.vocabulary_ = j.at("vocabulary").get<std::vector<std::string>>();
    clf.doc_counts_ = j.at("doc_counts").get<std::vector<std::uint64_t>>();
    clf.token_counts_ =
        j.at("token_counts").get<std::vector<std::vector<std::uint64_t>>>();
    const std::size_t k = j.at("levels").get<std::size_t>();
    bool ok = k >= 2 && clf.doc_counts_.size() == k &&
              clf.token_counts_.size() == k;
    for (const auto& row : clf.token_counts_) {
      ok = ok && row.size() == clf.vocabulary_.size();
    }
    for (auto c : clf.doc_counts_) ok = ok && c > 0;
    if (!ok) {
      throw Error(ErrorKind::CorruptPayload,
                  "classifier dimensions are inconsistent");
    }
    for (std::size_t i = 0; i < clf.vocabulary_.size(); ++i) {
      clf.index_.emplace(clf.vocabulary_[i], i);
    }
    clf.derive();
    return clf;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::CorruptPayload,
                std::string("classifier fields: ") + e.what());
  }
}

void NaiveBayesClassifier::save(const std::filesystem::path& path) const {
  write_file_atomic(path, serialize());
}

NaiveBayesClassifier NaiveBayesClassifier::load(
    const std::filesystem::path& path) {
  return deserialize(read_file(path));
}

bool NaiveBayesClassifier::operator==(const NaiveBayesClassifier& o) const {
  return vocabulary_ == o.vocabulary_ && doc_counts_ == o.doc_counts_ &&
         token_counts_ == o.token_counts_;
}

NaiveBayesClassifier train_classifier(std::span<const Corpus> corpora) {
  return NaiveBayesClassifier::train(corpora);
}

JudgeVerdict classify(const Document& doc, const NaiveBayesClassifier& clf) {
  JudgeVerdict v;
  v.mode = JudgeMode::Classification;
  v.distribution = clf.posterior(doc);
  v.predicted_level = argmax_lowest(v.distribution);
  return v;
}

ClassifierJudge::ClassifierJudge(
    std::shared_ptr<const NaiveBayesClassifier> clf)
    : clf_(std::move(clf)) {
  if (!clf_) throw Error(ErrorKind::JudgeError, "null classifier");
}

JudgeVerdict ClassifierJudge::judge(const Document& doc) const {
  return classify(doc, *clf_);
}

}  // namespace stylereward
