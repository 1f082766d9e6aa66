#include "stylereward/corpus_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"

#include "stylereward/error.hpp"

namespace stylereward {
namespace {

constexpr int kPivotVersion = 1;
constexpr const char* kPivotFormat = "stylereward.pivots";

}  // namespace

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path,
                       std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error(ErrorKind::Io, "short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot rename onto " + path.string());
}

Corpus load_corpus(const std::filesystem::path& path, int level) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open corpus " + path.string());
  Corpus corpus;
  corpus.level = level;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    Document doc = tokenize(line);
    if (!doc.empty()) corpus.documents.push_back(std::move(doc));
  }
  if (corpus.documents.empty()) {
    throw Error(ErrorKind::EmptyCorpus,
                "corpus " + path.string() + " has no documents");
  }
  return corpus;
}

double norm(const SparseVector& v) {
  double s = 0.0;
  for (const auto& [_, w] : v) s += w * w;
  return std::sqrt(s);
}

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double w : v) s += w * w;
  return std::sqrt(s);
}

PivotModel PivotModel::fit(std::span<const Corpus> corpora,
                           const IntensityScale& scale,
                           std::size_t style_vocab_size) {
  if (corpora.size() < 2 || scale.size() < 2) {
    throw Error(ErrorKind::SingleLevel, "need corpora for at least two levels");
  }
  if (static_cast<int>(corpora.size()) != scale.size()) {
    throw Error(ErrorKind::InvalidConfig,
                "expected one corpus per level of scale '" + scale.name() +
                    "'");
  }
  // Corpora may arrive in any order but must cover 1..k exactly once.
  std::vector<const Corpus*> by_level(corpora.size(), nullptr);
  for (const auto& c : corpora) {
    if (!scale.contains_level(c.level) ||
        by_level[static_cast<std::size_t>(c.level - 1)] != nullptr) {
      throw Error(ErrorKind::InvalidConfig,
                  "corpus level " + std::to_string(c.level) +
                      " is out of range or duplicated");
    }
    by_level[static_cast<std::size_t>(c.level - 1)] = &c;
  }

  PivotModel model;
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
                      " has no tokens");
    }
  }
  model.vocabulary_.assign(vocab.begin(), vocab.end());
  model.index_vocabulary();
  const std::size_t dim = model.vocabulary_.size();

  std::vector<std::size_t> df(dim, 0);
  std::vector<std::vector<std::size_t>> level_counts(
      by_level.size(), std::vector<std::size_t>(dim, 0));
  std::vector<std::size_t> level_lengths(by_level.size(), 0);
  std::vector<std::size_t> seen;
  for (std::size_t l = 0; l < by_level.size(); ++l) {
    for (const auto& doc : by_level[l]->documents) {
      if (doc.empty()) continue;
      ++model.document_count_;
      seen.clear();
      for (const auto& token : doc.tokens) {
        const std::size_t col = model.index_.at(token);
        ++level_counts[l][col];
        seen.push_back(col);
      }
      level_lengths[l] += doc.tokens.size();
      std::sort(seen.begin(), seen.end());
      seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
      for (std::size_t col : seen) ++df[col];
    }
  }

  const double n = static_cast<double>(model.document_count_);
  model.idf_.resize(dim);
  for (std::size_t col = 0; col < dim; ++col) {
    model.idf_[col] =
        std::log((1.0 + n) / (1.0 + static_cast<double>(df[col]))) + 1.0;
  }

  model.pivots_.assign(by_level.size(), std::vector<double>(dim, 0.0));
  model.style_vocab_.resize(by_level.size());
  for (std::size_t l = 0; l < by_level.size(); ++l) {
    const double len = static_cast<double>(level_lengths[l]);
    auto& pivot = model.pivots_[l];
    for (std::size_t col = 0; col < dim; ++col) {
      pivot[col] =
          static_cast<double>(level_counts[l][col]) / len * model.idf_[col];
    }

    std::vector<std::size_t> order;
    for (std::size_t col = 0; col < dim; ++col) {
      if (pivot[col] > 0.0) order.push_back(col);
    }
    // Vocabulary is sorted, so index order is the lexicographic tie-break.
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                       return pivot[a] > pivot[b];
                     });
    if (order.size() > style_vocab_size) order.resize(style_vocab_size);
    for (std::size_t col : order) {
      model.style_vocab_[l].push_back(model.vocabulary_[col]);
    }
  }
  model.compute_norms();
  return model;
}

void PivotModel::index_vocabulary() {
  index_.clear();
  index_.reserve(vocabulary_.size());
  for (std::size_t i = 0; i < vocabulary_.size(); ++i) {
    index_.emplace(vocabulary_[i], i);
  }
}

void PivotModel::compute_norms() {
  pivot_norms_.clear();
  for (const auto& p : pivots_) pivot_norms_.push_back(norm(p));
}

std::optional<std::size_t> PivotModel::index_of(std::string_view token) const {
  const auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const std::vector<double>& PivotModel::pivot(int level) const {
  if (level < 1 || level > levels()) {
    throw Error(ErrorKind::UnknownLevel,
                "pivot level " + std::to_string(level) + " out of range");
  }
  return pivots_[static_cast<std::size_t>(level - 1)];
}

const std::vector<std::string>& PivotModel::style_vocab(int level) const {
  if (level < 1 || level > levels()) {
    throw Error(ErrorKind::UnknownLevel,
                "style vocabulary level " + std::to_string(level) +
                    " out of range");
  }
  return style_vocab_[static_cast<std::size_t>(level - 1)];
}

SparseVector PivotModel::doc_vector(const Document& doc) const {
  if (doc.tokens.empty()) return {};
  std::map<std::size_t, std::size_t> counts;
  for (const auto& token : doc.tokens) {
    const auto it = index_.find(token);
    if (it != index_.end()) ++counts[it->second];
  }
  SparseVector v;
  v.reserve(counts.size());
  const double len = static_cast<double>(doc.tokens.size());
  for (const auto& [col, count] : counts) {
    v.emplace_back(col, static_cast<double>(count) / len * idf_[col]);
  }
  return v;
}

double PivotModel::similarity(const SparseVector& v, int level) const {
  const auto& p = pivot(level);
  const double pn = pivot_norms_[static_cast<std::size_t>(level - 1)];
  const double vn = norm(v);
  if (vn == 0.0 || pn == 0.0) return 0.0;
  double dot = 0.0;
  for (const auto& [col, w] : v) dot += w * p[col];
  return dot / (vn * pn);
}

std::vector<double> PivotModel::similarities(const SparseVector& v) const {
  std::vector<double> out;
  out.reserve(pivots_.size());
  for (int l = 1; l <= levels(); ++l) out.push_back(similarity(v, l));
  return out;
}

std::string PivotModel::serialize() const {
  nlohmann::json j{{"format", kPivotFormat},
                   {"version", kPivotVersion},
                   {"levels", pivots_.size()},
                   {"document_count", document_count_},
                   {"vocabulary", vocabulary_},
                   {"idf", idf_},
                   {"pivots", pivots_},
                   {"style_vocab", style_vocab_}};
  return j.dump() + "\n";
}

PivotModel PivotModel::deserialize(std::string_view payload) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(payload);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::CorruptPayload,
                std::string("pivot model is not valid JSON: ") + e.what());
  }
  try {
    if (!j.is_object() || j.value("format", "") != kPivotFormat) {
      throw Error(ErrorKind::CorruptPayload, "not a pivot model payload");
    }
    const int version = j.at("version").get<int>();
    if (version != kPivotVersion) {
      throw Error(ErrorKind::VersionMismatch,
                  "pivot model version " + std::to_string(version) +
                      ", expected " + std::to_string(kPivotVersion));
    }
    PivotModel m;
    m.document_count_ = j.at("document_count").get<std::size_t>();
    m.vocabulary_ = j.at("vocabulary").get<std::vector<std::string>>();
    m.idf_ = j.at("idf").get<std::vector<double>>();
    m.pivots_ = j.at("pivots").get<std::vector<std::vector<double>>>();
    m.style_vocab_ =
        j.at("style_vocab").get<std::vector<std::vector<std::string>>>();
    const std::size_t k = j.at("levels").get<std::size_t>();
    const std::size_t dim = m.vocabulary_.size();
    bool ok = k >= 2 && m.pivots_.size() == k && m.style_vocab_.size() == k &&
              m.idf_.size() == dim &&
              std::is_sorted(m.vocabulary_.begin(), m.vocabulary_.end());
    for (const auto& p : m.pivots_) ok = ok && p.size() == dim;
    if (!ok) {
      throw Error(ErrorKind::CorruptPayload,
                  "pivot model dimensions are inconsistent");
    }
    m.index_vocabulary();
    if (m.index_.size() != dim) {
      throw Error(ErrorKind::CorruptPayload, "duplicate vocabulary entries");
    }
    for (const auto& sv : m.style_vocab_) {
      for (const auto& t : sv) {
        if (!m.index_.contains(t)) {
          throw Error(ErrorKind::CorruptPayload,
                      "style vocabulary token '" + t + "' not in vocabulary");
        }
      }
    }
    m.compute_norms();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::CorruptPayload,
                std::string("pivot model fields: ") + e.what());
  }
}

void PivotModel::save(const std::filesystem::path& path) const {
  write_file_atomic(path, serialize());
}

PivotModel PivotModel::load(const std::filesystem::path& path) {
  return deserialize(read_file(path));
}

bool PivotModel::operator==(const PivotModel& other) const {
  return document_count_ == other.document_count_ &&
         vocabulary_ == other.vocabulary_ && idf_ == other.idf_ &&
         pivots_ == other.pivots_ && style_vocab_ == other.style_vocab_;
}

}  // namespace stylereward
