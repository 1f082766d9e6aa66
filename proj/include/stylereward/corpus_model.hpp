#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "stylereward/readability.hpp"
#include "stylereward/text.hpp"

namespace stylereward {

// Non-parallel corpus of one intensity level.
struct Corpus {
  int level = 0;
  std::vector<Document> documents;
};

// One document per non-blank line, UTF-8.
Corpus load_corpus(const std::filesystem::path& path, int level);

// Sorted by column index, zero weights omitted.
using SparseVector = std::vector<std::pair<std::size_t, double>>;

double norm(const SparseVector& v);
double norm(std::span<const double> v);

inline constexpr std::size_t kStyleVocabSize = 1000;

// Fitted TF-IDF state: sorted vocabulary, smoothed corpus IDF, one pivot per
// level built from that level's concatenated documents, and the top-N style
// vocabulary of each pivot. Immutable once fitted.
class PivotModel {
 public:
  // IDF is ln((1 + N) / (1 + df)) + 1 with df over individual documents;
  // TF is count / length. Style vocabularies keep the highest-weight tokens
  // of each pivot (weight > 0), ties broken lexicographically.
  static PivotModel fit(std::span<const Corpus> corpora,
                        const IntensityScale& scale,
                        std::size_t style_vocab_size = kStyleVocabSize);

  // TF over the document's own tokens times corpus IDF; OOV tokens are
  // dropped and a fully-OOV document yields the zero vector.
  SparseVector doc_vector(const Document& doc) const;

  // Cosine similarity to the pivot of `level`; 0 for a zero vector.
  double similarity(const SparseVector& v, int level) const;
  std::vector<double> similarities(const SparseVector& v) const;

  int levels() const noexcept { return static_cast<int>(pivots_.size()); }
  std::size_t dimension() const noexcept { return vocabulary_.size(); }
  std::size_t document_count() const noexcept { return document_count_; }
  const std::vector<std::string>& vocabulary() const noexcept {
    return vocabulary_;
  }
  std::optional<std::size_t> index_of(std::string_view token) const;
  const std::vector<double>& idf() const noexcept { return idf_; }
  const std::vector<double>& pivot(int level) const;
  const std::vector<std::string>& style_vocab(int level) const;

  std::string serialize() const;
  // Throws VersionMismatch or CorruptPayload.
  static PivotModel deserialize(std::string_view payload);
  void save(const std::filesystem::path& path) const;
  static PivotModel load(const std::filesystem::path& path);

  bool operator==(const PivotModel& other) const;

 private:
  void index_vocabulary();
  void compute_norms();

  std::vector<std::string> vocabulary_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<double> idf_;
  std::vector<std::vector<double>> pivots_;
  std::vector<double> pivot_norms_;
  std::vector<std::vector<std::string>> style_vocab_;
  std::size_t document_count_ = 0;
};

// Reads a whole file; throws Io.
std::string read_file(const std::filesystem::path& path);
// Writes via a temporary sibling and rename.
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view contents);

}  // namespace stylereward
