#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "stylereward/text.hpp"

namespace stylereward {

enum class OovPolicy { ZeroVector, HashBucket };

OovPolicy parse_oov_policy(std::string_view name);
const char* to_string(OovPolicy policy);

struct OovOptions {
  OovPolicy policy = OovPolicy::ZeroVector;
  std::uint64_t seed = 0;
  std::size_t buckets = 4096;
};

// Static token vectors, unit-normalized at load so dot products are cosines.
class EmbeddingTable {
 public:
  // Word-vector text format: "token f1 f2 ... fd" per line, single spaces,
  // LF endings. Dimension comes from the first record; a later duplicate
  // token replaces the earlier vector. All-zero vectors are rejected.
  // Throws MalformedLine(line), InconsistentDim(line), EmptyFile.
  static EmbeddingTable parse(std::string_view text, OovOptions oov = {});
  static EmbeddingTable load(const std::filesystem::path& path,
                             OovOptions oov = {});

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return index_.size(); }
  const OovOptions& oov() const noexcept { return oov_; }
  bool contains(std::string_view token) const;

  // Stored vector, or the OOV vector per policy.
  std::vector<double> lookup(std::string_view token) const;
  // One vector per token, in order.
  std::vector<std::vector<double>> embed(const Document& doc) const;

 private:
  std::size_t dim_ = 0;
  OovOptions oov_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<double> data_;  // row-major, one row per entry
};

double dot(std::span<const double> a, std::span<const double> b);

}  // namespace stylereward
