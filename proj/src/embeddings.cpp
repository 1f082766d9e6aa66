#include "stylereward/embeddings.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "stylereward/corpus_model.hpp"
#include "stylereward/error.hpp"

namespace stylereward {
namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

void normalize(std::span<double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  if (s == 0.0) return;
  const double n = std::sqrt(s);
  for (double& x : v) x /= n;
}

bool parse_double(std::string_view field, double& out) {
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

}  // namespace

OovPolicy parse_oov_policy(std::string_view name) {
  if (name == "zero" || name == "zero-vector") return OovPolicy::ZeroVector;
  if (name == "hash" || name == "hash-bucket") return OovPolicy::HashBucket;
  throw Error(ErrorKind::InvalidConfig,
              "unknown OOV policy '" + std::string(name) + "'");
}

const char* to_string(OovPolicy policy) {
  return policy == OovPolicy::ZeroVector ? "zero-vector" : "hash-bucket";
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

EmbeddingTable EmbeddingTable::parse(std::string_view text, OovOptions oov) {
  if (oov.policy == OovPolicy::HashBucket && oov.buckets == 0) {
    throw Error(ErrorKind::InvalidConfig, "hash-bucket policy needs buckets");
  }
  EmbeddingTable table;
  table.oov_ = oov;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  std::vector<double> row;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;

    const std::size_t sp = line.find(' ');
    if (sp == 0 || sp == std::string_view::npos) {
      throw Error(ErrorKind::MalformedLine,
                  "expected a token followed by floats", line_no);
    }
    const std::string token(line.substr(0, sp));
    row.clear();
    std::string_view rest = line.substr(sp + 1);
    while (!rest.empty()) {
      const std::size_t next = rest.find(' ');
      const std::string_view field = rest.substr(0, next);
      double value = 0.0;
      if (!parse_double(field, value)) {
        throw Error(ErrorKind::MalformedLine,
                    "bad float '" + std::string(field) + "'", line_no);
      }
      row.push_back(value);
      if (next == std::string_view::npos) break;
      rest.remove_prefix(next + 1);
    }
    if (row.empty()) {
      throw Error(ErrorKind::MalformedLine, "token without a vector", line_no);
    }
    if (table.dim_ == 0) {
      table.dim_ = row.size();
    } else if (row.size() != table.dim_) {
      throw Error(ErrorKind::InconsistentDim,
                  "expected " + std::to_string(table.dim_) + " floats, got " +
                      std::to_string(row.size()),
                  line_no);
    }
    if (std::all_of(row.begin(), row.end(), [](double x) { return x == 0.0; })) {
      throw Error(ErrorKind::MalformedLine, "zero vector cannot be normalized",
                  line_no);
    }
    normalize(row);
    const auto [it, inserted] =
        table.index_.emplace(token, table.data_.size() / table.dim_);
    if (inserted) {
      table.data_.insert(table.data_.end(), row.begin(), row.end());
    } else {
      std::copy(row.begin(), row.end(),
                table.data_.begin() +
                    static_cast<std::ptrdiff_t>(it->second * table.dim_));
    }
  }
  if (table.index_.empty()) {
    throw Error(ErrorKind::EmptyFile, "embedding file has no vectors");
  }
  return table;
}

EmbeddingTable EmbeddingTable::load(const std::filesystem::path& path,
                                    OovOptions oov) {
  return parse(read_file(path), oov);
}

bool EmbeddingTable::contains(std::string_view token) const {
  return index_.contains(std::string(token));
}

std::vector<double> EmbeddingTable::lookup(std::string_view token) const {
  const auto it = index_.find(std::string(token));
  if (it != index_.end()) {
    const auto begin =
        data_.begin() + static_cast<std::ptrdiff_t>(it->second * dim_);
    return {begin, begin + static_cast<std::ptrdiff_t>(dim_)};
  }
  std::vector<double> v(dim_, 0.0);
  if (oov_.policy == OovPolicy::HashBucket) {
    const std::uint64_t bucket = fnv1a(token) % oov_.buckets;
    std::uint64_t state = oov_.seed ^ (bucket * 0xD6E8FEB86659FD93ULL);
    for (double& x : v) {
      // Uniform in [-1, 1) from the top 53 bits.
      x = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-52 - 1.0;
    }
    normalize(v);
  }
  return v;
}

std::vector<std::vector<double>> EmbeddingTable::embed(
    const Document& doc) const {
  std::vector<std::vector<double>> out;
  out.reserve(doc.tokens.size());
  for (const auto& t : doc.tokens) out.push_back(lookup(t));
  return out;
}

}  // namespace stylereward
