#include "stylereward/text.hpp"

#include <array>
#include <cstdint>

namespace stylereward {
namespace {

struct CodePoint {
  char32_t value;
  std::size_t offset;
  std::size_t length;
};

constexpr char32_t kReplacement = 0xFFFD;

// Lenient UTF-8 decoder: invalid sequences decode to U+FFFD one byte at a time.
std::vector<CodePoint> decode_utf8(std::string_view s) {
  std::vector<CodePoint> out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    std::size_t len = 1;
    char32_t cp = kReplacement;
    if (b0 < 0x80) {
      cp = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      cp = b0 & 0x07;
    } else {
      out.push_back({kReplacement, i, 1});
      ++i;
      continue;
    }
    bool ok = i + len <= s.size();
    for (std::size_t k = 1; ok && k < len; ++k) {
      const auto b = static_cast<unsigned char>(s[i + k]);
      if ((b & 0xC0) != 0x80) {
        ok = false;
      } else {
        cp = (cp << 6) | (b & 0x3F);
      }
    }
    if (!ok) {
      out.push_back({kReplacement, i, 1});
      ++i;
      continue;
    }
    out.push_back({cp, i, len});
    i += len;
  }
  return out;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

bool is_space(char32_t cp) {
  switch (cp) {
    case U' ': case U'\t': case U'\n': case U'\v': case U'\f': case U'\r':
    case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
    case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

bool is_word_char(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= U'a' && cp <= U'z') || (cp >= U'A' && cp <= U'Z') ||
           (cp >= U'0' && cp <= U'9');
  }
  if (cp == kReplacement) return false;
  if (cp >= 0x80 && cp <= 0xBF) return false;  // C1 controls, Latin-1 symbols
  if (cp == 0xD7 || cp == 0xF7) return false;
  if (cp >= 0x2000 && cp <= 0x2BFF) return false;  // punctuation, symbols
  if (cp >= 0x2E00 && cp <= 0x2E7F) return false;
  if (cp >= 0x3000 && cp <= 0x303F) return false;
  if (cp >= 0xFE30 && cp <= 0xFE4F) return false;
  if (cp >= 0xFF00 && cp <= 0xFF0F) return false;
  if (cp >= 0xFF1A && cp <= 0xFF20) return false;
  return true;
}

// Returns the normalized connector, or 0 if `cp` is not one.
char connector_of(char32_t cp) {
  switch (cp) {
    case U'\'': case 0x2019: return '\'';
    case U'-': case 0x2010: case 0x2011: return '-';
    default: return 0;
  }
}

bool is_closer(char32_t cp) {
  switch (cp) {
    case U')': case U']': case U'}': case U'"': case U'\'':
    case 0x201D: case 0x2019: case 0xBB:
      return true;
    default:
      return false;
  }
}

bool is_terminator(char32_t cp) {
  return cp == U'.' || cp == U'!' || cp == U'?';
}

char32_t to_lower(char32_t cp) {
  if (cp >= U'A' && cp <= U'Z') return cp + 32;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 32;
  return cp;
}

}  // namespace

Document tokenize(std::string_view raw) {
  Document doc;
  doc.raw = std::string(raw);
  const auto cps = decode_utf8(raw);
  std::size_t sentence_begin = 0;

  auto close_sentence = [&] {
    if (doc.tokens.size() > sentence_begin) {
      doc.sentences.push_back({sentence_begin, doc.tokens.size()});
      sentence_begin = doc.tokens.size();
    }
  };

  std::size_t i = 0;
  while (i < cps.size()) {
    if (is_space(cps[i].value)) {
      ++i;
      continue;
    }
    std::size_t chunk_end = i;
    while (chunk_end < cps.size() && !is_space(cps[chunk_end].value)) {
      ++chunk_end;
    }

    std::string current;
    for (std::size_t j = i; j < chunk_end; ++j) {
      const char32_t cp = cps[j].value;
      if (is_word_char(cp)) {
        append_utf8(current, to_lower(cp));
      } else if (char c = connector_of(cp);
                 c != 0 && !current.empty() && j + 1 < chunk_end &&
                 is_word_char(cps[j + 1].value)) {
        current.push_back(c);
      } else if (!current.empty()) {
        doc.tokens.push_back(std::move(current));
        current.clear();
      }
    }
    if (!current.empty()) doc.tokens.push_back(std::move(current));

    std::size_t last = chunk_end;
    while (last > i && is_closer(cps[last - 1].value)) --last;
    if (last > i && is_terminator(cps[last - 1].value)) close_sentence();

    i = chunk_end;
  }
  close_sentence();
  return doc;
}

std::string detokenize(const Document& doc) {
  std::string out;
  for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
    if (s > 0) out.push_back(' ');
    const auto span = doc.sentences[s];
    for (std::size_t t = span.begin; t < span.end; ++t) {
      if (t > span.begin) out.push_back(' ');
      out += doc.tokens[t];
    }
    out.push_back('.');
  }
  return out;
}

Document from_sentences(
    const std::vector<std::vector<std::string>>& sentences) {
  Document doc;
  for (const auto& sentence : sentences) {
    if (sentence.empty()) continue;
    const std::size_t begin = doc.tokens.size();
    doc.tokens.insert(doc.tokens.end(), sentence.begin(), sentence.end());
    doc.sentences.push_back({begin, doc.tokens.size()});
  }
  doc.raw = detokenize(doc);
  return doc;
}

namespace {

bool is_vowel_at(std::string_view w, std::size_t i) {
  switch (w[i]) {
    case 'a': case 'e': case 'i': case 'o': case 'u':
      return true;
    case 'y':
      // Word-initial y before a vowel is a consonant ("yes", "you").
      if (i == 0 && w.size() > 1) {
        const char n = w[1];
        return !(n == 'a' || n == 'e' || n == 'i' || n == 'o' || n == 'u');
      }
      return true;
    default:
      return false;
  }
}

bool is_consonant_at(std::string_view w, std::size_t i) {
  return w[i] >= 'a' && w[i] <= 'z' && !is_vowel_at(w, i);
}

bool one_of(char c, std::string_view set) {
  return set.find(c) != std::string_view::npos;
}

int hiatus_bonus(std::string_view w, std::size_t begin, std::size_t end) {
  const std::string_view run = w.substr(begin, end - begin);
  const char before = begin > 0 ? w[begin - 1] : '\0';
  const std::string_view after = w.substr(end);
  if (run == "ua") return one_of(before, "qg") || before == '\0' ? 0 : 1;
  if (run == "ia") {
    if (before == '\0' || one_of(before, "ctsg")) return 0;
    return after.starts_with("ge") ? 0 : 1;
  }
  if (run == "io") return before == '\0' || one_of(before, "tscgxh") ? 0 : 1;
  if (run == "ie") {
    const bool sc = begin >= 2 && w.substr(begin - 2, 2) == "sc";
    const bool onset = sc || one_of(before, "ldrnpv");
    const bool coda = after.starts_with("nt") || after.starts_with("nc") ||
                      after.starts_with("t");
    return onset && before != '\0' && coda ? 1 : 0;
  }
  return 0;
}

int raw_groups(std::string_view w) {
  int groups = 0;
  std::size_t i = 0;
  while (i < w.size()) {
    if (!is_vowel_at(w, i)) {
      ++i;
      continue;
    }
    const std::size_t begin = i;
    while (i < w.size() && is_vowel_at(w, i)) ++i;
    groups += 1 + hiatus_bonus(w, begin, i);
  }
  return groups;
}

int count_alpha(std::string_view w);

constexpr std::array<std::string_view, 7> kSilentESuffixes = {
    "fully", "ful", "less", "ly", "ments", "ment", "ness"};

bool silent_e_stem(std::string_view stem) {
  const std::size_t n = stem.size();
  if (n < 3 || stem[n - 1] != 'e' || !is_consonant_at(stem, n - 2)) return false;
  // consonant+"le" keeps its vowel ("simple", "gentle").
  return !(stem[n - 2] == 'l' && n >= 3 && is_consonant_at(stem, n - 3));
}

int count_alpha(std::string_view w) {
  if (w.empty()) return 0;
  for (const auto suffix : kSilentESuffixes) {
    if (w.size() > suffix.size() && w.ends_with(suffix)) {
      const auto stem = w.substr(0, w.size() - suffix.size());
      if (silent_e_stem(stem)) return count_alpha(stem) + raw_groups(suffix);
    }
  }

  int groups = raw_groups(w);
  const std::size_t n = w.size();
  if (groups > 1 && n >= 2 && w[n - 1] == 'e' && is_consonant_at(w, n - 2)) {
    const bool consonant_le =
        w[n - 2] == 'l' && n >= 3 && is_consonant_at(w, n - 3);
    if (!consonant_le) --groups;
  } else if (groups > 1 && n >= 3 && w.ends_with("ed") &&
             is_consonant_at(w, n - 3) && !one_of(w[n - 3], "td")) {
    --groups;
  } else if (groups > 1 && n >= 4 && w.ends_with("es") &&
             is_consonant_at(w, n - 3) && !one_of(w[n - 3], "sxzcgh") &&
             !(w[n - 3] == 'l' && is_consonant_at(w, n - 4)) &&
             !is_consonant_at(w, n - 4)) {
    --groups;
  }
  return groups;
}

}  // namespace

int count_syllables(std::string_view word) {
  int total = 0;
  std::size_t part_begin = 0;
  while (part_begin <= word.size()) {
    std::size_t part_end = word.find('-', part_begin);
    if (part_end == std::string_view::npos) part_end = word.size();

    std::string letters;
    int digit_groups = 0;
    bool in_digits = false;
    for (std::size_t i = part_begin; i < part_end; ++i) {
      const char c = word[i];
      if (c >= '0' && c <= '9') {
        if (!in_digits) ++digit_groups;
        in_digits = true;
        continue;
      }
      in_digits = false;
      if (c >= 'A' && c <= 'Z') {
        letters.push_back(static_cast<char>(c + 32));
      } else if (c >= 'a' && c <= 'z') {
        letters.push_back(c);
      } else if (c != '\'') {
        // Non-ASCII bytes act as consonants; keep them as separators of runs.
        letters.push_back('#');
      }
    }
    total += count_alpha(letters) + digit_groups;
    part_begin = part_end + 1;
  }
  return total < 1 ? 1 : total;
}

TextCounts count_text(const Document& doc) {
  TextCounts counts;
  counts.words = doc.tokens.size();
  counts.sentences = doc.sentences.size();
  for (const auto& token : doc.tokens) {
    counts.syllables += static_cast<std::size_t>(count_syllables(token));
  }
  return counts;
}

}  // namespace stylereward
