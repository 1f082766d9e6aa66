#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace stylereward {

// Half-open token range [begin, end) of one sentence inside Document::tokens.
struct SentenceSpan {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const noexcept { return end - begin; }
  bool operator==(const SentenceSpan&) const = default;
};

// A tokenized text. Sentence spans tile `tokens` exactly, in order, and every
// span is non-empty.
struct Document {
  std::string raw;
  std::vector<std::string> tokens;
  std::vector<SentenceSpan> sentences;

  bool empty() const noexcept { return tokens.empty(); }
  std::size_t size() const noexcept { return tokens.size(); }
  std::span<const std::string> sentence(std::size_t i) const {
    return std::span<const std::string>(tokens).subspan(
        sentences[i].begin, sentences[i].size());
  }
};

// Splits on Unicode whitespace, strips punctuation from word tokens, lowercases
// (ASCII and Latin-1), and closes a sentence after any whitespace-delimited
// chunk ending in '.', '!' or '?' (closing quotes/brackets may follow).
// Apostrophes and hyphens survive only between two word characters.
Document tokenize(std::string_view raw);

// Space-joined lowercase rendering, one '.' per sentence. tokenize() of the
// result reproduces the same tokens and sentence spans.
std::string detokenize(const Document& doc);

// Builds a Document from already-normalized tokens split into sentences.
Document from_sentences(const std::vector<std::vector<std::string>>& sentences);

// Vowel-group syllable estimate, always >= 1.
//
//   1. count maximal runs of a/e/i/o/u/y (word-initial y before a vowel is a
//      consonant);
//   2. split hiatus runs: "ua" not after q/g, "ia" not after c/t/s/g, "io" not
//      after t/s/c/g/x/h, and "ie" before n+t/c or t when preceded by "sc" or
//      one of l/d/r/n/p/v;
//   3. drop a silent final e after a consonant, except consonant+"le";
//   4. drop a silent "-ed" (not after t/d) and "-es" (not after a sibilant or
//      consonant+l);
//   5. a stem ending in consonant+e keeps its e silent before -ful, -fully,
//      -less, -ly, -ment, -ments, -ness;
//   6. each maximal digit run counts one syllable; hyphenated parts add up.
//
// Subtractions never take a word below one syllable.
int count_syllables(std::string_view word);

// Totals used by readability formulas.
struct TextCounts {
  std::size_t words = 0;
  std::size_t sentences = 0;
  std::size_t syllables = 0;
};

TextCounts count_text(const Document& doc);

}  // namespace stylereward
