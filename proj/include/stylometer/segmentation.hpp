#ifndef STYLOMETER_SEGMENTATION_HPP
#define STYLOMETER_SEGMENTATION_HPP

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace stylometer {

// One word token: lowercased text plus the byte span it came from.
struct Token {
  std::string text;
  std::size_t begin = 0;  // byte offset into the source string
  std::size_t end = 0;    // one past the last byte
};

struct TokenSequence {
  std::vector<Token> tokens;

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
  // Token texts without span information; the form most metrics consume.
  std::vector<std::string> texts() const;
};

struct Sentence {
  std::string text;       // raw span, terminator included, no outer whitespace
  std::size_t begin = 0;  // byte offsets into the source string
  std::size_t end = 0;
  TokenSequence tokens;   // offsets relative to `text`
};

struct SentenceList {
  std::string source;  // full input text
  std::vector<Sentence> sentences;

  std::size_t size() const { return sentences.size(); }
  bool empty() const { return sentences.empty(); }
};

// Abbreviations whose trailing period never ends a sentence. Entries are
// stored lowercased and always end with '.'; multi-word entries such as
// "et al." are matched against the text tail.
class AbbreviationSet {
 public:
  AbbreviationSet() = default;

  // The list shipped with the toolkit (mirrored in data/abbreviations.txt).
  static const AbbreviationSet& builtin();
  // File format: one abbreviation per line, UTF-8, '#' starts a comment.
  static AbbreviationSet from_file(const std::string& path);

  void add(std::string_view abbrev);
  std::size_t size() const { return entries_.size(); }

  // True when the text ending at the '.' at byte `dot_index` (inclusive)
  // ends with a listed abbreviation sitting on a word boundary.
  bool suppresses(std::string_view text, std::size_t dot_index) const;

  const std::vector<std::string>& entries() const { return entries_; }

 private:
  std::vector<std::string> entries_;
};

// Word tokenization: maximal runs of letters, digits and apostrophes,
// lowercased (ASCII case only). Hyphens split; a run with no letter or digit
// is dropped as punctuation. Non-ASCII codepoints count as letters except
// for common punctuation blocks. Empty input yields an empty sequence.
TokenSequence tokenize(std::string_view text);

// Sentence splitting on '.', '!' and '?' when followed by whitespace and a
// capital letter, or by end of text. Periods ending a listed abbreviation do
// not split. Fragments without any word token are merged into a neighbouring
// sentence; text with no word tokens at all yields an empty list.
SentenceList split_sentences(std::string_view text);
SentenceList split_sentences(std::string_view text, const AbbreviationSet& abbreviations);

}  // namespace stylometer

#endif  // STYLOMETER_SEGMENTATION_HPP
