#include "stylometer/segmentation.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "stylometer/errors.hpp"

namespace stylometer {
namespace {

enum class CharClass { Alnum, Apostrophe, Separator };

// Decodes one UTF-8 codepoint starting at `i` and advances `i` past it.
// Malformed bytes decode as themselves (single byte) so offsets stay sane.
std::uint32_t decode_utf8(std::string_view s, std::size_t& i) {
  const auto byte = [&](std::size_t k) { return static_cast<unsigned char>(s[k]); };
  const unsigned char b0 = byte(i);
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  std::size_t len = 0;
  std::uint32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    ++i;
    return b0;
  }
  if (i + len > s.size()) {
    ++i;
    return b0;
  }
  for (std::size_t k = 1; k < len; ++k) {
    const unsigned char bk = byte(i + k);
    if ((bk & 0xC0) != 0x80) {
      ++i;
      return b0;
    }
    cp = (cp << 6) | (bk & 0x3F);
  }
  i += len;
  return cp;
}

CharClass classify(std::uint32_t cp) {
  if (cp < 0x80) {
    if (std::isalnum(static_cast<int>(cp))) return CharClass::Alnum;
    if (cp == '\'') return CharClass::Apostrophe;
    return CharClass::Separator;
  }
  if (cp == 0x2019) return CharClass::Apostrophe;  // right single quotation mark
  // Punctuation blocks that commonly appear in prose.
  if (cp >= 0x00A0 && cp <= 0x00BF) return CharClass::Separator;
  if (cp == 0x00D7 || cp == 0x00F7) return CharClass::Separator;
  if (cp >= 0x2000 && cp <= 0x206F) return CharClass::Separator;
  if (cp >= 0x3000 && cp <= 0x303F) return CharClass::Separator;
  return CharClass::Alnum;  // accented letters, Greek, CJK, ...
}

bool is_ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_ascii_upper(char c) { return c >= 'A' && c <= 'Z'; }

// Word-ish byte for abbreviation boundary checks.
bool is_word_byte(char c) {
  const auto u = static_cast<unsigned char>(c);
  return std::isalnum(u) != 0 || c == '\'' || u >= 0x80;
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

}  // namespace

std::vector<std::string> TokenSequence::texts() const {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const Token& t : tokens) out.push_back(t.text);
  return out;
}

const AbbreviationSet& AbbreviationSet::builtin() {
  static const AbbreviationSet instance = [] {
    AbbreviationSet s;
    for (const char* a :
         {"e.g.", "i.e.", "etc.", "cf.",   "vs.",   "et al.", "al.",   "dr.",
          "mr.",  "mrs.", "ms.",  "prof.", "fig.",  "figs.",  "eq.",   "eqs.",
          "sec.", "secs.", "no.", "nos.",  "vol.",  "vols.",  "st.",   "jr.",
          "sr.",  "inc.", "ltd.", "co.",   "dept.", "univ.",  "approx.", "resp.",
          "ca.",  "pp."}) {
      s.add(a);
    }
    return s;
  }();
  return instance;
}

AbbreviationSet AbbreviationSet::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("IoError", "cannot open abbreviation list: " + path);
  AbbreviationSet s;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    while (!line.empty() && is_ascii_space(line.back())) line.pop_back();
    std::size_t start = 0;
    while (start < line.size() && is_ascii_space(line[start])) ++start;
    if (start < line.size()) s.add(std::string_view(line).substr(start));
  }
  return s;
}

void AbbreviationSet::add(std::string_view abbrev) {
  std::string entry = ascii_lower(abbrev);
  if (entry.empty()) return;
  if (entry.back() != '.') entry.push_back('.');
  if (std::find(entries_.begin(), entries_.end(), entry) == entries_.end()) {
    entries_.push_back(entry);
  }
}

bool AbbreviationSet::suppresses(std::string_view text, std::size_t dot_index) const {
  if (dot_index >= text.size() || text[dot_index] != '.') return false;
  const std::size_t end = dot_index + 1;
  for (const std::string& entry : entries_) {
    const std::size_t len = entry.size();
    if (end < len) continue;
    const std::size_t start = end - len;
    if (ascii_lower(text.substr(start, len)) != entry) continue;
    if (start == 0 || !is_word_byte(text[start - 1])) return true;
  }
  return false;
}

TokenSequence tokenize(std::string_view text) {
  TokenSequence seq;
  std::size_t i = 0;
  while (i < text.size()) {
    // advance to the next token character
    std::size_t start = i;
    std::uint32_t cp = decode_utf8(text, i);
    CharClass cls = classify(cp);
    if (cls == CharClass::Separator) continue;

    // consume the maximal run of alnum/apostrophe codepoints
    bool has_alnum = (cls == CharClass::Alnum);
    std::size_t end = i;
    while (i < text.size()) {
      std::size_t probe = i;
      cp = decode_utf8(text, probe);
      cls = classify(cp);
      if (cls == CharClass::Separator) break;
      if (cls == CharClass::Alnum) has_alnum = true;
      i = probe;
      end = i;
    }
    if (!has_alnum) continue;  // apostrophe-only runs are punctuation

    Token tok;
    tok.begin = start;
    tok.end = end;
    tok.text = ascii_lower(text.substr(start, end - start));
    seq.tokens.push_back(std::move(tok));
  }
  return seq;
}

SentenceList split_sentences(std::string_view text) {
  return split_sentences(text, AbbreviationSet::builtin());
}

SentenceList split_sentences(std::string_view text, const AbbreviationSet& abbreviations) {
  SentenceList list;
  list.source.assign(text);

  const std::size_t n = text.size();

  // Boundary = byte index one past a terminator that ends a sentence.
  std::vector<std::size_t> boundaries;
  for (std::size_t i = 0; i < n; ++i) {
    const char c = text[i];
    if (c != '.' && c != '!' && c != '?') continue;
    std::size_t k = i + 1;
    while (k < n && is_ascii_space(text[k])) ++k;
    const bool at_end = (k == n);
    const bool capital_after_space = (k > i + 1) && k < n && is_ascii_upper(text[k]);
    if (!at_end && !capital_after_space) continue;
    if (c == '.' && abbreviations.suppresses(text, i)) continue;
    boundaries.push_back(i + 1);
  }

  // Candidate spans between boundaries, trimmed of outer whitespace.
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  std::size_t start = 0;
  while (start < n && is_ascii_space(text[start])) ++start;
  for (std::size_t b : boundaries) {
    if (b <= start) continue;
    spans.emplace_back(start, b);
    start = b;
    while (start < n && is_ascii_space(text[start])) ++start;
  }
  if (start < n) {
    std::size_t last = n;
    while (last > start && is_ascii_space(text[last - 1])) --last;
    if (last > start) spans.emplace_back(start, last);
  }
  if (spans.empty()) return list;

  // Merge spans without any word token into a neighbour so every sentence
  // carries at least one token.
  std::vector<std::size_t> token_counts(spans.size());
  for (std::size_t i = 0; i < spans.size(); ++i) {
    token_counts[i] = tokenize(text.substr(spans[i].first, spans[i].second - spans[i].first)).size();
  }
  while (spans.size() > 1 && token_counts.front() == 0) {
    spans[1].first = spans[0].first;
    spans.erase(spans.begin());
    token_counts.erase(token_counts.begin());
  }
  for (std::size_t i = 1; i < spans.size();) {
    if (token_counts[i] == 0) {
      spans[i - 1].second = spans[i].second;
      spans.erase(spans.begin() + static_cast<std::ptrdiff_t>(i));
      token_counts.erase(token_counts.begin() + static_cast<std::ptrdiff_t>(i));
    } else {
      ++i;
    }
  }
  if (spans.size() == 1 && token_counts.front() == 0) return list;  // no word tokens at all

  for (const auto& [b, e] : spans) {
    Sentence s;
    s.begin = b;
    s.end = e;
    s.text.assign(text.substr(b, e - b));
    s.tokens = tokenize(s.text);
    list.sentences.push_back(std::move(s));
  }
  return list;
}

}  // namespace stylometer
