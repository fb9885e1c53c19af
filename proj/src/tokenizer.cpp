#include "spanlink/tokenizer.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include "spanlink/error.hpp"

namespace spanlink {

namespace {

bool is_space(unsigned char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

bool is_ascii_punct(unsigned char c) {
  return c < 0x80 && ((c >= 33 && c <= 47) || (c >= 58 && c <= 64) || (c >= 91 && c <= 96) || (c >= 123 && c <= 126));
}

// Byte length of the UTF-8 sequence starting at lead byte c. Stray
// continuation bytes are treated as single characters.
std::size_t utf8_length(unsigned char c) {
  if (c < 0x80) return 1;
  if ((c >> 5) == 0x6) return 2;
  if ((c >> 4) == 0xE) return 3;
  if ((c >> 3) == 0x1E) return 4;
  return 1;
}

std::vector<std::string_view> characters(std::string_view word) {
  std::vector<std::string_view> out;
  for (std::size_t i = 0; i < word.size();) {
    std::size_t n = std::min(utf8_length(static_cast<unsigned char>(word[i])), word.size() - i);
    out.push_back(word.substr(i, n));
    i += n;
  }
  return out;
}

}  // namespace

std::vector<CharSpan> pretokenize(std::string_view text) {
  std::vector<CharSpan> words;
  std::size_t i = 0;
  while (i < text.size()) {
    auto c = static_cast<unsigned char>(text[i]);
    if (is_space(c)) {
      ++i;
      continue;
    }
    if (is_ascii_punct(c)) {
      words.push_back({i, i + 1});
      ++i;
      continue;
    }
    std::size_t start = i;
    while (i < text.size()) {
      auto d = static_cast<unsigned char>(text[i]);
      if (is_space(d) || is_ascii_punct(d)) break;
      i += std::min(utf8_length(d), text.size() - i);
    }
    words.push_back({start, i});
  }
  return words;
}

Tokenizer Tokenizer::word_level() {
  Tokenizer t;
  t.unk_id_ = -1;
  return t;
}

Tokenizer Tokenizer::from_pieces(std::vector<std::string> pieces) {
  Tokenizer t;
  auto has = [&](std::string_view p) { return std::find(pieces.begin(), pieces.end(), p) != pieces.end(); };
  if (!has(kPad)) pieces.insert(pieces.begin(), std::string(kPad));
  if (!has(kUnk)) pieces.insert(pieces.begin() + 1, std::string(kUnk));
  t.pieces_ = std::move(pieces);
  for (std::size_t i = 0; i < t.pieces_.size(); ++i) {
    // First entry wins for duplicated lines in a vocab file.
    t.index_.emplace(t.pieces_[i], static_cast<int>(i));
  }
  t.unk_id_ = t.index_.at(std::string(kUnk));
  return t;
}

Tokenizer Tokenizer::from_vocab_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot open vocabulary file " + path.string());
  std::vector<std::string> pieces;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    pieces.push_back(line);
  }
  if (pieces.empty()) throw DatasetError("empty vocabulary file " + path.string());
  return from_pieces(std::move(pieces));
}

Tokenizer Tokenizer::train(std::span<const std::string> texts, std::size_t max_vocab, std::size_t min_freq) {
  if (max_vocab < 3) throw ConfigError("vocabulary size must be at least 3");
  std::map<std::string, std::size_t> counts;
  for (const auto& text : texts) {
    for (CharSpan w : pretokenize(text)) ++counts[std::string(text.substr(w.begin, w.size()))];
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });

  std::vector<std::string> pieces{std::string(kPad), std::string(kUnk)};
  std::set<std::string> taken(pieces.begin(), pieces.end());
  auto add = [&](const std::string& p) {
    if (pieces.size() < max_vocab && taken.insert(p).second) pieces.push_back(p);
  };

  auto char_pieces = [](const std::string& word) {
    std::set<std::string> s;
    auto chars = characters(word);
    for (std::size_t i = 0; i < chars.size(); ++i) {
      s.insert(i == 0 ? std::string(chars[i]) : std::string(kContinuation) + std::string(chars[i]));
    }
    return s;
  };
  const std::size_t budget = max_vocab - pieces.size();
  // Characters required by word index i and later, computed suffix-wise.
  std::vector<std::size_t> suffix_chars(ranked.size() + 1, 0);
  {
    std::set<std::string> acc;
    for (std::size_t i = ranked.size(); i-- > 0;) {
      for (auto& p : char_pieces(ranked[i].first)) acc.insert(p);
      suffix_chars[i] = acc.size();
    }
  }
  // Keep the longest frequency-ranked word prefix whose remaining words can
  // still be spelled from character pieces within the budget.
  std::size_t keep = 0;
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    if (ranked[i].second < min_freq) break;
    if (i + 1 + suffix_chars[i + 1] <= budget) keep = i + 1;
  }
  for (std::size_t i = 0; i < keep; ++i) add(ranked[i].first);
  std::set<std::string> needed_chars;
  for (std::size_t i = keep; i < ranked.size(); ++i) {
    for (auto& p : char_pieces(ranked[i].first)) needed_chars.insert(p);
  }
  for (const auto& p : needed_chars) add(p);
  return from_pieces(std::move(pieces));
}

int Tokenizer::id_of(std::string_view piece) const {
  auto it = index_.find(std::string(piece));
  return it == index_.end() ? unk_id_ : it->second;
}

void Tokenizer::encode_word(std::string_view text, CharSpan word, Encoding& out) const {
  std::string_view w = text.substr(word.begin, word.size());
  if (word_level_mode()) {
    out.tokens.emplace_back(w);
    out.ids.push_back(unk_id_);
    out.offsets.push_back(word);
    return;
  }
  auto whole = index_.find(std::string(w));
  if (whole != index_.end()) {
    out.tokens.emplace_back(w);
    out.ids.push_back(whole->second);
    out.offsets.push_back(word);
    return;
  }
  auto chars = characters(w);
  std::vector<std::size_t> starts;  // byte offset of each character within w
  std::size_t pos = 0;
  for (auto c : chars) {
    starts.push_back(pos);
    pos += c.size();
  }
  starts.push_back(w.size());

  std::size_t ci = 0;
  while (ci < chars.size()) {
    bool found = false;
    for (std::size_t cj = chars.size(); cj > ci; --cj) {
      std::string piece(w.substr(starts[ci], starts[cj] - starts[ci]));
      if (ci > 0) piece = std::string(kContinuation) + piece;
      auto it = index_.find(piece);
      if (it != index_.end()) {
        out.tokens.push_back(piece);
        out.ids.push_back(it->second);
        out.offsets.push_back({word.begin + starts[ci], word.begin + starts[cj]});
        ci = cj;
        found = true;
        break;
      }
    }
    if (!found) {
      out.tokens.emplace_back(kUnk);
      out.ids.push_back(unk_id_);
      out.offsets.push_back({word.begin + starts[ci], word.begin + starts[ci + 1]});
      ++ci;
    }
  }
}

Encoding Tokenizer::encode(std::string_view text) const {
  if (text.empty()) throw RangeError("cannot tokenize empty text");
  Encoding out;
  for (CharSpan w : pretokenize(text)) encode_word(text, w, out);
  if (out.size() == 0) throw RangeError("text contains no tokens");
  return out;
}

}  // namespace spanlink
