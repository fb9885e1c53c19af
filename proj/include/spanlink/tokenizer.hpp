#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace spanlink {

// Half-open byte interval [begin, end) into the source text.
struct CharSpan {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  friend bool operator==(const CharSpan&, const CharSpan&) = default;
  friend auto operator<=>(const CharSpan&, const CharSpan&) = default;
};

struct Encoding {
  std::vector<std::string> tokens;
  std::vector<int> ids;
  std::vector<CharSpan> offsets;

  std::size_t size() const { return tokens.size(); }
};

// Splits on whitespace and isolates ASCII punctuation. Multi-byte UTF-8
// sequences stay inside their word.
std::vector<CharSpan> pretokenize(std::string_view text);

// Greedy longest-match-first word-piece tokenizer with "##" continuation
// pieces (the same convention as BERT vocab.txt files).
//
// A tokenizer with an empty vocabulary runs in word-level mode: every
// pre-token becomes one token and maps to the unknown id.
class Tokenizer {
 public:
  static constexpr std::string_view kPad = "[PAD]";
  static constexpr std::string_view kUnk = "[UNK]";
  static constexpr std::string_view kContinuation = "##";

  // Word-level tokenizer without a vocabulary.
  static Tokenizer word_level();

  // Builds a vocabulary from raw texts: special tokens, then whole words by
  // descending frequency (ties lexicographic), then the character pieces
  // needed to spell any word that did not make the cut. Stops at max_vocab.
  static Tokenizer train(std::span<const std::string> texts, std::size_t max_vocab,
                         std::size_t min_freq = 1);

  // pieces[i] is the piece with id i. Missing [PAD]/[UNK] entries are added.
  static Tokenizer from_pieces(std::vector<std::string> pieces);
  static Tokenizer from_vocab_file(const std::filesystem::path& path);

  // Throws RangeError on empty text.
  Encoding encode(std::string_view text) const;

  bool word_level_mode() const { return pieces_.empty(); }
  std::size_t vocab_size() const { return pieces_.size(); }
  const std::vector<std::string>& pieces() const { return pieces_; }
  int unk_id() const { return unk_id_; }
  int id_of(std::string_view piece) const;

 private:
  void encode_word(std::string_view text, CharSpan word, Encoding& out) const;

  std::vector<std::string> pieces_;
  std::unordered_map<std::string, int> index_;
  int unk_id_ = 0;
};

}  // namespace spanlink
