#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "spanlink/error.hpp"
#include "spanlink/tokenizer.hpp"

using namespace spanlink;

namespace {

std::string slice(std::string_view text, CharSpan s) { return std::string(text.substr(s.begin, s.size())); }

std::string strip_spaces(std::string_view text) {
  std::string out;
  for (char c : text) {
    if (c != ' ' && c != '\t' && c != '\n') out += c;
  }
  return out;
}

}  // namespace

TEST_CASE("pretokenize isolates punctuation and keeps utf-8 words whole") {
  const std::string text = "Hello, Zürich (CH).";
  auto words = pretokenize(text);
  std::vector<std::string> got;
  for (auto w : words) got.push_back(slice(text, w));
  CHECK(got == std::vector<std::string>{"Hello", ",", "Zürich", "(", "CH", ")", "."});
}

TEST_CASE("in-vocabulary word is a single token with exact offsets") {
  auto tok = Tokenizer::from_pieces({"[PAD]", "[UNK]", "China", "Beijing"});
  auto enc = tok.encode("China");
  REQUIRE(enc.size() == 1);
  CHECK(enc.tokens[0] == "China");
  CHECK(enc.offsets[0] == CharSpan{0, 5});
  CHECK(enc.ids[0] == tok.id_of("China"));
}

TEST_CASE("rare word splits into pieces that tile the word") {
  auto tok = Tokenizer::from_pieces({"[PAD]", "[UNK]", "un", "##believ", "##able", "##a", "##b"});
  const std::string text = "so unbelievable";
  auto enc = tok.encode(text);
  // "so" has no pieces at all: each character becomes [UNK].
  REQUIRE(enc.size() == 5);
  CHECK(enc.tokens[2] == "un");
  CHECK(enc.tokens[3] == "##believ");
  CHECK(enc.tokens[4] == "##able");
  CHECK(enc.offsets[2].begin == 3);
  for (std::size_t i = 3; i < enc.size(); ++i) CHECK(enc.offsets[i].begin == enc.offsets[i - 1].end);
  CHECK(enc.offsets.back().end == text.size());
}

TEST_CASE("unknown characters become the unknown token and are never dropped") {
  auto tok = Tokenizer::from_pieces({"[PAD]", "[UNK]", "a"});
  auto enc = tok.encode("a ? é");
  REQUIRE(enc.size() == 3);
  CHECK(enc.ids[1] == tok.unk_id());
  CHECK(enc.ids[2] == tok.unk_id());
  CHECK(enc.offsets[2] == CharSpan{4, 6});
}

TEST_CASE("offset slices reproduce the non-whitespace content") {
  const std::vector<std::string> corpus = {"The quick brown fox , jumps over the lazy dog .",
                                           "Quickly the dogs jumped ; foxes watched ."};
  auto tok = Tokenizer::train(corpus, 30);
  for (const auto& text : corpus) {
    auto enc = tok.encode(text);
    std::string joined;
    for (auto o : enc.offsets) joined += slice(text, o);
    CHECK(joined == strip_spaces(text));
  }
}

TEST_CASE("trained vocabulary respects the budget and is deterministic") {
  const std::vector<std::string> corpus = {"alpha beta gamma alpha", "beta delta epsilon alpha"};
  auto a = Tokenizer::train(corpus, 12);
  auto b = Tokenizer::train(corpus, 12);
  CHECK(a.vocab_size() <= 12);
  CHECK(a.pieces() == b.pieces());
  CHECK(a.pieces()[0] == "[PAD]");
  CHECK(a.id_of("alpha") != a.unk_id());
  // Every word still encodes without unknown tokens.
  for (const auto& text : corpus) {
    for (int id : a.encode(text).ids) CHECK(id != a.unk_id());
  }
}

TEST_CASE("empty text is an error") {
  auto tok = Tokenizer::word_level();
  CHECK_THROWS_AS(tok.encode(""), RangeError);
  CHECK_THROWS_AS(tok.encode("   "), RangeError);
}

TEST_CASE("word-level mode emits one token per pre-token") {
  auto tok = Tokenizer::word_level();
  auto enc = tok.encode("Beijing is the capital of China");
  CHECK(enc.size() == 6);
  CHECK(enc.tokens[5] == "China");
  CHECK(tok.word_level_mode());
}

TEST_CASE("vocab file round trip") {
  auto path = std::filesystem::temp_directory_path() / "spanlink_vocab_test.txt";
  {
    std::ofstream out(path);
    out << "[PAD]\n[UNK]\nhello\n##s\n";
  }
  auto tok = Tokenizer::from_vocab_file(path);
  auto enc = tok.encode("hellos");
  CHECK(enc.tokens == std::vector<std::string>{"hello", "##s"});
  std::filesystem::remove(path);
  CHECK_THROWS_AS(Tokenizer::from_vocab_file(path), DatasetError);
}
