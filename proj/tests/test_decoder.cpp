#include <doctest.h>

#include <filesystem>
#include <random>
#include <set>
#include <tuple>

#include "spanlink/decoder.hpp"
#include "spanlink/error.hpp"

using namespace spanlink;

namespace {

using Key = std::tuple<int, int, int, int, int>;

std::set<Key> scan(const LinkScoreTensor& t, const std::vector<Span>& spans, double theta) {
  std::set<Key> out;
  for (int i = 0; i < t.entities(); ++i) {
    for (int k = 0; k < t.relations(); ++k) {
      for (int j = 0; j < t.entities(); ++j) {
        if (t.at(i, k, j) > theta) out.insert({spans[i].start, spans[i].end, k, spans[j].start, spans[j].end});
      }
    }
  }
  return out;
}

LinkScoreTensor random_tensor(int n, int K, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Matrix> probs;
  for (int k = 0; k < K; ++k) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) m(i, j) = u(rng);
    }
    probs.push_back(m);
  }
  return LinkScoreTensor(std::move(probs));
}

}  // namespace

TEST_CASE("decode equals the exhaustive scan on a 5x3x5 tensor") {
  std::mt19937_64 rng(17);
  auto t = random_tensor(5, 3, rng);
  auto spans = enumerate_spans(3, 2);
  spans.resize(5);
  auto got = decode(t, spans, 0.5);
  std::set<Key> keys;
  for (const auto& p : got) keys.insert(p.key());
  CHECK(keys.size() == got.size());
  CHECK(keys == scan(t, spans, 0.5));
  CHECK(std::is_sorted(got.begin(), got.end(), [](const auto& a, const auto& b) { return a.key() < b.key(); }));
}

TEST_CASE("a cell exactly at the threshold is excluded") {
  LinkScoreTensor t(std::vector<Matrix>{Matrix{{0.5, 0.5000001}, {0.4999999, 0.9}}});
  std::vector<Span> spans{{0, 0}, {1, 1}};
  auto got = decode(t, spans, 0.5);
  REQUIRE(got.size() == 2);
  CHECK(got[0].head == Span{0, 0});
  CHECK(got[0].tail == Span{1, 1});
  CHECK(got[1].head == Span{1, 1});
}

TEST_CASE("all-zero tensor decodes to nothing") {
  LinkScoreTensor t(std::vector<Matrix>(2, Matrix::Zero(3, 3)));
  CHECK(decode(t, enumerate_spans(2, 2), 0.5).empty());
}

TEST_CASE("both relations of an overlapping pair are emitted") {
  std::vector<Matrix> probs(2, Matrix::Constant(3, 3, 0.1));
  probs[0](0, 2) = 0.8;
  probs[1](0, 2) = 0.7;
  std::vector<Span> spans{{0, 0}, {1, 1}, {2, 2}};
  auto got = decode(LinkScoreTensor(probs), spans, 0.5);
  REQUIRE(got.size() == 2);
  CHECK(got[0].relation == 0);
  CHECK(got[1].relation == 1);
  CHECK(got[0].head == got[1].head);
  CHECK(got[0].tail == got[1].tail);
}

TEST_CASE("invalid threshold or shapes are rejected") {
  LinkScoreTensor t(std::vector<Matrix>(1, Matrix::Zero(2, 2)));
  std::vector<Span> spans{{0, 0}, {1, 1}};
  CHECK_THROWS_AS(decode(t, spans, 0.0), RangeError);
  CHECK_THROWS_AS(decode(t, spans, 1.0), RangeError);
  CHECK_THROWS_AS(decode(t, std::vector<Span>{{0, 0}}, 0.5), ShapeError);
}

TEST_CASE("decode agrees with the scan on many random tensors and thresholds") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const int L = 2 + trial % 5;
    auto spans = enumerate_spans(L, 3);
    auto t = random_tensor(static_cast<int>(spans.size()), 1 + trial % 4, rng);
    const double theta = 0.05 + 0.9 * (trial % 10) / 10.0;
    std::set<Key> keys;
    for (const auto& p : decode(t, spans, theta)) keys.insert(p.key());
    CHECK(keys == scan(t, spans, theta));
  }
}

TEST_CASE("prediction file round trip") {
  Sentence s;
  s.id = "x1";
  s.text = "Ann lives in Rome";
  s.tokens = {"Ann", "lives", "in", "Rome"};
  s.char_offsets = {{0, 3}, {4, 9}, {10, 12}, {13, 17}};
  RelationSchema schema({"lives_in"});
  std::vector<SentencePrediction> preds{{"x1", s.text, {{{0, 0}, 0, {3, 3}, 0.875}}}};
  auto path = std::filesystem::temp_directory_path() / "spanlink_pred_test.json";
  write_predictions(path, preds, std::vector<Sentence>{s}, schema, 0.5);
  auto file = read_predictions(path);
  CHECK(file.version == kPredictionFormatVersion);
  CHECK(file.theta == 0.5);
  CHECK(file.relations == std::vector<std::string>{"lives_in"});
  REQUIRE(file.sentences.size() == 1);
  REQUIRE(file.sentences[0].triples.size() == 1);
  const auto& t = file.sentences[0].triples[0];
  CHECK(t.head_text == "Ann");
  CHECK(t.tail_text == "Rome");
  CHECK(t.tail_char == CharSpan{13, 17});
  CHECK(t.tail_span == Span{3, 3});
  CHECK(t.relation == "lives_in");
  CHECK(t.score == 0.875);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_predictions(path), DatasetError);
}
