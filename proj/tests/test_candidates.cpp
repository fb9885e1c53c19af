#include <doctest.h>

#include <cmath>
#include <set>

#include "spanlink/candidates.hpp"
#include "spanlink/error.hpp"

using namespace spanlink;

namespace {

// Independent double loop over (start, length).
std::set<Span> brute_force(int L, int C) {
  std::set<Span> out;
  for (int len = 1; len <= C; ++len) {
    for (int s = 0; s + len <= L; ++s) out.insert({s, s + len - 1});
  }
  return out;
}

Sentence plain_sentence(int L, std::vector<GoldTriple> triples = {}) {
  Sentence s;
  s.id = "s";
  for (int i = 0; i < L; ++i) {
    s.tokens.push_back("t" + std::to_string(i));
    s.token_ids.push_back(0);
    s.char_offsets.push_back({0, 0});
  }
  s.gold_triples = std::move(triples);
  return s;
}

}  // namespace

TEST_CASE("capital example enumerates the eleven candidates") {
  auto spans = enumerate_spans(6, 2);
  CHECK(spans.size() == 11);
  std::vector<Span> expected{{0, 0}, {0, 1}, {1, 1}, {1, 2}, {2, 2}, {2, 3}, {3, 3}, {3, 4}, {4, 4}, {4, 5}, {5, 5}};
  CHECK(spans == expected);
}

TEST_CASE("enumeration agrees with brute force") {
  CHECK(enumerate_spans(10, 4).size() == 34);
  CHECK(brute_force(10, 4).size() == 34);
  for (int L = 1; L <= 20; ++L) {
    for (int C = 1; C <= L + 2; ++C) {
      auto got = enumerate_spans(L, C);
      std::set<Span> as_set(got.begin(), got.end());
      CHECK(as_set.size() == got.size());
      CHECK(as_set == brute_force(L, std::min(C, L)));
      CHECK(std::is_sorted(got.begin(), got.end()));
    }
  }
}

TEST_CASE("oversized C is clamped and reported") {
  bool clamped = false;
  CHECK(enumerate_spans(3, 5, &clamped).size() == 6);
  CHECK(clamped);
  enumerate_spans(3, 2, &clamped);
  CHECK_FALSE(clamped);
  CHECK_THROWS_AS(enumerate_spans(0, 2), RangeError);
  CHECK_THROWS_AS(enumerate_spans(4, 0), RangeError);
}

TEST_CASE("count formula values") {
  CHECK(count_formula(6, 2) == 11);
  CHECK(count_formula(9, 5) == 35);
  CHECK(count_formula(10, 4) == 34);
  CHECK_THROWS_AS(count_formula(4, 4), RangeError);
  for (int L = 2; L <= 64; ++L) {
    for (int C = 1; C < L; ++C) CHECK(count_formula(L, C) == static_cast<std::int64_t>(brute_force(L, C).size()));
  }
}

TEST_CASE("training set keeps gold and takes all negatives when few exist") {
  auto s = plain_sentence(40, {{{3, 3}, 0, {17, 17}}});
  auto rng = derive_rng(1, "t");
  auto cand = sample_training_set(s, 1, 100, rng);
  CHECK(cand.size() == 40);
  CHECK(std::count(cand.gold_mask.begin(), cand.gold_mask.end(), true) == 2);
  CHECK(cand.gold_mask[cand.index_of({3, 3})]);
  CHECK(cand.gold_mask[cand.index_of({17, 17})]);
}

TEST_CASE("training set draws exactly n_neg distinct non-gold spans") {
  auto s = plain_sentence(30, {{{0, 1}, 0, {5, 5}}, {{5, 5}, 1, {9, 11}}});
  auto rng = derive_rng(3, "t");
  auto cand = sample_training_set(s, 4, 20, rng);
  CHECK(cand.size() == 3 + 20);
  std::set<Span> unique(cand.spans.begin(), cand.spans.end());
  CHECK(unique.size() == cand.size());
  CHECK(std::is_sorted(cand.spans.begin(), cand.spans.end()));
  // A gold span longer than C_train stays in the set.
  CHECK(cand.index_of({9, 11}) >= 0);
}

TEST_CASE("same seed gives the same training set") {
  auto s = plain_sentence(25, {{{0, 0}, 0, {4, 4}}});
  auto r1 = derive_rng(11, "x", 2);
  auto r2 = derive_rng(11, "x", 2);
  CHECK(sample_training_set(s, 5, 10, r1).spans == sample_training_set(s, 5, 10, r2).spans);
  auto r3 = derive_rng(11, "x", 3);
  auto r4 = derive_rng(11, "x", 2);
  CHECK(sample_training_set(s, 5, 10, r3).spans != sample_training_set(s, 5, 10, r4).spans);
}

TEST_CASE("negative sampling is uniform over non-gold spans") {
  // 20 candidates, 2 gold, 18 negatives, 6 drawn per trial: p = 1/3.
  auto s = plain_sentence(20, {{{0, 0}, 0, {1, 1}}});
  const int trials = 6000;
  std::map<Span, int> hits;
  auto rng = derive_rng(99, "uniformity");
  for (int t = 0; t < trials; ++t) {
    auto cand = sample_training_set(s, 1, 6, rng);
    for (std::size_t i = 0; i < cand.size(); ++i) {
      if (!cand.gold_mask[i]) ++hits[cand.spans[i]];
    }
  }
  CHECK(hits.size() == 18);
  const double p = 6.0 / 18.0;
  const double mean = trials * p;
  const double sd = std::sqrt(trials * p * (1 - p));
  for (const auto& [span, n] : hits) CHECK(std::abs(n - mean) < 4 * sd);
}

TEST_CASE("inference set equals full enumeration") {
  auto cand = inference_set(plain_sentence(6), 2);
  CHECK(cand.size() == 11);
  CHECK(cand.gold_mask.empty());
  CHECK(cand.mode == CandidateMode::kInference);
}

TEST_CASE("uniform_index stays in range") {
  auto rng = derive_rng(0, "");
  for (int i = 0; i < 1000; ++i) CHECK(uniform_index(rng, 7) < 7);
  CHECK_THROWS_AS(uniform_index(rng, 0), RangeError);
}
