#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "spanlink/corpus.hpp"

namespace spanlink {

enum class CandidateMode { kTrain, kInference };

struct CandidateSet {
  std::vector<Span> spans;
  std::vector<bool> gold_mask;  // empty in inference mode
  int max_length = 0;
  CandidateMode mode = CandidateMode::kInference;

  std::size_t size() const { return spans.size(); }
  // Index of span in spans, or -1.
  int index_of(const Span& s) const;
};

// All spans of length 1..C ordered by (start, end). C >= L is clamped to L
// (the clamp is reported through `clamped` when given). Throws RangeError
// for L <= 0 or C <= 0.
std::vector<Span> enumerate_spans(int length, int max_span, bool* clamped = nullptr);

// L*C + C/2 - C^2/2, evaluated exactly in integers. Requires 1 <= C < L.
std::int64_t count_formula(int length, int max_span);

// Counter-based generator seeded from a global seed and string/integer
// salts, so every sentence gets its own reproducible stream.
std::mt19937_64 derive_rng(std::uint64_t seed, std::string_view salt, std::uint64_t salt2 = 0);

// Uniform draw in [0, n) without modulo bias. Independent of the standard
// library's distribution implementations.
std::size_t uniform_index(std::mt19937_64& rng, std::size_t n);

// Gold spans plus up to n_neg negatives sampled uniformly without
// replacement from enumerate_spans(L, C_train) minus the gold spans.
// Output is sorted by (start, end).
CandidateSet sample_training_set(const Sentence& sentence, int c_train, int n_neg, std::mt19937_64& rng);

CandidateSet inference_set(const Sentence& sentence, int c_infer);

}  // namespace spanlink
