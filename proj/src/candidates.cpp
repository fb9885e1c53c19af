#include "spanlink/candidates.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include "spanlink/error.hpp"

namespace spanlink {

int CandidateSet::index_of(const Span& s) const {
  auto it = std::lower_bound(spans.begin(), spans.end(), s);
  if (it == spans.end() || *it != s) return -1;
  return static_cast<int>(it - spans.begin());
}

std::vector<Span> enumerate_spans(int length, int max_span, bool* clamped) {
  if (length <= 0) throw RangeError("cannot enumerate spans of an empty sentence");
  if (max_span <= 0) throw RangeError("maximum span length must be positive");
  if (clamped) *clamped = max_span > length;
  max_span = std::min(max_span, length);
  std::vector<Span> out;
  for (int s = 0; s < length; ++s) {
    for (int e = s; e < std::min(length, s + max_span); ++e) out.push_back({s, e});
  }
  return out;
}

std::int64_t count_formula(int length, int max_span) {
  if (max_span < 1 || max_span >= length) throw RangeError("count formula requires 1 <= C < L");
  const std::int64_t L = length, C = max_span;
  // C/2 - C^2/2 = C(1 - C)/2, and C(1 - C) is always even.
  return L * C + (C * (1 - C)) / 2;
}

std::mt19937_64 derive_rng(std::uint64_t seed, std::string_view salt, std::uint64_t salt2) {
  // FNV-1a over the salt, mixed with splitmix64.
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : salt) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  auto mix = [](std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  };
  std::seed_seq seq{static_cast<std::uint32_t>(mix(seed)), static_cast<std::uint32_t>(mix(seed) >> 32),
                    static_cast<std::uint32_t>(mix(h)), static_cast<std::uint32_t>(mix(h) >> 32),
                    static_cast<std::uint32_t>(mix(salt2)), static_cast<std::uint32_t>(mix(salt2) >> 32)};
  return std::mt19937_64(seq);
}

std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  if (n == 0) throw RangeError("uniform_index over an empty range");
  const std::uint64_t range = n;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % range;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return static_cast<std::size_t>(x % range);
}

CandidateSet sample_training_set(const Sentence& sentence, int c_train, int n_neg, std::mt19937_64& rng) {
  CandidateSet out;
  out.mode = CandidateMode::kTrain;
  out.max_length = std::min(c_train, sentence.length());

  std::set<Span> gold;
  for (const auto& t : sentence.gold_triples) {
    gold.insert(t.head);
    gold.insert(t.tail);
  }
  std::vector<Span> negatives;
  for (const Span& s : enumerate_spans(sentence.length(), c_train)) {
    if (!gold.count(s)) negatives.push_back(s);
  }
  const std::size_t take = std::min<std::size_t>(std::max(n_neg, 0), negatives.size());
  // Partial Fisher-Yates: the first `take` entries become the sample.
  for (std::size_t i = 0; i < take; ++i) {
    std::size_t j = i + uniform_index(rng, negatives.size() - i);
    std::swap(negatives[i], negatives[j]);
  }
  negatives.resize(take);

  std::vector<std::pair<Span, bool>> merged;
  for (const Span& s : gold) merged.emplace_back(s, true);
  for (const Span& s : negatives) merged.emplace_back(s, false);
  std::sort(merged.begin(), merged.end());
  for (auto& [s, g] : merged) {
    out.spans.push_back(s);
    out.gold_mask.push_back(g);
  }
  return out;
}

CandidateSet inference_set(const Sentence& sentence, int c_infer) {
  CandidateSet out;
  out.mode = CandidateMode::kInference;
  out.spans = enumerate_spans(sentence.length(), c_infer);
  out.max_length = std::min(c_infer, sentence.length());
  return out;
}

}  // namespace spanlink
