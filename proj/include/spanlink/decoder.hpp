#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "spanlink/candidates.hpp"
#include "spanlink/linker.hpp"
#include "spanlink/model.hpp"

namespace spanlink {

inline constexpr double kDefaultThreshold = 0.5;

struct PredictedTriple {
  Span head;
  int relation = 0;
  Span tail;
  double score = 0.0;

  auto key() const { return std::tuple(head.start, head.end, relation, tail.start, tail.end); }
  friend bool operator==(const PredictedTriple&, const PredictedTriple&) = default;
};

// Every cell with probability strictly above theta, mapped through the span
// table, ordered by (head.start, head.end, relation, tail.start, tail.end).
// Throws RangeError unless 0 < theta < 1.
std::vector<PredictedTriple> decode(const LinkScoreTensor& probs, std::span<const Span> spans, double theta);

// Enumerate, encode, represent, project, score and threshold in one pass.
std::vector<PredictedTriple> predict_sentence(const Sentence& sentence, const Model& model, int c_infer,
                                              double theta);

struct SentencePrediction {
  std::string id;
  std::string text;
  std::vector<PredictedTriple> triples;
};

// Versioned JSON prediction file. Each triple carries head/tail text, token
// spans (inclusive), character spans (half-open), relation name and score.
inline constexpr int kPredictionFormatVersion = 1;

void write_predictions(const std::filesystem::path& path, std::span<const SentencePrediction> predictions,
                       std::span<const Sentence> sentences, const RelationSchema& schema, double theta);

// Predictions as stored on disk, independent of any tokenizer.
struct StoredTriple {
  std::string head_text;
  Span head_span;
  CharSpan head_char;
  std::string relation;
  std::string tail_text;
  Span tail_span;
  CharSpan tail_char;
  double score = 0.0;
};

struct StoredSentence {
  std::string id;
  std::string text;
  std::vector<StoredTriple> triples;
};

struct PredictionFile {
  int version = kPredictionFormatVersion;
  double theta = kDefaultThreshold;
  std::vector<std::string> relations;
  std::vector<StoredSentence> sentences;
};

PredictionFile read_predictions(const std::filesystem::path& path);

}  // namespace spanlink
