#pragma once

#include <array>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spanlink/corpus.hpp"
#include "spanlink/decoder.hpp"
#include "spanlink/model.hpp"

namespace spanlink {

enum class MatchMode { kExactSpan, kLastWord };

MatchMode parse_match_mode(std::string_view s);
std::string_view to_string(MatchMode m);

// Triples in character space so gold files and prediction files can be
// compared without agreeing on a tokenizer.
struct EvalTriple {
  CharSpan head;
  std::string relation;
  CharSpan tail;

  friend bool operator==(const EvalTriple&, const EvalTriple&) = default;
  friend auto operator<=>(const EvalTriple&, const EvalTriple&) = default;
};

struct EvalSentence {
  std::string id;
  std::string text;
  std::vector<EvalTriple> triples;
};

EvalSentence to_eval(const Sentence& gold, const RelationSchema& schema);
EvalSentence to_eval(const Sentence& sentence, std::span<const PredictedTriple> predicted, const RelationSchema& schema);
EvalSentence to_eval(const StoredSentence& stored);
std::vector<EvalSentence> to_eval(std::span<const Sentence> golds, const RelationSchema& schema);

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t matched = 0;
  std::size_t predicted = 0;
  std::size_t gold = 0;

  // Zero denominators give zero, so F1 is always defined.
  static Prf from_counts(std::size_t matched, std::size_t predicted, std::size_t gold);
};

struct EvalReport {
  Prf overall;
  std::map<std::string, Prf> per_split;
};

// Fixed split names in reporting order.
inline const std::array<std::string, 9> kSplitNames = {"Normal", "EPO", "SEO", "HTO", "N=1",
                                                       "N=2",    "N=3", "N=4", "N>=5"};

// Micro precision/recall/F1 over (head, relation, tail). Sentences are paired
// by id; any id present on only one side raises DatasetError listing them.
EvalReport micro_prf(std::span<const EvalSentence> predictions, std::span<const EvalSentence> golds,
                     MatchMode mode = MatchMode::kExactSpan);

enum class SplitBy { kPattern, kTripleCount };

// Overall metrics plus one entry per populated split. Pattern splits are
// non-exclusive; count splits use the gold triple count.
EvalReport split_report(std::span<const EvalSentence> predictions, std::span<const EvalSentence> golds,
                        SplitBy split_by, MatchMode mode = MatchMode::kExactSpan);

PatternLabel classify_pattern(const EvalSentence& sentence);

struct SubtaskReport {
  Prf pairs;      // (h, t), relation ignored, multiset
  Prf relations;  // r, entities ignored, multiset
  Prf triples;    // (h, r, t), set
};

SubtaskReport subtask_report(std::span<const EvalSentence> predictions, std::span<const EvalSentence> golds,
                             MatchMode mode = MatchMode::kExactSpan);

struct ErrorTaxonomy {
  std::size_t span_splitting = 0;
  std::size_t entity_not_found = 0;
  std::size_t entity_role = 0;

  std::size_t total() const { return span_splitting + entity_not_found + entity_role; }
  friend bool operator==(const ErrorTaxonomy&, const ErrorTaxonomy&) = default;
};

// Classifies every gold entity occurrence (one per role per gold triple)
// that no prediction reproduces in the same role, using the first matching
// category: span splitting, entity not found, entity role.
ErrorTaxonomy error_taxonomy(std::span<const EvalSentence> predictions, std::span<const EvalSentence> golds,
                             MatchMode mode = MatchMode::kExactSpan);

struct LengthDistribution {
  std::map<int, std::size_t> histogram;  // token length -> distinct gold entities
  std::size_t total = 0;
  std::map<int, int> coverage;  // percent -> smallest C covering it (95, 99, 100)
};

LengthDistribution length_distribution(std::span<const Sentence> sentences);

struct TimingReport {
  double mean_ms = 0.0;    // per sentence, averaged over repetitions
  double stddev_ms = 0.0;  // across repetitions
  std::size_t repetitions = 0;
  std::size_t sentences = 0;
};

// Times the full predict_sentence pipeline after warmup passes.
TimingReport timing_harness(const Model& model, std::span<const Sentence> sentences, int repetitions, int c_infer,
                            double theta = kDefaultThreshold, int warmup = 1);

struct ThetaPoint {
  double theta = 0.0;
  Prf prf;
};

struct ThetaSweep {
  std::vector<ThetaPoint> curve;
  double best_theta = 0.0;
  double best_f1 = 0.0;
};

// Re-thresholds scored predictions at each grid point (keeping score > theta)
// and picks the best F1, ties going to the larger theta. The predictions
// must have been produced at a threshold no larger than the smallest grid
// point, otherwise cells below it are missing and ConfigError is raised.
ThetaSweep sweep_theta(std::span<const EvalSentence> golds, const PredictionFile& scored, std::span<const double> grid,
                       MatchMode mode = MatchMode::kExactSpan);

}  // namespace spanlink
