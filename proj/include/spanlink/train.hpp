#pragma once

#include <memory>
#include <ostream>
#include <span>
#include <vector>

#include "spanlink/config.hpp"
#include "spanlink/decoder.hpp"
#include "spanlink/evaluation.hpp"
#include "spanlink/model.hpp"

namespace spanlink {

// Adaptive-moment optimizer over a ModelParams tree.
class Adam {
 public:
  Adam(const ModelParams& like, double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

  // update_encoder = false leaves encoder tensors untouched (frozen encoder).
  void step(ModelParams& params, const ModelParams& grad, bool update_encoder = true);
  long steps() const { return t_; }

 private:
  ModelParams m_, v_;
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
};

struct TrainResult {
  std::unique_ptr<Model> model;  // best-validation parameters, else the final ones
  int best_epoch = 0;
  double best_valid_f1 = -1.0;  // -1 when no validation set was given
  long steps = 0;
  double final_loss = 0.0;
};

// Mini-batch optimization of the mean link loss. Negatives are re-drawn
// each epoch from a stream keyed by (seed, sentence id, epoch). Log lines are
// JSON objects: {"epoch","step","batch","loss"} per step and
// {"epoch","valid_f1"} per evaluation. A non-finite loss raises NumericError
// naming the batch.
TrainResult train_model(const RunConfig& config, std::span<const Sentence> train, std::span<const Sentence> valid,
                        Tokenizer tokenizer, RelationSchema schema, std::ostream* log = nullptr,
                        std::shared_ptr<const PretrainedAdapter> adapter = nullptr);

// Predicts every sentence at the given candidate length and threshold.
std::vector<SentencePrediction> predict_all(const Model& model, std::span<const Sentence> sentences, int c_infer,
                                            double theta);

// Micro scores of a model against aligned gold sentences.
Prf evaluate_model(const Model& model, std::span<const Sentence> sentences, int c_infer, double theta,
                   MatchMode mode = MatchMode::kExactSpan);

}  // namespace spanlink
