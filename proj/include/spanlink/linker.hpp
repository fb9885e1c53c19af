#pragma once

#include <random>
#include <span>
#include <string>
#include <vector>

#include "spanlink/candidates.hpp"
#include "spanlink/encoder.hpp"

namespace spanlink {

struct LinkerParams {
  Matrix head_weight;  // d x d_e
  Matrix head_bias;    // 1 x d_e
  Matrix tail_weight;  // d x d_e
  Matrix tail_bias;    // 1 x d_e
  std::vector<Matrix> link;  // one d_e x d_e matrix per relation

  template <typename Self, typename F>
  static void visit(Self& self, F&& f) {
    f(std::string("linker.head_weight"), self.head_weight);
    f(std::string("linker.head_bias"), self.head_bias);
    f(std::string("linker.tail_weight"), self.tail_weight);
    f(std::string("linker.tail_bias"), self.tail_bias);
    for (std::size_t k = 0; k < self.link.size(); ++k) f("linker.link" + std::to_string(k), self.link[k]);
  }

  int input_width() const { return static_cast<int>(head_weight.rows()); }
  int entity_width() const { return static_cast<int>(head_weight.cols()); }
  int relations() const { return static_cast<int>(link.size()); }
};

enum class LinkInit { kUniform, kZero };

// Projections and link matrices uniform in +-1/sqrt(fan_in), biases zero.
// kZero zeroes the link matrices so every initial probability is exactly 0.5.
LinkerParams init_linker(int input_width, int entity_width, int relations, std::mt19937_64& rng,
                         LinkInit link_init = LinkInit::kUniform);

struct Projection {
  Matrix head;  // |E| x d_e
  Matrix tail;  // |E| x d_e
};

// Row-wise affine maps into the head and tail spaces.
Projection project(const Matrix& entities, const LinkerParams& params);

// logits[k](i, j) = head_i . U_k . tail_j
std::vector<Matrix> link_logits(const Projection& proj, std::span<const Matrix> link);

// probs[k](i, j) = sigmoid(head_i U_k tail_j), axis order (head, relation, tail).
class LinkScoreTensor {
 public:
  LinkScoreTensor() = default;
  explicit LinkScoreTensor(std::vector<Matrix> probs) : probs_(std::move(probs)) {}

  Eigen::Index entities() const { return probs_.empty() ? 0 : probs_.front().rows(); }
  int relations() const { return static_cast<int>(probs_.size()); }
  double at(Eigen::Index head, int relation, Eigen::Index tail) const { return probs_[relation](head, tail); }
  double& at(Eigen::Index head, int relation, Eigen::Index tail) { return probs_[relation](head, tail); }
  const Matrix& slice(int relation) const { return probs_[relation]; }

 private:
  std::vector<Matrix> probs_;
};

// Throws NumericError if any logit is not finite.
LinkScoreTensor score(const Projection& proj, std::span<const Matrix> link);
LinkScoreTensor sigmoid(std::span<const Matrix> logits);

// labels[k](i, j) = 1 iff (span_i, r_k, span_j) is a gold triple.
class GoldLabelTensor {
 public:
  GoldLabelTensor(Eigen::Index entities, int relations) : labels_(relations, Matrix::Zero(entities, entities)) {}

  static GoldLabelTensor from_sentence(const Sentence& sentence, const CandidateSet& candidates, int relations);

  Eigen::Index entities() const { return labels_.empty() ? 0 : labels_.front().rows(); }
  int relations() const { return static_cast<int>(labels_.size()); }
  double at(Eigen::Index head, int relation, Eigen::Index tail) const { return labels_[relation](head, tail); }
  void set(Eigen::Index head, int relation, Eigen::Index tail, bool value) {
    labels_[relation](head, tail) = value ? 1.0 : 0.0;
  }
  const Matrix& slice(int relation) const { return labels_[relation]; }

 private:
  std::vector<Matrix> labels_;
};

// Mean binary cross-entropy over all |E| * K * |E| cells, evaluated directly
// from probabilities. Throws ShapeError on mismatched shapes.
double loss(const LinkScoreTensor& probs, const GoldLabelTensor& labels);

// Same quantity evaluated stably from logits: softplus(z) - y * z.
double loss_from_logits(std::span<const Matrix> logits, const GoldLabelTensor& labels);

struct LinkerGrad {
  LinkerParams params;  // same shapes as the forward parameters
  Matrix entities;      // dL/dE, |E| x d
};

// Gradient of loss_from_logits with respect to the linker parameters and the
// entity matrix. Accumulates into grad.params (which must be shaped like
// params) and overwrites grad.entities.
void linker_backward(const Matrix& entities, const Projection& proj, std::span<const Matrix> logits,
                     const GoldLabelTensor& labels, const LinkerParams& params, double scale, LinkerGrad& grad);

}  // namespace spanlink
