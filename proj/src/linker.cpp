#include "spanlink/linker.hpp"

#include <cmath>

#include "spanlink/error.hpp"

namespace spanlink {

namespace {

Matrix uniform(Eigen::Index rows, Eigen::Index cols, double bound, std::mt19937_64& rng) {
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      m(r, c) = (2.0 * u - 1.0) * bound;
    }
  }
  return m;
}

double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double stable_sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void check_labels(Eigen::Index n, int k, const GoldLabelTensor& labels) {
  if (labels.entities() != n || labels.relations() != k) {
    throw ShapeError("label tensor " + std::to_string(labels.entities()) + "x" + std::to_string(labels.relations()) +
                     "x" + std::to_string(labels.entities()) + " does not match scores " + std::to_string(n) + "x" +
                     std::to_string(k) + "x" + std::to_string(n));
  }
}

}  // namespace

LinkerParams init_linker(int input_width, int entity_width, int relations, std::mt19937_64& rng, LinkInit link_init) {
  if (input_width <= 0 || entity_width <= 0 || relations <= 0) {
    throw ConfigError("linker dimensions and relation count must be positive");
  }
  LinkerParams p;
  const double in_bound = 1.0 / std::sqrt(static_cast<double>(input_width));
  const double link_bound = 1.0 / std::sqrt(static_cast<double>(entity_width));
  p.head_weight = uniform(input_width, entity_width, in_bound, rng);
  p.head_bias = Matrix::Zero(1, entity_width);
  p.tail_weight = uniform(input_width, entity_width, in_bound, rng);
  p.tail_bias = Matrix::Zero(1, entity_width);
  for (int k = 0; k < relations; ++k) {
    p.link.push_back(link_init == LinkInit::kZero ? Matrix::Zero(entity_width, entity_width)
                                                  : uniform(entity_width, entity_width, link_bound, rng));
  }
  return p;
}

Projection project(const Matrix& entities, const LinkerParams& params) {
  if (entities.cols() != params.head_weight.rows()) {
    throw ShapeError("entity width " + std::to_string(entities.cols()) + " does not match projection input " +
                     std::to_string(params.head_weight.rows()));
  }
  Projection p;
  p.head = entities * params.head_weight;
  p.head.rowwise() += params.head_bias.row(0);
  p.tail = entities * params.tail_weight;
  p.tail.rowwise() += params.tail_bias.row(0);
  return p;
}

std::vector<Matrix> link_logits(const Projection& proj, std::span<const Matrix> link) {
  std::vector<Matrix> out;
  out.reserve(link.size());
  for (const Matrix& u : link) {
    if (u.rows() != proj.head.cols() || u.cols() != proj.tail.cols()) {
      throw ShapeError("link matrix " + std::to_string(u.rows()) + "x" + std::to_string(u.cols()) +
                       " does not match entity width " + std::to_string(proj.head.cols()));
    }
    out.push_back((proj.head * u) * proj.tail.transpose());
  }
  return out;
}

LinkScoreTensor sigmoid(std::span<const Matrix> logits) {
  std::vector<Matrix> probs;
  probs.reserve(logits.size());
  for (const Matrix& z : logits) {
    if (!z.allFinite()) throw NumericError("non-finite link logit");
    probs.push_back(z.unaryExpr([](double v) { return stable_sigmoid(v); }));
  }
  return LinkScoreTensor(std::move(probs));
}

LinkScoreTensor score(const Projection& proj, std::span<const Matrix> link) {
  auto logits = link_logits(proj, link);
  return sigmoid(logits);
}

GoldLabelTensor GoldLabelTensor::from_sentence(const Sentence& sentence, const CandidateSet& candidates,
                                               int relations) {
  GoldLabelTensor labels(static_cast<Eigen::Index>(candidates.size()), relations);
  for (const auto& t : sentence.gold_triples) {
    const int h = candidates.index_of(t.head);
    const int tl = candidates.index_of(t.tail);
    // Gold spans longer than the inference bound have no cell.
    if (h < 0 || tl < 0) continue;
    labels.set(h, t.relation, tl, true);
  }
  return labels;
}

double loss(const LinkScoreTensor& probs, const GoldLabelTensor& labels) {
  const Eigen::Index n = probs.entities();
  const int K = probs.relations();
  check_labels(n, K, labels);
  if (n == 0) return 0.0;
  double total = 0.0;
  for (int k = 0; k < K; ++k) {
    const Matrix& p = probs.slice(k);
    const Matrix& y = labels.slice(k);
    total += (y.array() * p.array().log() + (1.0 - y.array()) * (1.0 - p.array()).log()).sum();
  }
  return -total / static_cast<double>(n * K * n);
}

double loss_from_logits(std::span<const Matrix> logits, const GoldLabelTensor& labels) {
  const int K = static_cast<int>(logits.size());
  const Eigen::Index n = K ? logits.front().rows() : 0;
  check_labels(n, K, labels);
  if (n == 0) return 0.0;
  double total = 0.0;
  for (int k = 0; k < K; ++k) {
    const Matrix& z = logits[k];
    const Matrix& y = labels.slice(k);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) total += softplus(z(i, j)) - y(i, j) * z(i, j);
    }
  }
  return total / static_cast<double>(n * K * n);
}

void linker_backward(const Matrix& entities, const Projection& proj, std::span<const Matrix> logits,
                     const GoldLabelTensor& labels, const LinkerParams& params, double scale, LinkerGrad& grad) {
  const int K = static_cast<int>(logits.size());
  const Eigen::Index n = entities.rows();
  Matrix d_head = Matrix::Zero(n, proj.head.cols());
  Matrix d_tail = Matrix::Zero(n, proj.tail.cols());
  if (n > 0) {
    const double norm = scale / static_cast<double>(n * K * n);
    for (int k = 0; k < K; ++k) {
      Matrix dz = logits[k].unaryExpr([](double v) { return stable_sigmoid(v); }) - labels.slice(k);
      dz *= norm;
      const Matrix& u = params.link[k];
      const Matrix tail_u = proj.tail * u.transpose();  // rows: U_k tail_j
      grad.params.link[k].noalias() += proj.head.transpose() * dz * proj.tail;
      d_head.noalias() += dz * tail_u;
      d_tail.noalias() += dz.transpose() * (proj.head * u);
    }
  }
  grad.params.head_weight.noalias() += entities.transpose() * d_head;
  grad.params.head_bias += d_head.colwise().sum();
  grad.params.tail_weight.noalias() += entities.transpose() * d_tail;
  grad.params.tail_bias += d_tail.colwise().sum();
  grad.entities = d_head * params.head_weight.transpose() + d_tail * params.tail_weight.transpose();
}

}  // namespace spanlink
